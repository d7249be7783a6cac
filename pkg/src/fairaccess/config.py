"""Numerical tolerances and size limits used across the package."""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # relative tolerance under which two scores count as tied
    tie_rtol: float = 1e-12
    symmetry_rtol: float = 1e-10
    row_sum_rtol: float = 1e-8
    psd_atol: float = 1e-8
    identity_rtol: float = 1e-8
    # default L-norm relative error for sketch solves
    solver_delta: float = 1e-8


TOL = Tolerances()

# exact (dense) path is O(n^2) memory
DENSE_MAX_NODES = 20_000

# maximum number of k-subsets the brute-force optimum will enumerate
BRUTE_FORCE_CAP = 2_000_000

# graphs up to this size solve sketch systems with a sparse factorization
DIRECT_SOLVER_MAX_NODES = 5_000
