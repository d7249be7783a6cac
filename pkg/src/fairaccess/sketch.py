"""Approximation toolbox for the fast path.

Laplacian solves with an L-norm error contract, random sign projections,
diagonal estimation for ``L^+`` and the sketched node coordinates.

Random streams: every public routine takes one root seed. ``build_sketch``
spawns four children of ``numpy.random.SeedSequence(seed)`` in the fixed
order (coordinates over V, over S, over T, diagonal estimate), so each
projection matrix is reproducible on its own and independent of how the
solves are scheduled.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import shortest_path

from .config import DIRECT_SOLVER_MAX_NODES, TOL
from .exceptions import NoConvergence
from .graph import Graph, GroupAssignment
from .kernel import surrogate_coefficients

logger = logging.getLogger(__name__)

_CHUNK = 512
_PCG_COLUMNS = 64


@dataclass(frozen=True)
class SolverConfig:
    """Settings for :class:`LaplacianSolver`.

    Args:
        delta: Target relative error in the L-norm.
        max_iters: CG iteration cap (default ``10 n``).
        practical_tolerance_mode: Stop on ``||Lx - b|| <= delta ||b||``
            instead of the conservative mapping to the L-norm contract.
        method: ``"pcg"``, ``"direct"`` (grounded sparse LU) or ``"auto"``
            (direct up to ``DIRECT_SOLVER_MAX_NODES`` nodes).
        preconditioner: ``"jacobi"``, ``"none"`` or a callable applied to
            the residual block.
    """

    delta: float = TOL.solver_delta
    max_iters: int | None = None
    practical_tolerance_mode: bool = False
    method: str = "pcg"
    preconditioner: object = "jacobi"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.method not in ("pcg", "direct", "auto"):
            raise ValueError(f"unknown solver method {self.method!r}")


PRACTICAL_SOLVER_RTOL = 1e-6


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def spectral_bounds(g: Graph) -> tuple:
    """Cheap certified bounds ``(lo, hi)`` with ``lo <= lambda_2`` and ``lambda_max <= hi``.

    ``lambda_max <= 2 max degree``. For the algebraic connectivity we use
    ``lambda_2 >= 4 / (n diam)`` with ``diam <= 2 ecc(0)`` from one BFS.
    """
    hi = 2.0 * float(g.degrees.max()) if g.m else 1.0
    if g.n == 1:
        return 1.0, hi
    dist = shortest_path(g.adjacency_matrix, unweighted=True, directed=False, indices=0)
    diam_ub = max(1.0, min(2.0 * float(dist.max()), g.n - 1.0))
    lo = 4.0 / (g.n * diam_ub)
    return lo, hi


class LaplacianSolver:
    """Reusable solver for ``L x = b`` with ``b`` orthogonal to the ones vector.

    Returned solutions are projected onto the complement of the ones vector,
    so they approximate ``L^+ b``. With the PCG backend the stopping rule is
    ``||r|| / ||b|| <= delta sqrt(lo / hi)`` where ``lo``/``hi`` bound the
    nonzero spectrum of ``L``; this implies
    ``||x - L^+ b||_L <= delta ||L^+ b||_L``.
    """

    def __init__(self, g: Graph, config: SolverConfig | None = None):
        self.g = g
        self.config = config or SolverConfig()
        method = self.config.method
        if method == "auto":
            method = "direct" if g.n <= DIRECT_SOLVER_MAX_NODES else "pcg"
        self.method = method
        self.L = g.laplacian
        self.iterations = 0
        if method == "direct":
            self._ground = int(np.argmax(g.degrees)) if g.n > 1 else 0
            keep = np.setdiff1d(np.arange(g.n), [self._ground])
            self._keep = keep
            if len(keep):
                red = self.L[keep][:, keep].tocsc()
                self._lu = spla.splu(red, permc_spec="MMD_AT_PLUS_A")
        else:
            lo, hi = spectral_bounds(g)
            self.bounds = (lo, hi)
            if self.config.practical_tolerance_mode:
                self.rtol = self.config.delta
            else:
                self.rtol = self.config.delta * math.sqrt(lo / hi)
            pre = self.config.preconditioner
            if callable(pre):
                self._precond = pre
            elif pre == "jacobi":
                dinv = 1.0 / np.maximum(g.degrees.astype(float), 1.0)
                self._precond = lambda R: dinv[:, None] * R
            elif pre == "none":
                self._precond = lambda R: R
            else:
                raise ValueError(f"unknown preconditioner {pre!r}")

    def solve(self, B: np.ndarray) -> np.ndarray:
        """Solve for one vector (shape ``(n,)``) or a block of columns ``(n, r)``."""
        B = np.asarray(B, dtype=np.float64)
        vec = B.ndim == 1
        if vec:
            B = B[:, None]
        means = B.mean(axis=0)
        if np.any(np.abs(means) * np.sqrt(B.shape[0]) > 1e-10 * np.maximum(np.linalg.norm(B, axis=0), 1e-300)):
            warnings.warn("right-hand side not orthogonal to the ones vector; projecting",
                          RuntimeWarning, stacklevel=2)
            B = B - means
        if self.method == "direct":
            X = self._solve_direct(B)
        else:
            X = self._solve_pcg(B)
        X -= X.mean(axis=0)
        return X[:, 0] if vec else X

    def _solve_direct(self, B):
        X = np.zeros_like(B)
        if len(self._keep):
            X[self._keep] = self._lu.solve(np.ascontiguousarray(B[self._keep]))
        return X

    def _solve_pcg(self, B):
        n, r = B.shape
        X = np.zeros_like(B)
        bnorm = np.linalg.norm(B, axis=0)
        target = self.rtol * bnorm
        its = 0
        # column chunks keep the working set in cache
        for start in range(0, r, _PCG_COLUMNS):
            cols = np.arange(start, min(start + _PCG_COLUMNS, r))
            its = max(its, self._pcg_block(B, X, cols, target))
        self.iterations = its
        final = np.linalg.norm(B - self.L @ X, axis=0)
        if np.any(final > target * 1.0000001):
            worst = float(np.max(final / np.maximum(bnorm, 1e-300)))
            raise NoConvergence(f"PCG stopped after {its} iterations with relative residual "
                                f"{worst:.3g} > {self.rtol:.3g}")
        return X

    def _pcg_block(self, B, X, cols, target):
        L = self.L
        max_iters = self.config.max_iters or 10 * B.shape[0]
        its = 0
        # a restart re-derives the residual from X; it guards against drift
        # between the recursive and the true residual.
        for _ in range(4):
            R = B[:, cols] - L @ X[:, cols]
            live = np.linalg.norm(R, axis=0) > target[cols]
            idx = cols[live]
            if idx.size == 0:
                break
            R = np.ascontiguousarray(R[:, live])
            Xa = np.ascontiguousarray(X[:, idx])
            Z = self._precond(R)
            P = Z.copy()
            rz = np.einsum("ij,ij->j", R, Z)
            while idx.size and its < max_iters:
                its += 1
                AP = L @ P
                a = rz / np.einsum("ij,ij->j", P, AP)
                Xa += P * a
                AP *= a
                R -= AP
                done = np.linalg.norm(R, axis=0) <= target[idx]
                if done.any():
                    X[:, idx[done]] = Xa[:, done]
                    keep = ~done
                    idx, Xa, R, P, rz = idx[keep], Xa[:, keep], R[:, keep], P[:, keep], rz[keep]
                    if not idx.size:
                        break
                Z = self._precond(R)
                rz_new = np.einsum("ij,ij->j", R, Z)
                P *= rz_new / rz
                P += Z
                rz = rz_new
            if idx.size:
                X[:, idx] = Xa
        return its


def solve(g: Graph, b: np.ndarray, delta: float | None = None,
          config: SolverConfig | None = None) -> np.ndarray:
    """Approximate ``L^+ b`` with ``||x - L^+ b||_L <= delta ||L^+ b||_L``.

    ``b`` may be a vector or an ``(n, r)`` block; a right-hand side with a
    component along the ones vector is projected (with a warning). An
    explicit ``delta`` overrides the one in ``config``.
    """
    config = config or SolverConfig()
    if delta is not None:
        config = replace(config, delta=delta)
    return LaplacianSolver(g, config).solve(b)


def l_norm(g: Graph, x: np.ndarray) -> float:
    return float(np.sqrt(max(x @ (g.laplacian @ x), 0.0)))


def jl_dimension(n: int, eps: float) -> int:
    """``ceil(24 ln n / eps^2)`` (natural log)."""
    return max(1, math.ceil(24.0 * math.log(max(n, 2)) / eps ** 2))


def _jl_chunks(q, d, rng, chunk=_CHUNK):
    scale = 1.0 / math.sqrt(q)
    for start in range(0, q, chunk):
        rows = min(chunk, q - start)
        signs = rng.integers(0, 2, size=(rows, d), dtype=np.int8)
        yield (2.0 * signs - 1.0) * scale


def jl_matrix(q: int, n: int, seed) -> np.ndarray:
    """``q x n`` matrix of independent ``+-1/sqrt(q)`` entries."""
    if q < 1:
        raise ValueError("q must be at least 1")
    rng = np.random.default_rng(seed)
    return np.vstack(list(_jl_chunks(q, n, rng)))


def projected_rows(q: int, source, d: int, seed, chunk=_CHUNK) -> np.ndarray:
    """Rows of ``W = Q M`` for a ``q x d`` sign matrix ``Q``, compressed when ``q`` is large.

    ``source`` maps a block of ``Q`` (shape ``(c, d)``) to the matching block
    of ``W`` (shape ``(c, n)``). When ``q`` exceeds the column count of ``W``
    the result is a square factor ``C`` with ``C^T C = W^T W``: every
    quadratic form ``||W y||^2`` (and hence every sketched distance) is the
    same as with the full ``q``-row sketch, at a bounded memory cost.
    """
    rng = np.random.default_rng(seed)
    blocks = (source(c) for c in _jl_chunks(q, d, rng, chunk))
    first = next(blocks)
    ncols = first.shape[1]
    if q <= ncols:
        return np.vstack([first, *blocks])
    G = first.T @ first
    for blk in blocks:
        G += blk.T @ blk
    evals, evecs = np.linalg.eigh(G)
    keep = evals > evals.max() * 1e-14
    return (np.sqrt(evals[keep])[:, None] * evecs[:, keep].T)


def _group_rows(q, n, grp, seed):
    """Compressed rows of ``Q E^X`` (columns outside ``grp`` are zero)."""
    grp = np.asarray(grp)
    if len(grp) == n:
        rows = projected_rows(q, lambda blk: blk, n, seed)
        return rows
    sub = projected_rows(q, lambda blk: blk[:, grp], n, seed)
    out = np.zeros((sub.shape[0], n))
    out[:, grp] = sub
    return out


def app_diag(g: Graph, eps: float, seed, q: int | None = None,
             solver: LaplacianSolver | None = None, config: SolverConfig | None = None) -> np.ndarray:
    """Estimate ``diag(L^+)`` using ``L^+_vv = ||B L^+ e_v||^2``.

    Projects the ``m``-dimensional columns of ``B L^+`` with a sign matrix of
    ``q = ceil(24 ln n / eps^2)`` rows, i.e. solves ``L z_i = B^T Q_i`` for
    each row ``Q_i`` and sums ``z_i[v]^2``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    q = q or jl_dimension(g.n, eps)
    Bt = g.incidence.T.tocsr()
    W = projected_rows(q, lambda blk: (Bt @ blk.T).T, g.m, seed)
    solver = solver or LaplacianSolver(g, config)
    Z = solver.solve(np.ascontiguousarray(W.T))
    return np.einsum("ij,ij->i", Z, Z)


@dataclass(frozen=True)
class SketchState:
    """Solved sketch matrices and estimated surrogate coefficients.

    ``Z1``, ``Z2``, ``Z3`` hold one solved row per (compressed) projection
    row; the sketched coordinate of node ``i`` is
    ``(sqrt(alpha) Z1[:, i], sqrt(beta) Z2[:, i], sqrt(gamma) Z3[:, i])``.
    """

    Z1: np.ndarray
    Z2: np.ndarray
    Z3: np.ndarray
    alpha: float
    beta: float
    gamma: float
    q: int
    epsilon: float
    diag_estimate: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.Z1.shape[1]

    def coordinates(self) -> np.ndarray:
        blocks = [math.sqrt(self.alpha) * self.Z1.T]
        if self.beta > 0 and self.Z2.shape[0]:
            blocks.append(math.sqrt(self.beta) * self.Z2.T)
        if self.gamma > 0 and self.Z3.shape[0]:
            blocks.append(math.sqrt(self.gamma) * self.Z3.T)
        return np.hstack(blocks)


def theory_constants(n: int, eps: float) -> dict:
    """Sketch size and solver tolerances with the worst-case constants."""
    e3 = 3.0 * eps / 125.0
    return {
        "q": math.ceil(24.0 * math.log(n) / e3 ** 2),
        "delta_solve": eps / 125.0 * math.sqrt(6.0 * (1 - e3) / (n ** 5 * (1 + e3))),
        "eps_diag": eps / 20.0,
        "eps_hull": eps / 25.0,
    }


def build_sketch(g: Graph, ga: GroupAssignment, lam: float, eps: float, seed,
                 mode="practical", q: int | None = None,
                 solver_config: SolverConfig | None = None) -> SketchState:
    """Build sketched coordinates for the gradient surrogate.

    ``mode="practical"`` uses ``q = ceil(24 ln n / eps^2)`` for every
    projection (including the diagonal estimate) and stops the solver at
    relative residual ``PRACTICAL_SOLVER_RTOL``. ``mode="theory"`` uses the
    worst-case constants from :func:`theory_constants`; only sensible on
    small graphs.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    n = g.n
    if mode == "theory":
        c = theory_constants(n, eps)
        q = q or c["q"]
        delta, eps_diag = c["delta_solve"], c["eps_diag"]
        q_diag = jl_dimension(n, eps_diag)
        default_config = SolverConfig(delta=delta, method="auto")
    elif mode == "practical":
        q = q or jl_dimension(n, eps)
        eps_diag, q_diag = eps, q
        # solver error far below the projection error is wasted work
        default_config = SolverConfig(delta=PRACTICAL_SOLVER_RTOL, method="auto",
                                      practical_tolerance_mode=True)
    else:
        raise ValueError("mode must be 'practical' or 'theory'")
    solver_config = solver_config or default_config
    solver = LaplacianSolver(g, solver_config)
    seeds = as_seed_sequence(seed).spawn(4)

    if lam > 0:
        r = app_diag(g, eps_diag, seeds[3], q=q_diag, solver=solver)
        sums = [r[ga.S].sum(), r[ga.T].sum()]
        alpha, (beta, gamma) = surrogate_coefficients(
            r.sum(), sums, [len(ga.S), len(ga.T)], n, lam)
    else:
        r = None
        alpha, beta, gamma = 1.0, 0.0, 0.0

    def solved(rows):
        if rows.shape[0] == 0:
            return np.zeros((0, n))
        # L^+ annihilates the ones vector, so centering leaves L^+ rows^T unchanged
        rows = rows - rows.mean(axis=1, keepdims=True)
        return np.ascontiguousarray(solver.solve(np.ascontiguousarray(rows.T)).T)

    Z1 = solved(_group_rows(q, n, np.arange(n), seeds[0]))
    if lam > 0:
        Z2 = solved(_group_rows(q, n, ga.S, seeds[1]))
        Z3 = solved(_group_rows(q, n, ga.T, seeds[2]))
    else:
        Z2 = Z3 = np.zeros((0, n))
    return SketchState(Z1, Z2, Z3, float(alpha), float(beta), float(gamma), int(q), float(eps), r)


def _sq_norm_diff(Z, u, v):
    if Z.shape[0] == 0:
        return np.zeros(np.shape(u))
    d = Z[:, u] - Z[:, v]
    return np.einsum("i...,i...->...", d, d)


def delta_tilde(s: SketchState, u, v):
    """Sketched surrogate ``alpha ||Z1 b||^2 + beta ||Z2 b||^2 + gamma ||Z3 b||^2``.

    Accepts scalars or equal-length arrays of endpoints.
    """
    out = (s.alpha * _sq_norm_diff(s.Z1, u, v)
           + s.beta * _sq_norm_diff(s.Z2, u, v)
           + s.gamma * _sq_norm_diff(s.Z3, u, v))
    return float(out) if np.ndim(out) == 0 else out
