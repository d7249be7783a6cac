import itertools

import numpy as np
import pytest

from fairaccess.exceptions import BudgetTooLarge, ValidationError
from fairaccess.graph import GroupAssignment, non_edge_array
from fairaccess.greedy import (Hyperparams, argmax_lexicographic, brute_force_optimum,
                               exact_greedy, find_nonsupermodular_counterexample,
                               gradient_greedy, replay)
from fairaccess.kernel import metrics, objective, pseudoinverse

from conftest import dense_pinv, random_connected_graph, random_groups, star_graph


def _dense_objective(g, ga, lam, edges):
    P = dense_pinv(g.with_edges(edges) if edges else g)
    tr = np.trace(P)
    access = [g.n / len(x) * P[x, x].sum() + tr for x in (ga.S, ga.T)]
    return (1 - lam) * tr + lam * sum(a * a for a in access)


def test_hyperparams_validation():
    with pytest.raises(ValidationError):
        Hyperparams(1.5, 1)
    with pytest.raises(ValidationError):
        Hyperparams(0.5, 0)
    with pytest.raises(ValidationError):
        Hyperparams(0.5, 1, epsilon=1.0)


@pytest.mark.parametrize("algo", [exact_greedy, gradient_greedy])
def test_p3_single_candidate(p3, p3_groups, algo):
    sel = algo(p3, p3_groups, Hyperparams(0.0, 1))
    assert sel.edges == [(0, 2)]
    assert sel.final.R == pytest.approx(2 / 3)


def test_star_picks_first_leaf_pair():
    g = star_graph(4)
    sel = exact_greedy(g, GroupAssignment(5, [0, 1], [2, 3, 4]), Hyperparams(0.0, 1))
    assert sel.edges == [(1, 2)]


def test_budget_too_large(p3, p3_groups):
    with pytest.raises(BudgetTooLarge):
        exact_greedy(p3, p3_groups, Hyperparams(0.5, 2))


def test_argmax_tie_goes_to_lowest_index():
    assert argmax_lexicographic(np.array([1.0, 3.0, 3.0 * (1 + 1e-15), 2.0])) == 1


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_greedy_records_match_oracle(rng, lam):
    g = random_connected_graph(rng, 12)
    ga = random_groups(rng, 12)
    sel = exact_greedy(g, ga, Hyperparams(lam, 3))
    sel.check_invariants(g)
    for rec in sel.records:
        edges = sel.edges[:rec.iteration]
        assert rec.F == pytest.approx(_dense_objective(g, ga, lam, edges), rel=1e-9)
        assert rec.F == pytest.approx(rec.recompute_F(lam), rel=1e-12)


def test_greedy_step_is_best_single_edge(rng):
    g = random_connected_graph(rng, 9)
    ga = random_groups(rng, 9)
    sel = exact_greedy(g, ga, Hyperparams(0.5, 1))
    values = {tuple(map(int, e)): _dense_objective(g, ga, 0.5, [tuple(e)])
              for e in non_edge_array(g)}
    assert values[sel.edges[0]] == pytest.approx(min(values.values()), rel=1e-9)


def test_gradient_greedy_logs_true_objective(rng):
    g = random_connected_graph(rng, 15)
    ga = random_groups(rng, 15)
    sel = gradient_greedy(g, ga, Hyperparams(0.5, 3))
    again = replay(g, ga, sel.edges, 0.5)
    assert [r.F for r in sel.records] == pytest.approx([r.F for r in again.records], rel=1e-9)


def test_brute_force_p3(p3, p3_groups):
    assert brute_force_optimum(p3, p3_groups, Hyperparams(0.5, 1)).edges == [(0, 2)]


@pytest.mark.parametrize("target", ["F", "R", "U"])
def test_brute_force_matches_enumeration(rng, target):
    g = random_connected_graph(rng, 7, extra=2)
    ga = random_groups(rng, 7)
    hp = Hyperparams(0.5, 2)
    cand = [tuple(map(int, e)) for e in non_edge_array(g)]
    best, best_set = np.inf, None
    for subset in itertools.combinations(cand, 2):
        P = dense_pinv(g.with_edges(subset))
        tr = np.trace(P)
        i_s, i_t = (g.n / len(x) * P[x, x].sum() + tr for x in (ga.S, ga.T))
        val = {"F": 0.5 * tr + 0.5 * (i_s ** 2 + i_t ** 2), "R": tr, "U": abs(i_t - i_s)}[target]
        if val < best * (1 - 1e-12):
            best, best_set = val, list(subset)
    for method in ("incremental", "fresh"):
        sel = brute_force_optimum(g, ga, hp, target=target, method=method)
        assert sel.edges == best_set


def test_brute_force_not_worse_than_greedy(rng):
    for _ in range(5):
        g = random_connected_graph(rng, 8, extra=3)
        ga = random_groups(rng, 8)
        hp = Hyperparams(0.5, 2)
        assert brute_force_optimum(g, ga, hp).final.F <= exact_greedy(g, ga, hp).final.F + 1e-9


def test_counterexample_is_real():
    w = find_nonsupermodular_counterexample(seed=0, max_trials=10_000)
    assert w is not None
    assert set(w.B) < set(w.C) and w.e not in w.C
    gains = []
    for base in (w.B, w.C):
        before = objective(pseudoinverse(w.graph.with_edges(base) if base else w.graph),
                           w.groups, w.lam)
        after = objective(pseudoinverse(w.graph.with_edges(list(base) + [w.e])), w.groups, w.lam)
        gains.append(before - after)
    assert gains[0] < gains[1]
    assert w.gain_B == pytest.approx(gains[0]) and w.gain_C == pytest.approx(gains[1])


def test_replay_initial_record(p3, p3_groups):
    sel = replay(p3, p3_groups, [(0, 2)], 0.5)
    m = metrics(pseudoinverse(p3), p3_groups, 0.5)
    assert sel.initial.F == pytest.approx(m.F)
