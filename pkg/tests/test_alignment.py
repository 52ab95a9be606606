import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frtd import datasets
from frtd.alignment import (
    AlignmentProblem,
    align,
    alignment_accuracy,
    alignment_objective,
    benchmark,
    corrupt_graph,
    feature_cost,
    frtd_cost,
    solve_fugal_frt,
    solve_lap,
    structural_features,
)
from frtd.graph import from_networkx

from conftest import random_connected


def brute_force_lap(cost):
    n = len(cost)
    return min(sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def asymmetric_tree(n, seed):
    """Random tree whose FRTD rows are pairwise distinct at K=50."""
    rng = np.random.default_rng(seed)
    while True:
        g = from_networkx(nx.random_labeled_tree(n, seed=int(rng.integers(2**31))))
        d = frtd_cost(g, g)
        np.fill_diagonal(d, 1.0)
        if d.min() > 1e-9:
            return g


def test_lap_identity_cost():
    cost = 1 - np.eye(5)
    res = solve_lap(cost)
    assert res.permutation.tolist() == list(range(5))
    assert res.objective == 0


def test_lap_3x3_example():
    cost = np.array([[1, 2, 3], [2, 4, 6], [3, 6, 9]], dtype=float)
    res = solve_lap(cost)
    assert res.permutation.tolist() == [2, 1, 0]
    assert res.objective == 10 == brute_force_lap(cost)


@pytest.mark.parametrize("seed", range(40))
def test_lap_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    cost = rng.random((n, n))
    res = solve_lap(cost)
    assert sorted(res.permutation.tolist()) == list(range(n))
    assert res.objective == pytest.approx(brute_force_lap(cost), abs=1e-12)


def test_lap_input_validation():
    with pytest.raises(ValueError):
        solve_lap(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        solve_lap(np.array([[0, np.nan], [1, 0]]))


def test_objective_counts_mismatches():
    c4, s3 = datasets.cycle(4).dense(), datasets.star(3).dense()
    assert alignment_objective(c4, c4, np.arange(4)) == 0
    # at most two edges overlap (the star centre has only two cycle neighbours);
    # the three unmatched edges each count twice in the symmetric matrices
    best = min(alignment_objective(c4, s3, np.array(p)) for p in itertools.permutations(range(4)))
    assert best == 6


def test_problem_validation():
    g, h = datasets.cycle(4), datasets.cycle(5)
    with pytest.raises(ValueError):
        AlignmentProblem(g, h, np.zeros((4, 5)))
    with pytest.raises(ValueError):
        AlignmentProblem(g, g, np.zeros((4, 3)))
    with pytest.raises(ValueError):
        solve_fugal_frt(AlignmentProblem(g, g, np.zeros((4, 4))), iterations=0)


def test_zero_noise_asymmetric_tree():
    g = asymmetric_tree(20, 0)
    rng = np.random.default_rng(1)
    perm = rng.permutation(g.n)
    h = g.permuted(perm)
    for method in ("lap", "fugal-frt"):
        res = align(g, h, method)
        assert res.score(perm) == 1.0
        assert sorted(res.permutation.tolist()) == list(range(g.n))
    res = align(g, h, "fugal-frt")
    assert res.objective == pytest.approx(0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(5, 30), st.integers(0, 2**31 - 1))
def test_frank_wolfe_monotone(n, seed):
    rng = np.random.default_rng(seed)
    g = random_connected(n, 0.3, rng)
    h, _ = corrupt_graph(g, 0.1, seed)
    res = solve_fugal_frt(AlignmentProblem(g, h, frtd_cost(g, h), 1.0))
    hist = np.array(res.history)
    assert np.all(np.diff(hist) <= 1e-9)
    assert sorted(res.permutation.tolist()) == list(range(n))


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 20), st.integers(0, 2**31 - 1))
def test_zero_objective_certifies_isomorphism(n, seed):
    rng = np.random.default_rng(seed)
    g = random_connected(n, 0.3, rng)
    h, _ = corrupt_graph(g, 0.0, seed)
    res = solve_fugal_frt(AlignmentProblem(g, h, np.zeros((n, n)), 1.0))
    if res.objective == 0:
        a, b = g.dense(), h.dense()
        p = res.permutation
        np.testing.assert_array_equal(a, b[np.ix_(p, p)])


def test_corrupt_zero_fraction_is_relabeling():
    g = datasets.karate_club()
    h, perm = corrupt_graph(g, 0.0, 5)
    assert h.m == g.m
    np.testing.assert_array_equal(g.dense(), h.dense()[np.ix_(perm, perm)])
    assert h.node_labels == tuple(str(i) for i in range(g.n))


def test_corrupt_triangle():
    h, _ = corrupt_graph(datasets.cycle(3), 1 / 3, 0)
    assert h.m == 2
    assert sorted(h.degrees.tolist()) == [1, 1, 2]


def test_corrupt_counts_and_determinism():
    g = from_networkx(nx.gnm_random_graph(379, 914, seed=0))
    h, perm = corrupt_graph(g, 0.05, 11)
    assert g.m - h.m == 45
    h2, perm2 = corrupt_graph(g, 0.05, 11)
    np.testing.assert_array_equal(perm, perm2)
    assert (h.adjacency != h2.adjacency).nnz == 0
    with pytest.raises(ValueError):
        corrupt_graph(g, 1.0, 0)


def test_structural_features():
    x = structural_features(datasets.star(3))
    np.testing.assert_allclose(x[0], [3, 1, 0])
    np.testing.assert_allclose(x[1], [1, 3, 0])
    c = feature_cost(datasets.star(3), datasets.star(3))
    assert c[0, 0] == 0 and c[1, 2] == 0 and c[0, 1] > 0


def test_accuracy():
    assert alignment_accuracy([0, 1, 2, 3], [0, 1, 3, 2]) == 0.5


def test_benchmark_lap_zero_noise():
    g = asymmetric_tree(15, 3)
    rows = benchmark(g, 0.0, 3, methods=["lap"])
    assert rows[0]["accuracy_mean"] == 1.0 and rows[0]["accuracy_std"] == 0.0


def test_benchmark_vertex_transitive_near_chance():
    g = datasets.cycle(12)
    rows = benchmark(g, 0.0, 30, methods=["lap"], seed=2)
    # all rows identical: the assignment carries no information
    assert rows[0]["accuracy_mean"] == pytest.approx(1 / 12, abs=0.06)


def test_benchmark_independent_of_workers():
    g = datasets.karate_club()
    a = benchmark(g, 0.05, 4, methods=["lap", "fugal-frt", "fugal-lite"], seed=9, workers=1)
    b = benchmark(g, 0.05, 4, methods=["lap", "fugal-frt", "fugal-lite"], seed=9, workers=4)
    assert [r["accuracies"] for r in a] == [r["accuracies"] for r in b]
    assert {r["method"] for r in a} == {"lap", "fugal-frt", "fugal-lite"}


def test_unknown_method():
    with pytest.raises(ValueError):
        align(datasets.cycle(4), datasets.cycle(4), "magic")
    with pytest.raises(ValueError):
        benchmark(datasets.cycle(4), 0.0, 1, methods=["magic"])
