"""Shared fixtures and independent oracles."""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np
import pytest

from frtd.graph import Graph, from_networkx


def enumerate_frtd(transition: np.ndarray, i: int, max_steps: int) -> np.ndarray:
    """First-return probabilities of node ``i`` by brute-force walk enumeration.

    Every walk that leaves ``i`` and avoids it until step t contributes the
    product of its transition probabilities to ``f(t)``. Exponential in K,
    only for tiny graphs.
    """
    n = transition.shape[0]
    f = np.zeros(max_steps + 1)
    # frontier: probability mass at each node having avoided i so far
    frontier = {(i,): 1.0}
    for t in range(1, max_steps + 1):
        nxt = {}
        for walk, p in frontier.items():
            u = walk[-1]
            for v in range(n):
                q = p * transition[u, v]
                if q == 0:
                    continue
                if v == i:
                    f[t - 1] += q
                else:
                    nxt[walk + (v,)] = q
        frontier = nxt
    f[max_steps] = 1.0 - f[:max_steps].sum()
    return f


def power_frtd(transition: np.ndarray, i: int, max_steps: int) -> np.ndarray:
    """First returns from ``(T^t)_ii`` by renewal inversion, written out independently."""
    r = [np.linalg.matrix_power(transition, t)[i, i] for t in range(max_steps + 1)]
    f = [0.0] * (max_steps + 1)
    for t in range(1, max_steps + 1):
        f[t] = r[t] - sum(f[s] * r[t - s] for s in range(1, t))
    out = np.array(f[1:] + [0.0])
    out[-1] = 1.0 - out[:-1].sum()
    return out


def random_connected(n: int, p: float, rng: np.random.Generator) -> Graph:
    while True:
        g = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if nx.is_connected(g):
            return from_networkx(g)


def fixture_graphs(rng: np.random.Generator | None = None) -> list[Graph]:
    """Fifty graphs: trees, even and odd cycles, complete graphs, weighted and random graphs."""
    rng = rng or np.random.default_rng(1234)
    out = []
    for n in range(3, 10):
        out.append(from_networkx(nx.cycle_graph(n)))
    for n in range(2, 8):
        out.append(from_networkx(nx.complete_graph(n)))
    for n in range(4, 14):
        out.append(from_networkx(nx.random_labeled_tree(n, seed=int(rng.integers(2**31)))))
    out.append(from_networkx(nx.star_graph(5)))
    out.append(from_networkx(nx.path_graph(7)))
    out.append(from_networkx(nx.petersen_graph()))
    out.append(from_networkx(nx.karate_club_graph(), weight=None))
    out.append(from_networkx(nx.karate_club_graph()))   # weighted
    out.append(from_networkx(nx.barbell_graph(4, 2)))
    while len(out) < 40:
        g = random_connected(int(rng.integers(5, 20)), 0.3, rng)
        out.append(g)
    while len(out) < 50:
        g = random_connected(int(rng.integers(4, 15)), 0.4, rng).to_networkx()
        for u, v in g.edges():
            g[u][v]["weight"] = float(rng.uniform(0.1, 5.0))
        out.append(from_networkx(g))
    return out


def all_graphs_nm(n: int, m: int):
    """Every labeled simple graph with n nodes and m edges, as frozensets of pairs."""
    pairs = list(itertools.combinations(range(n), 2))
    return [frozenset(c) for c in itertools.combinations(pairs, m)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def automorphism_orbits(g: Graph) -> list[set[int]]:
    """Orbits of the automorphism group by exhaustive isomorphism enumeration."""
    from networkx.algorithms.isomorphism import GraphMatcher

    nxg = g.to_networkx()
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for mapping in GraphMatcher(nxg, nxg).isomorphisms_iter():
        for u, v in mapping.items():
            parent[find(u)] = find(v)
    orbits: dict[int, set[int]] = {}
    for u in range(g.n):
        orbits.setdefault(find(u), set()).add(u)
    return list(orbits.values())


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[k])
