"""Small named graphs used in tests and tutorials, and loaders for benchmark files.

The alignment benchmarks (``ca-netscience``, ``bio-celegans``) are not
redistributed here. Put the Network Repository files (``.mtx`` or
``.edges``) in a directory and point ``FRTD_DATA_DIR`` at it.
"""

from __future__ import annotations

import os
from pathlib import Path

import networkx as nx
import numpy as np
import scipy.io
import scipy.sparse as sp

from .graph import Graph, from_edges, from_networkx

BENCHMARKS = {
    "ca-netscience": (379, 914),
    "bio-celegans": (453, 2025),
}


def karate_club() -> Graph:
    return from_networkx(nx.karate_club_graph(), weight=None)


def frucht() -> Graph:
    return from_networkx(nx.frucht_graph())


def barbell(clique: int = 5, path: int = 1) -> Graph:
    return from_networkx(nx.barbell_graph(clique, path))


def cycle(n: int) -> Graph:
    return from_edges([(i, (i + 1) % n) for i in range(n)], n=n)


def path(n: int) -> Graph:
    return from_edges([(i, i + 1) for i in range(n - 1)], n=n)


def star(leaves: int) -> Graph:
    """Star with the centre at index 0."""
    return from_edges([(0, i) for i in range(1, leaves + 1)], n=leaves + 1)


def complete(n: int) -> Graph:
    return from_networkx(nx.complete_graph(n))


def read_graph(path: str | Path, directed: bool = False, largest_component: bool = True) -> Graph:
    """Read MatrixMarket (``.mtx``) or a ``#``/``%``-commented edge list.

    Unlike :func:`frtd.graph.load_edge_list` this tolerates the quirks of
    public network dumps: duplicate undirected edges are collapsed, self
    loops and weights are dropped, and (optionally) only the largest
    connected component is kept.
    """
    path = Path(path)
    if path.suffix == ".mtx":
        mat = sp.coo_matrix(scipy.io.mmread(path))
        edges = np.column_stack([mat.row, mat.col])
    else:
        lines = []
        for raw in path.read_text(encoding="utf-8").splitlines():
            parts = raw.split()
            if not parts or parts[0][0] in "#%":
                continue
            lines.append(parts[:2])
        labels: dict[str, int] = {}
        edges = np.array([[labels.setdefault(u, len(labels)), labels.setdefault(v, len(labels))]
                          for u, v in lines], dtype=np.int64).reshape(-1, 2)
    nxg = nx.DiGraph() if directed else nx.Graph()
    nxg.add_edges_from((int(u), int(v)) for u, v in edges if u != v)
    if largest_component and not directed:
        nxg = nxg.subgraph(max(nx.connected_components(nxg), key=len)).copy()
    nxg = nx.convert_node_labels_to_integers(nxg, ordering="sorted")
    return from_networkx(nxg, weight=None)


def data_dir() -> Path | None:
    env = os.environ.get("FRTD_DATA_DIR")
    return Path(env) if env else None


def find_benchmark(name: str, root: str | Path | None = None) -> Path:
    """Locate ``<name>.mtx`` / ``.edges`` / ``.txt`` under ``root`` or ``$FRTD_DATA_DIR``."""
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {name!r}; known: {sorted(BENCHMARKS)}")
    base = Path(root) if root is not None else data_dir()
    if base is None:
        raise FileNotFoundError(f"{name}: set FRTD_DATA_DIR to a directory holding the dataset")
    for ext in (".mtx", ".edges", ".txt", ".tsv"):
        for cand in (base / f"{name}{ext}", base / name / f"{name}{ext}"):
            if cand.exists():
                return cand
    raise FileNotFoundError(f"{name}: no {name}.mtx/.edges/.txt/.tsv under {base}")


def load_benchmark(name: str, root: str | Path | None = None) -> Graph:
    g = read_graph(find_benchmark(name, root), largest_component=False)
    n, m = BENCHMARKS[name]
    if (g.n, g.m) != (n, m):
        raise ValueError(f"{name}: expected n={n}, m={m}, got n={g.n}, m={g.m}")
    return g
