"""Graph container, edge-list ingestion and the random-walk matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class GraphFormatError(ValueError):
    """Raised when an edge list or graph violates the input contract."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple graph with positive edge weights on nodes ``0..n-1``.

    Undirected graphs are stored with a symmetric adjacency matrix, each
    edge appearing twice. ``m`` always counts edges, not stored entries.
    Instances are treated as immutable.
    """

    adjacency: sp.csr_matrix
    directed: bool = False
    node_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        adj = sp.csr_matrix(self.adjacency, dtype=float, copy=True)
        adj.sum_duplicates()
        adj.eliminate_zeros()
        adj.sort_indices()
        if adj.shape[0] != adj.shape[1]:
            raise GraphFormatError(f"adjacency must be square, got {adj.shape}")
        if adj.nnz and adj.data.min() <= 0:
            raise GraphFormatError("edge weights must be strictly positive")
        if adj.diagonal().any():
            raise GraphFormatError("self-loops are not allowed")
        if not self.directed and (adj != adj.T).nnz:
            raise GraphFormatError("undirected adjacency must be symmetric")
        labels = tuple(self.node_labels) or tuple(str(i) for i in range(adj.shape[0]))
        if len(labels) != adj.shape[0]:
            raise GraphFormatError("one label per node is required")
        adj.data.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "node_labels", labels)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def m(self) -> int:
        nnz = self.adjacency.nnz
        return nnz if self.directed else nnz // 2

    @property
    def degrees(self) -> np.ndarray:
        """Weighted (out-)degrees, ``d_i = sum_j A_ij``."""
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def edges(self) -> np.ndarray:
        """Edge array of shape ``(m, 2)``; undirected edges listed once with ``u < v``."""
        coo = self.adjacency.tocoo()
        rows, cols = coo.row, coo.col
        if not self.directed:
            keep = rows < cols
            rows, cols = rows[keep], cols[keep]
        return np.column_stack([rows, cols]).astype(np.int64)

    def weights(self) -> np.ndarray:
        coo = self.adjacency.tocoo()
        if self.directed:
            return coo.data.copy()
        return coo.data[coo.row < coo.col].copy()

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def reversed(self) -> "Graph":
        return Graph(self.adjacency.T.tocsr(), directed=self.directed, node_labels=self.node_labels)

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Relabel node ``i`` as ``perm[i]``; labels travel with their nodes."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        coo = self.adjacency.tocoo()
        adj = sp.csr_matrix((coo.data, (perm[coo.row], perm[coo.col])), shape=(self.n, self.n))
        labels = [""] * self.n
        for i, lab in enumerate(self.node_labels):
            labels[perm[i]] = lab
        return Graph(adj, directed=self.directed, node_labels=tuple(labels))

    def isolated_nodes(self) -> np.ndarray:
        adj = self.adjacency
        touched = np.asarray((adj != 0).sum(axis=1)).ravel()
        if self.directed:
            touched = touched + np.asarray((adj != 0).sum(axis=0)).ravel()
        return np.flatnonzero(touched == 0)

    def to_networkx(self):
        import networkx as nx

        g = nx.DiGraph() if self.directed else nx.Graph()
        g.add_nodes_from(range(self.n))
        for (u, v), w in zip(self.edges(), self.weights()):
            g.add_edge(int(u), int(v), weight=float(w))
        return g

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


def from_edges(
    edges: Iterable[Sequence[int]],
    n: int | None = None,
    weights: Iterable[float] | None = None,
    directed: bool = False,
    node_labels: Sequence[str] | None = None,
) -> Graph:
    """Build a :class:`Graph` from integer edge pairs.

    Duplicate edges (including ``(u, v)``/``(v, u)`` in undirected mode)
    raise :class:`GraphFormatError` rather than being merged.
    """
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(arr.max()) + 1 if arr.size else 0
    w = np.ones(len(arr)) if weights is None else np.asarray(list(weights), dtype=float)
    if len(w) != len(arr):
        raise GraphFormatError("weights must match edges")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise GraphFormatError("edge endpoint outside 0..n-1")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise GraphFormatError("self-loops are not allowed")
    keys = arr if directed else np.sort(arr, axis=1)
    if len(np.unique(keys, axis=0)) != len(keys):
        raise GraphFormatError("duplicate edges are not allowed")
    if not directed:
        arr = np.vstack([arr, arr[:, ::-1]])
        w = np.concatenate([w, w])
    adj = sp.csr_matrix((w, (arr[:, 0], arr[:, 1])), shape=(n, n))
    return Graph(adj, directed=directed, node_labels=tuple(node_labels) if node_labels else ())


def from_networkx(g, weight: str | None = "weight") -> Graph:
    """Convert a networkx graph; nodes are indexed in ``g.nodes`` order."""
    nodes = list(g.nodes)
    index = {u: i for i, u in enumerate(nodes)}
    edges, weights = [], []
    for u, v, data in g.edges(data=True):
        edges.append((index[u], index[v]))
        weights.append(float(data.get(weight, 1.0)) if weight else 1.0)
    return from_edges(edges, n=len(nodes), weights=weights, directed=g.is_directed(),
                      node_labels=[str(u) for u in nodes])


def parse_edge_list(text: str, directed: bool = False) -> Graph:
    """Parse ``u v [w]`` lines; ``#`` lines are comments.

    Node labels are indexed by first appearance.
    """
    index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    weights: list[float] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v [w]', got {raw!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: cannot parse weight {parts[2]!r}") from None
            if not np.isfinite(w) or w <= 0:
                raise GraphFormatError(f"line {lineno}: weight must be positive, got {parts[2]}")
        else:
            w = 1.0
        u, v = (index.setdefault(p, len(index)) for p in parts[:2])
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop on node {parts[0]!r}")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {parts[0]} {parts[1]} "
                                   f"(first seen on line {seen[key]})")
        seen[key] = lineno
        edges.append((u, v))
        weights.append(w)
    labels = sorted(index, key=index.get)
    return from_edges(edges, n=len(labels), weights=weights, directed=directed, node_labels=labels)


def load_edge_list(path: str | Path, directed: bool = False) -> Graph:
    """Read a whitespace-separated edge list from ``path``.

    Parameters
    ----------
    path : str or Path
        UTF-8 text file, one ``u v [w]`` edge per line.
    directed : bool
        Treat each line as the arc ``u -> v``.

    Returns
    -------
    Graph

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    GraphFormatError
        On unparsable lines, non-positive weights, self-loops, duplicate
        edges, or (undirected only) nodes of degree zero.
    """
    text = Path(path).read_text(encoding="utf-8")
    g = parse_edge_list(text, directed=directed)
    if not directed and len(g.isolated_nodes()):
        # only reachable for a file with no edges at all
        raise GraphFormatError("undirected graph has isolated nodes")
    return g


def label_map_csv(g: Graph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "label"])
    for i, lab in enumerate(g.node_labels):
        writer.writerow([i, lab])
    return buf.getvalue()


def format_edge_list(g: Graph) -> str:
    """Edge list text readable by :func:`parse_edge_list`; unit weights are omitted."""
    lines = []
    for (u, v), w in zip(g.edges(), g.weights()):
        lines.append(f"{g.node_labels[u]} {g.node_labels[v]}" + ("" if w == 1 else f" {float(w)!r}"))
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Row-stochastic walk matrix ``D^-1 A``.

    Raises ``ValueError`` if any node has zero (out-)degree; directed graphs
    with dangling nodes need the teleporting walk in :mod:`frtd.embedding`.
    """
    deg = g.degrees
    if np.any(deg <= 0):
        bad = np.flatnonzero(deg <= 0)
        raise ValueError(f"zero-degree rows at nodes {bad[:10].tolist()}")
    return sp.diags(1.0 / deg) @ g.adjacency


def symmetric_normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """``X = D^-1/2 A D^-1/2``; undirected graphs with positive degrees only."""
    if g.directed:
        raise ValueError("symmetric normalization is defined for undirected graphs only")
    deg = g.degrees
    if np.any(deg <= 0):
        raise ValueError("all degrees must be positive")
    s = sp.diags(1.0 / np.sqrt(deg))
    x = (s @ g.adjacency @ s).tocsr()
    # exact symmetry, independent of rounding order
    return ((x + x.T) * 0.5).tocsr()
