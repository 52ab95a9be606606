"""Node- and graph-level descriptors comparing sampled graphs with the target."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .graph import Graph

NODE_DESCRIPTORS = ("degree", "clustering", "betweenness", "closeness", "eigenvector", "pagerank")
GLOBAL_DESCRIPTORS = ("mean_clustering", "assortativity", "triangles", "path_length", "spectral_gap")
DIRECTED_NODE_DESCRIPTORS = ("in_degree", "out_degree", "clustering", "betweenness", "closeness", "pagerank")
DIRECTED_GLOBAL_DESCRIPTORS = ("mean_clustering", "assortativity", "reciprocity", "triangles", "path_length")


def _giant(g: nx.Graph) -> nx.Graph:
    if g.is_directed():
        comp = max(nx.strongly_connected_components(g), key=len)
    else:
        comp = max(nx.connected_components(g), key=len)
    return g.subgraph(comp)


def _eigenvector(a: np.ndarray) -> np.ndarray:
    """Leading eigenvector of a symmetric adjacency, sign fixed positive."""
    _, vec = np.linalg.eigh(a)
    v = vec[:, -1]
    return np.abs(v)


def spectral_gap(g: nx.Graph) -> float:
    """``1 - lambda_2`` of the symmetric normalized adjacency of the giant component."""
    h = _giant(g)
    if h.number_of_nodes() < 2:
        return math.nan
    a = nx.to_numpy_array(h, nodelist=sorted(h))
    s = 1.0 / np.sqrt(a.sum(axis=1))
    lam = np.linalg.eigvalsh(s[:, None] * a * s[None, :])
    return float(1.0 - lam[-2])


def node_descriptors(g: Graph) -> dict[str, np.ndarray]:
    nxg = g.to_networkx()
    nodes = range(g.n)

    def vec(d):
        return np.array([d[i] for i in nodes], dtype=float)

    out = {}
    if g.directed:
        out["in_degree"] = vec(dict(nxg.in_degree()))
        out["out_degree"] = vec(dict(nxg.out_degree()))
    else:
        out["degree"] = vec(dict(nxg.degree()))
    out["clustering"] = vec(nx.clustering(nxg))
    out["betweenness"] = vec(nx.betweenness_centrality(nxg))
    out["closeness"] = vec(nx.closeness_centrality(nxg))
    if not g.directed:
        out["eigenvector"] = _eigenvector(g.dense())
    out["pagerank"] = vec(nx.pagerank(nxg, weight=None))
    return out


def global_descriptors(g: Graph) -> dict[str, float]:
    nxg = g.to_networkx()
    und = nxg.to_undirected() if g.directed else nxg
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            assort = nx.degree_assortativity_coefficient(nxg)
        except (ValueError, ZeroDivisionError):
            assort = math.nan
    out = {
        "mean_clustering": nx.average_clustering(nxg),
        "assortativity": assort,
        "triangles": sum(nx.triangles(und).values()) / 3,
        "path_length": nx.average_shortest_path_length(_giant(nxg)) if g.m else math.nan,
    }
    if g.directed:
        out["reciprocity"] = nx.overall_reciprocity(nxg)
    else:
        out["spectral_gap"] = spectral_gap(nxg)
    return {k: float(v) for k, v in out.items()}


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; NaN if either vector is constant."""
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        return math.nan
    return float(np.clip(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy), -1.0, 1.0))


@dataclass
class DescriptorStatistics:
    node_correlation: dict[str, np.ndarray] = field(default_factory=dict)   # median per slot
    global_ratio: dict[str, np.ndarray] = field(default_factory=dict)       # mean ratio per slot


def compute_statistics(samples: Sequence[Sequence[Graph]], target: Graph) -> DescriptorStatistics:
    """Median node-descriptor correlation and mean global-descriptor ratio per beta.

    Correlations pair node ``i`` of each sample with node ``i`` of the
    target. A descriptor constant on the target, or with zero target value
    for a ratio, is reported as NaN rather than dropped.
    """
    if not samples or any(len(s) == 0 for s in samples):
        raise ValueError("every beta needs at least one sample")
    ref_nodes = node_descriptors(target)
    ref_global = global_descriptors(target)
    node_names = DIRECTED_NODE_DESCRIPTORS if target.directed else NODE_DESCRIPTORS
    global_names = DIRECTED_GLOBAL_DESCRIPTORS if target.directed else GLOBAL_DESCRIPTORS
    corr = {k: np.full(len(samples), math.nan) for k in node_names}
    ratio = {k: np.full(len(samples), math.nan) for k in global_names}
    for slot, graphs in enumerate(samples):
        c = {k: [] for k in node_names}
        r = {k: [] for k in global_names}
        for h in graphs:
            nd = node_descriptors(h)
            for k in node_names:
                c[k].append(pearson(nd[k], ref_nodes[k]))
            gd = global_descriptors(h)
            for k in global_names:
                ref = ref_global[k]
                r[k].append(gd[k] / ref if ref not in (0.0,) and math.isfinite(ref) else math.nan)
        for k in node_names:
            vals = np.array(c[k])
            vals = vals[np.isfinite(vals)]
            corr[k][slot] = np.median(vals) if len(vals) else math.nan
        for k in global_names:
            vals = np.array(r[k])
            vals = vals[np.isfinite(vals)]
            ratio[k][slot] = vals.mean() if len(vals) else math.nan
    return DescriptorStatistics(corr, ratio)
