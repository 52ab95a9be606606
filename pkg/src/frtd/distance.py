"""Total-variation distances between FRTDs, and the derived graph distance."""

from __future__ import annotations

from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from .embedding import FrtdMatrix

NORMALIZATION_TOL = 1e-9

# a directed embedding is the (forward, reverse) pair
Embedding = Union[FrtdMatrix, tuple[FrtdMatrix, FrtdMatrix]]


def tv_distance(p, q) -> float:
    """Half the L1 distance between two probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    for name, v in (("p", p), ("q", q)):
        if abs(v.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"{name} is not normalized (sums to {v.sum():.3g}); "
                             "was the tail column dropped?")
    return float(min(0.5 * np.abs(p - q).sum(), 1.0))


def _parts(emb: Embedding) -> tuple[list[np.ndarray], int, str]:
    if isinstance(emb, FrtdMatrix):
        return [emb.values], emb.max_steps, emb.directed_mode
    fwd, rev = emb
    if fwd.max_steps != rev.max_steps or (fwd.directed_mode, rev.directed_mode) != ("forward", "reverse"):
        raise ValueError("directed embedding must be a (forward, reverse) pair with equal K")
    return [fwd.values, rev.values], fwd.max_steps, "directed"


def _check_compatible(e1: Embedding, e2: Embedding):
    p1, k1, mode1 = _parts(e1)
    p2, k2, mode2 = _parts(e2)
    if k1 != k2:
        raise ValueError(f"truncation mismatch: K={k1} vs K={k2}")
    if mode1 != mode2:
        raise ValueError(f"mode mismatch: {mode1} vs {mode2}")
    return p1, p2


def pairwise_distances(f1: Embedding, f2: Embedding | None = None) -> np.ndarray:
    """``D[i, j] = tv(f1_i, f2_j)``; ``f2`` defaults to ``f1``.

    Directed embeddings average the forward and reverse distances, so the
    result stays in [0, 1].
    """
    if f2 is None:
        f2 = f1
    p1, p2 = _check_compatible(f1, f2)
    d = sum(cdist(a, b, metric="cityblock") for a, b in zip(p1, p2)) * (0.5 / len(p1))
    if f2 is f1:
        np.fill_diagonal(d, 0.0)
    return np.minimum(d, 1.0)


def node_distances(f1: Embedding, f2: Embedding) -> np.ndarray:
    """``tv(f1_i, f2_i)`` for every ``i`` under the identity pairing."""
    p1, p2 = _check_compatible(f1, f2)
    if p1[0].shape[0] != p2[0].shape[0]:
        raise ValueError(f"node count mismatch: {p1[0].shape[0]} vs {p2[0].shape[0]}")
    return sum(np.abs(a - b).sum(axis=1) for a, b in zip(p1, p2)) * (0.5 / len(p1))


def graph_distance(f1: Embedding, f2: Embedding) -> float:
    """``(1/2n) * sum_i tv(f1_i, f2_i)``, taken literally, so it lies in [0, 1/2]."""
    d = node_distances(f1, f2)
    return float(d.sum() / (2 * len(d)))


def similarity_kernel(dm) -> np.ndarray:
    """``exp(-d)`` elementwise on a square intra-graph distance matrix."""
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError(f"expected a square distance matrix, got shape {dm.shape}")
    return np.exp(-dm)
