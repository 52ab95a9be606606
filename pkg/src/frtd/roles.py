"""Structural roles by spectral clustering of FRTD distances."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import eigh
from sklearn.cluster import KMeans

from .distance import similarity_kernel


@dataclass(frozen=True)
class RoleAssignment:
    labels: np.ndarray
    k: int
    inertia: float
    seed: int


def spectral_embedding(dm, k: int) -> np.ndarray:
    """Row-normalized leading eigenvectors of the normalized kernel affinity.

    The k eigenvectors with the smallest eigenvalues of the normalized
    Laplacian ``I - D^-1/2 S D^-1/2`` are the k largest of the normalized
    affinity, which is what is diagonalized here.
    """
    s = similarity_kernel(dm)
    s = 0.5 * (s + s.T)
    d = s.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(d)
    affinity = inv_sqrt[:, None] * s * inv_sqrt[None, :]
    n = len(d)
    try:
        _, vec = eigh(affinity, subset_by_index=[n - k, n - 1])
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    vec = vec[:, ::-1]
    # deterministic sign per eigenvector
    pivot = np.argmax(np.abs(vec), axis=0)
    vec = vec * np.sign(vec[pivot, np.arange(k)])
    norms = np.linalg.norm(vec, axis=1, keepdims=True)
    return vec / np.where(norms > 0, norms, 1.0)


def spectral_cluster(dm, k: int, seed: int = 0, n_init: int = 10) -> RoleAssignment:
    """Cluster nodes into ``k`` roles from a square FRTD distance matrix.

    Parameters
    ----------
    dm : array_like, shape (n, n)
        Symmetric total-variation distances between the nodes' FRTDs.
    k : int
        Number of roles, ``1 <= k <= n``.
    seed : int
        Seed for the k-means++ restarts.
    n_init : int
        Number of k-means restarts; the lowest-inertia one is kept.

    Returns
    -------
    RoleAssignment
        Cluster ids are compacted to ``0..k'-1`` in order of first
        appearance, so node 0 is always in cluster 0.
    """
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("distance matrix must be square")
    n = dm.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if k == 1:
        return RoleAssignment(np.zeros(n, dtype=int), 1, 0.0, seed)
    emb = spectral_embedding(dm, k)
    km = KMeans(n_clusters=k, init="k-means++", n_init=n_init, random_state=seed)
    raw = km.fit_predict(emb)
    _, first = np.unique(raw, return_index=True)
    order = raw[np.sort(first)]
    relabel = {old: new for new, old in enumerate(order)}
    labels = np.array([relabel[c] for c in raw])
    return RoleAssignment(labels, k, float(km.inertia_), seed)


@dataclass
class ClusterReport:
    members: dict[int, list[str]]
    categories: list[str] = field(default_factory=list)
    contingency: np.ndarray | None = None   # clusters x categories

    def membership_rows(self):
        for c, names in self.members.items():
            for name in names:
                yield c, name

    def contingency_rows(self):
        if self.contingency is None:
            return
        for c, row in enumerate(self.contingency):
            yield [c, *row.tolist()]


def cluster_report(
    ra: RoleAssignment,
    node_labels: Sequence[str],
    metadata: Mapping[str, str] | None = None,
) -> ClusterReport:
    """Membership per cluster and, given node metadata, a cluster x category table."""
    members: dict[int, list[str]] = {c: [] for c in range(ra.k)}
    for lab, c in zip(node_labels, ra.labels):
        members[int(c)].append(lab)
    if metadata is None:
        return ClusterReport(members)
    unknown = set(metadata) - set(node_labels)
    if unknown:
        raise KeyError(f"metadata refers to unknown nodes: {sorted(unknown)[:5]}")
    missing = [lab for lab in node_labels if lab not in metadata]
    if missing:
        raise KeyError(f"metadata has no entry for nodes: {missing[:5]}")
    categories = sorted(set(metadata.values()))
    col = {cat: j for j, cat in enumerate(categories)}
    table = np.zeros((ra.k, len(categories)), dtype=int)
    for lab, c in zip(node_labels, ra.labels):
        table[c, col[metadata[lab]]] += 1
    return ClusterReport(members, categories, table)
