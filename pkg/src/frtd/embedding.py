"""Exact first-return-time distributions by repeated walk-matrix products."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .graph import Graph

DEFAULT_MAX_STEPS = 50
RANDOMIZATION_MAX_STEPS = 14
DEFAULT_ALPHA = 0.15

DirectedMode = Literal["none", "forward", "reverse"]


@dataclass(frozen=True, eq=False)
class FrtdMatrix:
    """Row-stochastic ``n x (K+1)`` array of truncated FRTDs.

    Column ``t-1`` holds the probability of first return after exactly
    ``t`` steps; the last column carries the mass not returned by step K.
    """

    values: np.ndarray
    max_steps: int
    directed_mode: DirectedMode = "none"

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != self.max_steps + 1:
            raise ValueError(f"expected shape (n, {self.max_steps + 1}), got {vals.shape}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def tail(self) -> np.ndarray:
        return self.values[:, -1]

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class TeleportationConfig:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        # alpha = 0 is kept for the pure (non-teleporting) directed walk
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")


def first_return_times(transition, max_steps: int) -> np.ndarray:
    """Run the diagonal-removal recursion on a transition matrix.

    ``P <- T P``, record ``diag(P)`` as the first-return mass at step t,
    then zero the diagonal so walks that already returned stop contributing.
    Rows of ``transition`` that are all zero (isolated nodes) end up with
    all of their mass in the tail column.

    Parameters
    ----------
    transition : ndarray or sparse matrix, shape (n, n)
        Row-(sub)stochastic walk matrix.
    max_steps : int
        Truncation K.

    Returns
    -------
    ndarray, shape (n, K+1)
    """
    n = transition.shape[0]
    f = np.zeros((max_steps + 1, n))
    p = np.eye(n)
    dense = not sp.issparse(transition)
    if dense:
        transition = np.ascontiguousarray(transition, dtype=float)
        q = np.empty_like(p)
    for t in range(max_steps):
        if dense:
            np.matmul(transition, p, out=q)
            p, q = q, p
        else:
            p = np.ascontiguousarray(transition @ p)
        diag = p.reshape(-1)[:: n + 1]
        f[t] = diag
        diag[:] = 0.0
    f = f.T.copy()
    f[:, max_steps] = 1.0 - f[:, :max_steps].sum(axis=1)
    # rounding can leave the tail at -1e-17
    np.clip(f[:, max_steps], 0.0, None, out=f[:, max_steps])
    return f


def _check_steps(max_steps):
    if int(max_steps) != max_steps or max_steps < 2:
        raise ValueError(f"max_steps must be an integer >= 2, got {max_steps}")
    return int(max_steps)


def walk_matrix(g: Graph) -> sp.csr_matrix:
    """``D^-1 A`` with zero rows for isolated nodes."""
    deg = g.degrees
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    return (sp.diags(inv) @ g.adjacency).tocsr()


def compute_frtd(g: Graph, max_steps: int = DEFAULT_MAX_STEPS) -> FrtdMatrix:
    """FRTDs of every node of an undirected graph.

    Isolated nodes (only produced by edge deletion, never by the loader)
    get all their mass in the tail column.
    """
    max_steps = _check_steps(max_steps)
    if g.directed:
        raise ValueError("directed graph: use compute_frtd_directed")
    return FrtdMatrix(first_return_times(walk_matrix(g), max_steps), max_steps)


def teleport_matrix(adjacency, alpha: float) -> np.ndarray:
    """Dense ``(1-alpha) D^-1 A + alpha/n``; dangling rows become uniform first."""
    a = adjacency.toarray() if sp.issparse(adjacency) else np.asarray(adjacency, dtype=float)
    n = a.shape[0]
    out = a.sum(axis=1)
    t = np.empty_like(a)
    live = out > 0
    t[live] = a[live] / out[live, None]
    t[~live] = 1.0 / n
    return (1.0 - alpha) * t + alpha / n


def compute_frtd_directed(
    g: Graph,
    max_steps: int = DEFAULT_MAX_STEPS,
    tp: TeleportationConfig | None = None,
) -> tuple[FrtdMatrix, FrtdMatrix]:
    """Forward and reverse FRTDs of the teleporting walk on a digraph.

    The reverse distribution uses the same walk on the transposed
    adjacency, so together they depend on both in- and out-edges.
    """
    max_steps = _check_steps(max_steps)
    tp = tp or TeleportationConfig()
    if not g.directed:
        raise ValueError("undirected graph: use compute_frtd")
    fwd = first_return_times(teleport_matrix(g.adjacency, tp.alpha), max_steps)
    rev = first_return_times(teleport_matrix(g.adjacency.T, tp.alpha), max_steps)
    return FrtdMatrix(fwd, max_steps, "forward"), FrtdMatrix(rev, max_steps, "reverse")


def embed(g: Graph, max_steps: int = DEFAULT_MAX_STEPS, alpha: float = DEFAULT_ALPHA):
    """FrtdMatrix for undirected graphs, ``(forward, reverse)`` pair for digraphs."""
    if g.directed:
        return compute_frtd_directed(g, max_steps, TeleportationConfig(alpha))
    return compute_frtd(g, max_steps)


def frtd_of_node(f: FrtdMatrix, i: int) -> np.ndarray:
    if not 0 <= i < f.n:
        raise IndexError(f"node {i} out of range for {f.n} nodes")
    return f.values[i].copy()
