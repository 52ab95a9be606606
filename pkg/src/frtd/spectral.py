"""Eigendecomposition route to FRTDs, and exact FRTD-equivalence tests.

Return probabilities ``r_i(t) = (X^t)_ii`` follow from the spectrum of the
symmetric normalized adjacency X; first returns are recovered from them by
inverting the renewal relation ``r(t) = sum_{s=1..t} f(s) r(t-s)``. This is
an independent check on :func:`frtd.embedding.compute_frtd`, which never
diagonalizes anything.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, symmetric_normalized_adjacency

DEFAULT_DEGENERACY_TOL = 1e-8
DENSE_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray     # distinct, descending
    multiplicities: np.ndarray
    mass: np.ndarray            # (n, N): squared eigenvector weight of node i on eigenvalue a
    degeneracy_tol: float

    @property
    def n(self) -> int:
        return self.mass.shape[0]


@dataclass(frozen=True)
class EquivalenceVerdict:
    cospectral: bool
    mass_matched: bool
    equivalent: bool
    max_eigenvalue_gap: float
    max_mass_gap: float

    def to_dict(self) -> dict:
        return asdict(self)


def group_eigenvalues(eigenvalues: np.ndarray, tol: float) -> list[np.ndarray]:
    """Split sorted-descending eigenvalues into runs whose neighbours lie within ``tol``."""
    breaks = np.flatnonzero(np.abs(np.diff(eigenvalues)) > tol) + 1
    return np.split(np.arange(len(eigenvalues)), breaks)


def decompose(
    g: Graph,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
    dense_limit: int = DENSE_LIMIT,
) -> SpectralDecomposition:
    """Distinct eigenvalues of X with multiplicities and per-node masses."""
    if g.n > dense_limit:
        raise ValueError(f"graph has {g.n} nodes, dense limit is {dense_limit}")
    x = symmetric_normalized_adjacency(g).toarray()
    try:
        lam, vec = np.linalg.eigh(x)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(lam)[::-1]
    lam, vec = lam[order], vec[:, order]
    groups = group_eigenvalues(lam, degeneracy_tol)
    sq = vec**2
    eigenvalues = np.array([lam[idx].mean() for idx in groups])
    mult = np.array([len(idx) for idx in groups])
    mass = np.column_stack([sq[:, idx].sum(axis=1) for idx in groups])
    return SpectralDecomposition(eigenvalues, mult, mass, degeneracy_tol)


def return_probabilities(sd: SpectralDecomposition, i: int, max_steps: int) -> np.ndarray:
    """``r_i(t)`` for ``t = 0..K``."""
    powers = sd.eigenvalues[None, :] ** np.arange(max_steps + 1)[:, None]
    return powers @ sd.mass[i]


def first_returns_from_returns(r: np.ndarray) -> np.ndarray:
    """Invert the renewal convolution; ``r[0]`` must be 1. Returns ``f(1..K)``."""
    K = len(r) - 1
    f = np.zeros(K + 1)
    for t in range(1, K + 1):
        f[t] = r[t] - np.dot(f[1:t], r[t - 1:0:-1])
    return f[1:]


def returns_from_first_returns(f: np.ndarray) -> np.ndarray:
    """Forward renewal convolution; inverse of :func:`first_returns_from_returns`."""
    K = len(f)
    fz = np.concatenate([[0.0], f])
    r = np.zeros(K + 1)
    r[0] = 1.0
    for t in range(1, K + 1):
        r[t] = np.dot(fz[1:t + 1], r[t - 1::-1])
    return r


def frtd_from_spectrum(sd: SpectralDecomposition, i: int, max_steps: int) -> np.ndarray:
    """FRTD of node ``i`` (length K+1, tail appended) from the spectrum alone."""
    if max_steps < 2:
        raise ValueError("max_steps must be >= 2")
    f = first_returns_from_returns(return_probabilities(sd, i, max_steps))
    return np.append(f, 1.0 - f.sum())


def _align_spectra(sd1, sd2):
    if sd1.degeneracy_tol != sd2.degeneracy_tol:
        raise ValueError("decompositions were built with different degeneracy_tol")
    same_shape = (len(sd1.eigenvalues) == len(sd2.eigenvalues)
                  and np.array_equal(sd1.multiplicities, sd2.multiplicities))
    if not same_shape:
        return np.inf
    return float(np.max(np.abs(sd1.eigenvalues - sd2.eigenvalues), initial=0.0))


def graphs_cospectral(sd1: SpectralDecomposition, sd2: SpectralDecomposition, tol: float = 1e-8) -> bool:
    return _align_spectra(sd1, sd2) <= tol


def nodes_frtd_equivalent(
    sd1: SpectralDecomposition, i: int,
    sd2: SpectralDecomposition, j: int,
    tol: float = 1e-8,
) -> EquivalenceVerdict:
    """Spectral criterion for node ``i`` of one graph and ``j`` of another.

    The nodes are FRTD-equivalent iff the graphs share distinct eigenvalues
    (with multiplicity) and the nodes put equal squared eigenvector mass on
    each eigenvalue. When the spectra cannot be aligned both gaps are inf.
    """
    eig_gap = _align_spectra(sd1, sd2)
    cospectral = eig_gap <= tol
    if np.isfinite(eig_gap):
        mass_gap = float(np.max(np.abs(sd1.mass[i] - sd2.mass[j]), initial=0.0))
    else:
        mass_gap = np.inf
    mass_matched = mass_gap <= tol
    return EquivalenceVerdict(bool(cospectral), bool(mass_matched), bool(cospectral and mass_matched),
                              float(eig_gap), mass_gap)
