"""Parallel-tempered Metropolis sampling of ``P(G') ~ exp(-beta d(G, G'))``.

Every chain holds a dense adjacency matrix plus an edge array so that a
proposal touches O(1) entries; the FRTD of the candidate is recomputed in
full at truncation K after each proposal and the move is undone on
rejection.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .distance import graph_distance
from .embedding import (
    DEFAULT_ALPHA,
    RANDOMIZATION_MAX_STEPS,
    FrtdMatrix,
    first_return_times,
    teleport_matrix,
)
from .graph import Graph

EDGE_MOVE = "edge_move"
REWIRE = "rewire"

# energy = scale * graph_distance; "sum" undoes the 1/2n prefactor
ENERGY_SCALES = {"sum": lambda n: 2.0 * n, "distance": lambda n: 1.0}


@dataclass
class GibbsConfig:
    """Sampler settings. Step counts are proposal steps per chain."""

    betas: Sequence[float]
    burn_in: int = 10_000
    n_samples: int = 100
    sample_interval: int = 100
    swap_interval: int = 100
    truncation: int = RANDOMIZATION_MAX_STEPS
    edge_move_probability: float = 0.4
    degree_preserving_only: bool | None = None   # None: True for digraphs, False otherwise
    alpha: float = DEFAULT_ALPHA
    init: str = "random"                         # "random" or "target"
    retry_cap: int = 100
    audit_interval: int = 10_000
    energy: str = "sum"                          # "sum": sum_i tv_i; "distance": graph_distance itself
    seed: int = 0

    def __post_init__(self):
        self.betas = [float(b) for b in self.betas]
        if not self.betas:
            raise ValueError("empty beta ladder")
        if any(b < 0 for b in self.betas) or any(np.diff(self.betas) < 0):
            raise ValueError("betas must be non-negative and ascending")
        if not 0 <= self.edge_move_probability <= 1:
            raise ValueError("edge_move_probability must lie in [0, 1]")
        for name in ("sample_interval", "swap_interval", "retry_cap", "audit_interval", "n_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.init not in ("random", "target"):
            raise ValueError("init must be 'random' or 'target'")
        if self.energy not in ENERGY_SCALES:
            raise ValueError(f"energy must be one of {sorted(ENERGY_SCALES)}")

    def energy_scale(self, n: int) -> float:
        """Factor turning graph_distance (which carries 1/2n) into the Gibbs energy."""
        return ENERGY_SCALES[self.energy](n)

    def degree_preserving(self, directed: bool) -> bool:
        return directed if self.degree_preserving_only is None else bool(self.degree_preserving_only)


def ladder(spec: str) -> list[float]:
    """Parse ``lo:hi:count`` (evenly spaced) or a comma-separated list."""
    if ":" in spec:
        lo, hi, count = spec.split(":")
        return np.linspace(float(lo), float(hi), int(count)).tolist()
    return [float(b) for b in spec.split(",") if b.strip()]


class Embedder:
    """Computes the FRTD of a dense adjacency, matching :func:`frtd.embedding.embed`."""

    def __init__(self, n: int, max_steps: int, directed: bool, alpha: float, scale: float = 1.0):
        self.n, self.max_steps, self.directed, self.alpha = n, max_steps, directed, alpha
        self.scale = scale

    def __call__(self, adj: np.ndarray):
        if self.directed:
            fwd = first_return_times(teleport_matrix(adj, self.alpha), self.max_steps)
            rev = first_return_times(teleport_matrix(adj.T, self.alpha), self.max_steps)
            return (fwd, rev)
        deg = adj.sum(axis=1)
        inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
        return (first_return_times(adj * inv[:, None], self.max_steps),)

    def distance(self, target, cand) -> float:
        """Graph distance (1/2n) sum_i tv_i; directed parts are averaged."""
        tv = sum(np.abs(a - b).sum(axis=1) for a, b in zip(target, cand)) * (0.5 / len(target))
        return float(tv.sum() / (2 * self.n))

    def wrap(self, parts):
        if self.directed:
            return (FrtdMatrix(parts[0], self.max_steps, "forward"),
                    FrtdMatrix(parts[1], self.max_steps, "reverse"))
        return FrtdMatrix(parts[0], self.max_steps)


@dataclass
class Move:
    kind: str
    slots: tuple[int, ...]                      # indices into the edge array
    removed: tuple[tuple[int, int], ...]
    added: tuple[tuple[int, int], ...]


class ChainState:
    """One replica: current graph G', its inverse temperature and cached distance."""

    def __init__(self, adjacency: np.ndarray, edges: np.ndarray, weights: np.ndarray,
                 directed: bool, beta: float):
        self.adj = adjacency
        self.edges = edges
        self.weights = weights
        self.directed = directed
        self.beta = beta
        self.frtd = None          # tuple of arrays, see Embedder
        self.distance = math.nan
        self.stale = True
        self.steps = 0
        self.accept_count = 0
        self.reject_count = 0
        self.swap_count = 0
        self.swap_attempts = 0

    @classmethod
    def from_graph(cls, g: Graph, beta: float = 0.0) -> "ChainState":
        return cls(g.dense(), g.edges().copy(), g.weights().copy(), g.directed, beta)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_graph(self) -> Graph:
        from .graph import from_edges

        return from_edges(self.edges, n=self.n, weights=self.weights, directed=self.directed)

    def degree_sequence(self):
        a = self.adj != 0
        if self.directed:
            return a.sum(axis=1), a.sum(axis=0)
        return (a.sum(axis=1),)

    def _set(self, u, v, w):
        self.adj[u, v] = w
        if not self.directed:
            self.adj[v, u] = w

    def apply(self, move: Move):
        for (u, v) in move.removed:
            self._set(u, v, 0.0)
        for slot, (u, v) in zip(move.slots, move.added):
            self._set(u, v, self.weights[slot])
            self.edges[slot] = (u, v) if self.directed else (min(u, v), max(u, v))

    def revert(self, move: Move):
        for (u, v) in move.added:
            self._set(u, v, 0.0)
        for slot, (u, v) in zip(move.slots, move.removed):
            self._set(u, v, self.weights[slot])
            self.edges[slot] = (u, v) if self.directed else (min(u, v), max(u, v))

    def swap_configuration(self, other: "ChainState"):
        for name in ("adj", "edges", "weights", "frtd", "distance", "stale"):
            mine, theirs = getattr(self, name), getattr(other, name)
            setattr(self, name, theirs)
            setattr(other, name, mine)


def _propose_edge_move(state: ChainState, rng, retry_cap: int) -> Move | None:
    slot = int(rng.integers(state.m))
    u, v = (int(x) for x in state.edges[slot])
    n = state.n
    for _ in range(retry_cap):
        a, b = (int(x) for x in rng.integers(n, size=2))
        if a != b and state.adj[a, b] == 0:
            return Move(EDGE_MOVE, (slot,), ((u, v),), ((a, b),))
    return None


def _propose_rewire(state: ChainState, rng) -> Move | None:
    """Double-edge swap (a,b),(c,d) -> (a,d),(c,b); degrees are preserved.

    An invalid draw is rejected outright rather than redrawn: redrawing
    would weight each state by its number of valid swaps and bias the
    stationary distribution.
    """
    if state.m < 2:
        return None
    i = int(rng.integers(state.m))
    j = int(rng.integers(state.m - 1))
    j += j >= i
    a, b = (int(x) for x in state.edges[i])
    c, d = (int(x) for x in state.edges[j])
    if not state.directed and rng.random() < 0.5:
        c, d = d, c
    if a == d or c == b or state.adj[a, d] != 0 or state.adj[c, b] != 0:
        return None
    return Move(REWIRE, (i, j), ((a, b), (c, d)), ((a, d), (c, b)))


def propose(state: ChainState, rng, edge_move_probability: float = 0.4,
            degree_preserving_only: bool = False, retry_cap: int = 100) -> tuple[Move | None, str]:
    """Draw a candidate move; ``None`` means the draw is rejected as degenerate.

    With probability ``edge_move_probability`` (unless degree-preserving)
    a uniform edge is moved to a uniform absent pair, else a double-edge
    swap is attempted. Both kernels are symmetric, so the Metropolis rule
    needs no Hastings correction.
    """
    if not degree_preserving_only and rng.random() < edge_move_probability:
        return _propose_edge_move(state, rng, retry_cap), EDGE_MOVE
    return _propose_rewire(state, rng), REWIRE


def acceptance_probability(beta: float, delta_d: float) -> float:
    """``min(1, exp(-beta (d(G*, G) - d(G', G))))``."""
    x = -beta * delta_d
    return 1.0 if x >= 0 else math.exp(x)


def swap_probability(beta_i: float, beta_j: float, d_i: float, d_j: float) -> float:
    """Replica-exchange rule ``min(1, exp((beta_i - beta_j)(d_i - d_j)))``."""
    x = (beta_i - beta_j) * (d_i - d_j)
    return 1.0 if x >= 0 else math.exp(x)


def refresh(state: ChainState, target, embedder: Embedder):
    if state.stale:
        state.frtd = embedder(state.adj)
        state.distance = embedder.distance(target, state.frtd)
        state.stale = False


def metropolis_step(state: ChainState, target, embedder: Embedder, rng, cfg: GibbsConfig) -> bool:
    """One proposal plus accept/reject; returns whether the move was accepted.

    At ``beta = 0`` every valid proposal is accepted without evaluating the
    candidate; the cached distance is then marked stale and recomputed only
    when needed.
    """
    move, _ = propose(state, rng, cfg.edge_move_probability,
                      cfg.degree_preserving(state.directed), cfg.retry_cap)
    state.steps += 1
    if move is None:
        state.reject_count += 1
        return False
    if state.beta == 0:
        state.apply(move)
        state.stale = True
        state.accept_count += 1
        return True
    refresh(state, target, embedder)
    state.apply(move)
    cand = embedder(state.adj)
    d_new = embedder.distance(target, cand)
    p = acceptance_probability(state.beta, embedder.scale * (d_new - state.distance))
    if p >= 1 or rng.random() < p:
        state.frtd, state.distance = cand, d_new
        state.accept_count += 1
        return True
    state.revert(move)
    state.reject_count += 1
    return False


def swap_step(chains: list[ChainState], rng, round_index: int, target, embedder: Embedder):
    """Attempt exchanges between neighbouring temperatures.

    Even rounds pair (0,1), (2,3), ...; odd rounds pair (1,2), (3,4), ....
    Configurations move, temperatures stay with their slots.
    """
    if len(chains) < 2:
        return chains
    for i in range(round_index % 2, len(chains) - 1, 2):
        lo, hi = chains[i], chains[i + 1]
        refresh(lo, target, embedder)
        refresh(hi, target, embedder)
        s = embedder.scale
        p = swap_probability(lo.beta, hi.beta, s * lo.distance, s * hi.distance)
        lo.swap_attempts += 1
        hi.swap_attempts += 1
        if p >= 1 or rng.random() < p:
            lo.swap_configuration(hi)
            lo.swap_count += 1
            hi.swap_count += 1
    return chains


def random_gnm_state(g: Graph, rng) -> ChainState:
    """Uniform simple graph with the same n and m; weights are shuffled onto the new edges."""
    n, m = g.n, g.m
    directed = g.directed
    total = n * (n - 1) if directed else n * (n - 1) // 2
    picks = rng.choice(total, size=m, replace=False)
    if directed:
        u, r = np.divmod(picks, n - 1)
        v = r + (r >= u)
    else:
        iu, ju = np.triu_indices(n, k=1)
        u, v = iu[picks], ju[picks]
    edges = np.column_stack([u, v]).astype(np.int64)
    weights = rng.permutation(g.weights())
    adj = np.zeros((n, n))
    adj[edges[:, 0], edges[:, 1]] = weights
    if not directed:
        adj[edges[:, 1], edges[:, 0]] = weights
    return ChainState(adj, edges, weights, directed, 0.0)


def random_degree_preserving_state(g: Graph, rng, sweeps: int = 20) -> ChainState:
    """Start near the (directed) configuration model by many unconditional swaps."""
    state = ChainState.from_graph(g)
    for _ in range(sweeps * max(g.m, 1)):
        move = _propose_rewire(state, rng)
        if move is not None:
            state.apply(move)
    return state


@dataclass
class EnsembleStatistics:
    """Per-beta summaries; energies are ``energy_scale * graph_distance``."""

    betas: np.ndarray
    mean_energy: np.ndarray
    var_energy: np.ndarray
    sem_energy: np.ndarray        # batch-means standard error
    mean_distance: np.ndarray     # plain graph_distance, for reference
    specific_heat: np.ndarray
    entropy: np.ndarray            # NaN when the beta = 0 entropy is unknown
    entropy_change: np.ndarray     # S(beta) - S(0)
    node_correlation: dict[str, np.ndarray] = field(default_factory=dict)
    global_ratio: dict[str, np.ndarray] = field(default_factory=dict)
    acceptance_rate: np.ndarray | None = None
    swap_rate: np.ndarray | None = None


@dataclass
class EnsembleResult:
    config: GibbsConfig
    target: Graph
    samples: list[list[np.ndarray]]     # per beta slot: edge arrays
    weights: list[list[np.ndarray]]
    distances: np.ndarray               # (n_betas, n_samples)
    statistics: EnsembleStatistics
    audits: int = 0

    def sample_graph(self, slot: int, k: int) -> Graph:
        from .graph import from_edges

        return from_edges(self.samples[slot][k], n=self.target.n, weights=self.weights[slot][k],
                          directed=self.target.directed)


def batch_means_sem(x: np.ndarray, n_batches: int = 20) -> float:
    """Standard error of the mean of an autocorrelated series by batch means."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return math.nan
    n_batches = min(n_batches, len(x))
    size = len(x) // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


def log_state_count(g: Graph) -> float:
    """log C(N, m): number of simple (di)graphs with g's n and m."""
    pairs = g.n * (g.n - 1) if g.directed else g.n * (g.n - 1) // 2
    return float(gammaln(pairs + 1) - gammaln(g.m + 1) - gammaln(pairs - g.m + 1))


def thermodynamics(betas, energies, s0: float | None):
    """Mean/variance of the energy E per beta, specific heat and entropy.

    Specific heat is ``beta^2 Var(E)``. Entropy follows from
    ``S = log Z + beta <E>`` and ``d log Z / d beta = -<E>``:
    ``S(beta) = S(0) + beta <E>_beta - int_0^beta <E> dbeta'``, integrated
    by the trapezoid rule over the ladder (which must start at 0).
    """
    betas = np.asarray(betas, dtype=float)
    mean = np.array([np.mean(e) for e in energies])
    var = np.array([np.var(e) for e in energies])
    sem = np.array([batch_means_sem(e) for e in energies])
    heat = betas**2 * var
    if betas[0] == 0:
        integral = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(betas) * (mean[1:] + mean[:-1]))])
        change = betas * mean - integral
    else:
        change = np.full(len(betas), math.nan)
    entropy = change + s0 if s0 is not None else np.full(len(betas), math.nan)
    return mean, var, sem, heat, entropy, change


def run_ensemble(target: Graph, cfg: GibbsConfig, workers: int = 1,
                 compute_descriptors: bool = True) -> EnsembleResult:
    """Sample the FRTD-anchored ensemble of ``target`` at every beta of the ladder.

    Chains advance ``swap_interval`` steps independently, then a swap round
    runs; after ``burn_in`` steps a sample is kept every
    ``sample_interval`` steps. Each chain draws from its own stream spawned
    from ``cfg.seed`` and swaps from a dedicated one, so the output does
    not depend on ``workers``.
    """
    import networkx as nx

    if target.m < 1:
        raise ValueError("target has no edges")
    if not target.directed and not nx.is_connected(target.to_networkx()):
        raise ValueError("undirected target must be connected")
    degree_preserving = cfg.degree_preserving(target.directed)
    embedder = Embedder(target.n, cfg.truncation, target.directed, cfg.alpha,
                        cfg.energy_scale(target.n))
    target_frtd = embedder(target.dense())

    seeds = np.random.SeedSequence(cfg.seed).spawn(len(cfg.betas) + 1)
    rngs = [np.random.default_rng(s) for s in seeds[:-1]]
    swap_rng = np.random.default_rng(seeds[-1])

    chains = []
    for beta, rng in zip(cfg.betas, rngs):
        if cfg.init == "target":
            st = ChainState.from_graph(target)
        elif degree_preserving:
            st = random_degree_preserving_state(target, rng)
        else:
            st = random_gnm_state(target, rng)
        st.beta = beta
        chains.append(st)

    total = cfg.burn_in + cfg.n_samples * cfg.sample_interval
    n_slots = len(chains)
    samples = [[] for _ in range(n_slots)]
    sample_w = [[] for _ in range(n_slots)]
    dists = [[] for _ in range(n_slots)]
    audits = 0

    def advance(slot, start, stop):
        st, rng = chains[slot], rngs[slot]
        for step in range(start, stop):
            metropolis_step(st, target_frtd, embedder, rng, cfg)
            done = step + 1
            if done > cfg.burn_in and (done - cfg.burn_in) % cfg.sample_interval == 0:
                refresh(st, target_frtd, embedder)
                samples[slot].append(st.edges.copy())
                sample_w[slot].append(st.weights.copy())
                dists[slot].append(st.distance)

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        step, round_index = 0, 0
        while step < total:
            stop = min(step + cfg.swap_interval, total)
            if pool is None:
                for slot in range(n_slots):
                    advance(slot, step, stop)
            else:
                list(pool.map(lambda s: advance(s, step, stop), range(n_slots)))
            if step // cfg.audit_interval != stop // cfg.audit_interval or stop == total:
                for st in chains:
                    _audit(st, target, target_frtd, embedder)
                audits += 1
            step = stop
            if step < total:
                swap_step(chains, swap_rng, round_index, target_frtd, embedder)
                round_index += 1
    finally:
        if pool is not None:
            pool.shutdown()

    s0 = log_state_count(target) if not degree_preserving else None
    energies = np.array(dists) * embedder.scale
    mean, var, sem, heat, entropy, change = thermodynamics(cfg.betas, energies, s0)
    stats = EnsembleStatistics(np.array(cfg.betas), mean, var, sem, np.array(dists).mean(axis=1),
                               heat, entropy, change)
    stats.acceptance_rate = np.array([c.accept_count / max(c.steps, 1) for c in chains])
    stats.swap_rate = np.array([c.swap_count / max(c.swap_attempts, 1) for c in chains])
    result = EnsembleResult(cfg, target, samples, sample_w, np.array(dists), stats, audits)
    if compute_descriptors:
        from .statistics import compute_statistics

        graphs = [[result.sample_graph(s, k) for k in range(len(samples[s]))] for s in range(n_slots)]
        desc = compute_statistics(graphs, target)
        stats.node_correlation = desc.node_correlation
        stats.global_ratio = desc.global_ratio
    return result


def _audit(state: ChainState, target_graph: Graph, target_frtd, embedder: Embedder, tol: float = 1e-9):
    """Check the cached distance against a from-scratch computation."""
    from .embedding import embed

    refresh(state, target_frtd, embedder)
    fresh = graph_distance(embed(target_graph, embedder.max_steps, embedder.alpha),
                           embed(state.to_graph(), embedder.max_steps, embedder.alpha))
    if abs(fresh - state.distance) > tol:
        raise RuntimeError(f"cached distance {state.distance!r} drifted from recomputed {fresh!r}")
