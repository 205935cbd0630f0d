"""Synthetic ground truth: Kronecker networks, random edge parameters, and
exact cascade sampling.

Sampling draws one uniform per node up front and inverts the node's
piecewise cumulative hazard at -log(1 - u), i.e. maps the uniform through
the inverse CDF. Because the uniform is fixed, the tentative infection time
is a pure function of the committed history, so the event loop (commit
earliest, refresh nodes whose hazard changed) produces a sample that does
not depend on the refresh schedule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .shaping import Baseline, POWER, ShapingFunction
from .types import ADDITIVE, MULTIPLICATIVE, Cascade, CascadeSet, Network

KRONECKER_SEEDS = {
    "core-periphery": np.array([[0.9, 0.5], [0.5, 0.3]]),
    "hierarchical": np.array([[0.9, 0.1], [0.1, 0.9]]),
    "random": np.array([[0.5, 0.5], [0.5, 0.5]]),
}

_BISECT_TOL = 1e-10


class ScaleOverflowError(ValueError):
    """Raised when the requested average degree needs edge probabilities > 1."""


@dataclass(frozen=True)
class KroneckerSpec:
    """Recipe for a stochastic Kronecker graph on 2**scale nodes."""

    seed_matrix: np.ndarray
    scale: int
    target_avg_degree: float
    rng_seed: int = 0

    def __post_init__(self) -> None:
        seed = np.array(self.seed_matrix, dtype=np.float64, copy=True)
        if seed.shape != (2, 2):
            raise ValueError("seed_matrix must be 2 x 2")
        if np.any(seed < 0.0) or np.any(seed > 1.0):
            raise ValueError("seed entries must be probabilities in [0, 1]")
        if self.scale < 1:
            raise ValueError("scale must be at least 1")
        if not self.target_avg_degree > 0.0:
            raise ValueError("target_avg_degree must be positive")
        seed.flags.writeable = False
        object.__setattr__(self, "seed_matrix", seed)

    @property
    def num_nodes(self) -> int:
        return 2**self.scale


@dataclass(frozen=True)
class ParamDistribution:
    """Uniform law for edge parameters.

    Additive draws are rates on [low, high] with low > 0; multiplicative
    draws are magnitudes on [low, high], negated with probability
    ``negative_prob``.
    """

    kind: str
    low: float
    high: float
    negative_prob: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in (ADDITIVE, MULTIPLICATIVE):
            raise ValueError(f"unknown network kind {self.kind!r}")
        if not (self.low <= self.high):
            raise ValueError("need low <= high")
        if self.kind == ADDITIVE and not self.low > 0.0:
            raise ValueError("additive rates must stay strictly positive")
        if self.kind == MULTIPLICATIVE and self.low < 0.0:
            raise ValueError("multiplicative magnitudes must be nonnegative")
        if not (0.0 <= self.negative_prob <= 1.0):
            raise ValueError("negative_prob must be a probability")


def generate_kronecker(spec: KroneckerSpec) -> np.ndarray:
    """Sample a directed edge set, returned as an (E, 2) array of (u, v).

    Edge probabilities are the scale-fold Kronecker power of the seed,
    rescaled so the expected number of (non-loop) edges matches
    num_nodes * target_avg_degree. Raises :class:`ScaleOverflowError` when
    that would push some probability past 1.
    """
    probs = spec.seed_matrix
    for _ in range(spec.scale - 1):
        probs = np.kron(probs, spec.seed_matrix)
    probs = probs.copy()
    np.fill_diagonal(probs, 0.0)
    total = probs.sum()
    if total == 0.0:
        return np.zeros((0, 2), dtype=np.int64)
    factor = spec.num_nodes * spec.target_avg_degree / total
    probs *= factor
    if probs.max() > 1.0 + 1e-12:
        raise ScaleOverflowError(
            f"average degree {spec.target_avg_degree} needs an edge probability "
            f"of {probs.max():.4f} > 1; lower the degree or grow the graph"
        )
    np.clip(probs, 0.0, 1.0, out=probs)
    rng = np.random.default_rng(spec.rng_seed)
    hits = rng.random(probs.shape) < probs
    np.fill_diagonal(hits, False)
    return np.argwhere(hits).astype(np.int64)


def assign_parameters(
    num_nodes: int, edges: np.ndarray, dist: ParamDistribution, rng_seed: int = 0
) -> Network:
    """Draw one parameter per edge and assemble the dense network."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
        raise ValueError("edge endpoint outside the node universe")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise ValueError("self-loops are not allowed")
    rng = np.random.default_rng(rng_seed)
    values = rng.uniform(dist.low, dist.high, size=edges.shape[0])
    if dist.kind == MULTIPLICATIVE and dist.negative_prob > 0.0:
        flip = rng.random(edges.shape[0]) < dist.negative_prob
        values = np.where(flip, -values, values)
    params = np.zeros((num_nodes, num_nodes))
    params[edges[:, 0], edges[:, 1]] = values
    return Network(params, dist.kind)


def _bisect(fn, lo: float, hi: float, target: float) -> float:
    """Locate fn crossing ``target`` on [lo, hi]; fn nondecreasing."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= _BISECT_TOL * max(1.0, abs(hi)):
            return mid
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _invert_additive(
    shaping: ShapingFunction,
    parent_times: np.ndarray,
    alphas: np.ndarray,
    target: float,
    t_max: float,
) -> float:
    """Earliest t <= t_max with cumulative additive hazard == target."""
    live = alphas > 0.0
    parent_times, alphas = parent_times[live], alphas[live]
    if parent_times.size == 0 or not math.isfinite(target):
        return math.inf
    starts = parent_times + shaping.delta if shaping.variant == POWER else parent_times
    points = np.unique(starts[starts < t_max])
    if points.size == 0:
        return math.inf
    grid = np.concatenate([points, [t_max]])
    cumhaz = alphas @ np.asarray(shaping.cumulative(parent_times[:, None], grid[None, :]))
    if cumhaz[-1] < target:
        return math.inf
    seg = int(np.searchsorted(cumhaz, target, side="left"))
    if seg == 0:
        return float(grid[0])
    a, b = float(grid[seg - 1]), float(grid[seg])
    residual = target - float(cumhaz[seg - 1])
    if residual <= 0.0:
        return a
    active = starts <= a
    act_times, act_alphas = parent_times[active], alphas[active]
    if shaping.variant == POWER and act_times.size > 1:
        lam = lambda t: float(act_alphas @ np.asarray(shaping.cumulative(act_times, t)))
        return _bisect(lam, a, b, float(cumhaz[seg - 1]) + residual)
    if shaping.variant == POWER:
        tp = float(act_times[0])
        return tp + (a - tp) * math.exp(residual / float(act_alphas[0]))
    s0 = float(act_alphas.sum())
    if shaping.variant == "exponential":
        return a + residual / s0
    s1 = float(act_alphas @ act_times)
    disc = s1 * s1 + 2.0 * s0 * (residual + 0.5 * s0 * a * a - s1 * a)
    return (s1 + math.sqrt(max(disc, 0.0))) / s0


def _invert_multiplicative(
    baseline: Baseline,
    parent_times: np.ndarray,
    alphas: np.ndarray,
    target: float,
    t_max: float,
) -> float:
    """Earliest t <= t_max with cumulative multiplicative hazard == target."""
    if not math.isfinite(target):
        return math.inf
    # zero-influence parents leave the hazard unchanged; dropping them keeps
    # the piecewise evaluation independent of the refresh schedule
    keep = (parent_times < t_max) & (alphas != 0.0)
    parent_times, alphas = parent_times[keep], alphas[keep]
    if parent_times.size == 0 or parent_times[0] > 0.0:
        parent_times = np.concatenate([[0.0], parent_times])
        alphas = np.concatenate([[0.0], alphas])
    lefts = parent_times
    rights = np.concatenate([lefts[1:], [t_max]])
    mults = np.exp(np.cumsum(alphas))
    pieces = mults * np.asarray(baseline.integral(lefts, rights))
    cumhaz = np.cumsum(pieces)
    if cumhaz[-1] < target:
        return math.inf
    seg = int(np.searchsorted(cumhaz, target, side="left"))
    before = float(cumhaz[seg - 1]) if seg > 0 else 0.0
    residual = target - before
    if residual <= 0.0:
        return float(lefts[seg])
    t = baseline.invert_integral(float(lefts[seg]), residual / float(mults[seg]))
    return min(t, float(rights[seg]))


def infection_time_from_uniform(
    net: Network,
    model: ShapingFunction | Baseline,
    history: Cascade,
    node: int,
    u: float,
    t_max: float,
) -> float:
    """Infection time of ``node`` implied by uniform draw ``u``, given a fixed
    history of parent infections; inf when the node survives past ``t_max``.

    This is the per-node inversion step the cascade sampler is built on,
    exposed so its law can be tested against the closed-form CDFs.
    """
    if not (0.0 <= u < 1.0):
        raise ValueError("u must lie in [0, 1)")
    if np.any(history.nodes == node):
        raise ValueError("node is already part of the history")
    target = -math.log1p(-u)  # quantile map: t solves F(t) = u
    alphas = net.params[history.nodes, node]
    times = np.asarray(history.times, dtype=np.float64)
    if isinstance(model, ShapingFunction):
        if net.kind != ADDITIVE:
            raise ValueError("shaping functions pair with additive networks")
        return _invert_additive(model, times, alphas, target, t_max)
    if net.kind != MULTIPLICATIVE:
        raise ValueError("baselines pair with multiplicative networks")
    return _invert_multiplicative(model, times, alphas, target, t_max)


def _draw_targets(u: np.ndarray) -> np.ndarray:
    return -np.log1p(-u)


def simulate_cascade(
    net: Network,
    model: ShapingFunction | Baseline,
    source: int,
    window: float,
    rng_seed: int = 0,
    uniforms: np.ndarray | None = None,
    recompute_all: bool = False,
) -> Cascade:
    """Sample one cascade started by ``source`` at time 0.

    ``uniforms`` (one per node, in [0, 1)) can be supplied to make the draw
    a pure function of the network; otherwise they come from ``rng_seed``.
    ``recompute_all`` refreshes every susceptible node after each event
    instead of only those whose hazard changed — slower, same cascade.
    """
    N = net.num_nodes
    if not (0 <= source < N):
        raise ValueError(f"source {source} outside universe of {N} nodes")
    if not window > 0.0:
        raise ValueError("window must be positive")
    additive = isinstance(model, ShapingFunction)
    if additive and net.kind != ADDITIVE:
        raise ValueError("shaping functions pair with additive networks")
    if not additive and net.kind != MULTIPLICATIVE:
        raise ValueError("baselines pair with multiplicative networks")
    if uniforms is None:
        uniforms = np.random.default_rng(rng_seed).random(N)
    else:
        uniforms = np.asarray(uniforms, dtype=np.float64)
        if uniforms.shape != (N,) or np.any(uniforms < 0.0) or np.any(uniforms >= 1.0):
            raise ValueError("uniforms must be N values in [0, 1)")
    targets = _draw_targets(uniforms)

    hist_nodes = np.empty(N, dtype=np.int64)
    hist_times = np.empty(N, dtype=np.float64)
    hist_nodes[0], hist_times[0] = source, 0.0
    count = 1
    susceptible = np.ones(N, dtype=bool)
    susceptible[source] = False
    tentative = np.full(N, math.inf)

    def refresh(node: int) -> None:
        times = hist_times[:count]
        alphas = net.params[hist_nodes[:count], node]
        if additive:
            tentative[node] = _invert_additive(model, times, alphas, targets[node], window)
        else:
            tentative[node] = _invert_multiplicative(model, times, alphas, targets[node], window)

    def affected_by(infector: int) -> np.ndarray:
        if recompute_all:
            return np.nonzero(susceptible)[0]
        return np.nonzero(susceptible & (net.params[infector] != 0.0))[0]

    if additive and not recompute_all:
        initial = np.nonzero(susceptible & (net.params[source] != 0.0))[0]
    else:
        initial = np.nonzero(susceptible)[0]
    for node in initial:
        refresh(node)

    while True:
        nxt = int(np.argmin(tentative))
        t_next = float(tentative[nxt])
        if not (t_next <= window):
            break
        if t_next <= hist_times[count - 1]:  # ulp-level ties keep the order strict
            t_next = float(np.nextafter(hist_times[count - 1], math.inf))
            if t_next > window:
                break
        hist_nodes[count], hist_times[count] = nxt, t_next
        count += 1
        susceptible[nxt] = False
        tentative[nxt] = math.inf
        for node in affected_by(nxt):
            refresh(node)

    return Cascade(hist_nodes[:count].copy(), hist_times[:count].copy())


def simulate_set(
    net: Network,
    model: ShapingFunction | Baseline,
    num_cascades: int,
    window: float,
    sources: Sequence[int] | None = None,
    rng_seed: int = 0,
    workers: int = 1,
) -> CascadeSet:
    """Sample independent cascades; deterministic in ``rng_seed``.

    Sources are drawn uniformly at random unless given. Each cascade uses a
    seed spawned from ``rng_seed`` by index, so results are identical for
    any ``workers`` count.
    """
    if num_cascades < 0:
        raise ValueError("num_cascades must be nonnegative")
    if sources is not None and len(sources) != num_cascades:
        raise ValueError("need exactly one source per cascade")
    N = net.num_nodes
    children = np.random.SeedSequence(rng_seed).spawn(num_cascades)

    def build(k: int) -> Cascade:
        rng = np.random.default_rng(children[k])
        source = int(sources[k]) if sources is not None else int(rng.integers(N))
        return simulate_cascade(net, model, source, window, uniforms=rng.random(N))

    if workers > 1 and num_cascades > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cascades = list(pool.map(build, range(num_cascades)))
    else:
        cascades = [build(k) for k in range(num_cascades)]
    return CascadeSet(N, window, tuple(cascades))
