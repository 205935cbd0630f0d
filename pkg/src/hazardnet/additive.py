"""Likelihood, gradient and constrained MLE for the additive risk model.

The cascade log-likelihood splits into a log-hazard term per non-source
infection, an exposure term per (parent, infected) pair, and a survival term
per (infected, uninfected) pair. The negative log-likelihood is convex in
the rate matrix and separates over target-node columns, so the solver runs
one projected-gradient subproblem per column.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .optim import relative_change, segment_lengths, segment_sums
from .shaping import ShapingFunction
from .types import ADDITIVE, Cascade, CascadeSet, InferenceResult, Network, aggregate_traces

_ARMIJO = 1e-4
_MIN_STEP = 1e-20


@dataclass(frozen=True)
class AdditiveConfig:
    """Solver knobs for :func:`infer_additive`."""

    shaping: ShapingFunction
    max_iters: int = 2000
    tol: float = 1e-8
    step_init: float = 1.0
    edge_threshold: float = 1e-4

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if not self.step_init > 0.0:
            raise ValueError("step_init must be positive")
        if self.edge_threshold < 0.0:
            raise ValueError("edge_threshold must be nonnegative")


def _check_additive(net: Network) -> None:
    if net.kind != ADDITIVE:
        raise ValueError(f"expected an additive network, got {net.kind}")


def _check_window(cascade: Cascade, window: float) -> None:
    if cascade.times[-1] > window:
        raise ValueError("cascade has infections beyond the observation window")


def additive_cascade_loglik(
    net: Network, shaping: ShapingFunction, cascade: Cascade, window: float
) -> float:
    """Log-likelihood of one cascade under the additive model.

    Returns -inf when some non-source infection has zero total hazard at its
    own infection time, i.e. no parameter value can explain the event.
    """
    _check_additive(net)
    _check_window(cascade, window)
    A = net.params
    nodes, times = cascade.nodes, cascade.times
    ll = 0.0
    for r in range(1, nodes.size):
        parents, pt, ti = nodes[:r], times[:r], times[r]
        alphas = A[parents, nodes[r]]
        rate = float(alphas @ np.asarray(shaping.hazard(pt, ti)))
        if rate <= 0.0:
            return -math.inf
        ll += math.log(rate)
        ll -= float(alphas @ np.asarray(shaping.cumulative(pt, ti)))
    uninfected_mass = A[nodes].sum(axis=1) - A[nodes][:, nodes].sum(axis=1)
    if np.any(uninfected_mass != 0.0):
        survival = np.asarray(shaping.cumulative(times, window))
        ll -= float(survival @ uninfected_mass)
    return ll


def additive_set_loglik(net: Network, shaping: ShapingFunction, cs: CascadeSet) -> float:
    """Sum of per-cascade log-likelihoods over the whole set."""
    return float(sum(additive_cascade_loglik(net, shaping, c, cs.window) for c in cs))


def independent_cascade_loglik(
    net: Network, shaping: ShapingFunction, cascade: Cascade, window: float
) -> float:
    """Same likelihood computed through the pairwise-transmission route.

    Each infection's density is assembled in probability space as (sum of
    pairwise hazards) times (product of pairwise survivals), the way the
    independent cascade family defines it; uninfected nodes contribute the
    product of their pairwise survivals past the window.
    """
    _check_additive(net)
    _check_window(cascade, window)
    A = net.params
    nodes, times = cascade.nodes, cascade.times
    ll = 0.0
    for r in range(1, nodes.size):
        parents, pt, ti = nodes[:r], times[:r], times[r]
        alphas = A[parents, nodes[r]]
        pair_hazards = alphas * np.asarray(shaping.hazard(pt, ti))
        pair_survivals = np.exp(-alphas * np.asarray(shaping.cumulative(pt, ti)))
        density = float(pair_hazards.sum()) * float(np.prod(pair_survivals))
        if density <= 0.0:
            return -math.inf
        ll += math.log(density)
    all_nodes = np.arange(net.num_nodes)
    uninfected = np.setdiff1d(all_nodes, nodes, assume_unique=True)
    if uninfected.size:
        survival = np.asarray(shaping.cumulative(times, window))
        for n in uninfected:
            prob = float(np.prod(np.exp(-A[nodes, n] * survival)))
            if prob <= 0.0:
                return -math.inf
            ll += math.log(prob)
    return ll


def loglik_factorization_pair(
    net: Network, shaping: ShapingFunction, cascade: Cascade, window: float
) -> tuple[float, float]:
    """Cascade log-likelihood via both routes (direct, pairwise-factorized).

    The two values agree up to floating point; the pair is exposed so the
    identity can be checked on arbitrary instances.
    """
    return (
        additive_cascade_loglik(net, shaping, cascade, window),
        independent_cascade_loglik(net, shaping, cascade, window),
    )


def additive_gradient(net: Network, shaping: ShapingFunction, cs: CascadeSet) -> np.ndarray:
    """Gradient of the set log-likelihood with respect to the rate matrix.

    Entry (j, i) accumulates gamma/IR - G over cascades where both are
    infected with j first (IR the total hazard at i's infection), and -G(T)
    where j is infected and i is not. Diagonal entries stay zero.
    """
    _check_additive(net)
    A = net.params
    N = net.num_nodes
    grad = np.zeros((N, N))
    all_nodes = np.arange(N)
    for cascade in cs:
        _check_window(cascade, cs.window)
        nodes, times = cascade.nodes, cascade.times
        for r in range(1, nodes.size):
            parents, pt, ti = nodes[:r], times[:r], times[r]
            gamma = np.asarray(shaping.hazard(pt, ti))
            rate = float(A[parents, nodes[r]] @ gamma)
            if rate <= 0.0:
                raise ValueError(
                    "zero hazard at an observed infection: the log-likelihood "
                    "is -inf here and has no gradient"
                )
            grad[parents, nodes[r]] += gamma / rate - np.asarray(shaping.cumulative(pt, ti))
        uninfected = np.setdiff1d(all_nodes, nodes, assume_unique=True)
        if uninfected.size:
            survival = np.asarray(shaping.cumulative(times, cs.window))
            grad[np.ix_(nodes, uninfected)] -= survival[:, None]
    return grad


def additive_kkt_violation(net: Network, shaping: ShapingFunction, cs: CascadeSet) -> float:
    """Largest first-order optimality violation of the nonnegative MLE.

    For the negative log-likelihood g: |g| on strictly positive entries,
    max(0, -g) on entries at the zero boundary. Diagonal excluded.
    """
    nll_grad = -additive_gradient(net, shaping, cs)
    off = ~np.eye(net.num_nodes, dtype=bool)
    positive = off & (net.params > 0.0)
    boundary = off & (net.params == 0.0)
    worst = 0.0
    if positive.any():
        worst = max(worst, float(np.abs(nll_grad[positive]).max()))
    if boundary.any():
        worst = max(worst, float(np.maximum(-nll_grad[boundary], 0.0).max()))
    return worst


def _event_positions(cs: CascadeSet) -> list[np.ndarray]:
    """Per cascade, an N-vector mapping node id -> event index (-1 if absent)."""
    positions = []
    for c in cs:
        pos = np.full(cs.num_nodes, -1, dtype=np.int64)
        pos[c.nodes] = np.arange(c.nodes.size)
        positions.append(pos)
    return positions


def _column_problem(
    cs: CascadeSet,
    shaping: ShapingFunction,
    target: int,
    positions: list[np.ndarray],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pack the target column's likelihood data into flat arrays.

    Returns (exposure, flat_parents, flat_gamma, offsets): the linear NLL
    coefficients plus one ragged gamma row per explained infection.
    """
    N = cs.num_nodes
    exposure = np.zeros(N)
    idx_chunks: list[np.ndarray] = []
    gamma_chunks: list[np.ndarray] = []
    for cascade, pos in zip(cs.cascades, positions):
        r = int(pos[target])
        if r < 0:
            exposure[cascade.nodes] += np.asarray(
                shaping.cumulative(cascade.times, cs.window)
            )
        elif r > 0:
            parents, pt, ti = cascade.nodes[:r], cascade.times[:r], cascade.times[r]
            exposure[parents] += np.asarray(shaping.cumulative(pt, ti))
            gamma = np.asarray(shaping.hazard(pt, ti))
            if gamma.max(initial=0.0) <= 0.0:
                raise ValueError(
                    f"node {target} has an infection that no parameter can explain "
                    "(all parent kernels vanish at its infection time)"
                )
            idx_chunks.append(parents)
            gamma_chunks.append(gamma)
    if idx_chunks:
        flat_parents = np.concatenate(idx_chunks)
        flat_gamma = np.concatenate(gamma_chunks)
        offsets = np.cumsum([0] + [len(c) for c in idx_chunks[:-1]])
    else:
        flat_parents = np.zeros(0, dtype=np.int64)
        flat_gamma = np.zeros(0)
        offsets = np.zeros(0, dtype=np.int64)
    return exposure, flat_parents, flat_gamma, np.asarray(offsets, dtype=np.int64)


def _solve_column(
    target: int,
    exposure: np.ndarray,
    flat_parents: np.ndarray,
    flat_gamma: np.ndarray,
    offsets: np.ndarray,
    cfg: AdditiveConfig,
    x0: np.ndarray,
) -> tuple[np.ndarray, list[float], bool, int]:
    """Projected gradient with Armijo backtracking on one column NLL."""
    N = exposure.size
    if flat_parents.size == 0:
        # Only survival pressure: the nonnegative minimizer is exactly zero.
        return np.zeros(N), [0.0], True, 0
    lengths = segment_lengths(offsets, flat_parents.size)

    def value(x: np.ndarray) -> float:
        sums = segment_sums(x[flat_parents] * flat_gamma, offsets)
        if np.any(sums <= 0.0):
            return math.inf
        return float(exposure @ x - np.log(sums).sum())

    def gradient(x: np.ndarray) -> np.ndarray:
        sums = segment_sums(x[flat_parents] * flat_gamma, offsets)
        weights = flat_gamma / np.repeat(sums, lengths)
        return exposure - np.bincount(flat_parents, weights=weights, minlength=N)

    x = x0.copy()
    x[target] = 0.0
    f = value(x)
    trace = [f]
    grad = gradient(x)
    step = cfg.step_init
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        step *= 2.0
        while True:
            cand = np.maximum(x - step * grad, 0.0)
            f_cand = value(cand)
            if f_cand <= f + _ARMIJO * float(grad @ (cand - x)):
                break
            step *= 0.5
            if step < _MIN_STEP:
                return x, trace, True, iterations - 1
        previous = f
        x, f = cand, f_cand
        trace.append(f)
        if relative_change(previous, f) < cfg.tol:
            converged = True
            break
        grad = gradient(x)
    return x, trace, converged, iterations


def infer_additive(
    cs: CascadeSet,
    cfg: AdditiveConfig,
    init: Network | np.ndarray | None = None,
    workers: int = 1,
) -> InferenceResult:
    """Nonnegativity-constrained MLE of the additive rate matrix.

    The objective separates over target columns; each column is solved
    independently (optionally across ``workers`` threads — results do not
    depend on the worker count). Columns whose node is never infected after
    another node are zero immediately.
    """
    if len(cs) == 0:
        raise ValueError("need at least one cascade to infer from")
    N = cs.num_nodes
    positions = _event_positions(cs)
    if init is None:
        start = np.full((N, N), 0.1)
        np.fill_diagonal(start, 0.0)
    else:
        start = np.array(init.params if isinstance(init, Network) else init, dtype=np.float64)
        if start.shape != (N, N):
            raise ValueError("init must be an N x N matrix")
        if np.any(start < 0.0):
            raise ValueError("init must be nonnegative")

    def solve(i: int):
        exposure, fp, fg, offs = _column_problem(cs, cfg.shaping, i, positions)
        return _solve_column(i, exposure, fp, fg, offs, cfg, start[:, i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, range(N)))
    else:
        results = [solve(i) for i in range(N)]

    params = np.column_stack([r[0] for r in results])
    np.fill_diagonal(params, 0.0)
    trace = aggregate_traces([np.asarray(r[1]) for r in results])
    return InferenceResult(
        network=Network(params, ADDITIVE),
        objective_trace=trace,
        converged=all(r[2] for r in results),
        iterations=max(r[3] for r in results),
    )
