"""Likelihood, gradient, support restriction and L1 MLE for the
multiplicative risk model.

Influences enter the hazard as exp(alpha), so the cascade log-likelihood is
a linear term (one count per ordered co-infection) minus a sum of
exponentials of partial influence totals — convex in the matrix. Pairs never
co-infected in order carry no upward pressure and would run off to -inf, so
they are frozen at zero through a support mask built from the data; the
remaining entries are estimated by proximal gradient with soft-thresholding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .optim import (
    relative_change,
    segment_cumsum,
    segment_reverse_cumsum,
    soft_threshold,
)
from .shaping import Baseline
from .types import (
    MULTIPLICATIVE,
    Cascade,
    CascadeSet,
    InferenceResult,
    Network,
    aggregate_traces,
)

_MIN_STEP = 1e-20


@dataclass(frozen=True)
class MultiplicativeConfig:
    """Solver knobs for :func:`infer_multiplicative`.

    ``l1_penalty`` of None picks the scale-aware default
    0.01 * num_cascades / num_nodes at solve time.
    """

    baseline: Baseline
    l1_penalty: float | None = None
    max_iters: int = 2000
    tol: float = 1e-8
    step_init: float = 1.0
    edge_threshold: float = 1e-4
    accelerate: bool = False

    def __post_init__(self) -> None:
        if self.l1_penalty is not None and self.l1_penalty < 0.0:
            raise ValueError("l1_penalty must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if not self.step_init > 0.0:
            raise ValueError("step_init must be positive")
        if self.edge_threshold < 0.0:
            raise ValueError("edge_threshold must be nonnegative")


@dataclass(frozen=True)
class SupportMask:
    """Boolean matrix of ordered pairs that co-occur in some cascade.

    Entry (j, i) is True iff a cascade infected both with j strictly first.
    Parameters outside the mask stay frozen at zero everywhere.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=bool, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("mask must be square")
        if np.any(np.diagonal(m)):
            raise ValueError("mask diagonal must be False")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def num_nodes(self) -> int:
        return int(self.matrix.shape[0])

    def count(self) -> int:
        return int(self.matrix.sum())


class SignedEdge(NamedTuple):
    source: int
    target: int
    sign: int
    weight: float


def build_support(cs: CascadeSet) -> SupportMask:
    """Mask of ordered node pairs co-infected in at least one cascade."""
    mask = np.zeros((cs.num_nodes, cs.num_nodes), dtype=bool)
    for cascade in cs:
        nodes = cascade.nodes
        earlier = np.triu(np.ones((nodes.size, nodes.size), dtype=bool), k=1)
        mask[np.ix_(nodes, nodes)] |= earlier
    return SupportMask(mask)


def _check_multiplicative(net: Network) -> None:
    if net.kind != MULTIPLICATIVE:
        raise ValueError(f"expected a multiplicative network, got {net.kind}")


def _masked_params(net: Network, mask: SupportMask) -> np.ndarray:
    if mask.num_nodes != net.num_nodes:
        raise ValueError("mask and network sizes differ")
    return np.where(mask.matrix, net.params, 0.0)


def _interval_weights(cascade: Cascade, baseline: Baseline, window: float) -> np.ndarray:
    """Baseline integral of each inter-event interval, last one ending at T.

    A target infected at event position r accumulates the first r weights;
    an uninfected target accumulates all of them.
    """
    rights = np.concatenate([cascade.times[1:], [window]])
    return np.asarray(baseline.integral(cascade.times, rights), dtype=np.float64)


def _cumulative_exposure(alphas_by_event: np.ndarray, weights: np.ndarray, upto: int) -> float:
    """Sum over the first ``upto`` intervals of exp(prefix influence) * weight."""
    if upto == 0:
        return 0.0
    prefix = np.cumsum(alphas_by_event[:upto])
    return float(np.exp(prefix) @ weights[:upto])


def multiplicative_cascade_loglik(
    net: Network, baseline: Baseline, mask: SupportMask, cascade: Cascade, window: float
) -> float:
    """Log-likelihood of one cascade, restricted to masked parameters.

    Per non-source infection: masked influences of earlier nodes, plus the
    log baseline rate, minus the cumulative hazard up to the infection.
    Uninfected nodes contribute their cumulative hazard over the window.
    """
    _check_multiplicative(net)
    if cascade.times[-1] > window:
        raise ValueError("cascade has infections beyond the observation window")
    A = _masked_params(net, mask)
    nodes, times = cascade.nodes, cascade.times
    weights = _interval_weights(cascade, baseline, window)
    ll = 0.0
    for r in range(1, nodes.size):
        i = nodes[r]
        alphas = A[nodes, i]
        ll += float(alphas[:r].sum())
        ll += float(baseline.log_rate(times[r]))
        ll -= _cumulative_exposure(alphas, weights, r)
    all_nodes = np.arange(net.num_nodes)
    for n in np.setdiff1d(all_nodes, nodes, assume_unique=True):
        ll -= _cumulative_exposure(A[nodes, n], weights, nodes.size)
    return ll


def multiplicative_set_loglik(
    net: Network, baseline: Baseline, mask: SupportMask, cs: CascadeSet
) -> float:
    return float(
        sum(multiplicative_cascade_loglik(net, baseline, mask, c, cs.window) for c in cs)
    )


def multiplicative_gradient(
    net: Network, baseline: Baseline, mask: SupportMask, cs: CascadeSet
) -> np.ndarray:
    """Gradient of the masked set log-likelihood; zero outside the mask.

    Entry (k, i): one per cascade where k precedes i's infection, minus the
    part of i's cumulative exposure accrued while k was already infected.
    """
    _check_multiplicative(net)
    A = _masked_params(net, mask)
    N = net.num_nodes
    grad = np.zeros((N, N))
    all_nodes = np.arange(N)
    for cascade in cs:
        nodes, times = cascade.nodes, cascade.times
        weights = _interval_weights(cascade, baseline, cs.window)

        def exposure_pull(target: int, upto: int) -> None:
            if upto == 0:
                return
            prefix = np.cumsum(A[nodes[:upto], target])
            terms = np.exp(prefix) * weights[:upto]
            # d exposure / d alpha_{k, target} sums the intervals where k is active
            grad[nodes[:upto], target] -= np.cumsum(terms[::-1])[::-1]

        for r in range(1, nodes.size):
            grad[nodes[:r], nodes[r]] += 1.0
            exposure_pull(int(nodes[r]), r)
        for n in np.setdiff1d(all_nodes, nodes, assume_unique=True):
            exposure_pull(int(n), nodes.size)
    grad[~mask.matrix] = 0.0
    return grad


def multiplicative_kkt_violation(
    net: Network,
    baseline: Baseline,
    mask: SupportMask,
    cs: CascadeSet,
    l1_penalty: float,
) -> float:
    """Largest violation of the L1-subdifferential optimality conditions."""
    nll_grad = -multiplicative_gradient(net, baseline, mask, cs)
    worst = 0.0
    active = mask.matrix & (net.params != 0.0)
    zero = mask.matrix & (net.params == 0.0)
    if active.any():
        resid = nll_grad[active] + l1_penalty * np.sign(net.params[active])
        worst = max(worst, float(np.abs(resid).max()))
    if zero.any():
        resid = np.maximum(np.abs(nll_grad[zero]) - l1_penalty, 0.0)
        worst = max(worst, float(resid.max()))
    return worst


def extract_signed_edges(net: Network, threshold: float) -> list[SignedEdge]:
    """Edges with |influence| above ``threshold``, labeled by sign."""
    _check_multiplicative(net)
    out: list[SignedEdge] = []
    for j, i in np.argwhere(np.abs(net.params) > threshold):
        w = float(net.params[j, i])
        out.append(SignedEdge(int(j), int(i), 1 if w > 0 else -1, w))
    return out


def _compile_shared(cs: CascadeSet, baseline: Baseline):
    """Per-cascade interval weights plus global co-infection counts and
    baseline log-rate totals, shared by every column subproblem."""
    N = cs.num_nodes
    counts = np.zeros((N, N))
    const = np.zeros(N)
    weights_per_cascade = []
    positions = []
    for cascade in cs:
        nodes, times = cascade.nodes, cascade.times
        weights_per_cascade.append(_interval_weights(cascade, baseline, cs.window))
        pos = np.full(N, -1, dtype=np.int64)
        pos[nodes] = np.arange(nodes.size)
        positions.append(pos)
        earlier = np.triu(np.ones((nodes.size, nodes.size)), k=1)
        counts[np.ix_(nodes, nodes)] += earlier
        if nodes.size > 1:
            rates = np.asarray(baseline.log_rate(times[1:]))
            if not np.all(np.isfinite(rates)):
                raise ValueError(
                    "an infection time lies outside the baseline's support "
                    "(log rate is -inf there)"
                )
            const[nodes[1:]] += rates
    return counts, const, weights_per_cascade, positions


def _column_problem_mult(cs, target, weights_per_cascade, positions):
    """Flatten the target's exposure intervals across cascades."""
    node_chunks, weight_chunks = [], []
    for cascade, weights, pos in zip(cs.cascades, weights_per_cascade, positions):
        r = int(pos[target])
        upto = cascade.nodes.size if r < 0 else r
        if upto == 0:
            continue
        node_chunks.append(cascade.nodes[:upto])
        weight_chunks.append(weights[:upto])
    if node_chunks:
        flat_nodes = np.concatenate(node_chunks)
        flat_weights = np.concatenate(weight_chunks)
        offsets = np.cumsum([0] + [len(c) for c in node_chunks[:-1]])
    else:
        flat_nodes = np.zeros(0, dtype=np.int64)
        flat_weights = np.zeros(0)
        offsets = np.zeros(0, dtype=np.int64)
    return flat_nodes, flat_weights, np.asarray(offsets, dtype=np.int64)


def _solve_column_mult(
    free: np.ndarray,
    count_col: np.ndarray,
    const: float,
    flat_nodes: np.ndarray,
    flat_weights: np.ndarray,
    offsets: np.ndarray,
    penalty: float,
    cfg: MultiplicativeConfig,
    x0: np.ndarray,
) -> tuple[np.ndarray, list[float], bool, int]:
    """Proximal gradient with backtracking on one column's penalized NLL.

    With ``accelerate`` the extrapolated step is used, restarting the
    momentum whenever it would increase the objective, so the recorded
    trace stays nonincreasing in both modes.
    """
    N = count_col.size

    def value_and_cache(x: np.ndarray) -> tuple[float, np.ndarray]:
        with np.errstate(over="ignore"):
            prefix = segment_cumsum(x[flat_nodes], offsets)
            lam = np.exp(prefix) * flat_weights
        return float(lam.sum() - count_col @ x - const), lam

    def grad_from_cache(lam: np.ndarray) -> np.ndarray:
        pulls = segment_reverse_cumsum(lam, offsets)
        return np.bincount(flat_nodes, weights=pulls, minlength=N) - count_col

    def penalized(smooth_value: float, x: np.ndarray) -> float:
        return smooth_value + penalty * float(np.abs(x[free]).sum())

    x = np.zeros(N)
    x[free] = x0[free]
    if free.size == 0:
        return x, [value_and_cache(x)[0]], True, 0
    f, lam = value_and_cache(x)
    grad = grad_from_cache(lam)
    objective = penalized(f, x)
    trace = [objective]
    base, f_base, grad_base = x, f, grad  # extrapolation point (== x when plain)
    t_k = 1.0
    step = cfg.step_init
    converged = False
    iterations = 0

    def prox_step_from(point, f_point, grad_point, step):
        while True:
            cand = np.zeros(N)
            cand[free] = soft_threshold(point[free] - step * grad_point[free], step * penalty)
            f_cand, lam_cand = value_and_cache(cand)
            diff = cand[free] - point[free]
            model = f_point + float(grad_point[free] @ diff) + float(diff @ diff) / (2.0 * step)
            if math.isfinite(f_cand) and f_cand <= model + 1e-12 * abs(model):
                return cand, f_cand, lam_cand, step
            step *= 0.5
            if step < _MIN_STEP:
                return None, f_point, None, step

    for iterations in range(1, cfg.max_iters + 1):
        step *= 2.0
        cand, f_cand, lam_cand, step = prox_step_from(base, f_base, grad_base, step)
        if cand is None:
            return x, trace, True, iterations - 1
        if cfg.accelerate and penalized(f_cand, cand) > objective and base is not x:
            # momentum overshoot: restart from the last accepted point
            t_k = 1.0
            cand, f_cand, lam_cand, step = prox_step_from(x, f, grad, step)
            if cand is None:
                return x, trace, True, iterations - 1
        previous_x, previous_obj = x, objective
        x, f = cand, f_cand
        grad = grad_from_cache(lam_cand)
        objective = penalized(f, x)
        trace.append(objective)
        if relative_change(previous_obj, objective) < cfg.tol:
            converged = True
            break
        if cfg.accelerate:
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_k * t_k))
            base = x + ((t_k - 1.0) / t_next) * (x - previous_x)
            t_k = t_next
            f_base, lam_at_base = value_and_cache(base)
            grad_base = grad_from_cache(lam_at_base)
        else:
            base, f_base, grad_base = x, f, grad
    return x, trace, converged, iterations


def infer_multiplicative(
    cs: CascadeSet,
    cfg: MultiplicativeConfig,
    init: Network | np.ndarray | None = None,
    workers: int = 1,
) -> InferenceResult:
    """L1-regularized MLE of the multiplicative influence matrix.

    Parameters outside the data's support mask are frozen at zero and never
    enter the objective. Columns solve independently (optionally across
    ``workers`` threads; the result does not depend on the worker count).
    """
    if len(cs) == 0:
        raise ValueError("need at least one cascade to infer from")
    N = cs.num_nodes
    mask = build_support(cs)
    penalty = cfg.l1_penalty if cfg.l1_penalty is not None else 0.01 * len(cs) / N
    counts, const, weights_per_cascade, positions = _compile_shared(cs, cfg.baseline)
    if init is None:
        start = np.zeros((N, N))
    else:
        start = np.array(init.params if isinstance(init, Network) else init, dtype=np.float64)
        if start.shape != (N, N):
            raise ValueError("init must be an N x N matrix")
    start = np.where(mask.matrix, start, 0.0)

    def solve(i: int):
        free = np.nonzero(mask.matrix[:, i])[0]
        flat_nodes, flat_weights, offsets = _column_problem_mult(
            cs, i, weights_per_cascade, positions
        )
        return _solve_column_mult(
            free,
            counts[:, i],
            float(const[i]),
            flat_nodes,
            flat_weights,
            offsets,
            penalty,
            cfg,
            start[:, i],
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, range(N)))
    else:
        results = [solve(i) for i in range(N)]

    params = np.column_stack([r[0] for r in results])
    np.fill_diagonal(params, 0.0)
    trace = aggregate_traces([np.asarray(r[1]) for r in results])
    return InferenceResult(
        network=Network(params, MULTIPLICATIVE),
        objective_trace=trace,
        converged=all(r[2] for r in results),
        iterations=max(r[3] for r in results),
    )
