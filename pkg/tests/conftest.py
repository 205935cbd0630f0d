"""Shared builders for randomized test instances.

Instances are produced by simulating from a random ground-truth network so
every cascade is feasible under the model that will be evaluated on it
(e.g. power kernels with a delay floor never see unexplainable infections).
"""

from __future__ import annotations

import numpy as np

import hazardnet as hn


def random_additive_network(rng: np.random.Generator, n: int, lo=0.2, hi=1.0) -> hn.Network:
    params = rng.uniform(lo, hi, size=(n, n))
    params[rng.random((n, n)) < 0.35] = 0.0
    np.fill_diagonal(params, 0.0)
    return hn.Network(params, hn.ADDITIVE)


def random_multiplicative_network(rng: np.random.Generator, n: int, scale=0.6) -> hn.Network:
    params = rng.uniform(-scale, scale, size=(n, n))
    params[rng.random((n, n)) < 0.35] = 0.0
    np.fill_diagonal(params, 0.0)
    return hn.Network(params, hn.MULTIPLICATIVE)


def additive_instance(
    seed: int,
    n_nodes: int = 8,
    n_cascades: int = 30,
    variant: str = hn.EXPONENTIAL,
    window: float = 3.0,
    delta: float = 0.05,
):
    """(network, shaping, cascades) with cascades simulated from the network."""
    rng = np.random.default_rng(seed)
    shaping = hn.ShapingFunction(variant, delta=delta)
    net = random_additive_network(rng, n_nodes)
    cs = hn.simulate_set(net, shaping, n_cascades, window, rng_seed=seed + 1)
    return net, shaping, cs


def multiplicative_instance(
    seed: int,
    n_nodes: int = 8,
    n_cascades: int = 30,
    variant: str = hn.CONSTANT,
    window: float = 3.0,
    log_scale: float = -0.5,
):
    """(network, baseline, mask, cascades) simulated from the network."""
    rng = np.random.default_rng(seed)
    baseline = hn.Baseline(variant, log_scale=log_scale)
    net = random_multiplicative_network(rng, n_nodes)
    cs = hn.simulate_set(net, baseline, n_cascades, window, rng_seed=seed + 1)
    return net, baseline, hn.build_support(cs), cs
