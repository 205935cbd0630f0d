"""Time-shaping kernels and baseline hazard families.

A shaping function maps a parent's infection age into the covariate that
drives the additive hazard of a target node; each variant has a closed-form
integral. Baselines are the parent-independent component of the
multiplicative hazard, again with closed-form interval integrals and exact
inverses (used by the cascade sampler).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXPONENTIAL = "exponential"
POWER = "power"
RAYLEIGH = "rayleigh"
SHAPING_VARIANTS = (EXPONENTIAL, POWER, RAYLEIGH)

CONSTANT = "constant"
LINEAR = "linear"
INVERSE = "inverse"
BASELINE_VARIANTS = (CONSTANT, LINEAR, INVERSE)


def _match_input(result: np.ndarray, *inputs) -> np.ndarray | float:
    if all(np.isscalar(x) or np.ndim(x) == 0 for x in inputs):
        return float(result)
    return result


@dataclass(frozen=True)
class ShapingFunction:
    """One of the three kernel families driving additive hazards.

    exponential: a unit step once the parent is infected.
    power:       1/(t - t_parent), switched on only after a minimum delay
                 ``delta`` (the kernel is not integrable at zero age).
    rayleigh:    linear growth t - t_parent.
    """

    variant: str
    delta: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in SHAPING_VARIANTS:
            raise ValueError(f"unknown shaping variant {self.variant!r}")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError("delta must be a positive finite delay")

    def hazard(self, t_parent, t) -> np.ndarray | float:
        """Kernel value at time ``t`` for a parent infected at ``t_parent``.

        Zero whenever t <= t_parent (and, for the power kernel, whenever the
        age is below ``delta``).
        """
        tp = np.asarray(t_parent, dtype=np.float64)
        age = np.asarray(t, dtype=np.float64) - tp
        if self.variant == EXPONENTIAL:
            out = np.where(age > 0.0, 1.0, 0.0)
        elif self.variant == RAYLEIGH:
            out = np.maximum(age, 0.0)
        else:
            out = np.where(age >= self.delta, 1.0 / np.maximum(age, self.delta), 0.0)
        return _match_input(out, t_parent, t)

    def cumulative(self, t_parent, t) -> np.ndarray | float:
        """Integral of :meth:`hazard` from ``t_parent`` up to ``t``."""
        tp = np.asarray(t_parent, dtype=np.float64)
        age = np.asarray(t, dtype=np.float64) - tp
        if self.variant == EXPONENTIAL:
            out = np.maximum(age, 0.0)
        elif self.variant == RAYLEIGH:
            out = 0.5 * np.maximum(age, 0.0) ** 2
        else:
            out = np.log(np.maximum(age / self.delta, 1.0))
        return _match_input(out, t_parent, t)


@dataclass(frozen=True)
class Baseline:
    """Parent-independent hazard component of the multiplicative model.

    The scale enters through ``log_scale`` (= a0), so the rate is exp(a0),
    exp(a0) * t or exp(a0) / t. The inverse variant is singular at the
    origin; its integrals clamp the lower limit at ``epsilon``, i.e. the
    rate is treated as zero on [0, epsilon).
    """

    variant: str
    log_scale: float = 0.0
    epsilon: float = 1e-3

    def __post_init__(self) -> None:
        if self.variant not in BASELINE_VARIANTS:
            raise ValueError(f"unknown baseline variant {self.variant!r}")
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a positive finite clamp")
        if not math.isfinite(self.log_scale):
            raise ValueError("log_scale must be finite")

    @property
    def scale(self) -> float:
        return math.exp(self.log_scale)

    def rate(self, t) -> np.ndarray | float:
        """Baseline hazard value at time ``t`` (0 where the clamp applies)."""
        tt = np.asarray(t, dtype=np.float64)
        if self.variant == CONSTANT:
            out = np.full_like(tt, self.scale)
        elif self.variant == LINEAR:
            out = self.scale * np.maximum(tt, 0.0)
        else:
            out = np.where(tt >= self.epsilon, self.scale / np.maximum(tt, self.epsilon), 0.0)
        return _match_input(out, t)

    def log_rate(self, t) -> np.ndarray | float:
        """log of :meth:`rate`; -inf where the rate is zero."""
        tt = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            if self.variant == CONSTANT:
                out = np.full_like(tt, self.log_scale)
            elif self.variant == LINEAR:
                out = np.where(tt > 0.0, self.log_scale + np.log(np.maximum(tt, 1e-300)), -np.inf)
            else:
                out = np.where(
                    tt >= self.epsilon,
                    self.log_scale - np.log(np.maximum(tt, self.epsilon)),
                    -np.inf,
                )
        return _match_input(out, t)

    def integral(self, a, b) -> np.ndarray | float:
        """Closed-form integral of the rate over [a, b]; 0 when b <= a."""
        lo = np.asarray(a, dtype=np.float64)
        hi = np.maximum(np.asarray(b, dtype=np.float64), lo)
        if self.variant == CONSTANT:
            out = self.scale * (hi - lo)
        elif self.variant == LINEAR:
            out = 0.5 * self.scale * (hi**2 - lo**2)
        else:
            eps = self.epsilon
            out = self.scale * np.log(np.maximum(hi, eps) / np.maximum(lo, eps))
        return _match_input(out, a, b)

    def invert_integral(self, a: float, target: float) -> float:
        """Smallest t >= a with integral(a, t) == target.

        Exact inverse of :meth:`integral`; every variant has unbounded mass,
        so a solution always exists for finite targets.
        """
        if target <= 0.0:
            return float(a)
        if self.variant == CONSTANT:
            return float(a + target / self.scale)
        if self.variant == LINEAR:
            return float(math.sqrt(max(a, 0.0) ** 2 + 2.0 * target / self.scale))
        start = max(a, self.epsilon)
        return float(start * math.exp(target / self.scale))
