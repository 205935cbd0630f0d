"""Small numeric helpers shared by the two solvers.

The likelihoods decompose into ragged per-cascade segments that get packed
into flat arrays; these helpers implement the segmented reductions without
materializing sparse matrices.
"""

from __future__ import annotations

import numpy as np


def soft_threshold(values: np.ndarray, amount: float) -> np.ndarray:
    """Shrink toward zero by ``amount`` and clamp to exact zero past it."""
    return np.sign(values) * np.maximum(np.abs(values) - amount, 0.0)


def segment_sums(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Sum of each segment; ``offsets`` are segment starts (all non-empty)."""
    if values.size == 0:
        return np.zeros(0)
    return np.add.reduceat(values, offsets)


def segment_cumsum(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Inclusive cumulative sum restarting at every segment start."""
    if values.size == 0:
        return values.copy()
    cs = np.cumsum(values)
    base = cs[offsets] - values[offsets]
    lengths = np.diff(np.concatenate([offsets, [values.size]]))
    return cs - np.repeat(base, lengths)


def segment_reverse_cumsum(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Inclusive suffix sums within each segment."""
    if values.size == 0:
        return values.copy()
    cs = np.cumsum(values)
    lengths = np.diff(np.concatenate([offsets, [values.size]]))
    ends = cs[np.concatenate([offsets[1:], [values.size]]) - 1]
    return np.repeat(ends, lengths) - cs + values


def segment_lengths(offsets: np.ndarray, total: int) -> np.ndarray:
    return np.diff(np.concatenate([offsets, [total]]))


def relative_change(previous: float, current: float) -> float:
    return abs(previous - current) / max(abs(previous), 1.0)
