"""Domain types shared by every part of the toolkit.

All types are immutable after construction (arrays are frozen read-only), so
they can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
NETWORK_KINDS = (ADDITIVE, MULTIPLICATIVE)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Cascade:
    """The trace of one contagion: which nodes got infected, and when.

    Nodes absent from ``nodes`` stayed uninfected for the whole observation
    window. Times are cascade-relative: the earliest infection (the source)
    sits at exactly 0, and simultaneous infections are rejected, so the event
    order is strict.
    """

    nodes: np.ndarray
    times: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.ascontiguousarray(self.nodes, dtype=np.int64)
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        if nodes.ndim != 1 or nodes.shape != times.shape:
            raise ValueError("nodes and times must be 1-d arrays of equal length")
        if nodes.size == 0:
            raise ValueError("a cascade needs at least one infection (its source)")
        order = np.lexsort((nodes, times))
        nodes, times = nodes[order].copy(), times[order].copy()
        if not np.all(np.isfinite(times)):
            raise ValueError("infection times must be finite; omit uninfected nodes")
        if times[0] != 0.0:
            raise ValueError("the source must be at time 0 (normalize times upstream)")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("simultaneous infections are not allowed (perturb upstream)")
        if np.any(nodes < 0):
            raise ValueError("node ids must be nonnegative")
        if np.unique(nodes).size != nodes.size:
            raise ValueError("a node can be infected at most once per cascade")
        object.__setattr__(self, "nodes", _freeze(nodes))
        object.__setattr__(self, "times", _freeze(times))

    @classmethod
    def from_events(cls, events: Iterable[tuple[int, float]]) -> "Cascade":
        pairs = list(events)
        nodes = np.array([n for n, _ in pairs], dtype=np.int64)
        times = np.array([t for _, t in pairs], dtype=np.float64)
        return cls(nodes, times)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def source(self) -> int:
        return int(self.nodes[0])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def events(self) -> list[tuple[int, float]]:
        return [(int(n), float(t)) for n, t in zip(self.nodes, self.times)]


@dataclass(frozen=True)
class CascadeSet:
    """A node universe plus the cascades recorded over it.

    ``window`` is the shared observation length: every infection time lies in
    [0, window], and nodes that do not appear in a cascade survived past it.
    """

    num_nodes: int
    window: float
    cascades: tuple[Cascade, ...]

    def __post_init__(self) -> None:
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        if not (self.window > 0.0 and np.isfinite(self.window)):
            raise ValueError("observation window must be a positive finite length")
        cascades = tuple(self.cascades)
        for c in cascades:
            if int(c.nodes.max()) >= self.num_nodes:
                raise ValueError("cascade references a node id outside the universe")
            if float(c.times[-1]) > self.window:
                raise ValueError("infection time beyond the observation window")
        object.__setattr__(self, "cascades", cascades)
        object.__setattr__(self, "window", float(self.window))
        object.__setattr__(self, "num_nodes", int(self.num_nodes))

    def __len__(self) -> int:
        return len(self.cascades)

    def __iter__(self):
        return iter(self.cascades)


@dataclass(frozen=True)
class Network:
    """Dense matrix of directed edge parameters.

    ``params[j, i]`` is the influence of node j on node i. The diagonal is
    fixed at zero. Additive networks hold nonnegative rates; multiplicative
    networks hold log-influences of either sign.
    """

    params: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        params = np.array(self.params, dtype=np.float64, copy=True)
        if params.ndim != 2 or params.shape[0] != params.shape[1]:
            raise ValueError("params must be a square matrix")
        if not np.all(np.isfinite(params)):
            raise ValueError("edge parameters must be finite")
        if np.any(np.diagonal(params) != 0.0):
            raise ValueError("self-influence is not modeled: the diagonal must be zero")
        if self.kind not in NETWORK_KINDS:
            raise ValueError(f"unknown network kind {self.kind!r}")
        if self.kind == ADDITIVE and np.any(params < 0.0):
            raise ValueError("additive rates must be nonnegative")
        object.__setattr__(self, "params", _freeze(params))

    @property
    def num_nodes(self) -> int:
        return int(self.params.shape[0])

    def edge_count(self, threshold: float = 0.0) -> int:
        return int(np.count_nonzero(np.abs(self.params) > threshold))

    def edges(self, threshold: float = 0.0) -> np.ndarray:
        """(E, 2) array of (j, i) pairs with |params[j, i]| > threshold."""
        return np.argwhere(np.abs(self.params) > threshold)


@dataclass(frozen=True)
class InferenceResult:
    """An inferred network plus solver diagnostics.

    ``objective_trace`` holds the minimized objective per outer iteration
    (column traces are summed; converged columns hold their final value).
    For L1-regularized solves the trace is the penalized objective, since
    that is the quantity the solver decreases monotonically.
    """

    network: Network
    objective_trace: np.ndarray
    converged: bool
    iterations: int

    def __post_init__(self) -> None:
        trace = np.ascontiguousarray(self.objective_trace, dtype=np.float64)
        object.__setattr__(self, "objective_trace", _freeze(trace))


def aggregate_traces(traces: Sequence[np.ndarray]) -> np.ndarray:
    """Sum per-column objective traces of unequal length.

    Columns that converged early are held at their final value, so the sum
    stays nonincreasing whenever every input trace is.
    """
    if not traces:
        return np.zeros(0)
    length = max(len(t) for t in traces)
    total = np.zeros(length)
    for t in traces:
        t = np.asarray(t, dtype=np.float64)
        padded = np.concatenate([t, np.full(length - len(t), t[-1])]) if len(t) < length else t
        total += padded
    return total
