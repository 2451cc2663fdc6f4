"""Retrieval dynamics: local fields, synchronous steps and asynchronous epochs.

A :class:`NetworkState` keeps the integer Hamming distance from the current
state to every stored pattern. Kernel values are read from a per-distance
lookup table, so a single-bit flip costs O(P) and the cache never drifts from
a full recomputation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .kernel import as_bipolar, overlap
from .training import DualWeights


class UpdateScheme(enum.Enum):
    SYNC = "sync"
    ASYNC = "async"


class Outcome(enum.Enum):
    FIXED_POINT = "fixed_point"
    CYCLE2 = "cycle2"
    MAX_EPOCHS = "max_epochs"


class CacheIncoherent(AssertionError):
    pass


class NetworkState:
    """Bipolar state ``s`` plus cached distances and kernels to each stored pattern."""

    def __init__(self, w: DualWeights, s):
        self.s = as_bipolar(s, w.n).copy()
        self._w = w
        self.rebuild()

    def rebuild(self) -> None:
        self.dist = self._w.patterns.hamming_to(self.s)
        self.kernels = self._w.kernel_table[self.dist]

    def copy(self) -> "NetworkState":
        other = object.__new__(NetworkState)
        other._w = self._w
        other.s = self.s.copy()
        other.dist = self.dist.copy()
        other.kernels = self.kernels.copy()
        return other

    def flip(self, i: int) -> None:
        old = int(self.s[i])
        # agreeing coordinates become disagreeing and vice versa
        self.dist += old * self._w.pattern_columns[i]
        self.kernels = self._w.kernel_table[self.dist]
        self.s[i] = -old

    def verify(self, atol: float = 1e-9) -> float:
        """Compare the cache with fresh kernel evaluations; raise if they disagree."""
        fresh = np.exp(-self._w.params.gamma * self._squared_distances())
        err = float(np.max(np.abs(fresh - self.kernels)))
        if err >= atol:
            raise CacheIncoherent(f"kernel cache deviates from recomputation by {err:.3e}")
        return err

    def _squared_distances(self) -> np.ndarray:
        diff = self._w.patterns.patterns.astype(np.float64) - self.s.astype(np.float64)
        return np.sum(diff * diff, axis=1)


@dataclass
class RetrievalTrace:
    overlaps: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    flips: list[int] = field(default_factory=list)
    # (epoch, neuron, old sign); epoch counts from 1
    events: list[tuple[int, int, int]] = field(default_factory=list)
    outcome: Outcome = Outcome.MAX_EPOCHS
    epochs_run: int = 0
    final_state: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.outcome is not Outcome.MAX_EPOCHS

    @property
    def total_events(self) -> int:
        return len(self.events)


def _sign(h: np.ndarray) -> np.ndarray:
    return np.where(h >= 0, 1, -1).astype(np.int8)


def local_fields(w: DualWeights, state: NetworkState) -> np.ndarray:
    return w.neuron_weights @ state.kernels


def local_field(w: DualWeights, state: NetworkState, i: int) -> float:
    if not 0 <= i < w.n:
        raise IndexError(f"neuron index {i} out of range for N={w.n}")
    return float(w.neuron_weights[i] @ state.kernels)


def pseudo_energy(w: DualWeights, state: NetworkState) -> float:
    return -float(state.s.astype(np.float64) @ local_fields(w, state))


def sync_step(w: DualWeights, state: NetworkState) -> tuple[NetworkState, int]:
    """All neurons take ``sign(h_i)`` of the pre-step state; sign(0) = +1."""
    new_s = _sign(local_fields(w, state))
    flips = int(np.count_nonzero(new_s != state.s))
    return NetworkState(w, new_s), flips


def async_epoch(
    w: DualWeights,
    state: NetworkState,
    order,
    trace: RetrievalTrace | None = None,
) -> tuple[NetworkState, int]:
    """Visit neurons in ``order``, each seeing all earlier flips of the epoch.

    ``state`` is updated in place and returned.
    """
    order = np.asarray(order)
    if order.shape != (w.n,) or not np.array_equal(np.sort(order), np.arange(w.n)):
        raise ValueError("order must be a permutation of all neuron indices")
    epoch = trace.epochs_run + 1 if trace is not None else 0
    rows = w.neuron_weights
    flips = 0
    for i in order.tolist():
        h = rows[i] @ state.kernels
        new = 1 if h >= 0 else -1
        old = int(state.s[i])
        if new != old:
            state.flip(i)
            flips += 1
            if trace is not None:
                trace.events.append((epoch, i, old))
    return state, flips


def run_retrieval(
    w: DualWeights,
    s0,
    target,
    scheme: UpdateScheme | str = UpdateScheme.ASYNC,
    max_epochs: int = 100,
    rng: np.random.Generator | None = None,
    check_cache: bool = False,
) -> RetrievalTrace:
    """Iterate one scheme from ``s0`` until a fixed point, a 2-cycle (sync only) or ``max_epochs``.

    Overlap with ``target`` and pseudo-energy are recorded for the initial
    state and after every epoch. The asynchronous scheme draws a fresh
    permutation from ``rng`` each epoch.
    """
    scheme = UpdateScheme(scheme)
    if max_epochs < 1:
        raise ValueError("max_epochs must be at least 1")
    if scheme is UpdateScheme.ASYNC and rng is None:
        raise ValueError("asynchronous retrieval needs an rng for the update order")
    target = as_bipolar(target, w.n)
    state = NetworkState(w, s0)
    trace = RetrievalTrace()
    trace.overlaps.append(overlap(state.s, target))
    trace.energies.append(pseudo_energy(w, state))
    before_prev = None

    while trace.epochs_run < max_epochs:
        if scheme is UpdateScheme.SYNC:
            prev = state
            state, flips = sync_step(w, state)
            epoch = trace.epochs_run + 1
            for i in np.flatnonzero(state.s != prev.s).tolist():
                trace.events.append((epoch, i, int(prev.s[i])))
        else:
            prev = None
            state, flips = async_epoch(w, state, rng.permutation(w.n), trace)
        trace.epochs_run += 1
        trace.flips.append(flips)
        if check_cache:
            state.verify()
        trace.overlaps.append(overlap(state.s, target))
        trace.energies.append(pseudo_energy(w, state))
        if flips == 0:
            trace.outcome = Outcome.FIXED_POINT
            break
        if before_prev is not None and np.array_equal(state.s, before_prev.s):
            trace.outcome = Outcome.CYCLE2
            break
        before_prev = prev

    trace.final_state = state.s.copy()
    return trace
