"""Margin and cross-talk diagnostics for single-neuron flips.

Flipping neuron ``i`` changes the pseudo-energy by

    dV = dV_local + dV_cross,   dV_local = -(s_i' - s_i) h_i(s) = 2 s_i h_i(s)

where ``dV_local`` holds every field fixed, and ``dV_cross`` is whatever the
kernel change adds. For a corrective flip (``s_i h_i < 0``), ``dV_local`` is
``-2|h_i|``. The flip is guaranteed to lower the energy when
``2|h_i| > I_max`` with ``I_max = sum_{j != i} sum_mu |alpha_{mu j}|``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import NetworkState, local_field, local_fields, pseudo_energy
from .training import DualWeights


def _check_index(w: DualWeights, i: int) -> None:
    if not 0 <= i < w.n:
        raise IndexError(f"neuron index {i} out of range for N={w.n}")


def local_margin(w: DualWeights, state: NetworkState, i: int) -> float:
    return 2.0 * abs(local_field(w, state, i))


def local_energy_change(w: DualWeights, state: NetworkState, i: int) -> float:
    """Energy change of flipping ``i`` with every local field held fixed."""
    return 2.0 * float(state.s[i]) * local_field(w, state, i)


def interference_bounds(w: DualWeights) -> np.ndarray:
    """Conservative ``I_max`` for every neuron at once."""
    col = np.sum(np.abs(w.alpha), axis=0)
    return np.sum(col) - col


def interference_bound(w: DualWeights, i: int) -> float:
    _check_index(w, i)
    return float(interference_bounds(w)[i])


def exact_interference(w: DualWeights, state: NetworkState, i: int) -> float:
    """Signed cross term of flipping ``i``: the full energy change minus the frozen-field part.

    Equals ``-sum_j s_j' (h_j(s') - h_j(s))``. The sum covers the flipped
    neuron as well, because its own field also moves when the kernels change.
    """
    _check_index(w, i)
    before = local_fields(w, state)
    flipped = state.copy()
    flipped.flip(i)
    after = local_fields(w, flipped)
    return -float(flipped.s.astype(np.float64) @ (after - before))


def energy_change(w: DualWeights, state: NetworkState, i: int) -> float:
    """``V(s with i flipped) - V(s)`` from two full energy evaluations."""
    flipped = state.copy()
    flipped.flip(i)
    return pseudo_energy(w, flipped) - pseudo_energy(w, state)


@dataclass(frozen=True)
class MarginReport:
    margins: np.ndarray
    interference_bound: np.ndarray
    exact_cross: np.ndarray
    condition_satisfied: np.ndarray
    # 2 s_i h_i: negative exactly for neurons whose flip would be corrective
    local_change: np.ndarray

    @property
    def fraction_satisfied(self) -> float:
        return float(np.mean(self.condition_satisfied))

    @property
    def exact_dominated(self) -> np.ndarray:
        """Neurons whose margin beats the measured cross term, a weaker test than the bound."""
        return self.margins > np.abs(self.exact_cross)

    def rows(self):
        for i in range(len(self.margins)):
            yield {
                "neuron": i,
                "margin": float(self.margins[i]),
                "interference_bound": float(self.interference_bound[i]),
                "exact_cross": float(self.exact_cross[i]),
                "condition_satisfied": bool(self.condition_satisfied[i]),
                "exact_dominated": bool(self.exact_dominated[i]),
                "local_change": float(self.local_change[i]),
                "energy_change": float(self.local_change[i] + self.exact_cross[i]),
            }

    def summary(self) -> dict:
        return {
            "n": int(len(self.margins)),
            "fraction_satisfied": self.fraction_satisfied,
            "fraction_exact_dominated": float(np.mean(self.exact_dominated)),
            "min_margin": float(np.min(self.margins)),
            "max_interference_bound": float(np.max(self.interference_bound)),
            "max_abs_exact_cross": float(np.max(np.abs(self.exact_cross))),
            "misaligned": int(np.count_nonzero(self.local_change < 0)),
        }


def stability_report(w: DualWeights, state: NetworkState) -> MarginReport:
    h = local_fields(w, state)
    margins = 2.0 * np.abs(h)
    bounds = interference_bounds(w)
    cross = np.array([exact_interference(w, state, i) for i in range(w.n)])
    return MarginReport(
        margins=margins,
        interference_bound=bounds,
        exact_cross=cross,
        condition_satisfied=margins > bounds,
        local_change=2.0 * state.s * h,
    )
