"""Semigroup-defect witness and the horizon it certifies.

Because the reduced channel is a function of the scalar amplitude alone, the
divisibility relation "channel at t+s equals channel at t composed with
channel at s" holds exactly when a(t+s) = a(t) a(s).  The witness therefore
works on the scalar defect |a(t+s) - a(t) a(s)|: it vanishes iff the 4x4
superoperator defect vanishes, and the two are comparable up to a fixed
basis-dependent factor (spot-checked in the test suite).  Using the scalar
keeps each pair O(1).

The hidden horizon is the largest tau such that every sampled pair with
t + s <= tau passes the witness at the requested tolerance; a periodic
coupling with any nonzero cosine coefficient yields exactly its period, to
within one grid step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .amplitude import AmplitudeTrace, Backend
from .coupling import CouplingKind, ModelParams
from .errors import IndexOutOfRange, TraceTooShort

__all__ = [
    "DefectReport",
    "BoundStateReport",
    "semigroup_defect",
    "hidden_horizon",
    "semigroup_defect_report",
    "bound_state_check",
]

# Default witness tolerance per producing backend, tracking its accuracy.
DEFAULT_TOLERANCE = {
    Backend.SERIES: 1e-10,
    Backend.VOLTERRA: 1e-8,
    Backend.LAPLACE: 1e-4,
    Backend.MODES: 1e-3,
}

# Fraction of the trace span used as the tail window of the bound-state
# check (the last period for a ten-period trace).
TAIL_WINDOW_FRACTION = 0.1

BOUND_STATE_PHASE_TOL = 1e-9
MIN_BOUND_STATE_PERIODS = 10


def semigroup_defect(trace: AmplitudeTrace, t_index: int, s_index: int) -> float:
    """|a(t+s) - a(t) a(s)| for grid times t = t_index dt, s = s_index dt.

    Raises:
        IndexOutOfRange: negative indices or t_index + s_index beyond the
            grid.
    """
    n = trace.grid.n_steps
    if t_index < 0 or s_index < 0 or t_index + s_index > n:
        raise IndexOutOfRange(
            f"need 0 <= t_index, s_index and t_index + s_index <= {n}, "
            f"got {t_index}, {s_index}"
        )
    a = trace.values
    return float(abs(a[t_index + s_index] - a[t_index] * a[s_index]))


def _diagonal_defects(a: np.ndarray, total: int) -> np.ndarray:
    """Defects of all pairs with t_index + s_index == total."""
    return np.abs(a[total] - a[: total + 1] * a[total::-1])


def hidden_horizon(trace: AmplitudeTrace, tol: Optional[float] = None) -> float:
    """Largest tau <= grid end with all pair defects <= tol for t+s <= tau.

    The triangular pair set is scanned diagonal by diagonal (constant t+s)
    with early exit at the first violation.  ``tol`` defaults per backend
    (1e-10 for the exact series, looser for the numerical routes).
    """
    if tol is None:
        tol = DEFAULT_TOLERANCE[trace.backend]
    if tol <= 0:
        raise IndexOutOfRange(f"tolerance must be > 0, got {tol}")
    a = trace.values
    times = trace.times
    for total in range(trace.grid.n_steps + 1):
        if np.max(_diagonal_defects(a, total)) > tol:
            return float(times[total - 1]) if total > 0 else 0.0
    return float(times[-1])


@dataclass(frozen=True)
class DefectReport:
    """Witness summary: sampled (t, s, defect) triples (the worst pair per
    scanned diagonal), the certified horizon, and the tolerance used."""

    pairs: np.ndarray
    horizon_estimate: float
    tolerance_used: float

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=float)
        object.__setattr__(self, "pairs", pairs)
        if pairs.size and (pairs.ndim != 2 or pairs.shape[1] != 3):
            raise IndexOutOfRange("pairs must have shape (n, 3)")
        if pairs.size and np.any(pairs[:, 2] < 0):
            raise IndexOutOfRange("defects must be nonnegative")
        if self.horizon_estimate < 0:
            raise IndexOutOfRange("horizon must be nonnegative")

    @property
    def max_defect(self) -> float:
        return float(np.max(self.pairs[:, 2])) if self.pairs.size else 0.0


def semigroup_defect_report(
    trace: AmplitudeTrace,
    tol: Optional[float] = None,
    max_diagonals: int = 256,
) -> DefectReport:
    """Full-scan horizon plus a decimated table of worst pairs.

    The horizon always comes from the complete triangular scan; the recorded
    pairs subsample at most ``max_diagonals`` diagonals uniformly (worst
    pair each) to keep reports small.
    """
    if tol is None:
        tol = DEFAULT_TOLERANCE[trace.backend]
    horizon = hidden_horizon(trace, tol)
    a = trace.values
    times = trace.times
    n = trace.grid.n_steps
    stride = max(1, (n + max_diagonals - 1) // max_diagonals)
    rows = []
    for total in range(1, n + 1, stride):
        defects = _diagonal_defects(a, total)
        i = int(np.argmax(defects))
        rows.append((times[i], times[total - i], float(defects[i])))
    pairs = np.array(rows, dtype=float) if rows else np.empty((0, 3))
    return DefectReport(pairs, horizon, tol)


@dataclass(frozen=True)
class BoundStateReport:
    """Outcome of the trapped-excitation check.

    ``predicted`` flags the parameter combination that admits a bound state
    (sinusoidal coupling at full modulation with the dressed energy on a
    resonance of the period); ``tail_min_abs2`` is the smallest survival
    probability over the trailing window of the trace, which stays bounded
    away from zero exactly when the excitation is trapped.
    """

    predicted: bool
    tail_min_abs2: float


def bound_state_check(params: ModelParams, trace: AmplitudeTrace) -> BoundStateReport:
    """Predict a bound state from the parameters and measure the tail.

    The tail window is the final 10% of the trace (one period for the
    canonical ten-period run).

    Raises:
        TraceTooShort: a periodic coupling sampled over fewer than ten
            periods.
    """
    coupling = params.coupling
    if coupling.kind is not CouplingKind.FLAT:
        span = trace.grid.t_max
        needed = MIN_BOUND_STATE_PERIODS * coupling.period_T
        if span < needed * (1.0 - 1e-9):
            raise TraceTooShort(
                f"trace spans {span:.6g}, need at least {needed:.6g}"
            )
    predicted = False
    if coupling.kind is CouplingKind.SINUSOIDAL:
        full_modulation = abs(abs(coupling.spec.alpha) - 1.0) <= BOUND_STATE_PHASE_TOL
        phase = math.fmod(params.eps0 * coupling.period_T, 2.0 * math.pi)
        if phase < 0:
            phase += 2.0 * math.pi
        on_resonance = min(phase, 2.0 * math.pi - phase) <= BOUND_STATE_PHASE_TOL
        predicted = full_modulation and on_resonance
    start = int(math.ceil((1.0 - TAIL_WINDOW_FRACTION) * trace.grid.n_steps))
    tail_min = float(np.min(trace.abs2[start:]))
    return BoundStateReport(predicted, tail_min)
