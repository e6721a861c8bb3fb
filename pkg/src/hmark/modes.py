"""Finite-dimensional bath: one excitation shared between qubit and modes.

In the one-excitation sector the dynamics is a dense real-symmetric
eigenproblem: the state is (excited-qubit amplitude a, mode amplitudes c_k),
the Hamiltonian couples the first component to every mode with strength g_k,
and the modes are otherwise free at frequencies omega_k.

Mode data for the supported couplings:

* Dirac-comb coupling (exp_comb with beta = 0).  Writing the comb density as
  the two-sided sum of exp(i n T omega) and applying Poisson summation,

      sum_{n in Z} exp(i n T omega) = (2 pi / T) sum_{k in Z} delta(omega - 2 pi k / T),

  the density gamma0/(2 pi) * sum_n exp(i n T omega) becomes
  (gamma0 / T) * sum_k delta(omega - 2 pi k / T): modes sit at
  omega_k = 2 pi k / T and each carries squared coupling gamma0 / T.  This
  identification is exact, and the truncation to |k| <= K is validated by
  the agreement of this backend with the piecewise-analytic one.

* Flat coupling.  A Riemann discretization over a symmetric window
  [-W, W]: 2K + 1 uniformly spaced modes with squared coupling
  gamma0 * domega / (2 pi).

Either way the discrete evolution approximates the continuum only below the
recurrence time set by the mode spacing (about 2 pi / domega); past it the
finite bath feeds the excitation back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .amplitude import AmplitudeTrace, Backend, TimeGrid
from .coupling import CouplingKind, ModelParams
from .errors import BadParameter, DimensionTooLarge, UnsupportedKind

__all__ = [
    "DiscreteModeSystem",
    "ModesResult",
    "build_discrete_modes",
    "amplitude_modes",
]

MAX_DIMENSION = 20_000

# Flat-coupling default window: generously clears the resonance at eps0 and
# the linewidth gamma0.
FLAT_WINDOW_RATE_FACTOR = 64.0
FLAT_WINDOW_ENERGY_FACTOR = 8.0


@dataclass(frozen=True)
class DiscreteModeSystem:
    """One-excitation-sector Hamiltonian data.

    Dimension is len(mode_freqs) + 1: the excited-qubit amplitude plus one
    amplitude per mode.  Frequencies must be strictly increasing, couplings
    nonnegative.
    """

    eps0: float
    mode_freqs: np.ndarray
    mode_couplings: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.mode_freqs, dtype=float)
        coups = np.asarray(self.mode_couplings, dtype=float)
        object.__setattr__(self, "mode_freqs", freqs)
        object.__setattr__(self, "mode_couplings", coups)
        if freqs.ndim != 1 or freqs.size < 1:
            raise BadParameter("mode_freqs must be a nonempty 1-d sequence")
        if coups.shape != freqs.shape:
            raise BadParameter("mode_couplings must match mode_freqs in length")
        if not math.isfinite(self.eps0):
            raise BadParameter(f"eps0 must be finite, got {self.eps0}")
        if np.any(np.diff(freqs) <= 0):
            raise BadParameter("mode_freqs must be strictly increasing")
        if np.any(coups < 0):
            raise BadParameter("mode_couplings must be nonnegative")

    @property
    def dimension(self) -> int:
        return self.mode_freqs.size + 1

    def hamiltonian(self) -> np.ndarray:
        """Dense real-symmetric matrix in the (qubit, modes) basis."""
        dim = self.dimension
        h = np.zeros((dim, dim))
        h[0, 0] = self.eps0
        h[0, 1:] = self.mode_couplings
        h[1:, 0] = self.mode_couplings
        idx = np.arange(1, dim)
        h[idx, idx] = self.mode_freqs
        return h


def build_discrete_modes(
    params: ModelParams, K: int, window: Optional[float] = None
) -> DiscreteModeSystem:
    """Mode data for the couplings with an exact or natural discretization.

    Dirac comb (exp_comb, beta = 0): modes at 2 pi k / T for k = -K..K,
    squared coupling gamma0 / T (see the module docstring for the
    derivation).  Flat: 2K + 1 uniform modes over [-W, W] with squared
    coupling gamma0 * domega / (2 pi); ``window`` overrides the default W.

    Raises:
        UnsupportedKind: sinusoidal / custom couplings (and smoothed combs
            with beta > 0), which have no implemented discretization.
    """
    if K < 1:
        raise BadParameter(f"K must be a positive integer, got {K}")
    coupling = params.coupling
    gamma0 = coupling.gamma0
    k = np.arange(-K, K + 1, dtype=float)
    if coupling.is_dirac_comb:
        freqs = 2.0 * np.pi * k / coupling.period_T
        g = math.sqrt(gamma0 / coupling.period_T)
        coups = np.full(2 * K + 1, g)
    elif coupling.kind is CouplingKind.FLAT:
        if window is None:
            window = (FLAT_WINDOW_RATE_FACTOR * gamma0
                      + FLAT_WINDOW_ENERGY_FACTOR * abs(params.eps0))
        if window <= 0:
            raise BadParameter(f"window must be > 0, got {window}")
        domega = window / K
        freqs = k * domega
        coups = np.full(2 * K + 1, math.sqrt(gamma0 * domega / (2.0 * np.pi)))
    else:
        raise UnsupportedKind(
            f"no mode discretization for coupling kind {coupling.kind.value!r}"
        )
    return DiscreteModeSystem(params.eps0, freqs, coups)


@dataclass(frozen=True)
class ModesResult:
    """Amplitude trace plus the individual mode amplitudes c_k(t),
    shape (n_modes, n_steps + 1)."""

    trace: AmplitudeTrace
    mode_amplitudes: np.ndarray

    def norm_deficit(self) -> np.ndarray:
        """1 - |a|^2 - sum_k |c_k|^2 at each grid point; zero up to
        eigensolver precision because the global evolution is unitary."""
        total = self.trace.abs2 + np.sum(np.abs(self.mode_amplitudes) ** 2, axis=0)
        return 1.0 - total


def amplitude_modes(system: DiscreteModeSystem, grid: TimeGrid) -> ModesResult:
    """Evolve the one-excitation system exactly via one eigendecomposition.

    a(t) = sum_j |<e|v_j>|^2 exp(-i E_j t) with (E_j, v_j) the spectrum of
    the real-symmetric Hamiltonian and |e> the excited-qubit basis vector;
    the mode amplitudes follow from the same spectral data.  Exact up to
    eigensolver precision for the finite system.

    Raises:
        DimensionTooLarge: dimension above 20,000 (dense eigh infeasible).
    """
    if system.dimension > MAX_DIMENSION:
        raise DimensionTooLarge(
            f"dimension {system.dimension} exceeds {MAX_DIMENSION}"
        )
    energies, vectors = np.linalg.eigh(system.hamiltonian())
    overlaps = vectors[0, :]
    phases = np.exp(-1j * np.outer(energies, grid.times))
    a = (overlaps ** 2) @ phases
    a[0] = 1.0
    # mode rows of the eigenvectors, weighted by the qubit overlap; two real
    # GEMMs avoid upcasting the big eigenvector block to complex
    weighted = vectors[1:, :] * overlaps
    c = weighted @ phases.real + 1j * (weighted @ phases.imag)
    trace = AmplitudeTrace(grid, a, Backend.MODES)
    return ModesResult(trace, c)
