"""Reduced qubit channel driven by the survival amplitude.

Conventions fixed here and used by every superoperator in the package:

* Basis: |0> is the excited level (the decaying one), |1> the ground level.
* sigma_plus = |0><1|, sigma_minus = |1><0|, H_q = |0><0|.
* Density matrices are column-vectorized in the order
  (rho00, rho01, rho10, rho11); all 4x4 superoperators act on that vector.

Given the amplitude a, the channel maps

    rho -> [[|a|^2 rho00,              a rho01],
            [conj(a) rho10,  rho11 + (1 - |a|^2) rho00]],

which is an amplitude-damping channel with damping 1 - |a|^2 and coherence
factor a.  Its generator splits into a Hamiltonian commutator and a
dissipator which commute with each other, so the channel is a plain matrix
exponential of ln(|a|^2) * dissipator + i arg(a) * commutator.  The
time-dependent rates gamma(t), eps(t) follow from log-derivatives of a and
are extracted here by second-order finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .amplitude import AmplitudeTrace, TimeGrid
from .coupling import CouplingKind, ModelParams
from .errors import (
    AmplitudeNearZero,
    InvalidAmplitude,
    InvalidState,
    PhaseJump,
)

__all__ = [
    "DensityMatrix",
    "RateFunctions",
    "LINDBLAD_DISSIPATOR",
    "QUBIT_COMMUTATOR",
    "evolve",
    "extract_rates",
    "gkls_generator",
    "channel_superoperator",
    "choi_matrix",
    "master_residual",
    "is_trace_preserving",
]

STATE_TOL = 1e-12
AMPLITUDE_TOL = 1e-9
RATE_AMPLITUDE_FLOOR = 1e-10

# Dissipator of the amplitude-damping channel, acting on
# (rho00, rho01, rho10, rho11): populations drain 0 -> 1, coherences at
# half rate.
LINDBLAD_DISSIPATOR = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)

# Commutator with H_q = |0><0| in the same vectorization.
QUBIT_COMMUTATOR = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated 2x2 qubit state: hermitian, unit trace, positive
    semidefinite (all within 1e-12)."""

    rho00: complex
    rho01: complex
    rho10: complex
    rho11: complex

    def __post_init__(self):
        for name in ("rho00", "rho01", "rho10", "rho11"):
            v = complex(getattr(self, name))
            object.__setattr__(self, name, v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidState(f"{name} must be finite, got {v}")
        if abs(self.rho10 - self.rho01.conjugate()) > STATE_TOL:
            raise InvalidState("not hermitian: rho10 != conj(rho01)")
        if abs(self.rho00.imag) > STATE_TOL or abs(self.rho11.imag) > STATE_TOL:
            raise InvalidState("diagonal entries must be real")
        if abs(self.rho00 + self.rho11 - 1.0) > STATE_TOL:
            raise InvalidState(f"trace must be 1, got {self.rho00 + self.rho11}")
        if self.rho00.real < -STATE_TOL or self.rho11.real < -STATE_TOL:
            raise InvalidState("negative population")
        det = (self.rho00 * self.rho11 - self.rho01 * self.rho10).real
        if det < -STATE_TOL:
            raise InvalidState(f"not positive semidefinite (det = {det:.3e})")

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidState(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def excited(cls) -> "DensityMatrix":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def ground(cls) -> "DensityMatrix":
        return cls(0.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex
        )

    @property
    def vec(self) -> np.ndarray:
        return np.array(
            [self.rho00, self.rho01, self.rho10, self.rho11], dtype=complex
        )


@dataclass(frozen=True)
class RateFunctions:
    """Sampled decay rate gamma(t) and effective energy eps(t)."""

    grid: TimeGrid
    gamma: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "eps", eps)
        expected = (self.grid.n_steps + 1,)
        if gamma.shape != expected or eps.shape != expected:
            raise InvalidState(
                f"rate arrays must have shape {expected}, got "
                f"{gamma.shape} and {eps.shape}"
            )


def evolve(rho0: DensityMatrix, a: complex) -> DensityMatrix:
    """Apply the amplitude-damping channel with coherence factor ``a``.

    Raises:
        InvalidAmplitude: |a| > 1 + 1e-9.
    """
    a = complex(a)
    if abs(a) > 1.0 + AMPLITUDE_TOL:
        raise InvalidAmplitude(f"|a| = {abs(a)} exceeds 1")
    survival = abs(a) ** 2
    return DensityMatrix(
        survival * rho0.rho00,
        a * rho0.rho01,
        a.conjugate() * rho0.rho10,
        rho0.rho11 + (1.0 - survival) * rho0.rho00,
    )


def _second_order_derivative(samples: np.ndarray, dt: float) -> np.ndarray:
    """Central differences inside, one-sided three-point at the ends."""
    d = np.empty_like(samples)
    d[1:-1] = (samples[2:] - samples[:-2]) / (2.0 * dt)
    d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dt)
    d[-1] = (3.0 * samples[-1] - 4.0 * samples[-2] + samples[-3]) / (2.0 * dt)
    return d


def extract_rates(trace: AmplitudeTrace) -> RateFunctions:
    """Finite-difference rates from sampled amplitudes.

    gamma = -2 d/dt ln|a| and eps = -d/dt arg(a), with the phase unwrapped
    under the assumption that it moves by less than pi per step.

    Raises:
        AmplitudeNearZero: some |a(t_k)| <= 1e-10 (rates undefined there).
        PhaseJump: adjacent samples differ in phase by essentially pi, so
            the unwrapping direction is ambiguous -- refine the grid.
    """
    if trace.grid.n_steps < 2:
        raise InvalidState("rate extraction needs at least 3 samples")
    magnitude = np.abs(trace.values)
    if np.min(magnitude) <= RATE_AMPLITUDE_FLOOR:
        k = int(np.argmin(magnitude))
        raise AmplitudeNearZero(
            f"|a| = {magnitude[k]:.3e} at t = {trace.times[k]:.6g}"
        )
    steps = np.diff(np.angle(trace.values))
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    if np.any(np.abs(wrapped) >= np.pi * (1.0 - 1e-9)):
        raise PhaseJump("phase advances by >= pi per step; grid too coarse")
    phase = np.concatenate(([0.0], np.cumsum(wrapped)))
    dt = trace.grid.dt
    gamma = -2.0 * _second_order_derivative(np.log(magnitude), dt)
    eps = -_second_order_derivative(phase, dt)
    return RateFunctions(trace.grid, gamma, eps)


def gkls_generator(gamma: float, eps: float) -> np.ndarray:
    """4x4 generator -i eps * commutator - gamma * dissipator."""
    return -1j * eps * QUBIT_COMMUTATOR - gamma * LINDBLAD_DISSIPATOR


def channel_superoperator(a: complex) -> np.ndarray:
    """4x4 matrix of the channel for amplitude ``a``.

    Equals the matrix exponential of
    ln(|a|^2) * LINDBLAD_DISSIPATOR + i arg(a) * QUBIT_COMMUTATOR, the two
    pieces commuting.

    Raises:
        InvalidAmplitude: a = 0 (the logarithm is undefined; apply
            :func:`evolve` directly instead) or |a| > 1 + 1e-9.
    """
    a = complex(a)
    if a == 0:
        raise InvalidAmplitude("a = 0 has no generator form; use evolve")
    if abs(a) > 1.0 + AMPLITUDE_TOL:
        raise InvalidAmplitude(f"|a| = {abs(a)} exceeds 1")
    survival = abs(a) ** 2
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = survival
    out[1, 1] = a
    out[2, 2] = a.conjugate()
    out[3, 0] = 1.0 - survival
    out[3, 3] = 1.0
    return out


def choi_matrix(a: complex) -> np.ndarray:
    """Choi matrix of the channel, blocks C[j,k] = channel(|j><k|).

    Hermitian with trace 2; positive semidefinite exactly when |a| <= 1.
    No guard on |a| so that complete-positivity failures of out-of-range
    amplitudes are observable.
    """
    a = complex(a)
    survival = abs(a) ** 2
    c = np.zeros((4, 4), dtype=complex)
    c[0, 0] = survival
    c[0, 3] = a
    c[3, 0] = a.conjugate()
    c[1, 1] = 1.0 - survival
    c[3, 3] = 1.0
    return c


def is_trace_preserving(superop: np.ndarray, tol: float = 1e-12) -> bool:
    """True if the map preserves rho00 + rho11 to within tol."""
    trace_row = superop[0, :] + superop[3, :]
    return bool(np.max(np.abs(trace_row - np.array([1, 0, 0, 1]))) <= tol)


def _delay_exclusion_mask(
    params: Optional[ModelParams], times: np.ndarray, dt: float
) -> np.ndarray:
    """False within 2 dt of any delay nT (derivative kinks there)."""
    keep = np.ones(times.size, dtype=bool)
    if params is None or params.coupling.kind is CouplingKind.FLAT:
        return keep
    period = params.coupling.period_T
    n_max = int(math.floor(times[-1] / period + 1e-9))
    for n in range(1, n_max + 1):
        keep &= np.abs(times - n * period) >= 2.0 * dt * (1.0 - 1e-12)
    return keep


def master_residual(
    params: ModelParams, trace: AmplitudeTrace, rho0: DensityMatrix
) -> float:
    """Largest master-equation defect of the sampled evolution.

    Compares the central-difference derivative of rho(t) against the GKLS
    action with the extracted rates, in Frobenius norm, over interior grid
    points; points within 2 dt of a delay nT are excluded because rho has
    derivative kinks there and a straddling difference quotient is
    meaningless.  O(dt^2) for smooth stretches.
    """
    rates = extract_rates(trace)
    a = trace.values
    survival = np.abs(a) ** 2
    rho = np.empty((4, a.size), dtype=complex)
    rho[0] = survival * rho0.rho00
    rho[1] = a * rho0.rho01
    rho[2] = np.conj(a) * rho0.rho10
    rho[3] = rho0.rho11 + (1.0 - survival) * rho0.rho00

    dt = trace.grid.dt
    derivative = (rho[:, 2:] - rho[:, :-2]) / (2.0 * dt)
    gamma = rates.gamma[1:-1]
    eps = rates.eps[1:-1]
    mid = rho[:, 1:-1]
    generator_action = np.empty_like(mid)
    generator_action[0] = -gamma * mid[0]
    generator_action[1] = -(0.5 * gamma + 1j * eps) * mid[1]
    generator_action[2] = -(0.5 * gamma - 1j * eps) * mid[2]
    generator_action[3] = gamma * mid[0]

    defect = np.sqrt(
        np.sum(np.abs(derivative - generator_action) ** 2, axis=0)
    )
    keep = _delay_exclusion_mask(params, trace.times, dt)[1:-1]
    if not np.any(keep):
        raise InvalidState("no interior points left after delay exclusion")
    return float(np.max(defect[keep]))
