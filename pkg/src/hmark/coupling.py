"""Qubit-bath form factors and their spectral representations.

A coupling is described by the squared form factor of the interaction, i.e.
the spectral weight the qubit sees at bath frequency omega.  Four families
are supported, all sharing the cosine-series normal form

    density(omega) = gamma0/(2 pi) * (1 + 2 * sum_n c_n cos(n T omega)),

where ``T`` is the period of the density and ``gamma0`` the flat decay rate:

* ``flat``        -- all c_n = 0, constant density (memoryless bath);
* ``sinusoidal``  -- c_1 = -alpha/2 only, a single cosine harmonic;
* ``exp_comb``    -- c_n = exp(-beta n); beta = 0 degenerates into a Dirac
  comb on the frequencies 2 pi k / T and has no pointwise density;
* ``custom``      -- an arbitrary finite real sequence c_1..c_N.

The associated upper-half-plane self-energy has the closed form

    Sigma(z) = i gamma0 / 2 * (1 + 2 * sum_n c_n exp(i n T z)),   Im z > 0,

whose boundary imaginary part reproduces pi times the density; this module
also exposes that reconstruction as an independent consistency check.  The
dressed qubit energy ``eps0`` is taken as the configuration input; bare
energies and renormalization shifts are never represented.

All types are immutable after validation and all operations are pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BadParameter,
    DistributionalDensity,
    LowerHalfPlane,
    NonPositiveDensity,
)

__all__ = [
    "CouplingKind",
    "CouplingSpec",
    "ValidatedCoupling",
    "ModelParams",
    "flat",
    "sinusoidal",
    "exp_comb",
    "custom_fourier",
    "validate_coupling",
    "spectral_density",
    "self_energy",
    "reconstruct_density",
]

# Sampled-positivity tolerance, relative to the flat density gamma0/(2 pi).
POSITIVITY_TOL = 1e-12

# Default number of positivity samples per period.
DEFAULT_POSITIVITY_SAMPLES = 4096


class CouplingKind(enum.Enum):
    FLAT = "flat"
    SINUSOIDAL = "sinusoidal"
    EXP_COMB = "exp_comb"
    CUSTOM_FOURIER = "custom"


@dataclass(frozen=True)
class CouplingSpec:
    """Raw, not-yet-validated description of a form factor."""

    kind: CouplingKind
    gamma0: float
    period_T: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    coeffs: Optional[Tuple[float, ...]] = None


def flat(gamma0: float) -> CouplingSpec:
    return CouplingSpec(CouplingKind.FLAT, gamma0)


def sinusoidal(gamma0: float, period_T: float, alpha: float) -> CouplingSpec:
    return CouplingSpec(CouplingKind.SINUSOIDAL, gamma0, period_T, alpha=alpha)


def exp_comb(gamma0: float, period_T: float, beta: float) -> CouplingSpec:
    return CouplingSpec(CouplingKind.EXP_COMB, gamma0, period_T, beta=beta)


def custom_fourier(
    gamma0: float, period_T: float, coeffs: Sequence[float]
) -> CouplingSpec:
    return CouplingSpec(
        CouplingKind.CUSTOM_FOURIER, gamma0, period_T, coeffs=tuple(float(c) for c in coeffs)
    )


@dataclass(frozen=True)
class ValidatedCoupling:
    """A :class:`CouplingSpec` whose invariants have been checked.

    Obtained only through :func:`validate_coupling`; every downstream
    operation requires the validated wrapper.
    """

    spec: CouplingSpec

    @property
    def kind(self) -> CouplingKind:
        return self.spec.kind

    @property
    def gamma0(self) -> float:
        return self.spec.gamma0

    @property
    def period_T(self) -> Optional[float]:
        return self.spec.period_T

    @property
    def is_dirac_comb(self) -> bool:
        return self.spec.kind is CouplingKind.EXP_COMB and self.spec.beta == 0.0

    def fourier_coefficient(self, n: int) -> float:
        """The cosine coefficient c_n of the density (c_n = 0 for flat)."""
        if n < 1:
            raise BadParameter(f"harmonic index must be >= 1, got {n}")
        s = self.spec
        if s.kind is CouplingKind.FLAT:
            return 0.0
        if s.kind is CouplingKind.SINUSOIDAL:
            return -0.5 * s.alpha if n == 1 else 0.0
        if s.kind is CouplingKind.EXP_COMB:
            return math.exp(-s.beta * n)
        return s.coeffs[n - 1] if n <= len(s.coeffs) else 0.0


@dataclass(frozen=True)
class ModelParams:
    """Full physical input: a validated coupling plus the dressed qubit
    energy ``eps0`` (any real, units 1/time)."""

    coupling: ValidatedCoupling
    eps0: float

    def __post_init__(self):
        if not isinstance(self.coupling, ValidatedCoupling):
            raise BadParameter("ModelParams requires a ValidatedCoupling; "
                               "run validate_coupling first")
        if not math.isfinite(self.eps0):
            raise BadParameter(f"eps0 must be finite, got {self.eps0}")


def _check_scalar(name: str, value, *, positive: bool = False,
                  nonnegative: bool = False) -> float:
    if value is None or not math.isfinite(value):
        raise BadParameter(f"{name} must be a finite number, got {value}")
    if positive and value <= 0:
        raise BadParameter(f"{name} must be > 0, got {value}")
    if nonnegative and value < 0:
        raise BadParameter(f"{name} must be >= 0, got {value}")
    return float(value)


def validate_coupling(
    spec: CouplingSpec, n_samples: int = DEFAULT_POSITIVITY_SAMPLES
) -> ValidatedCoupling:
    """Check all invariants of ``spec`` and return the validated wrapper.

    Positivity of the density is checked at ``n_samples`` uniformly spaced
    frequencies over one period [0, 2 pi / T); the Dirac-comb case (exp_comb
    with beta = 0) is nonnegative as a measure by construction and is not
    point-sampled.

    Raises:
        BadParameter: gamma0 <= 0, T <= 0, |alpha| > 1, beta < 0, or a
            missing/non-finite field.
        NonPositiveDensity: the sampled density dips below
            -1e-12 * gamma0/(2 pi).
    """
    if n_samples < 1:
        raise BadParameter(f"n_samples must be positive, got {n_samples}")
    gamma0 = _check_scalar("gamma0", spec.gamma0, positive=True)

    if spec.kind is CouplingKind.FLAT:
        return ValidatedCoupling(CouplingSpec(CouplingKind.FLAT, gamma0))

    period = _check_scalar("period_T", spec.period_T, positive=True)
    if spec.kind is CouplingKind.SINUSOIDAL:
        alpha = _check_scalar("alpha", spec.alpha)
        if abs(alpha) > 1.0:
            raise BadParameter(f"|alpha| must be <= 1, got {alpha}")
        clean = CouplingSpec(spec.kind, gamma0, period, alpha=alpha)
    elif spec.kind is CouplingKind.EXP_COMB:
        beta = _check_scalar("beta", spec.beta, nonnegative=True)
        clean = CouplingSpec(spec.kind, gamma0, period, beta=beta)
    elif spec.kind is CouplingKind.CUSTOM_FOURIER:
        if not spec.coeffs:
            raise BadParameter("custom coupling requires a nonempty coeffs sequence")
        coeffs = tuple(_check_scalar(f"coeffs[{i}]", c) for i, c in enumerate(spec.coeffs))
        clean = CouplingSpec(spec.kind, gamma0, period, coeffs=coeffs)
    else:  # pragma: no cover - enum is exhaustive
        raise BadParameter(f"unknown coupling kind {spec.kind!r}")

    vc = ValidatedCoupling(clean)
    if not vc.is_dirac_comb:
        omega = np.arange(n_samples) * (2.0 * np.pi / period) / n_samples
        dens = spectral_density(vc, omega, _skip_validation=True)
        floor = -POSITIVITY_TOL * gamma0 / (2.0 * np.pi)
        if np.min(dens) < floor:
            worst = omega[int(np.argmin(dens))]
            raise NonPositiveDensity(
                f"density is negative near omega = {worst:.6g} "
                f"(min {np.min(dens):.3e})"
            )
    return vc


def _cosine_series(vc: ValidatedCoupling, omega) -> np.ndarray:
    """1 + 2 sum_n c_n cos(n T omega), using closed forms where available."""
    s = vc.spec
    omega = np.asarray(omega, dtype=float)
    if s.kind is CouplingKind.FLAT:
        return np.ones_like(omega)
    phase = s.period_T * omega
    if s.kind is CouplingKind.SINUSOIDAL:
        return 1.0 - s.alpha * np.cos(phase)
    if s.kind is CouplingKind.EXP_COMB:
        # geometric cosine series: Re[(1+q)/(1-q)] with q = exp(-beta + i phase)
        r = math.exp(-s.beta)
        return (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(phase) + r * r)
    total = np.ones_like(omega)
    for n, c in enumerate(s.coeffs, start=1):
        total += 2.0 * c * np.cos(n * phase)
    return total


def spectral_density(
    vc: ValidatedCoupling,
    omega: Union[float, np.ndarray],
    *,
    _skip_validation: bool = False,
) -> Union[float, np.ndarray]:
    """Pointwise spectral density gamma0/(2 pi) * (1 + 2 sum c_n cos(n T w)).

    Raises:
        DistributionalDensity: for the Dirac-comb coupling (exp_comb with
            beta = 0), whose density has no pointwise values.
    """
    if not _skip_validation and vc.is_dirac_comb:
        raise DistributionalDensity(
            "exp_comb with beta = 0 is a Dirac comb; pointwise density undefined"
        )
    out = vc.gamma0 / (2.0 * np.pi) * _cosine_series(vc, omega)
    return float(out) if np.isscalar(omega) else out


def _delay_sum(vc: ValidatedCoupling, z) -> np.ndarray:
    """sum_{n>=1} c_n exp(i n T z), in closed form per kind (Im z > 0)."""
    s = vc.spec
    z = np.asarray(z, dtype=complex)
    if s.kind is CouplingKind.FLAT:
        return np.zeros_like(z)
    w = np.exp(1j * s.period_T * z)
    if s.kind is CouplingKind.SINUSOIDAL:
        return -0.5 * s.alpha * w
    if s.kind is CouplingKind.EXP_COMB:
        q = math.exp(-s.beta) * w
        return q / (1.0 - q)
    total = np.zeros_like(z)
    wn = np.ones_like(z)
    for c in s.coeffs:
        wn = wn * w
        total += c * wn
    return total


def self_energy(
    vc: ValidatedCoupling, z: Union[complex, np.ndarray]
) -> Union[complex, np.ndarray]:
    """Dressed self-energy i gamma0/2 * (1 + 2 sum_n c_n exp(i n T z)).

    Analytic on the open upper half-plane for every supported kind; the
    exp_comb geometric series converges there even at beta = 0 because
    |exp(i T z)| < 1.

    Raises:
        LowerHalfPlane: if any evaluation point has Im z <= 0.
    """
    zarr = np.asarray(z, dtype=complex)
    if np.any(zarr.imag <= 0.0):
        raise LowerHalfPlane("self-energy is defined for Im z > 0 only")
    out = 0.5j * vc.gamma0 * (1.0 + 2.0 * _delay_sum(vc, zarr))
    return complex(out) if np.isscalar(z) else out


def reconstruct_density(
    vc: ValidatedCoupling, omega: float, delta: float
) -> float:
    """Recover the density from the self-energy boundary value.

    Returns (1/pi) Im Sigma(omega + i delta); for continuous densities this
    converges to :func:`spectral_density` at rate O(delta) as delta -> 0.

    Raises:
        LowerHalfPlane: delta <= 0.
        DistributionalDensity: Dirac-comb coupling (no pointwise limit).
    """
    if vc.is_dirac_comb:
        raise DistributionalDensity(
            "exp_comb with beta = 0 has no pointwise density to reconstruct"
        )
    sigma = self_energy(vc, complex(omega, delta))
    return sigma.imag / math.pi
