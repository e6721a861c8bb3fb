import math

import numpy as np
import pytest

import hmark as hm
from hmark.errors import (
    BadParameter,
    DistributionalDensity,
    LowerHalfPlane,
    NonPositiveDensity,
)


def test_flat_is_valid():
    vc = hm.validate_coupling(hm.flat(1.0))
    assert vc.kind is hm.CouplingKind.FLAT


def test_full_modulation_sinusoidal_is_valid():
    # density proportional to 1 - cos(T omega) touches zero but never dips below
    vc = hm.validate_coupling(hm.sinusoidal(1.0, 1.0, 1.0))
    assert vc.fourier_coefficient(1) == -0.5
    assert vc.fourier_coefficient(2) == 0.0


def test_negative_custom_series_rejected():
    # at omega = 0 the series evaluates to 1 + 2(-0.8 - 0.8) = -2.2
    with pytest.raises(NonPositiveDensity):
        hm.validate_coupling(hm.custom_fourier(1.0, 1.0, [-0.8, -0.8]))


@pytest.mark.parametrize(
    "spec",
    [
        hm.flat(0.0),
        hm.flat(-1.0),
        hm.sinusoidal(1.0, 0.0, 0.5),
        hm.sinusoidal(1.0, -1.0, 0.5),
        hm.sinusoidal(1.0, 1.0, 1.5),
        hm.sinusoidal(1.0, 1.0, -1.0001),
        hm.exp_comb(1.0, 1.0, -0.1),
        hm.custom_fourier(1.0, 1.0, [float("nan")]),
        hm.flat(float("inf")),
    ],
)
def test_bad_parameters_rejected(spec):
    with pytest.raises(BadParameter):
        hm.validate_coupling(spec)


def test_custom_series_positivity_accepts_borderline():
    # 1 + 2*(0.25 cos + 0.25 cos(2.)) stays positive
    vc = hm.validate_coupling(hm.custom_fourier(2.0, 0.5, [0.25, 0.25]))
    assert vc.fourier_coefficient(2) == 0.25
    assert vc.fourier_coefficient(3) == 0.0


def test_flat_density_constant():
    vc = hm.validate_coupling(hm.flat(2.0 * np.pi))
    for omega in (-5.0, 0.0, 0.3, 17.0):
        assert hm.spectral_density(vc, omega) == pytest.approx(1.0, abs=1e-15)


def test_sinusoidal_density_vanishes_at_zero():
    vc = hm.validate_coupling(hm.sinusoidal(2.0 * np.pi, 1.0, 1.0))
    assert hm.spectral_density(vc, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert hm.spectral_density(vc, np.pi) == pytest.approx(2.0, rel=1e-14)


def test_dirac_comb_has_no_pointwise_density():
    vc = hm.validate_coupling(hm.exp_comb(1.0, 1.0, 0.0))
    with pytest.raises(DistributionalDensity):
        hm.spectral_density(vc, 0.0)


def test_smoothed_comb_density_closed_form_matches_series():
    beta, period, gamma0 = 0.7, 1.3, 2.0
    vc = hm.validate_coupling(hm.exp_comb(gamma0, period, beta))
    omega = np.linspace(-3.0, 9.0, 7)
    direct = gamma0 / (2 * np.pi) * (
        1.0
        + 2.0 * sum(np.exp(-beta * n) * np.cos(n * period * omega) for n in range(1, 200))
    )
    assert np.allclose(hm.spectral_density(vc, omega), direct, rtol=1e-12)


def test_flat_self_energy_is_constant():
    vc = hm.validate_coupling(hm.flat(2.0))
    for z in (1j, 3.0 + 0.5j, -10.0 + 2.0j):
        sigma = hm.self_energy(vc, z)
        assert sigma == pytest.approx(1j, abs=1e-15)


def test_sinusoidal_self_energy_closed_form():
    vc = hm.validate_coupling(hm.sinusoidal(2.0, 1.0, 1.0))
    expected = 1j * (1.0 - np.exp(-1.0))
    assert hm.self_energy(vc, 1j) == pytest.approx(expected, abs=1e-15)


def test_comb_self_energy_geometric_sum():
    vc = hm.validate_coupling(hm.exp_comb(2.0, 1.0, 1.0))
    q = np.exp(-2.0)  # e^{-beta} e^{i T (i)} = e^{-1} e^{-1}
    expected = 1j * (1.0 + 2.0 * q / (1.0 - q))
    assert hm.self_energy(vc, 1j) == pytest.approx(expected, rel=1e-14)


def test_self_energy_rejects_lower_half_plane():
    vc = hm.validate_coupling(hm.flat(1.0))
    for z in (0.0 + 0.0j, 1.0, 2.0 - 0.1j):
        with pytest.raises(LowerHalfPlane):
            hm.self_energy(vc, z)


def test_reconstruct_density_flat_exact():
    vc = hm.validate_coupling(hm.flat(2.0 * np.pi))
    assert hm.reconstruct_density(vc, 0.0, 1e-6) == pytest.approx(1.0, abs=1e-15)


def test_reconstruct_density_sinusoidal_near_boundary():
    vc = hm.validate_coupling(hm.sinusoidal(2.0 * np.pi, 1.0, 1.0))
    assert hm.reconstruct_density(vc, np.pi, 1e-4) == pytest.approx(2.0, abs=1e-3)


def test_reconstruct_density_rejects_zero_offset():
    vc = hm.validate_coupling(hm.sinusoidal(1.0, 1.0, 0.5))
    with pytest.raises(LowerHalfPlane):
        hm.reconstruct_density(vc, 1.0, 0.0)


def test_reconstruct_density_rejects_dirac_comb():
    vc = hm.validate_coupling(hm.exp_comb(1.0, 1.0, 0.0))
    with pytest.raises(DistributionalDensity):
        hm.reconstruct_density(vc, 0.0, 1e-3)


@pytest.mark.parametrize(
    "spec",
    [
        hm.sinusoidal(1.0, 1.0, 0.8),
        hm.exp_comb(1.5, 2.0, 0.5),
        hm.custom_fourier(1.0, 1.0, [0.3, 0.1, -0.05]),
    ],
)
def test_reconstruction_error_decreases_with_offset(spec):
    vc = hm.validate_coupling(spec)
    rng = np.random.default_rng(7)
    for omega in rng.uniform(-4.0, 4.0, size=5):
        errors = [
            abs(hm.reconstruct_density(vc, omega, d) - hm.spectral_density(vc, omega))
            for d in (1e-2, 1e-3, 1e-4)
        ]
        assert errors[0] > errors[1] > errors[2]


@pytest.mark.parametrize(
    "spec",
    [
        hm.flat(1.0),
        hm.sinusoidal(1.0, 1.0, 1.0),
        hm.exp_comb(2.0, 1.5, 0.0),
        hm.custom_fourier(1.0, 1.0, [0.3, 0.1]),
    ],
)
def test_self_energy_satisfies_cauchy_riemann(spec):
    # centered finite differences of an analytic function along the two axes
    # must agree: dSigma/dx == -i dSigma/dy
    vc = hm.validate_coupling(spec)
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(100):
        z = complex(rng.uniform(-5, 5), rng.uniform(0.1, 3.0))
        dx = (hm.self_energy(vc, z + h) - hm.self_energy(vc, z - h)) / (2 * h)
        dy = (hm.self_energy(vc, z + 1j * h) - hm.self_energy(vc, z - 1j * h)) / (2j * h)
        scale = max(abs(dx), abs(dy), 1e-30)
        assert abs(dx - dy) / scale < 1e-6


def test_flat_self_energy_exact_on_samples():
    vc = hm.validate_coupling(hm.flat(3.0))
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.uniform(-10, 10), rng.uniform(1e-3, 10))
        sigma = hm.self_energy(vc, z)
        assert sigma.real == 0.0
        assert sigma.imag == 1.5


def test_model_params_requires_validated_coupling():
    with pytest.raises(BadParameter):
        hm.ModelParams(hm.flat(1.0), 0.0)
    with pytest.raises(BadParameter):
        hm.ModelParams(hm.validate_coupling(hm.flat(1.0)), math.inf)
