import numpy as np
import pytest
import scipy.linalg

import hmark as hm
from hmark.errors import (
    AmplitudeNearZero,
    InvalidAmplitude,
    InvalidState,
    PhaseJump,
)


def _params(spec, eps0=0.0):
    return hm.ModelParams(hm.validate_coupling(spec), eps0)


def random_state(rng) -> hm.DensityMatrix:
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return hm.DensityMatrix.from_matrix(rho)


def random_amplitude(rng) -> complex:
    radius = np.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return radius * np.exp(1j * angle)


GENERIC_STATE = hm.DensityMatrix(0.7, 0.36 + 0.12j, 0.36 - 0.12j, 0.3)


# --- states and evolve ---------------------------------------------------------

def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        hm.DensityMatrix(0.5, 0.1, 0.2, 0.5)  # not hermitian
    with pytest.raises(InvalidState):
        hm.DensityMatrix(0.7, 0.0, 0.0, 0.7)  # trace 1.4
    with pytest.raises(InvalidState):
        hm.DensityMatrix(0.5, 0.6, 0.6, 0.5)  # indefinite
    with pytest.raises(InvalidState):
        hm.DensityMatrix(1.2, 0.0, 0.0, -0.2)  # negative population


def test_evolve_identity_amplitude():
    out = hm.evolve(GENERIC_STATE, 1.0)
    assert out == GENERIC_STATE


def test_evolve_full_decay():
    out = hm.evolve(GENERIC_STATE, 0.0)
    assert out.rho00 == 0.0
    assert out.rho01 == 0.0
    assert out.rho11 == pytest.approx(1.0, abs=1e-15)


def test_evolve_population_transfer():
    a = np.exp(-0.5)
    out = hm.evolve(hm.DensityMatrix.excited(), a)
    assert out.rho00.real == pytest.approx(np.exp(-1.0), rel=1e-15)
    assert out.rho11.real == pytest.approx(1.0 - np.exp(-1.0), rel=1e-15)


def test_evolve_rejects_large_amplitude():
    with pytest.raises(InvalidAmplitude):
        hm.evolve(GENERIC_STATE, 1.0 + 1e-6)


def test_evolve_preserves_trace_and_positivity():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        rho = random_state(rng)
        out = hm.evolve(rho, random_amplitude(rng))
        trace = out.rho00 + out.rho11
        assert abs(trace - 1.0) <= 1e-12
        eigs = np.linalg.eigvalsh(out.matrix)
        assert eigs.min() >= -1e-12


# --- rate extraction -----------------------------------------------------------

def test_rates_constant_for_flat():
    params = _params(hm.flat(1.0), eps0=2.0)
    trace = hm.amplitude_series(params, hm.TimeGrid(1e-3, 2000))
    rates = hm.extract_rates(trace)
    assert np.abs(rates.gamma - 1.0).max() < 1e-6
    assert np.abs(rates.eps - 2.0).max() < 1e-6


def test_rates_constant_inside_horizon():
    params = _params(hm.sinusoidal(1.0, 1.0, 1.0), eps0=0.5)
    trace = hm.amplitude_series(params, hm.TimeGrid(1.0 / 2000, 3000))
    rates = hm.extract_rates(trace)
    inside = (trace.times > 0) & (trace.times < 1.0 - 1.5 * trace.grid.dt)
    assert np.abs(rates.gamma[inside] - 1.0).max() < 1e-6
    assert np.abs(rates.eps[inside] - 0.5).max() < 1e-6


def test_rates_reject_near_zero_amplitude():
    grid = hm.TimeGrid(0.1, 2)
    values = np.array([1.0, 1e-12, 1e-12])
    trace = hm.AmplitudeTrace(grid, values, hm.Backend.SERIES)
    with pytest.raises(AmplitudeNearZero):
        hm.extract_rates(trace)


def test_rates_reject_phase_jump():
    grid = hm.TimeGrid(0.1, 3)
    values = np.array([1.0, -0.9, 0.8, -0.7], dtype=complex)
    trace = hm.AmplitudeTrace(grid, values, hm.Backend.SERIES)
    with pytest.raises(PhaseJump):
        hm.extract_rates(trace)


def _analytic_rates(params, t):
    """Log-derivative rates from the one-correction stretch of the exact
    amplitude, valid for T < t < 2T."""
    gamma0 = params.coupling.gamma0
    period = params.coupling.period_T
    lam = 0.5 * gamma0 + 1j * params.eps0
    tau = t - period
    correction = 0.5 * gamma0 * tau  # first delay polynomial at full modulation
    a = np.exp(-lam * t) + np.exp(-lam * tau) * correction
    da = -lam * np.exp(-lam * t) + np.exp(-lam * tau) * (
        -lam * correction + 0.5 * gamma0
    )
    ratio = da / a
    return -2.0 * ratio.real, -ratio.imag


def test_rate_extraction_is_second_order():
    # measured against the closed-form rates on (T, 2T), away from the kinks
    params = _params(hm.sinusoidal(1.0, 1.0, 1.0), eps0=1.0)
    errors = {}
    for n_per in (500, 1000):
        grid = hm.TimeGrid(1.0 / n_per, 2 * n_per)
        rates = hm.extract_rates(hm.amplitude_series(params, grid))
        window = (grid.times >= 1.2) & (grid.times <= 1.8)
        g_ref, e_ref = _analytic_rates(params, grid.times[window])
        errors[n_per] = max(
            np.abs(rates.gamma[window] - g_ref).max(),
            np.abs(rates.eps[window] - e_ref).max(),
        )
    ratio = errors[500] / errors[1000]
    assert 3.0 < ratio < 5.5


# --- superoperators ------------------------------------------------------------

def test_generator_zero():
    assert np.all(hm.gkls_generator(0.0, 0.0) == 0)


def test_generator_population_flow():
    gen = hm.gkls_generator(1.0, 0.0)
    vec = hm.DensityMatrix.excited().vec
    out = gen @ vec
    assert out[0] == pytest.approx(-1.0)
    assert out[3] == pytest.approx(1.0)
    assert out[1] == out[2] == 0.0


def test_generator_coherence_rotation():
    gen = hm.gkls_generator(0.0, 1.0)
    vec = np.array([0.0, 1.0, 0.0, 0.0], dtype=complex)
    out = gen @ vec
    assert out[1] == pytest.approx(-1j)


def test_channel_identity():
    assert np.allclose(hm.channel_superoperator(1.0), np.eye(4))


def test_channel_matches_generator_exponential():
    a = np.exp(-(0.5 + 1.0j))
    expected = scipy.linalg.expm(hm.gkls_generator(1.0, 1.0))
    assert np.abs(hm.channel_superoperator(a) - expected).max() < 1e-12


def test_channel_matches_commuting_exponential():
    rng = np.random.default_rng(31)
    for _ in range(25):
        a = random_amplitude(rng)
        if abs(a) < 1e-3:
            continue
        generator = (
            np.log(abs(a) ** 2) * hm.LINDBLAD_DISSIPATOR
            + 1j * np.angle(a) * hm.QUBIT_COMMUTATOR
        )
        assert np.abs(
            hm.channel_superoperator(a) - scipy.linalg.expm(generator)
        ).max() < 1e-12


def test_channel_multiplicativity():
    rng = np.random.default_rng(37)
    for _ in range(200):
        a1, a2 = random_amplitude(rng), random_amplitude(rng)
        if abs(a1) < 1e-6 or abs(a2) < 1e-6:
            continue
        lhs = hm.channel_superoperator(a1) @ hm.channel_superoperator(a2)
        rhs = hm.channel_superoperator(a1 * a2)
        assert np.abs(lhs - rhs).max() < 1e-12


def test_channel_rejects_zero():
    with pytest.raises(InvalidAmplitude):
        hm.channel_superoperator(0.0)


def test_channel_trace_preserving():
    rng = np.random.default_rng(41)
    for _ in range(100):
        a = random_amplitude(rng)
        if abs(a) < 1e-6:
            continue
        assert hm.is_trace_preserving(hm.channel_superoperator(a))


def test_generator_consistency_flat():
    # for constant rates the sampled channel is the exponential of t times
    # the generator
    params = _params(hm.flat(1.0), eps0=0.8)
    grid = hm.TimeGrid(0.25, 20)  # to 5 / gamma0
    trace = hm.amplitude_series(params, grid)
    gen = hm.gkls_generator(1.0, 0.8)
    for k in range(1, grid.n_steps + 1):
        expected = scipy.linalg.expm(grid.times[k] * gen)
        actual = hm.channel_superoperator(trace.values[k])
        assert np.abs(actual - expected).max() < 1e-10


# --- choi matrix ---------------------------------------------------------------

def test_choi_identity_channel():
    eigs = np.linalg.eigvalsh(hm.choi_matrix(1.0))
    assert np.allclose(sorted(eigs), [0.0, 0.0, 0.0, 2.0], atol=1e-14)


def test_choi_reset_channel_positive():
    c = hm.choi_matrix(0.0)
    assert np.abs(c - c.conj().T).max() == 0.0
    assert np.linalg.eigvalsh(c).min() >= -1e-12
    assert np.trace(c).real == pytest.approx(2.0)


def test_choi_detects_amplitude_overflow():
    assert np.linalg.eigvalsh(hm.choi_matrix(1.1)).min() < -0.1


def test_choi_positive_iff_contractive():
    rng = np.random.default_rng(43)
    for _ in range(200):
        a = random_amplitude(rng)
        c = hm.choi_matrix(a)
        assert np.trace(c).real == pytest.approx(2.0, abs=1e-12)
        assert np.linalg.eigvalsh(c).min() >= -1e-12


# --- master-equation residual ----------------------------------------------------

def test_residual_flat_small():
    params = _params(hm.flat(1.0))
    trace = hm.amplitude_series(params, hm.TimeGrid(1e-3, 3000))
    assert hm.master_residual(params, trace, GENERIC_STATE) <= 1e-5


def test_residual_stationary_state():
    params = _params(hm.sinusoidal(1.0, 1.0, 1.0))
    trace = hm.amplitude_series(params, hm.TimeGrid(1.0 / 500, 1000))
    assert hm.master_residual(params, trace, hm.DensityMatrix.ground()) <= 1e-12


def test_residual_quarters_when_step_halves():
    params = _params(hm.flat(1.0), eps0=0.6)
    res = {}
    for dt in (1e-2, 5e-3):
        steps = int(round(2.0 / dt))
        trace = hm.amplitude_series(params, hm.TimeGrid(dt, steps))
        res[dt] = hm.master_residual(params, trace, GENERIC_STATE)
    ratio = res[1e-2] / res[5e-3]
    assert 3.0 < ratio < 5.5
