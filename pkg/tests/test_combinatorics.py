import itertools
import math

import numpy as np
import pytest

import hmark as hm
from hmark.combinatorics import DelayPolynomialTable
from hmark.errors import OutOfRange


def brute_force_weight(coeffs, n, m):
    """Independent oracle: sum the coefficient products over an explicit
    enumeration of the compositions."""
    def coeff(h):
        return coeffs[h - 1] if h <= len(coeffs) else 0.0

    total = 0.0
    for parts in hm.compositions(n, m):
        total += math.prod(coeff(h) for h in parts)
    return total


def test_compositions_of_three_into_two():
    assert hm.compositions(3, 2) == {(1, 2), (2, 1)}


def test_compositions_cardinality_example():
    assert len(hm.compositions(5, 3)) == 6


def test_single_composition():
    assert hm.compositions(1, 1) == {(1,)}


def test_compositions_all_sum_correctly():
    for n in range(1, 9):
        for m in range(1, n + 1):
            for parts in hm.compositions(n, m):
                assert len(parts) == m
                assert sum(parts) == n
                assert all(h >= 1 for h in parts)


def test_compositions_cardinalities():
    for n in range(1, 13):
        total = 0
        for m in range(1, n + 1):
            count = len(hm.compositions(n, m))
            assert count == math.comb(n - 1, m - 1)
            total += count
        assert total == 2 ** (n - 1)


@pytest.mark.parametrize("n,m", [(0, 1), (3, 0), (2, 3), (21, 1), (25, 25)])
def test_compositions_out_of_range(n, m):
    with pytest.raises(OutOfRange):
        hm.compositions(n, m)


def test_weight_single_coefficient_square():
    c1 = 0.37
    assert hm.composition_weight([c1], 2, 2) == pytest.approx(c1 * c1, rel=1e-15)


def test_weight_truncated_sequence():
    # compositions of 4 into 2 parts are (1,3), (3,1), (2,2); with c3 = 0
    # only the middle one survives
    c1, c2 = 0.4, -0.7
    assert hm.composition_weight([c1, c2], 4, 2) == pytest.approx(c2 * c2, rel=1e-14)


def test_weight_geometric_coefficients_closed_form():
    beta = 0.6
    coeffs = [math.exp(-beta * n) for n in range(1, 13)]
    for n in range(1, 13):
        for m in range(1, n + 1):
            expected = math.comb(n - 1, m - 1) * math.exp(-beta * n)
            assert hm.composition_weight(coeffs, n, m) == pytest.approx(
                expected, rel=1e-12
            )


def test_weight_matches_enumeration_exactly_on_integers():
    # small-integer coefficients make every float operation exact, so the
    # convolution and the enumeration must agree bit for bit
    rng = np.random.default_rng(5)
    coeffs = [float(v) for v in rng.integers(-3, 4, size=12)]
    for n in range(1, 13):
        for m in range(1, n + 1):
            assert hm.composition_weight(coeffs, n, m) == brute_force_weight(
                coeffs, n, m
            )


def test_weight_matches_enumeration_on_floats():
    rng = np.random.default_rng(17)
    coeffs = list(rng.uniform(-1, 1, size=10))
    for n in range(1, 11):
        for m in range(1, n + 1):
            assert hm.composition_weight(coeffs, n, m) == pytest.approx(
                brute_force_weight(coeffs, n, m), rel=1e-12, abs=1e-15
            )


def test_weight_out_of_range():
    with pytest.raises(OutOfRange):
        hm.composition_weight([1.0], 3, 4)
    with pytest.raises(OutOfRange):
        hm.composition_weight([1.0], 0, 0)


def _params(spec, eps0=0.0):
    return hm.ModelParams(hm.validate_coupling(spec), eps0)


def test_delay_polynomial_sinusoidal_value():
    params = _params(hm.sinusoidal(1.0, 1.0, 1.0))
    assert hm.delay_polynomial(params, 2, 2.0) == pytest.approx(0.5, rel=1e-15)


def test_delay_polynomial_comb_value():
    params = _params(hm.exp_comb(1.0, 1.0, 0.0))
    assert hm.delay_polynomial(params, 2, 1.0) == pytest.approx(-0.5, rel=1e-15)


@pytest.mark.parametrize(
    "spec",
    [
        hm.flat(1.0),
        hm.sinusoidal(1.0, 1.0, 0.7),
        hm.exp_comb(1.0, 1.0, 1.2),
        hm.custom_fourier(1.0, 1.0, [0.2, 0.1, 0.05]),
    ],
)
@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_delay_polynomial_vanishes_at_origin(spec, n):
    assert hm.delay_polynomial(_params(spec), n, 0.0) == 0.0


def test_delay_polynomial_closed_forms_match_table():
    # the sinusoidal/comb closed forms and the generic convolution table must
    # produce identical polynomials
    xs = np.linspace(0.0, 4.0, 9)
    sin_params = _params(hm.sinusoidal(1.0, 1.0, 0.8))
    sin_custom = _params(hm.custom_fourier(1.0, 1.0, [-0.4]))
    comb_params = _params(hm.exp_comb(1.0, 1.0, 0.9))
    comb_custom = _params(
        hm.custom_fourier(1.0, 1.0, [math.exp(-0.9 * n) for n in range(1, 13)])
    )
    for n in range(1, 11):
        assert hm.delay_polynomial(sin_params, n, xs) == pytest.approx(
            hm.delay_polynomial(sin_custom, n, xs), rel=1e-13, abs=1e-16
        )
        assert hm.delay_polynomial(comb_params, n, xs) == pytest.approx(
            hm.delay_polynomial(comb_custom, n, xs), rel=1e-12, abs=1e-15
        )


def test_delay_polynomial_order_guard():
    params = _params(hm.sinusoidal(1.0, 1.0, 1.0))
    with pytest.raises(OutOfRange):
        hm.delay_polynomial(params, 0, 1.0)
    with pytest.raises(OutOfRange):
        hm.delay_polynomial(params, 513, 1.0)


def test_table_sinusoidal_is_diagonal():
    vc = hm.validate_coupling(hm.sinusoidal(1.0, 1.0, 0.6))
    table = DelayPolynomialTable.from_coupling(vc, 8)
    for n in range(1, 9):
        for m in range(1, n + 1):
            w = table.weight(n, m)
            assert math.isfinite(w)
            if m != n:
                assert w == 0.0
            else:
                assert w == pytest.approx((-0.3) ** n, rel=1e-15)


def test_table_matches_composition_weight():
    coeffs = [0.3, 0.15, 0.05]
    vc = hm.validate_coupling(hm.custom_fourier(1.0, 1.0, coeffs))
    table = DelayPolynomialTable.from_coupling(vc, 10)
    for n in range(1, 11):
        for m in range(1, n + 1):
            assert table.weight(n, m) == pytest.approx(
                hm.composition_weight(coeffs, n, m), rel=1e-13, abs=1e-18
            )


def test_table_bounds():
    vc = hm.validate_coupling(hm.flat(1.0))
    table = DelayPolynomialTable.from_coupling(vc, 4)
    with pytest.raises(OutOfRange):
        table.weight(5, 1)
    with pytest.raises(OutOfRange):
        DelayPolynomialTable.from_coupling(vc, 0)
