"""Integer-composition machinery behind the delayed-correction polynomials.

The exact survival amplitude of a periodic coupling is a sum of delayed
corrections; the n-th correction carries a degree-n polynomial whose
coefficients are weighted sums of the coupling's Fourier coefficients over
all ordered m-tuples of positive integers summing to n (compositions of n
into m parts).  This module provides

* :func:`compositions` -- explicit enumeration of those tuples,
* :func:`composition_weight` -- the summed product of coefficients over one
  composition class, computed by a dynamic-programming convolution,
* :class:`DelayPolynomialTable` / :func:`delay_polynomial` -- the assembled
  polynomials, with closed forms for the sinusoidal and comb couplings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Set, Tuple

import numpy as np

from .coupling import CouplingKind, ModelParams, ValidatedCoupling
from .errors import OutOfRange

__all__ = [
    "compositions",
    "composition_weight",
    "DelayPolynomialTable",
    "delay_polynomial",
]

# Enumeration guard: the number of compositions grows like 2^(n-1).
MAX_ENUMERATION_ORDER = 20

# Hard cap on the delay order of the polynomial table / closed forms.
MAX_DELAY_ORDER = 512


def compositions(n: int, m: int) -> Set[Tuple[int, ...]]:
    """All ordered m-tuples of strictly positive integers that sum to n.

    The count is binomial(n-1, m-1): choosing m-1 cut points among the n-1
    gaps of a row of n units.

    Raises:
        OutOfRange: unless 1 <= m <= n <= 20.
    """
    if not (1 <= m <= n <= MAX_ENUMERATION_ORDER):
        raise OutOfRange(
            f"compositions require 1 <= m <= n <= {MAX_ENUMERATION_ORDER}, "
            f"got n={n}, m={m}"
        )
    out: Set[Tuple[int, ...]] = set()
    for cuts in itertools.combinations(range(1, n), m - 1):
        bounds = (0,) + cuts + (n,)
        out.add(tuple(bounds[i + 1] - bounds[i] for i in range(m)))
    return out


def _weight_rows(coeffs: Sequence[float], n: int, m_max: int) -> np.ndarray:
    """Rows w[m-1, j-1] = sum over compositions of j into m parts of the
    coefficient products, for 1 <= m <= m_max, 1 <= j <= n."""
    c = np.zeros(n)
    upto = min(len(coeffs), n)
    c[:upto] = np.asarray(coeffs[:upto], dtype=float)
    rows = np.zeros((m_max, n))
    rows[0, :] = c
    for m in range(1, m_max):
        # w^(m+1)_j = sum_h c_h w^(m)_{j-h}; slot k of the convolution holds
        # order k+2, hence the one-slot right shift.
        conv = np.convolve(c, rows[m - 1, :])
        rows[m, 1:] = conv[: n - 1]
    return rows


def composition_weight(coeffs: Sequence[float], n: int, m: int) -> float:
    """Sum over all compositions of n into m parts of prod_i c_{h_i}.

    Coefficients beyond the supplied sequence are implicitly zero.  Computed
    by repeated convolution rather than enumeration, so it stays polynomial
    in n.

    Raises:
        OutOfRange: unless 1 <= m <= n <= 512.
    """
    if not (1 <= m <= n <= MAX_DELAY_ORDER):
        raise OutOfRange(
            f"composition_weight requires 1 <= m <= n <= {MAX_DELAY_ORDER}, "
            f"got n={n}, m={m}"
        )
    return float(_weight_rows(coeffs, n, m)[m - 1, n - 1])


@dataclass(frozen=True)
class DelayPolynomialTable:
    """Triangular table of the delay-polynomial coefficients.

    ``weights[n-1, m-1]`` holds the composition weight attached to the
    (-x)^m / m! term of the n-th delay polynomial, for 1 <= m <= n <=
    ``max_order``.  For the sinusoidal coupling only the diagonal survives.
    """

    max_order: int
    weights: np.ndarray

    def weight(self, n: int, m: int) -> float:
        if not (1 <= m <= n <= self.max_order):
            raise OutOfRange(
                f"table holds 1 <= m <= n <= {self.max_order}, got n={n}, m={m}"
            )
        return float(self.weights[n - 1, m - 1])

    @classmethod
    def from_coupling(
        cls, coupling: ValidatedCoupling, max_order: int
    ) -> "DelayPolynomialTable":
        if not (1 <= max_order <= MAX_DELAY_ORDER):
            raise OutOfRange(
                f"max_order must be in [1, {MAX_DELAY_ORDER}], got {max_order}"
            )
        s = coupling.spec
        w = np.zeros((max_order, max_order))
        if s.kind is CouplingKind.SINUSOIDAL:
            for n in range(1, max_order + 1):
                w[n - 1, n - 1] = (-0.5 * s.alpha) ** n
        elif s.kind is CouplingKind.EXP_COMB:
            for n in range(1, max_order + 1):
                damp = math.exp(-s.beta * n)
                for m in range(1, n + 1):
                    w[n - 1, m - 1] = math.comb(n - 1, m - 1) * damp
        elif s.kind is CouplingKind.CUSTOM_FOURIER:
            rows = _weight_rows(s.coeffs, max_order, max_order)
            for n in range(1, max_order + 1):
                w[n - 1, : n] = rows[: n, n - 1]
        # flat: all zero
        return cls(max_order, w)


@lru_cache(maxsize=64)
def _poly_coefficients(coupling: ValidatedCoupling, n: int) -> np.ndarray:
    """Coefficients p such that the n-th delay polynomial is
    sum_m p[m] x^m (p[0] = 0); p[m] = weight(n, m) (-1)^m / m!."""
    if not (1 <= n <= MAX_DELAY_ORDER):
        raise OutOfRange(
            f"delay order must be in [1, {MAX_DELAY_ORDER}], got {n}"
        )
    s = coupling.spec
    p = np.zeros(n + 1)
    if s.kind is CouplingKind.FLAT:
        return p
    if s.kind is CouplingKind.SINUSOIDAL:
        # (alpha x / 2)^n / n!
        p[n] = (0.5 * s.alpha) ** n / math.factorial(n)
        return p
    if s.kind is CouplingKind.EXP_COMB:
        damp = math.exp(-s.beta * n)
        for m in range(1, n + 1):
            p[m] = damp * math.comb(n - 1, m - 1) * (-1) ** m / math.factorial(m)
        return p
    rows = _weight_rows(s.coeffs, n, n)
    for m in range(1, n + 1):
        p[m] = rows[m - 1, n - 1] * (-1) ** m / math.factorial(m)
    return p


def delay_polynomial(params: ModelParams, n: int, x) -> float:
    """Value of the n-th delayed-correction polynomial at x.

    The polynomial has no constant term, so it vanishes at x = 0 for every
    coupling; this is what keeps the survival amplitude continuous across
    the delay times.

    Raises:
        OutOfRange: n outside [1, 512].
    """
    p = _poly_coefficients(params.coupling, n)
    out = np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), p)
    return float(out) if np.isscalar(x) else out
