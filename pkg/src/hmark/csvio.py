"""Deterministic CSV artifacts.

Columns are ``t,re_a,im_a,abs2_a`` plus ``gamma,eps`` when rates are
included.  Values are written with 17 significant digits (lossless for
float64) and LF newlines, so identical inputs always produce identical
bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .amplitude import AmplitudeTrace
from .channel import RateFunctions
from .errors import BadParameter, IoError

__all__ = ["OutputRow", "rows_from_trace", "write_csv", "read_csv_columns"]

BASE_HEADER = ("t", "re_a", "im_a", "abs2_a")
RATE_HEADER = BASE_HEADER + ("gamma", "eps")


@dataclass(frozen=True)
class OutputRow:
    """One sampled time point; abs2_a is re_a^2 + im_a^2 by construction."""

    t: float
    re_a: float
    im_a: float
    abs2_a: float
    gamma_t: Optional[float] = None
    eps_t: Optional[float] = None


def rows_from_trace(
    trace: AmplitudeTrace, rates: Optional[RateFunctions] = None
) -> List[OutputRow]:
    times = trace.times
    values = trace.values
    rows = []
    for k in range(times.size):
        re = float(values[k].real)
        im = float(values[k].imag)
        rows.append(
            OutputRow(
                t=float(times[k]),
                re_a=re,
                im_a=im,
                abs2_a=re * re + im * im,
                gamma_t=None if rates is None else float(rates.gamma[k]),
                eps_t=None if rates is None else float(rates.eps[k]),
            )
        )
    return rows


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(rows: Sequence[OutputRow], path: str) -> None:
    """Write rows to ``path``; header only when ``rows`` is empty.

    All rows must uniformly carry or omit rates.

    Raises:
        IoError: the file cannot be written.
        BadParameter: mixed rows (some with rates, some without).
    """
    with_rates = bool(rows) and rows[0].gamma_t is not None
    if any((row.gamma_t is not None) != with_rates for row in rows):
        raise BadParameter("all rows must uniformly include or omit rates")
    header = RATE_HEADER if with_rates else BASE_HEADER
    lines = [",".join(header)]
    for row in rows:
        fields = [_fmt(row.t), _fmt(row.re_a), _fmt(row.im_a), _fmt(row.abs2_a)]
        if with_rates:
            fields += [_fmt(row.gamma_t), _fmt(row.eps_t)]
        lines.append(",".join(fields))
    payload = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as handle:
            handle.write(payload)
    except OSError as exc:
        raise IoError(f"cannot write {path!r}: {exc}") from exc


def read_csv_columns(path: str) -> dict:
    """Read one of our CSVs back into named float arrays (for regression
    comparisons; not a general CSV reader)."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path!r}: {exc}") from exc
    if not lines:
        raise IoError(f"{path!r} is empty")
    names = lines[0].split(",")
    data = np.array(
        [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    ) if len(lines) > 1 else np.empty((0, len(names)))
    return {name: data[:, j] for j, name in enumerate(names)}
