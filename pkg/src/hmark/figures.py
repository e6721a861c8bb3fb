"""Canonical survival-probability figures: delimited data plus rendered plots.

Two figure sets are built in, both in units where the coupling period is 1
(so the emitted raw time column coincides with t/T; for other periods
rescale t by 1/T and nothing else changes):

* ``fig2`` -- sinusoidal coupling at full modulation, survival probability
  over five periods, for gamma0*T in {1, 4} and eps0*T in
  {0, pi/3, 2pi/3, pi}; one CSV per parameter pair and one PNG per
  gamma0*T panel.
* ``fig3`` -- Dirac-comb coupling (exp_comb, beta = 0) at gamma0*T = 4,
  eps0 = 0, over four periods, showing the post-horizon revivals; one CSV
  and one PNG.

CSV artifacts are byte-deterministic (see :mod:`hmark.csvio`); the PNGs are
a rendering convenience layered on top and are produced without any global
pyplot state so the library stays import-side-effect free.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .amplitude import AmplitudeTrace, TimeGrid, amplitude_series
from .coupling import ModelParams, exp_comb, sinusoidal, validate_coupling
from .csvio import rows_from_trace, write_csv
from .errors import BadParameter

__all__ = ["FigureCurve", "figure_curves", "write_figure_outputs", "FIGURE_NAMES"]

FIGURE_NAMES = ("fig2", "fig3")

FIG2_GAMMAS = (1.0, 4.0)
FIG2_EPS_LABELS: Tuple[Tuple[str, float], ...] = (
    ("0", 0.0),
    ("pi3", math.pi / 3.0),
    ("2pi3", 2.0 * math.pi / 3.0),
    ("pi", math.pi),
)
FIG2_SPAN = 5.0
FIG3_SPAN = 4.0
SAMPLES_PER_PERIOD = 200


@dataclass(frozen=True)
class FigureCurve:
    """One curve of a figure: CSV stem, panel key, display label, trace."""

    stem: str
    panel: str
    label: str
    trace: AmplitudeTrace


def _series_trace(params: ModelParams, span: float) -> AmplitudeTrace:
    grid = TimeGrid.from_span(1.0 / SAMPLES_PER_PERIOD, span)
    return amplitude_series(params, grid)


def figure_curves(which: str) -> List[FigureCurve]:
    """All curves of the requested figure, computed with the exact series
    backend on a period/200 grid."""
    if which == "fig2":
        curves = []
        for gamma in FIG2_GAMMAS:
            for label, eps in FIG2_EPS_LABELS:
                coupling = validate_coupling(sinusoidal(gamma, 1.0, 1.0))
                params = ModelParams(coupling, eps)
                stem = f"fig2_gammaT{gamma:g}_epsT{label}"
                pretty = {"0": "0", "pi3": "pi/3", "2pi3": "2pi/3", "pi": "pi"}[label]
                curves.append(
                    FigureCurve(
                        stem=stem,
                        panel=f"fig2_gammaT{gamma:g}",
                        label=f"eps0*T = {pretty}",
                        trace=_series_trace(params, FIG2_SPAN),
                    )
                )
        return curves
    if which == "fig3":
        coupling = validate_coupling(exp_comb(4.0, 1.0, 0.0))
        params = ModelParams(coupling, 0.0)
        return [
            FigureCurve(
                stem="fig3_beta0",
                panel="fig3",
                label="beta = 0",
                trace=_series_trace(params, FIG3_SPAN),
            )
        ]
    raise BadParameter(f"unknown figure {which!r}; expected one of {FIGURE_NAMES}")


def _render_panel(path: str, title: str, curves: Sequence[FigureCurve]) -> None:
    # pyplot-free rendering: an explicit Figure with the Agg canvas avoids
    # backend/global-state issues in headless runs
    from matplotlib.backends.backend_agg import FigureCanvasAgg
    from matplotlib.figure import Figure

    fig = Figure(figsize=(6.0, 4.0), dpi=150)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    for curve in curves:
        ax.plot(curve.trace.times, curve.trace.abs2, label=curve.label, lw=1.2)
    ax.set_xlabel("t / T")
    ax.set_ylabel("survival probability")
    ax.set_title(title)
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(frameon=False, fontsize=9)
    fig.tight_layout()
    fig.savefig(path)


def write_figure_outputs(
    which: str, out_dir: str, render: bool = True
) -> Dict[str, List[str]]:
    """Write the figure's CSVs (and PNGs unless ``render`` is false).

    Returns a dict with the written ``csv`` and ``png`` paths.
    """
    curves = figure_curves(which)
    os.makedirs(out_dir, exist_ok=True)
    written: Dict[str, List[str]] = {"csv": [], "png": []}
    for curve in curves:
        path = os.path.join(out_dir, curve.stem + ".csv")
        write_csv(rows_from_trace(curve.trace), path)
        written["csv"].append(path)
    if render:
        panels: Dict[str, List[FigureCurve]] = {}
        for curve in curves:
            panels.setdefault(curve.panel, []).append(curve)
        for panel, panel_curves in panels.items():
            path = os.path.join(out_dir, panel + ".png")
            _render_panel(path, _panel_title(panel), panel_curves)
            written["png"].append(path)
    return written


def _panel_title(panel: str) -> str:
    if panel.startswith("fig2_gammaT"):
        return f"sinusoidal coupling, alpha = 1, gamma0*T = {panel.split('gammaT')[1]}"
    return "comb coupling, beta = 0, gamma0*T = 4, eps0 = 0"
