"""Configuration-driven experiment runner.

Subcommands::

    amplitude  --config C [--backend B] [--out PATH]   amplitude trace -> CSV
    rates      --config C [--backend B] [--out PATH]   trace + extracted rates -> CSV
    crosscheck --config C --backends b1,b2[,..] [--tol X]   pairwise backend deltas
    witness    --config C [--backend B] [--tol X] [--out PATH]  defect report -> JSON (+CSV)
    figures    --which fig2|fig3 --out DIR [--no-plot]  figure CSVs + PNGs
    validate   --config C                                validate the coupling only

Exit codes: 0 success; 1 validation error; 2 numerical error; 64 unknown
subcommand / usage error; 65 config parse error.  Every failure prints one
machine-readable JSON line ``{"error": <class>, "message": <text>}`` on
standard error.

The environment variable ``HM_THREADS`` caps the linear-algebra thread pools
(best effort, via threadpoolctl when available).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .amplitude import (
    AmplitudeTrace,
    Backend,
    amplitude_laplace,
    amplitude_series,
    amplitude_volterra,
)
from .channel import extract_rates
from .config import ExperimentConfig, load_config
from .coupling import CouplingKind
from .csvio import rows_from_trace, write_csv
from .errors import (
    AmplitudeNearZero,
    BadQuadrature,
    ConfigError,
    HmarkError,
    PhaseJump,
    ResolventPole,
)
from .figures import FIGURE_NAMES, write_figure_outputs
from .markovianity import bound_state_check, semigroup_defect_report
from .modes import amplitude_modes, build_discrete_modes

__all__ = ["run", "main"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65

SUBCOMMANDS = ("amplitude", "rates", "crosscheck", "witness", "figures", "validate")

NUMERICAL_ERRORS = (ResolventPole, AmplitudeNearZero, PhaseJump, BadQuadrature)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; route through our own codes
    def error(self, message):
        raise _UsageError(message)


def _error_line(exc: BaseException) -> None:
    print(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}),
        file=sys.stderr,
    )


def _apply_thread_cap() -> None:
    raw = os.environ.get("HM_THREADS")
    if not raw:
        return
    try:
        n = max(1, int(raw))
    except ValueError:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=n)
    except Exception:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _compute_trace(config: ExperimentConfig, backend: Backend) -> AmplitudeTrace:
    opts = config.backend_options
    if backend is Backend.SERIES:
        return amplitude_series(config.model, config.grid)
    if backend is Backend.VOLTERRA:
        return amplitude_volterra(config.model, config.grid)
    if backend is Backend.LAPLACE:
        trace, diag = amplitude_laplace(
            config.model,
            config.grid,
            contour_height=opts.contour_height,
            omega_cutoff=opts.omega_cutoff,
            n_quad=opts.n_quad,
            return_diagnostics=True,
        )
        print(
            f"laplace: contour_height={diag.contour_height:g} "
            f"omega_cutoff={diag.omega_cutoff:g} n_quad={diag.n_quad} "
            f"tail_bound={diag.tail_bound:.3e}"
        )
        return trace
    system = build_discrete_modes(config.model, opts.modes_K)
    return amplitude_modes(system, config.grid).trace


def _resolve_backend(config: ExperimentConfig, override: Optional[str]) -> Backend:
    if override is None:
        return config.backend
    try:
        return Backend(override)
    except ValueError:
        raise ConfigError(
            f"backend must be one of {[b.value for b in Backend]}, got {override!r}"
        ) from None


def _cmd_amplitude(args, include_rates: bool) -> int:
    config = load_config(args.config)
    backend = _resolve_backend(config, args.backend)
    trace = _compute_trace(config, backend)
    rates = None
    if include_rates or config.outputs.include_rates:
        rates = extract_rates(trace)
    path = args.out or config.outputs.csv_path or (
        "rates.csv" if include_rates else "amplitude.csv"
    )
    write_csv(rows_from_trace(trace, rates), path)
    print(f"wrote {path} ({trace.grid.n_steps + 1} rows, backend {backend.value})")
    return EXIT_OK


def _cmd_crosscheck(args) -> int:
    config = load_config(args.config)
    names = [name.strip() for name in args.backends.split(",") if name.strip()]
    if len(names) < 2:
        raise ConfigError("crosscheck needs at least two backends")
    backends = [_resolve_backend(config, name) for name in names]
    traces = [(b, _compute_trace(config, b)) for b in backends]
    reference_backend, reference = traces[0]
    worst = 0.0
    for other_backend, other in traces[1:]:
        delta = float(np.max(np.abs(reference.values - other.values)))
        worst = max(worst, delta)
        print(
            f"crosscheck {reference_backend.value} vs {other_backend.value}: "
            f"max |delta a| = {delta:.6e}"
        )
    print(f"max |delta a| = {worst:.6e} (tol {args.tol:g})")
    if worst > args.tol:
        _error_line(
            HmarkError(
                f"backend disagreement {worst:.6e} exceeds tolerance {args.tol:g}"
            )
        )
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_witness(args) -> int:
    config = load_config(args.config)
    backend = _resolve_backend(config, args.backend)
    trace = _compute_trace(config, backend)
    report = semigroup_defect_report(trace, tol=args.tol)
    doc = {
        "backend": backend.value,
        "tolerance_used": report.tolerance_used,
        "horizon_estimate": report.horizon_estimate,
        "max_defect": report.max_defect,
        "n_pairs_recorded": int(report.pairs.shape[0]),
    }
    coupling = config.model.coupling
    if coupling.kind is not CouplingKind.FLAT:
        span = trace.grid.t_max
        if span >= 10.0 * coupling.period_T * (1.0 - 1e-9):
            bound = bound_state_check(config.model, trace)
            doc["bound_state"] = {
                "predicted": bound.predicted,
                "tail_min_abs2": bound.tail_min_abs2,
            }
    path = args.out or "witness.json"
    with open(path, "w", encoding="ascii") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")
    outputs = [path]
    if config.outputs.include_defect:
        defect_path = os.path.splitext(path)[0] + "_defects.csv"
        lines = ["t,s,defect"]
        for t, s, defect in report.pairs:
            lines.append(f"{t:.17g},{s:.17g},{defect:.17g}")
        with open(defect_path, "w", encoding="ascii", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
        outputs.append(defect_path)
    print(
        f"horizon = {report.horizon_estimate:.9g} (tol {report.tolerance_used:g}); "
        f"wrote {', '.join(outputs)}"
    )
    return EXIT_OK


def _cmd_figures(args) -> int:
    written = write_figure_outputs(args.which, args.out, render=not args.no_plot)
    n_csv, n_png = len(written["csv"]), len(written["png"])
    print(f"wrote {n_csv} CSV file(s) and {n_png} PNG file(s) to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    spec = config.model.coupling.spec
    print(f"valid: kind={spec.kind.value} gamma0={spec.gamma0:g}")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="hmark", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hmark {__version__}")
    sub = parser.add_subparsers(dest="command")
    for name in ("amplitude", "rates"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--backend", default=None)
        p.add_argument("--out", default=None)
    p = sub.add_parser("crosscheck")
    p.add_argument("--config", required=True)
    p.add_argument("--backends", required=True)
    p.add_argument("--tol", type=float, default=1e-5)
    p = sub.add_parser("witness")
    p.add_argument("--config", required=True)
    p.add_argument("--backend", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p = sub.add_parser("figures")
    p.add_argument("--which", required=True, choices=FIGURE_NAMES)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p = sub.add_parser("validate")
    p.add_argument("--config", required=True)
    return parser


def run(argv: Sequence[str]) -> int:
    """Entry point used by both the console script and tests."""
    _apply_thread_cap()
    argv = list(argv)
    if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
        exc = ConfigError(f"unknown subcommand {argv[0]!r}; expected one of {SUBCOMMANDS}")
        _error_line(exc)
        return EXIT_USAGE
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _error_line(exc)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage()
        return EXIT_USAGE
    try:
        if args.command == "amplitude":
            return _cmd_amplitude(args, include_rates=False)
        if args.command == "rates":
            return _cmd_amplitude(args, include_rates=True)
        if args.command == "crosscheck":
            return _cmd_crosscheck(args)
        if args.command == "witness":
            return _cmd_witness(args)
        if args.command == "figures":
            return _cmd_figures(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        _error_line(exc)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        _error_line(exc)
        return EXIT_NUMERICAL
    except HmarkError as exc:
        _error_line(exc)
        return EXIT_VALIDATION
    except OSError as exc:
        _error_line(exc)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run(sys.argv[1:]))
