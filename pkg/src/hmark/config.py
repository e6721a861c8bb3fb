"""Experiment configuration: JSON schema, parsing and serialization.

Schema (JSON object; unknown keys anywhere are rejected)::

    {
      "model": {
        "coupling": {
          "kind": "flat" | "sinusoidal" | "exp_comb" | "custom",
          "gamma0": <float > 0>,
          "period_T": <float > 0>,          # absent/ignored for flat
          "alpha": <float, |alpha| <= 1>,   # sinusoidal only
          "beta": <float >= 0>,             # exp_comb only
          "coeffs": [<float>, ...]          # custom only
        },
        "eps0": <float>
      },
      "grid": {"dt": <float > 0>, "t_max": <float >= dt>},
      "backend": "series" | "volterra" | "laplace" | "modes",   # default series
      "backend_options": {                  # all optional
        "contour_height": <float>, "omega_cutoff": <float>,
        "n_quad": <int>, "modes_K": <int>
      },
      "outputs": {                          # all optional
        "csv_path": <string>,
        "include_rates": <bool>, "include_defect": <bool>
      }
    }

Parsing validates the coupling through :func:`hmark.coupling.validate_coupling`
so a config never carries an invalid model.  ``serialize_config`` emits a
canonical JSON text whose re-parse yields an equal configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .amplitude import Backend, TimeGrid
from .coupling import (
    CouplingKind,
    CouplingSpec,
    ModelParams,
    validate_coupling,
)
from .errors import ConfigError

__all__ = [
    "BackendOptions",
    "OutputOptions",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "serialize_config",
]

DEFAULT_MODES_K = 2000


@dataclass(frozen=True)
class BackendOptions:
    contour_height: Optional[float] = None
    omega_cutoff: Optional[float] = None
    n_quad: Optional[int] = None
    modes_K: int = DEFAULT_MODES_K


@dataclass(frozen=True)
class OutputOptions:
    csv_path: Optional[str] = None
    include_rates: bool = False
    include_defect: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    grid: TimeGrid
    backend: Backend = Backend.SERIES
    backend_options: BackendOptions = field(default_factory=BackendOptions)
    outputs: OutputOptions = field(default_factory=OutputOptions)


def _require_mapping(obj: Any, where: str) -> Dict[str, Any]:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object, got {type(obj).__name__}")
    return obj


def _reject_unknown(mapping: Dict[str, Any], allowed, where: str) -> None:
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _number(mapping: Dict[str, Any], key: str, where: str) -> float:
    value = mapping.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key} must be finite, got {value!r}")
    return float(value)


def _coupling_from_dict(obj: Dict[str, Any]) -> CouplingSpec:
    _require_mapping(obj, "model.coupling")
    _reject_unknown(
        obj, {"kind", "gamma0", "period_T", "alpha", "beta", "coeffs"},
        "model.coupling",
    )
    kind_name = obj.get("kind")
    try:
        kind = CouplingKind(kind_name)
    except ValueError:
        raise ConfigError(
            f"model.coupling.kind must be one of "
            f"{[k.value for k in CouplingKind]}, got {kind_name!r}"
        ) from None
    gamma0 = _number(obj, "gamma0", "model.coupling")
    period = None
    if kind is not CouplingKind.FLAT:
        period = _number(obj, "period_T", "model.coupling")
    alpha = beta = None
    coeffs = None
    if kind is CouplingKind.SINUSOIDAL:
        alpha = _number(obj, "alpha", "model.coupling")
    elif kind is CouplingKind.EXP_COMB:
        beta = _number(obj, "beta", "model.coupling")
    elif kind is CouplingKind.CUSTOM_FOURIER:
        raw = obj.get("coeffs")
        if not isinstance(raw, list) or not raw:
            raise ConfigError("model.coupling.coeffs must be a nonempty list")
        if any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in raw):
            raise ConfigError("model.coupling.coeffs entries must be numbers")
        coeffs = tuple(float(c) for c in raw)
    return CouplingSpec(kind, gamma0, period, alpha=alpha, beta=beta, coeffs=coeffs)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON configuration text.

    Raises:
        ConfigError: malformed JSON, unknown/missing keys, wrong types, or a
            model/grid that fails validation.
    """
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    _require_mapping(root, "config")
    _reject_unknown(
        root, {"model", "grid", "backend", "backend_options", "outputs"}, "config"
    )

    model_obj = _require_mapping(root.get("model"), "model")
    _reject_unknown(model_obj, {"coupling", "eps0"}, "model")
    spec = _coupling_from_dict(_require_mapping(model_obj.get("coupling"),
                                                "model.coupling"))
    eps0 = _number(model_obj, "eps0", "model")

    grid_obj = _require_mapping(root.get("grid"), "grid")
    _reject_unknown(grid_obj, {"dt", "t_max"}, "grid")
    dt = _number(grid_obj, "dt", "grid")
    t_max = _number(grid_obj, "t_max", "grid")
    if dt <= 0 or t_max <= 0 or dt > t_max:
        raise ConfigError(f"grid requires 0 < dt <= t_max, got dt={dt}, t_max={t_max}")

    backend_name = root.get("backend", Backend.SERIES.value)
    try:
        backend = Backend(backend_name)
    except ValueError:
        raise ConfigError(
            f"backend must be one of {[b.value for b in Backend]}, "
            f"got {backend_name!r}"
        ) from None

    opts_obj = _require_mapping(root.get("backend_options", {}), "backend_options")
    _reject_unknown(
        opts_obj, {"contour_height", "omega_cutoff", "n_quad", "modes_K"},
        "backend_options",
    )
    contour = opts_obj.get("contour_height")
    cutoff = opts_obj.get("omega_cutoff")
    n_quad = opts_obj.get("n_quad")
    modes_k = opts_obj.get("modes_K", DEFAULT_MODES_K)
    for name, value in (("contour_height", contour), ("omega_cutoff", cutoff)):
        if value is not None and (
            isinstance(value, bool) or not isinstance(value, (int, float))
        ):
            raise ConfigError(f"backend_options.{name} must be a number")
    for name, value in (("n_quad", n_quad), ("modes_K", modes_k)):
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            raise ConfigError(f"backend_options.{name} must be an integer")

    out_obj = _require_mapping(root.get("outputs", {}), "outputs")
    _reject_unknown(out_obj, {"csv_path", "include_rates", "include_defect"}, "outputs")
    csv_path = out_obj.get("csv_path")
    if csv_path is not None and not isinstance(csv_path, str):
        raise ConfigError("outputs.csv_path must be a string")
    include_rates = out_obj.get("include_rates", False)
    include_defect = out_obj.get("include_defect", False)
    if not isinstance(include_rates, bool) or not isinstance(include_defect, bool):
        raise ConfigError("outputs.include_* flags must be booleans")

    # model validation errors propagate with their own taxonomy (the CLI
    # maps them to exit 1, distinct from config-parse failures)
    coupling = validate_coupling(spec)
    model = ModelParams(coupling, eps0)
    grid = TimeGrid.from_span(dt, t_max)

    return ExperimentConfig(
        model=model,
        grid=grid,
        backend=backend,
        backend_options=BackendOptions(
            contour_height=None if contour is None else float(contour),
            omega_cutoff=None if cutoff is None else float(cutoff),
            n_quad=n_quad,
            modes_K=int(modes_k),
        ),
        outputs=OutputOptions(
            csv_path=csv_path,
            include_rates=include_rates,
            include_defect=include_defect,
        ),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical JSON text; parse(serialize(parse(text))) == parse(text)."""
    spec = config.model.coupling.spec
    coupling: Dict[str, Any] = {"kind": spec.kind.value, "gamma0": spec.gamma0}
    if spec.kind is not CouplingKind.FLAT:
        coupling["period_T"] = spec.period_T
    if spec.kind is CouplingKind.SINUSOIDAL:
        coupling["alpha"] = spec.alpha
    elif spec.kind is CouplingKind.EXP_COMB:
        coupling["beta"] = spec.beta
    elif spec.kind is CouplingKind.CUSTOM_FOURIER:
        coupling["coeffs"] = list(spec.coeffs)
    opts: Dict[str, Any] = {}
    if config.backend_options.contour_height is not None:
        opts["contour_height"] = config.backend_options.contour_height
    if config.backend_options.omega_cutoff is not None:
        opts["omega_cutoff"] = config.backend_options.omega_cutoff
    if config.backend_options.n_quad is not None:
        opts["n_quad"] = config.backend_options.n_quad
    opts["modes_K"] = config.backend_options.modes_K
    outputs: Dict[str, Any] = {
        "include_rates": config.outputs.include_rates,
        "include_defect": config.outputs.include_defect,
    }
    if config.outputs.csv_path is not None:
        outputs["csv_path"] = config.outputs.csv_path
    doc = {
        "model": {"coupling": coupling, "eps0": config.model.eps0},
        "grid": {"dt": config.grid.dt, "t_max": config.grid.t_max},
        "backend": config.backend.value,
        "backend_options": opts,
        "outputs": outputs,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
