"""Run configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .cycle import CycleParams
from .drive import DEFAULT_OMEGA_TAU, EXACT, PropagatorMethod
from .errors import ConfigError, EngineError
from .explore import SweepGrid
from .probe import MeasurementBasis

MODES = ("single", "sweep", "slice_alpha", "slice_phi", "verify")
FORMATS = ("csv", "json")

_TOP_KEYS = {"mode", "omega_tau", "beta_hw", "alpha", "phi", "grid", "method", "output"}
_NESTED_KEYS = {
    "grid": {"alpha_steps", "phi_steps"},
    "method": {"kind", "slices"},
    "output": {"path", "format"},
}


@dataclass(frozen=True)
class RunConfig:
    mode: str = "single"
    omega_tau: float = DEFAULT_OMEGA_TAU
    beta_hw: float = 1.0
    alpha: float | None = None
    phi: float | None = None
    grid: SweepGrid = field(default_factory=SweepGrid)
    method: PropagatorMethod = EXACT
    output_path: str | None = None
    #: None picks json for single mode and csv otherwise
    output_format: str | None = None

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}; got {self.mode!r}")
        if self.output_format is not None and self.output_format not in FORMATS:
            raise ConfigError(f"output format must be csv or json; got {self.output_format!r}")
        for name in ("omega_tau", "beta_hw"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive number; got {value!r}")
        if self.mode == "single" and (self.alpha is None or self.phi is None):
            raise ConfigError("single mode needs both alpha and phi")
        if self.alpha is not None and not 0.0 <= self.alpha <= math.pi:
            raise ConfigError(f"alpha must lie in [0, pi]; got {self.alpha!r}")
        if self.phi is not None and not math.isfinite(self.phi):
            raise ConfigError(f"phi must be finite; got {self.phi!r}")
        return self

    @property
    def resolved_format(self) -> str:
        if self.output_format is not None:
            return self.output_format
        return "json" if self.mode == "single" else "csv"

    def cycle_params(self) -> CycleParams:
        basis = MeasurementBasis(self.alpha or 0.0, self.phi or 0.0)
        return CycleParams(self.omega_tau, self.beta_hw, basis, self.method)


def _number(raw: dict, key: str):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number; got {value!r}")
    return float(value)


def _integer(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer; got {value!r}")
    return value


def config_from_dict(raw: dict, base: RunConfig | None = None) -> RunConfig:
    """Overlay a parsed JSON object on ``base``; unknown keys are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}")
    for section, allowed in _NESTED_KEYS.items():
        if section in raw:
            if not isinstance(raw[section], dict):
                raise ConfigError(f"{section} must be an object")
            extra = sorted(set(raw[section]) - allowed)
            if extra:
                raise ConfigError(f"unknown config key {section}.{extra[0]!r}")

    cfg = base or RunConfig()
    updates: dict = {}
    if "mode" in raw:
        updates["mode"] = raw["mode"]
    for key in ("omega_tau", "beta_hw", "alpha", "phi"):
        if key in raw:
            updates[key] = _number(raw, key)
    try:
        if "grid" in raw:
            g = raw["grid"]
            updates["grid"] = SweepGrid(
                _integer(g.get("alpha_steps", cfg.grid.alpha_steps), "grid.alpha_steps"),
                _integer(g.get("phi_steps", cfg.grid.phi_steps), "grid.phi_steps"),
            )
        if "method" in raw:
            m = raw["method"]
            kind = m.get("kind", "exact")
            slices = m.get("slices")
            if slices is not None:
                slices = _integer(slices, "method.slices")
            updates["method"] = PropagatorMethod(kind, slices if kind == "sliced" else None)
    except EngineError as exc:
        raise ConfigError(str(exc)) from exc
    if "output" in raw:
        o = raw["output"]
        if "path" in o:
            updates["output_path"] = o["path"]
        if "format" in o:
            updates["output_format"] = o["format"]
    return replace(cfg, **updates)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)
