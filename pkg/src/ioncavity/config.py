"""Plain-text key=value run configuration with strict validation."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class RunConfig:
    """Scan configuration.  Defaults match the transition-study regime
    (C=2, c=1, x_eq=5, kappa/omega in {0.5, 0.75, 1.0} as representative
    choices; the default scan uses kappa=omega)."""

    C: float = 2.0
    c: float = 1.0
    kappa_list: tuple[float, ...] = (1.0,)
    x_eq: float = 5.0

    eta_min: float = 0.5
    eta_max: float = 6.0
    eta_count: int = 23
    eta_spacing: str = "linear"  # linear | quadratic

    N_cav: int = 12
    N_mot: int = 15
    dt: float = 1e-4
    t_map: float = 0.05
    integrator: str = "euler"  # euler | rk4
    arnoldi_n_eigs: int = 6
    arnoldi_k: int = 16
    arnoldi_tol: float = 1e-8
    arnoldi_max_restarts: int = 400

    husimi_resolution: int = 201
    husimi_min_halfwidth: float = 4.0

    output_dir: str = "results"
    husimi_dump: bool = False
    projection: bool = True
    gap: bool = True
    non_gaussianity: bool = True
    warm_start: bool = True

    def eta_grid(self) -> np.ndarray:
        if self.eta_count == 1:
            return np.array([self.eta_min])
        if self.eta_spacing == "linear":
            return np.linspace(self.eta_min, self.eta_max, self.eta_count)
        # quadratic: linear in gamma ~ eta^2
        return np.sqrt(np.linspace(self.eta_min**2, self.eta_max**2, self.eta_count))

    def validate(self) -> list[str]:
        errs = []
        if self.C <= 0:
            errs.append("C must be positive")
        if self.x_eq <= 0:
            errs.append("x_eq must be positive")
        if not self.kappa_list or any(k <= 0 for k in self.kappa_list):
            errs.append("kappa_list entries must be positive")
        if self.eta_min < 0:
            errs.append("eta_min must be non-negative")
        if self.eta_count < 1:
            errs.append("grid error: eta_count must be >= 1")
        if self.eta_count > 1 and self.eta_max < self.eta_min:
            errs.append("grid error: eta_max < eta_min")
        if self.eta_spacing not in ("linear", "quadratic"):
            errs.append("eta_spacing must be linear or quadratic")
        if self.N_cav < 1 or self.N_mot < 2:
            errs.append("cutoffs too small (need N_cav >= 1, N_mot >= 2)")
        if self.dt <= 0 or self.t_map < self.dt:
            errs.append("need dt > 0 and t_map >= dt")
        if self.integrator not in ("euler", "rk4"):
            errs.append("integrator must be euler or rk4")
        if self.arnoldi_tol <= 0:
            errs.append("arnoldi_tol must be positive")
        if self.arnoldi_n_eigs < 1 or self.arnoldi_max_restarts < 1:
            errs.append("arnoldi_n_eigs and arnoldi_max_restarts must be >= 1")
        if self.husimi_resolution < 21:
            errs.append("husimi_resolution must be >= 21")
        if self.husimi_min_halfwidth <= 0:
            errs.append("husimi_min_halfwidth must be positive")
        return errs

    def resolved_text(self) -> str:
        """Canonical echo: every field, declaration order, full precision."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(_fmt(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = _fmt(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_BOOL_FIELDS = {"husimi_dump", "projection", "gap", "non_gaussianity", "warm_start"}
_INT_FIELDS = {"eta_count", "N_cav", "N_mot", "arnoldi_n_eigs", "arnoldi_k",
               "arnoldi_max_restarts", "husimi_resolution"}
_STR_FIELDS = {"eta_spacing", "output_dir", "integrator"}


def parse_config(text: str) -> RunConfig:
    """Parse key=value text (UTF-8, '#' comments); unknown keys are rejected."""
    values: dict = {}
    errors: list[str] = []
    known = {f.name for f in fields(RunConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key=value, got {raw.strip()!r}")
            continue
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if errors:
        raise ConfigError(errors)
    cfg = RunConfig(**values)
    errs = cfg.validate()
    if errs:
        raise ConfigError(errs)
    return cfg


def _convert(key: str, val: str):
    if key == "kappa_list":
        try:
            return tuple(float(x) for x in val.split(","))
        except ValueError:
            raise ValueError(f"invalid kappa_list {val!r}")
    if key in _BOOL_FIELDS:
        low = val.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError(f"invalid boolean {val!r} for {key}")
    if key in _INT_FIELDS:
        try:
            return int(val)
        except ValueError:
            raise ValueError(f"invalid integer {val!r} for {key}")
    if key in _STR_FIELDS:
        return val
    try:
        return float(val)
    except ValueError:
        raise ValueError(f"invalid number {val!r} for {key}")


def validate_config(path: str | Path) -> RunConfig:
    """Load and validate a config file; raises ConfigError with per-line messages."""
    p = Path(path)
    if not p.exists():
        raise ConfigError([f"config file not found: {p}"])
    return parse_config(p.read_text(encoding="utf-8"))
