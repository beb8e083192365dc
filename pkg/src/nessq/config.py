"""Sectioned key-value run configuration.

Sections are ``[fluid]``, ``[schedule]``, ``[sweep]`` and ``[output]``. All
quantities are dimensionless, in units of ``omega_0`` (two qubits) or
``omega_i`` (qutrits). A sweep axis is written ``name, spacing, min, max,
count``, e.g. ``axis1 = epsilon_over_lambda, log, 1e-1, 1e4, 41``.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from nessq.cycle import ASYMPTOTIC, MODES, CycleSchedule
from nessq.model import TWO_QUBIT, FLUID_KINDS, QutritParams, TwoQubitParams, build

SCHEDULE_KEYS = ("epsilon", "epsilon_over_lambda", "tau", "delta", "mode")
SWEEPABLE_SCHEDULE = ("epsilon", "epsilon_over_lambda", "tau", "delta")
TARGETS = ("cycle", "ness")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


def _param_class(kind):
    return TwoQubitParams if kind == TWO_QUBIT else QutritParams


def fluid_parameter_names(kind: str) -> tuple:
    return tuple(f.name for f in dataclasses.fields(_param_class(kind)))


@dataclass(frozen=True)
class Axis:
    name: str
    spacing: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.spacing not in ("log", "linear"):
            raise ConfigError(f"axis {self.name}: spacing must be log or linear")
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be at least 2")
        if self.spacing == "log" and not (self.lo > 0.0 and self.hi > 0.0):
            raise ConfigError(f"axis {self.name}: log spacing needs positive bounds")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class RunConfig:
    """One fully specified evaluation point; plain data so it pickles cheaply."""

    kind: str
    fluid: dict
    schedule: dict
    step_scale: float = 1.0

    def params(self):
        try:
            return _param_class(self.kind)(**self.fluid)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def model(self):
        return build(self.kind, self.params())

    def epsilon(self) -> float:
        s = self.schedule
        if "epsilon" in s:
            return float(s["epsilon"])
        if "epsilon_over_lambda" in s:
            if self.kind != TWO_QUBIT:
                raise ConfigError("epsilon_over_lambda only applies to the two-qubit fluid")
            return float(s["epsilon_over_lambda"]) * self.params().lam
        raise ConfigError("schedule needs epsilon or epsilon_over_lambda")

    def cycle_schedule(self) -> CycleSchedule:
        s = self.schedule
        mode = s.get("mode", "finite_period")
        kwargs = {"epsilon": self.epsilon(), "mode": mode}
        if mode != ASYMPTOTIC:
            if "tau" not in s:
                raise ConfigError(f"schedule mode {mode} needs tau")
            kwargs["tau"] = float(s["tau"])
        if "delta" in s:
            kwargs["delta"] = float(s["delta"])
        return CycleSchedule(**kwargs)

    def with_values(self, values: dict) -> RunConfig:
        fluid, schedule = dict(self.fluid), dict(self.schedule)
        for name, v in values.items():
            if name in SWEEPABLE_SCHEDULE:
                if name in ("epsilon", "epsilon_over_lambda"):
                    schedule.pop("epsilon", None)
                    schedule.pop("epsilon_over_lambda", None)
                schedule[name] = float(v)
            else:
                fluid[name] = float(v)
        return dataclasses.replace(self, fluid=fluid, schedule=schedule)


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig
    axes: tuple
    target: str = "cycle"
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep has one or two axes")
        allowed = set(fluid_parameter_names(self.base.kind))
        if self.target == "cycle":
            allowed |= set(SWEEPABLE_SCHEDULE)
        for ax in self.axes:
            if ax.name not in allowed:
                raise ConfigError(f"cannot sweep {ax.name!r} for {self.base.kind} ({self.target})")
        if self.target not in TARGETS:
            raise ConfigError(f"sweep target must be one of {TARGETS}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")

    def points(self) -> list:
        """Grid points in row-major order of the axes."""
        grids = [ax.values() for ax in self.axes]
        if len(grids) == 1:
            return [{self.axes[0].name: v} for v in grids[0]]
        return [
            {self.axes[0].name: a, self.axes[1].name: b} for a in grids[0] for b in grids[1]
        ]


@dataclass
class LoadedConfig:
    run: RunConfig
    sweep: SweepSpec | None = None
    out: str | None = None
    fmt: str = "csv"
    trace: str | None = None
    extra: dict = field(default_factory=dict)


def _number(section, key, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from exc


def _axis(raw: str) -> Axis:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 5:
        raise ConfigError(f"axis must be 'name, spacing, min, max, count', got {raw!r}")
    name, spacing, lo, hi, count = parts
    try:
        return Axis(name, spacing, float(lo), float(hi), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad axis {raw!r}: {exc}") from exc


def parse_text(text: str, step_scale: float = 1.0) -> LoadedConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keep T_A, T_S case
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc
    if not cp.has_section("fluid"):
        raise ConfigError("missing [fluid] section")

    fluid = dict(cp["fluid"])
    kind = fluid.pop("kind", None)
    if kind not in FLUID_KINDS:
        raise ConfigError(f"[fluid] kind must be one of {FLUID_KINDS}, got {kind!r}")
    names = fluid_parameter_names(kind)
    for key in fluid:
        if key not in names:
            raise ConfigError(f"[fluid] unknown parameter {key!r} for {kind}")
    fluid = {k: _number("fluid", k, v) for k, v in fluid.items()}

    schedule = {}
    if cp.has_section("schedule"):
        for key, raw in cp["schedule"].items():
            if key not in SCHEDULE_KEYS:
                raise ConfigError(f"[schedule] unknown key {key!r}")
            schedule[key] = raw.strip() if key == "mode" else _number("schedule", key, raw)
        if schedule.get("mode", "finite_period") not in MODES:
            raise ConfigError(f"[schedule] mode must be one of {MODES}")

    out = cp.get("output", "path", fallback=None)
    fmt = cp.get("output", "format", fallback="csv").strip()
    trace = cp.get("output", "trace", fallback=None)
    if fmt not in FORMATS:
        raise ConfigError(f"[output] format must be one of {FORMATS}")

    run = RunConfig(kind, fluid, schedule, step_scale)
    run.params()  # surface parameter errors at load time

    sweep = None
    if cp.has_section("sweep"):
        sec = cp["sweep"]
        axes = tuple(_axis(sec[k]) for k in ("axis1", "axis2") if k in sec)
        unknown = set(sec) - {"axis1", "axis2", "target"}
        if unknown:
            raise ConfigError(f"[sweep] unknown keys {sorted(unknown)}")
        sweep = SweepSpec(run, axes, sec.get("target", "cycle").strip(), out, fmt)
    return LoadedConfig(run, sweep, out, fmt, trace)


def bundled_configs() -> list:
    root = resources.files("nessq") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def read_config_text(ref: str) -> str:
    """Text of a config given by path, or by the name of a bundled example."""
    path = Path(ref)
    if path.is_file():
        return path.read_text()
    name = ref[:-4] if ref.endswith(".ini") else ref
    res = resources.files("nessq") / "configs" / f"{name}.ini"
    if res.is_file():
        return res.read_text()
    raise ConfigError(f"no config file {ref!r} (bundled: {', '.join(bundled_configs())})")


def load(ref: str, step_scale: float = 1.0) -> LoadedConfig:
    return parse_text(read_config_text(ref), step_scale)
