"""Run configuration files (TOML) and their validation.

Schema::

    seed = 7                     # required by randomized commands (or --seed)

    [integrand]                  # integrate
    family = "step"              # step | constant | derivative_pathological | scaled | sum
    breakpoints = [0.5]          # step: interior breakpoints
    values = [[1.0, 0.0], [0.0, 2.0]]   # step: one vector per piece
    # constant: value = [1.0, 0.0]
    # scaled:   weight = {breakpoints = [...], values = [...], bound = 1.0}
    #           inner = { ...another integrand table... }
    # sum:      terms = [{...}, {...}]

    [integral]
    kind = "mcshane"             # mcshane | henstock | birkhoff
    mode = "set"                 # set | vector
    tol = 1e-6
    min_iterations = 3
    max_intervals = 6000000
    retag = "none"               # none | adversarial_positive

    [gauge]                      # schedule; family "default" picks the per-kind default
    family = "constant"          # default | constant | step | power_floor
    levels = 40
    start = 1                    # first level k
    # step:        breakpoints = [...], values = [...]  (scaled by 2^-k)
    # power_floor: c = 0.1, p = 3.0, floor = 0.1      (c and floor scaled by 2^-k)

    [grid]
    directions = 720             # ignored for d = 1

    [partition]                  # partition command: a single gauge
    perron = true
    max_depth = 60
    gauge = {family = "constant", c = 0.3}

    [demo]                       # demo command; keys are passed to the demo
    trials = 100
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .functions import (
    DerivativePathological,
    DeterminedMF,
    ScalarWeight,
    StepVectorFunction,
    SumFunction,
    determined,
    scale_by_bounded,
)
from .partitions import ConstantGauge, Gauge, PowerFloorGauge, StepGauge


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


KINDS = ("mcshane", "henstock", "birkhoff")
MODES = ("set", "vector")
RETAGS = ("none", "adversarial_positive")


@dataclass
class RunConfig:
    command: str
    integrand: dict[str, Any] = field(default_factory=dict)
    kind: str = "mcshane"
    mode: str = "vector"
    tol: float = 1e-6
    min_iterations: int = 3
    max_intervals: int = 6_000_000
    retag: str = "none"
    gauge: dict[str, Any] = field(default_factory=lambda: {"family": "default"})
    grid_directions: int | None = None
    seed: int | None = None
    partition: dict[str, Any] = field(default_factory=dict)
    demo: dict[str, Any] = field(default_factory=dict)
    source: str = "<defaults>"


def load_toml(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(p), f"cannot read config ({exc.strerror})") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(p), f"parse error: {exc}") from exc


def _get(table: dict, key: str, where: str, kind, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"{where}.{key}", "missing required field")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ConfigError(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}")
    return value


def _choice(table: dict, key: str, where: str, choices, default: str) -> str:
    value = _get(table, key, where, str, default)
    if value not in choices:
        raise ConfigError(f"{where}.{key}", f"must be one of {', '.join(choices)}; got {value!r}")
    return value


def parse_config(raw: dict[str, Any], command: str, source: str = "<config>") -> RunConfig:
    known = {"seed", "command", "integrand", "integral", "gauge", "grid", "partition", "demo"}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown top-level key")
    cfg = RunConfig(command=command, source=source)
    cfg.seed = _get(raw, "seed", "<root>", int)
    if "integrand" in raw:
        cfg.integrand = _get(raw, "integrand", "<root>", dict)
    integral = _get(raw, "integral", "<root>", dict, {})
    cfg.kind = _choice(integral, "kind", "integral", KINDS, "mcshane")
    cfg.mode = _choice(integral, "mode", "integral", MODES, "vector")
    cfg.tol = _get(integral, "tol", "integral", float, 1e-6)
    if not cfg.tol > 0:
        raise ConfigError("integral.tol", "must be positive")
    cfg.min_iterations = _get(integral, "min_iterations", "integral", int, 3)
    cfg.max_intervals = _get(integral, "max_intervals", "integral", int, 6_000_000)
    cfg.retag = _choice(integral, "retag", "integral", RETAGS, "none")
    cfg.gauge = _get(raw, "gauge", "<root>", dict, {"family": "default"})
    grid = _get(raw, "grid", "<root>", dict, {})
    cfg.grid_directions = _get(grid, "directions", "grid", int)
    cfg.partition = _get(raw, "partition", "<root>", dict, {})
    cfg.demo = _get(raw, "demo", "<root>", dict, {})
    if command == "integrate":
        if not cfg.integrand:
            raise ConfigError("integrand", "missing required table")
        build_integrand(cfg.integrand)
        build_schedule(cfg.gauge, cfg.kind, "gauge")
    if command == "partition":
        build_gauge(_get(cfg.partition, "gauge", "partition", dict, required=True), "partition.gauge")
    return cfg


# ---------------------------------------------------------------- builders

def _float_list(table, key, where, required=True):
    value = _get(table, key, where, list, required=required)
    if value is None:
        return None
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}", "expected a list of numbers") from None


def _vector_list(table, key, where):
    value = _get(table, key, where, list, required=True)
    out = []
    for i, v in enumerate(value):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append([float(v)])
        elif isinstance(v, list):
            try:
                out.append([float(x) for x in v])
            except (TypeError, ValueError):
                raise ConfigError(f"{where}.{key}[{i}]", "expected numbers") from None
        else:
            raise ConfigError(f"{where}.{key}[{i}]", "expected a number or a list of numbers")
    return out


def build_integrand(table: dict[str, Any], where: str = "integrand"):
    family = _get(table, "family", where, str, required=True)
    try:
        if family == "step":
            return StepVectorFunction(_float_list(table, "breakpoints", where, required=False) or [],
                                      _vector_list(table, "values", where))
        if family == "constant":
            return StepVectorFunction.constant(_float_list(table, "value", where))
        if family == "derivative_pathological":
            return DerivativePathological()
        if family == "scaled":
            w = _get(table, "weight", where, dict, required=True)
            alpha = ScalarWeight.bounded(
                _float_list(w, "breakpoints", f"{where}.weight", required=False) or [],
                _float_list(w, "values", f"{where}.weight"),
                _get(w, "bound", f"{where}.weight", float, 1.0),
            )
            inner = build_integrand(_get(table, "inner", where, dict, required=True), f"{where}.inner")
            return scale_by_bounded(alpha, inner)
        if family == "sum":
            terms = _get(table, "terms", where, list, required=True)
            return SumFunction(tuple(build_integrand(t, f"{where}.terms[{i}]") for i, t in enumerate(terms)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from exc
    raise ConfigError(f"{where}.family", f"unknown integrand family {family!r}")


def build_gauge(table: dict[str, Any], where: str) -> Gauge:
    family = _get(table, "family", where, str, required=True)
    try:
        if family == "constant":
            return ConstantGauge(_get(table, "c", where, float, required=True))
        if family == "step":
            return StepGauge(_float_list(table, "breakpoints", where, required=False) or [],
                             _float_list(table, "values", where))
        if family == "power_floor":
            return PowerFloorGauge(_get(table, "c", where, float, required=True),
                                   _get(table, "p", where, float, required=True),
                                   _get(table, "floor", where, float, required=True))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from exc
    raise ConfigError(f"{where}.family", f"unknown gauge family {family!r}")


def build_schedule(table: dict[str, Any], kind: str, where: str = "gauge") -> list[Gauge] | None:
    """Gauge schedule level k = start .. start + levels - 1; None means the kind's default."""
    family = _get(table, "family", where, str, "default")
    if family == "default":
        return None
    levels = _get(table, "levels", where, int, 40)
    start = _get(table, "start", where, int, 1)
    if levels < 1:
        raise ConfigError(f"{where}.levels", "must be at least 1")
    scales = [2.0 ** -k for k in range(start, start + levels)]
    if family == "constant":
        c = _get(table, "c", where, float, 1.0)
        out = [ConstantGauge(c * s) for s in scales]
    elif family == "step":
        base = build_gauge({**table, "family": "step"}, where)
        out = [base.scaled(s) for s in scales]
    elif family == "power_floor":
        base = build_gauge({**table, "family": "power_floor"}, where)
        out = [base.scaled(s) for s in scales]
    else:
        raise ConfigError(f"{where}.family", f"unknown schedule family {family!r}")
    if kind == "birkhoff" and family == "power_floor":
        raise ConfigError(f"{where}.family", "Birkhoff integration needs measurable step gauges")
    return out


def target_of(cfg: RunConfig):
    g = build_integrand(cfg.integrand)
    return determined(g) if cfg.mode == "set" else g


def base_function(target):
    return target.g if isinstance(target, DeterminedMF) else target
