"""Experiment configuration: flat ``key = value`` files merged under CLI flags."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .core import DomainError, ScalingParams
from .strategies import Kind, StrategySpec

COMMANDS = ("simulate", "simulate-discrete", "analyze", "sweep", "capacity", "reproduce-paper")

KIND_ALIASES = {
    "greedy": Kind.STRAIGHT_LINE,
    "straight": Kind.STRAIGHT_LINE,
    "straight_line": Kind.STRAIGHT_LINE,
    "sector": Kind.SECTOR,
    "quadrant": Kind.QUADRANT_UNIFORM,
    "quadrant_uniform": Kind.QUADRANT_UNIFORM,
    "adversarial": Kind.QUADRANT_ADVERSARIAL,
    "quadrant_adversarial": Kind.QUADRANT_ADVERSARIAL,
    "fractional": Kind.FRACTIONAL,
    "disk": Kind.RANDOM_DISK,
    "random_disk": Kind.RANDOM_DISK,
}

# commands that build a ScalingParams and so need exactly one of K / M
NEEDS_RANGE = {"simulate", "simulate-discrete", "capacity"}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    command: str
    strategy: StrategySpec | None = None
    n: int | None = None
    K: float | None = None
    M: float | None = None
    d: float = 1.0
    trials: int = 150
    seed: int = 7
    delta: float = 0.5
    Delta: float = 0.5
    flows: int | None = None
    n_list: list[int] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    trajectory: str | None = None

    def scaling(self) -> ScalingParams:
        if self.M is not None:
            return ScalingParams.with_range(self.n, self.M, self.d)
        return ScalingParams(self.n, self.K, self.d)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "strategy": self.strategy.to_dict() if self.strategy else None,
            "n": self.n,
            "K": self.K,
            "M": self.M,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "delta": self.delta,
            "Delta": self.Delta,
            "flows": self.flows,
            "n_list": list(self.n_list),
            "out": self.out,
            "format": self.format,
            "trajectory": self.trajectory,
        }


def parse_angle(text, name: str = "angle") -> float:
    """Radians from ``"30deg"``, ``"-30deg"`` or a bare number (already radians)."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower()
    try:
        if s.endswith("deg"):
            return math.radians(float(s[:-3]))
        return float(s)
    except ValueError:
        raise ConfigError(name, f"not an angle: {text!r} (use radians or a 'deg' suffix)") from None


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` pairs; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _number(values, key, cast, check=None, expect=""):
    raw = values.get(key)
    if raw is None:
        return None
    try:
        v = cast(raw)
    except (TypeError, ValueError):
        raise ConfigError(key, f"not a valid {cast.__name__}: {raw!r}") from None
    if check is not None and not check(v):
        raise ConfigError(key, f"{expect}, got {v}")
    return v


def _kind(name, key):
    try:
        return KIND_ALIASES[str(name).strip().lower()]
    except KeyError:
        known = ", ".join(sorted(KIND_ALIASES))
        raise ConfigError(key, f"unknown strategy kind {name!r}; expected one of {known}") from None


def parse_strategy(values: dict) -> StrategySpec:
    kind = _kind(values.get("strategy", "sector"), "strategy")
    phi1 = parse_angle(values["phi1"], "phi1") if values.get("phi1") is not None else None
    phi2 = parse_angle(values["phi2"], "phi2") if values.get("phi2") is not None else None
    p = _number(values, "p", float, lambda v: 0.0 < v < 1.0, "p must lie in (0, 1)")

    def build(k):
        if k is Kind.SECTOR:
            lo = -math.pi / 6 if phi1 is None else phi1
            hi = math.pi / 6 if phi2 is None else phi2
            if not lo < hi:
                raise ConfigError("phi1", f"phi1 must be smaller than phi2, got {lo:.6g} >= {hi:.6g}")
            return StrategySpec.sector(lo, hi)
        return StrategySpec(k)

    try:
        if kind is Kind.FRACTIONAL:
            if p is None:
                raise ConfigError("p", "fractional strategy needs p in (0, 1)")
            inner = _kind(values.get("inner", "quadrant"), "inner")
            if inner is Kind.FRACTIONAL:
                raise ConfigError("inner", "inner strategy must not be fractional")
            return StrategySpec.fractional(p, build(inner))
        return build(kind)
    except DomainError as exc:
        raise ConfigError("strategy", str(exc)) from None


def parse_config(command: str, cli_values: dict | None = None, config_file=None) -> ExperimentConfig:
    """Merge a config file with CLI values (CLI wins) and validate.

    ``None`` CLI values count as not supplied. Errors name the offending
    field.
    """
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    values: dict = read_config_file(config_file) if config_file else {}
    for key, v in (cli_values or {}).items():
        if v is not None:
            values[key] = v

    cfg = ExperimentConfig(command)
    cfg.n = _number(values, "n", int, lambda v: v >= 2, "n must be >= 2")
    cfg.K = _number(values, "K", float, lambda v: v > 0, "K must be positive")
    cfg.M = _number(values, "M", float, lambda v: v > 0, "M must be positive")
    cfg.d = _number(values, "d", float, lambda v: v > 0, "d must be positive") or 1.0
    trials = _number(values, "trials", int, lambda v: v >= 1, "trials must be >= 1")
    cfg.trials = 150 if trials is None else trials
    seed = _number(values, "seed", int, lambda v: v >= 0, "seed must be non-negative")
    cfg.seed = 7 if seed is None else seed
    delta = _number(values, "delta", float, lambda v: 0.0 < v < 1.0, "delta must lie in (0, 1)")
    cfg.delta = 0.5 if delta is None else delta
    Delta = _number(values, "Delta", float, lambda v: v >= 0.0, "Delta must be non-negative")
    cfg.Delta = 0.5 if Delta is None else Delta
    cfg.flows = _number(values, "flows", int, lambda v: v >= 1, "flows must be >= 1")
    cfg.out = values.get("out")
    cfg.trajectory = values.get("trajectory")
    cfg.format = str(values.get("format", "json")).lower()
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format", f"expected json or csv, got {cfg.format!r}")

    if "n_list" in values:
        raw = values["n_list"]
        items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
        try:
            cfg.n_list = [int(str(x).strip()) for x in items if str(x).strip()]
        except ValueError:
            raise ConfigError("n_list", f"expected comma-separated integers, got {raw!r}") from None
        if len(cfg.n_list) < 1 or min(cfg.n_list) < 2 or sorted(cfg.n_list) != cfg.n_list:
            raise ConfigError("n_list", "must be ascending integers >= 2")

    if cfg.K is not None and cfg.M is not None:
        raise ConfigError("K", "supply exactly one of K or M, not both")
    if command in NEEDS_RANGE:
        if cfg.n is None:
            raise ConfigError("n", f"{command} needs n")
        if cfg.K is None and cfg.M is None:
            raise ConfigError("K", "supply exactly one of K or M")
    if command == "sweep":
        if not cfg.n_list:
            raise ConfigError("n_list", "sweep needs n_list")
        if cfg.M is not None:
            raise ConfigError("M", "sweep scales M with n; give K instead")
        if cfg.K is None:
            raise ConfigError("K", "sweep needs K")
    if command == "analyze" and cfg.n is not None and cfg.K is None and cfg.M is None:
        raise ConfigError("K", "predicted bounds need exactly one of K or M alongside n")

    if command != "reproduce-paper":
        cfg.strategy = parse_strategy(values)
    if command in NEEDS_RANGE or (command == "analyze" and cfg.n is not None):
        try:
            cfg.scaling()
        except DomainError as exc:
            raise ConfigError("M" if cfg.M is not None else "K", str(exc)) from None
    return cfg
