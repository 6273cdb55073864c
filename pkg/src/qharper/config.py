"""Run configuration: flat key=value config files plus flag overrides.

Unknown keys are hard errors with a nearest-key suggestion; every range
violation names the offending key (and the line number when it came from a
file). Defaults reproduce the standard run shapes: 500 orbits, 500 section
points, 400 stats periods, 512 integrator steps per period, 5N Trotter steps.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass, field, fields

from .classical import ModelParams

TWO_PI = 2.0 * math.pi

EMIT_CHOICES = ("csv", "bin", "png")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    a: float
    epsilon: float
    mu: float
    mu_prime: float
    n_dim: int
    trotter_steps: int = 0          # 0 means the 5N default
    tau_s: float = 0.0
    n_orbits: int = 500
    n_points: int = 500
    n_periods: int = 400
    steps_per_period: int = 512
    seed: int = 1
    threshold: float = 0.18
    brody_beta: float = 0.3
    output_dir: str = "qharper-out"
    emit: tuple[str, ...] = ("csv", "png")
    n_list: tuple[int, ...] = (16, 32, 64, 128)

    @property
    def model(self) -> ModelParams:
        return ModelParams(self.a, self.epsilon, self.mu, self.mu_prime)

    def effective_trotter_steps(self) -> int:
        return self.trotter_steps if self.trotter_steps > 0 else 5 * self.n_dim

    def asdict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


_REQUIRED = ("a", "epsilon", "mu", "mu_prime", "n_dim")

_FLOAT_KEYS = {"a", "epsilon", "mu", "mu_prime", "tau_s", "threshold", "brody_beta"}
_INT_KEYS = {"n_dim", "trotter_steps", "n_orbits", "n_points", "n_periods",
             "steps_per_period", "seed"}
_STR_KEYS = {"output_dir"}
_LIST_KEYS = {"emit", "n_list"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _LIST_KEYS


def _convert(key: str, text: str, where: str):
    try:
        if key in _FLOAT_KEYS:
            return float(text)
        if key in _INT_KEYS:
            return int(text)
        if key == "emit":
            return tuple(p.strip() for p in text.split(",") if p.strip())
        if key == "n_list":
            return tuple(int(p) for p in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{where}: key '{key}' has non-numeric value {text!r}") from None
    return text


def _unknown_key(key: str, where: str) -> ConfigError:
    hint = difflib.get_close_matches(key, sorted(_ALL_KEYS), n=1)
    suggestion = f"; did you mean '{hint[0]}'?" if hint else ""
    return ConfigError(f"{where}: unknown key '{key}'{suggestion}")


def parse_config_text(text: str) -> dict:
    """Parse flat `key = value` lines; '#' starts a comment."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _ALL_KEYS:
            raise _unknown_key(key, where)
        if key in values:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        if not val:
            raise ConfigError(f"{where}: key '{key}' has an empty value")
        values[key] = _convert(key, val, where)
    return values


def build_config(file_values: dict, overrides: dict) -> RunConfig:
    """Merge config-file values with flag overrides (flags win), validate."""
    merged = dict(file_values)
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in _ALL_KEYS:
            raise _unknown_key(key, "flags")
        merged[key] = val
    missing = [k for k in _REQUIRED if k not in merged]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    cfg = RunConfig(**merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.n_dim < 2:
        raise ConfigError(f"key 'n_dim' must be >= 2, got {cfg.n_dim}")
    for key in ("n_orbits", "n_points", "n_periods", "steps_per_period"):
        if getattr(cfg, key) < 1:
            raise ConfigError(f"key '{key}' must be positive, got {getattr(cfg, key)}")
    if cfg.steps_per_period < 16:
        raise ConfigError(f"key 'steps_per_period' must be >= 16, got {cfg.steps_per_period}")
    if cfg.trotter_steps < 0:
        raise ConfigError(f"key 'trotter_steps' must be >= 0 (0 = 5N default)")
    if not 0.0 <= cfg.tau_s < TWO_PI:
        raise ConfigError(f"key 'tau_s' must lie in [0, 2*pi), got {cfg.tau_s}")
    if cfg.seed < 0:
        raise ConfigError(f"key 'seed' must be a nonnegative integer")
    if not 0.0 <= cfg.brody_beta <= 1.0:
        raise ConfigError(f"key 'brody_beta' must lie in [0, 1], got {cfg.brody_beta}")
    if cfg.threshold < 0.0:
        raise ConfigError(f"key 'threshold' must be >= 0, got {cfg.threshold}")
    bad = [e for e in cfg.emit if e not in EMIT_CHOICES]
    if bad:
        raise ConfigError(f"key 'emit' has unknown formats {bad}; choices: {EMIT_CHOICES}")
    if any(n < 2 for n in cfg.n_list):
        raise ConfigError("key 'n_list' entries must be >= 2")
