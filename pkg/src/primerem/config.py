"""Run configuration: flags > environment > config file > defaults."""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .checkpoints import CACHE_ENV, CheckpointCache
from .errors import ConfigError
from .integrals import RemainderIntegrals
from .nsolve import NSolver
from .primes import DEFAULT_MAX_X, DEFAULT_SEGMENT_SIZE, PrimeEngine

__all__ = ["ENV_VARS", "FORMATS", "RunConfig", "load_config"]

FORMATS = ("table", "csv", "json")
ENV_VARS = {
    "cache_path": CACHE_ENV,
    "threads": "PRIMEREM_THREADS",
    "y_cap": "PRIMEREM_Y_CAP",
}
CONFIG_ENV = "PRIMEREM_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    y_cap: int = 10**8
    delta_max: float = 0.5
    a_von_koch_c: float = 1.0
    quad_rel_tol: float = 1e-9
    solve_rel_tol: float = 1e-3
    cache_path: str | None = None
    output_format: str = "table"
    threads: int = 1
    max_x: int = DEFAULT_MAX_X
    table_limit: int = DEFAULT_SEGMENT_SIZE

    def __post_init__(self) -> None:
        if not 2 <= self.max_x <= DEFAULT_MAX_X:
            raise ConfigError(f"max_x must lie in [2, {DEFAULT_MAX_X}]")
        if not 2 <= self.y_cap <= self.max_x:
            raise ConfigError(f"y_cap must lie in [2, max_x={self.max_x}]")
        if not 0 < self.delta_max < 1:
            raise ConfigError("delta_max must lie in (0, 1)")
        for name in ("a_von_koch_c", "quad_rel_tol", "solve_rel_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output_format must be one of {FORMATS}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def build_engine(self) -> PrimeEngine:
        cache = CheckpointCache(self.cache_path, max_x=self.max_x) if self.cache_path else None
        return PrimeEngine(max_x=self.max_x, table_limit=self.table_limit,
                           threads=self.threads, cache=cache)

    def build_integrals(self, engine: PrimeEngine | None = None) -> RemainderIntegrals:
        return RemainderIntegrals(engine or self.build_engine(), quad_rel_tol=self.quad_rel_tol,
                                  delta_max=self.delta_max)

    def build_solver(self, integrals: RemainderIntegrals | None = None) -> NSolver:
        return NSolver(integrals or self.build_integrals(), y_cap=self.y_cap,
                       rel_tol=self.solve_rel_tol)


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, value):
    default = getattr(RunConfig, name, None)
    try:
        if name == "cache_path":
            return None if value in (None, "") else str(value)
        if name == "output_format":
            return str(value)
        if isinstance(default, int) and not isinstance(default, bool):
            fv = float(value)
            if fv != int(fv):
                raise ValueError(value)
            return int(fv)
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def load_config(flags: Mapping | None = None, env: Mapping | None = None,
                config_file: str | os.PathLike | None = None) -> RunConfig:
    """Merge configuration sources; ``None`` flag values are ignored."""
    env = os.environ if env is None else env
    values: dict = {}
    path = config_file or env.get(CONFIG_ENV)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - set(_FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for name, var in ENV_VARS.items():
        if env.get(var):
            values[name] = env[var]
    for name, value in (flags or {}).items():
        if value is not None:
            if name not in _FIELDS:
                raise ConfigError(f"unknown config key {name}")
            values[name] = value
    return RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
