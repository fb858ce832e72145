"""Run configuration: one block of defaults, overridable from JSON and flags."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

__all__ = ["RunConfig", "ConfigError", "CACHE_ENV", "default_cache_dir"]

CACHE_ENV = "SPHERICAL_HECKE_CACHE"


class ConfigError(ValueError):
    pass


def default_cache_dir() -> str:
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return str(Path.home() / ".cache" / "spherical_hecke")


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass
class RunConfig:
    n: int = 2
    p: int = 2
    resolution: int = 2048
    min_resolution: int = 8
    quadrature_tol: float = 1e-6
    positivity_slack: float = 1e-8
    height_budget: int = 4
    L: int = 3
    L_max: int = 8
    epsilon: float = 0.5
    q1_window: float = 4.0
    ratio_low: float = 0.1
    ratio_high: float = 10.0
    cache_dir: str = field(default_factory=default_cache_dir)
    output: str = "json"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            (2 <= self.n <= 6, "n must lie in [2, 6]"),
            (_is_prime(self.p), "p must be prime"),
            (self.min_resolution >= 2, "min_resolution must be at least 2"),
            (self.resolution >= self.min_resolution, "resolution below min_resolution"),
            (0 < self.quadrature_tol < 1, "quadrature_tol must lie in (0, 1)"),
            (0 <= self.positivity_slack < 1, "positivity_slack must lie in [0, 1)"),
            (1 <= self.height_budget <= 12, "height_budget must lie in [1, 12]"),
            (1 <= self.L <= self.L_max, "need 1 <= L <= L_max"),
            (self.L_max <= 64, "L_max must be at most 64"),
            (0 < self.epsilon < 1, "epsilon must lie in (0, 1)"),
            (self.q1_window > 1, "q1_window must exceed 1"),
            (0 < self.ratio_low <= self.ratio_high, "need 0 < ratio_low <= ratio_high"),
            (self.output in ("json", "csv"), "output must be json or csv"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        merged = dataclasses.asdict(base) if base is not None else {}
        merged.update(data)
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | os.PathLike, base: "RunConfig | None" = None) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_mapping(data, base)

    def replace(self, **changes) -> "RunConfig":
        return self.from_mapping(changes, base=self)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)
