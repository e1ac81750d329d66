"""Experiment configuration: file format and resolution.

Configs are JSON or TOML mappings; command-line flags override file values,
and the environment variable ``COMMLAB_OUT_ROOT`` overrides only the root of
the output directory.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..netsim.psmt import ChannelMode


class ConfigError(ValueError):
    pass


_ALPHA_FORMS = {
    "ceil(sqrt(n))": lambda n: math.isqrt(n - 1) + 1,
    "sqrt": lambda n: math.isqrt(n - 1) + 1,
    "n/4": lambda n: n // 4,
    "n/2": lambda n: n // 2,
}


def resolve_alpha(expr, n: int) -> int:
    """Alpha is either an integer or one of a few named sublinear forms."""
    if isinstance(expr, int):
        return expr
    if isinstance(expr, str):
        text = expr.replace(" ", "")
        if text in _ALPHA_FORMS:
            return _ALPHA_FORMS[text](n)
        if re.fullmatch(r"\d+", text):
            return int(text)
    raise ConfigError(f"cannot resolve alpha expression {expr!r}")


@dataclass
class ExperimentConfig:
    experiment: str
    protocol: str
    n: int
    seeds: tuple[int, int]                  # half-open range [lo, hi)
    adversary: str = "passive"
    protocol_params: dict = field(default_factory=dict)
    adversary_params: dict = field(default_factory=dict)
    budget: int = 0
    beta: float | None = None
    kappa: int = 16
    alpha: object = "ceil(sqrt(n))"
    channel_mode: str = "secure"
    inputs: str = "indexed"                 # "indexed" | "random"
    artifacts: bool = True
    workers: int = 1
    out: str = "out"

    def __post_init__(self):
        if self.seeds[1] <= self.seeds[0]:
            raise ConfigError(f"empty seed range {self.seeds}")
        if self.n < 1:
            raise ConfigError(f"bad n={self.n}")
        if self.beta is not None and not self.budget:
            self.budget = int(self.beta * self.n)
        ChannelMode(self.channel_mode)  # validates

    @property
    def alpha_value(self) -> int:
        return resolve_alpha(self.alpha, self.n)

    def out_dir(self) -> Path:
        root = os.environ.get("COMMLAB_OUT_ROOT", self.out)
        return Path(root) / self.experiment

    @staticmethod
    def from_dict(data: dict, **overrides) -> "ExperimentConfig":
        merged = dict(data)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        seeds = merged.get("seeds")
        if isinstance(seeds, str):
            lo, _, hi = seeds.partition("..")
            merged["seeds"] = (int(lo), int(hi))
        elif isinstance(seeds, (list, tuple)):
            merged["seeds"] = (int(seeds[0]), int(seeds[1]))
        else:
            raise ConfigError("config needs a seed range, e.g. \"0..100\"")
        known = ExperimentConfig.__dataclass_fields__
        unknown = set(merged) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return ExperimentConfig(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".toml":
        try:
            import tomllib as toml_mod
        except ImportError:
            import tomli as toml_mod
        data = toml_mod.loads(text)
    else:
        data = json.loads(text)
    return ExperimentConfig.from_dict(data, **overrides)
