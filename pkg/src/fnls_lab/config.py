"""Experiment configuration shared by the drivers and the command line."""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Invalid experiment configuration (command-line exit code 2)."""


INIT_KINDS = ("random_hs", "single_mode", "coefficients")


@dataclass
class SimConfig:
    alpha: float = 1.0
    s: float = 0.9
    N: float | None = None
    N_list: list[float] = field(default_factory=list)
    n_max: int = 32
    quad_order: int | None = None
    dt: float = 1e-4
    t_end: float = 1.0
    seed: int = 0
    init: str = "random_hs"
    init_mode: int = 1
    init_file: str | None = None
    amplitude: float = 1.0
    record_every: int = 100
    windows: int = 8
    epsilon: float = 1e-3
    b: float = 0.55
    nonlinear: str = "midpoint"
    output_dir: str = "."

    def __post_init__(self):
        if self.quad_order is None:
            self.quad_order = 4 * self.n_max
        self.validate()

    def validate(self):
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.t_end < 0:
            raise ConfigError("t_end must be nonnegative")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.quad_order < 4 * self.n_max:
            raise ConfigError("quad_order must be >= 4*n_max")
        if self.init not in INIT_KINDS:
            raise ConfigError(f"init must be one of {INIT_KINDS}")
        if self.init == "single_mode" and not 1 <= self.init_mode <= self.n_max:
            raise ConfigError("init_mode outside 1..n_max")
        if self.init == "coefficients" and not self.init_file:
            raise ConfigError("init=coefficients needs init_file")
        if self.record_every < 1 or self.windows < 1:
            raise ConfigError("record_every and windows must be >= 1")
        if self.nonlinear not in ("midpoint", "phase"):
            raise ConfigError("nonlinear must be 'midpoint' or 'phase'")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def dt_warning(self, z_max):
        limit = 0.5 / z_max ** (2 * self.alpha)
        if self.dt > limit:
            warnings.warn(
                f"dt={self.dt:g} exceeds 0.5/z_max^(2 alpha)={limit:.3g}; "
                "splitting error may dominate",
                stacklevel=2,
            )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict({k.replace("-", "_"): v for k, v in data.items()})


def make_rng(seed, stream=0):
    """Counter-based generator keyed by ``(seed, stream)``."""
    return np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, int(stream) % 2**64]))
