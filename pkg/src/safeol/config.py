"""Declarative experiment configuration (YAML on disk).

Schema, with defaults::

    horizon: 2000            # T >= 1
    delta: 0.05              # 0 < delta < 1
    seed: 0                  # master seed for sampling, noise and adversary
    variant: safe            # safe | long_term
    environment:
      preset: linear_ball    # linear_ball | glm_tanh | polytopic_m3 | finite_k10 | stuck_origin
      # preset overrides: d, b, f_star, F, K, n_functions, delta0, star,
      # safe_actions, table, noise_std, action_radius, constraint_seed,
      # loss: {kind: fixed | iid | switching, vector, mean, scale}
    oracle:
      lam: 1.0               # ridge / VAW regularization
      c_cal: 0.2             # radius calibration scale (calibrated at noise_std 0.1)
    learner:
      kind: auto             # auto | ogd | hedge | greedy
      pool: rays             # rays | lattice
      pool_size: null        # rays per round (default by dimension)
      lattice_resolution: 33 # points per axis, >= 2
    mapping: auto            # auto | scaling | identity | explore_exploit | saddle | exp3
    kappa: 1.0               # multiplier for the saddle mapping
    analysis:
      c_eluder: 4.0
    output:
      dir: runs/default
      trace: true
"""
from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field

import yaml

from .environments import PRESETS
from .errors import ConfigError

_DEFAULTS = {
    "oracle": {"lam": 1.0, "c_cal": 0.2},
    "learner": {"kind": "auto", "pool": "rays", "pool_size": None, "lattice_resolution": 33},
    "analysis": {"c_eluder": 4.0},
    "output": {"dir": "runs/default", "trace": True},
}


@dataclass
class ExperimentConfig:
    horizon: int = 2000
    delta: float = 0.05
    seed: int = 0
    variant: str = "safe"
    environment: dict = field(default_factory=lambda: {"preset": "linear_ball"})
    oracle: dict = field(default_factory=lambda: dict(_DEFAULTS["oracle"]))
    learner: dict = field(default_factory=lambda: dict(_DEFAULTS["learner"]))
    mapping: str = "auto"
    kappa: float = 1.0
    analysis: dict = field(default_factory=lambda: dict(_DEFAULTS["analysis"]))
    output: dict = field(default_factory=lambda: dict(_DEFAULTS["output"]))

    def __post_init__(self):
        for key, base in _DEFAULTS.items():
            merged = dict(base)
            merged.update(getattr(self, key) or {})
            unknown = set(merged) - set(base)
            if unknown:
                raise ConfigError(f"unknown keys in {key}: {sorted(unknown)}")
            setattr(self, key, merged)
        self.validate()

    @property
    def preset(self):
        return self.environment.get("preset", "linear_ball")

    @property
    def finite(self):
        return self.preset == "finite_k10"

    def validate(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError("horizon must be a positive integer")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if self.variant not in ("safe", "long_term"):
            raise ConfigError("variant must be 'safe' or 'long_term'")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {PRESETS}")
        if self.learner["lattice_resolution"] < 2:
            raise ConfigError("lattice_resolution must be at least 2 per axis")
        if self.learner["pool"] not in ("rays", "lattice"):
            raise ConfigError("learner.pool must be 'rays' or 'lattice'")
        if self.learner["kind"] not in ("auto", "ogd", "hedge", "greedy"):
            raise ConfigError("learner.kind must be auto, ogd, hedge or greedy")
        maps = ("auto", "scaling", "identity", "explore_exploit", "saddle", "exp3")
        if self.mapping not in maps:
            raise ConfigError(f"mapping must be one of {maps}")
        if self.finite and self.mapping == "scaling":
            raise ConfigError("the scaling mapping needs a continuous action space")
        if not self.finite and self.mapping in ("explore_exploit", "saddle", "exp3"):
            raise ConfigError(f"mapping {self.mapping!r} needs a finite action space")
        if self.oracle["c_cal"] <= 0 or self.oracle["lam"] <= 0:
            raise ConfigError("oracle.c_cal and oracle.lam must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def replace(self, **changes):
        d = copy.deepcopy(asdict(self))
        for k, v in changes.items():
            if isinstance(v, dict) and isinstance(d.get(k), dict):
                d[k].update(v)
            else:
                d[k] = v
        return ExperimentConfig(**d)

    def to_dict(self):
        return copy.deepcopy(asdict(self))

    @classmethod
    def from_dict(cls, data):
        data = dict(data or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config file must hold a mapping at the top level")
    return ExperimentConfig.from_dict(data)


def dump_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)
