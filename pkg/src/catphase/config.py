"""Run configuration: one ``[run]`` section of ``key = value`` lines.

Values are parsed as JSON when possible (numbers, lists, true/false/null) and
kept as strings otherwise.  Grids may also be written as ``"lo:hi:n"``.
"""
from __future__ import annotations

import configparser
import json
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from .fock_stats import N_STABLE
from .phase_space import ProbeSpec

ENGINES = ("closed", "quadrature", "combinatorial")


@dataclass
class RunConfig:
    alpha: float = 2.0
    r: float = 0.56
    eta1: float = 1.0
    eta2: float = 0.975
    delta0: Optional[object] = 0.68  # float, or a list for photon-stats
    N: Optional[float] = None
    phi: Optional[float] = None

    engine: str = "combinatorial"
    dim: Optional[int] = None
    n_stable: int = N_STABLE
    n_max: int = 23
    dps: Optional[int] = None
    norm_tol: float = 1e-10
    quad_tol: float = 1e-8

    x_grid: object = "-4:4:161"
    p_grid: object = "-4:4:161"
    r_grid: object = "0:1.7:35"
    delta0_grid: object = "0:1.5:61"
    alpha_grid: object = "1.5:3:16"
    eta_grid: object = "0.95:1:11"
    eta_list: object = None
    minima_threshold: float = 0.5
    numeric: bool = False
    baseline: bool = True

    threads: Optional[int] = None
    out: str = "out"
    format: str = "csv"

    def validate(self):
        if self.engine not in ENGINES + ("all",):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.n_stable < 0 or self.n_max < 0:
            raise ValueError("n_stable and n_max must be >= 0")
        if self.dim is not None and self.dim < 8:
            raise ValueError("dim must be >= 8")
        for d in self.delta0_values():
            self.probe(d)
        for name in ("x_grid", "p_grid", "r_grid", "delta0_grid", "alpha_grid", "eta_grid"):
            g = self.grid(name)
            if len(g) > 1 and np.any(np.diff(g) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
        return self

    def engines(self):
        return list(ENGINES) if self.engine == "all" else [self.engine]

    def delta0_values(self):
        if isinstance(self.delta0, (list, tuple)):
            return [float(v) for v in self.delta0]
        return [None if self.delta0 is None else float(self.delta0)]

    def probe(self, delta0=None):
        return ProbeSpec(alpha=self.alpha, r=self.r, eta1=self.eta1, eta2=self.eta2,
                         delta0=delta0, N=self.N, phi=self.phi)

    def grid(self, name):
        return parse_grid(getattr(self, name))

    def to_dict(self):
        return asdict(self)


def parse_grid(value):
    if value is None:
        return np.array([])
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {value!r} is not 'lo:hi:n'")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        return np.linspace(lo, hi, n)
    if isinstance(value, (int, float)):
        return np.array([float(value)])
    return np.asarray(value, dtype=float)


def parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip()


_KNOWN = {f.name for f in fields(RunConfig)}


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    unknown = set(overrides) - _KNOWN
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


def load_config(path=None, overrides=None) -> RunConfig:
    """Read ``path`` (if given), then apply ``overrides``; flags win over the file."""
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        with open(path) as fh:
            parser.read_file(fh)
        extra = set(parser.sections()) - {"run"}
        if extra:
            raise ValueError(f"unknown config sections: {sorted(extra)}")
        if parser.has_section("run"):
            apply_overrides(cfg, {k: parse_value(v) for k, v in parser.items("run")})
    if overrides:
        apply_overrides(cfg, overrides)
    return cfg.validate()
