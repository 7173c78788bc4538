"""Single-shot maximum-likelihood discrimination and the squeezed-vacuum baseline."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .fock_stats import PhotonDistribution
from .special_fn import erfc

N0 = "N0"
NDELTA = "Ndelta"
TIE_TOL = 1e-15


@dataclass(frozen=True)
class DecisionRule:
    """``in_delta[n]`` is True when count ``n`` is attributed to the displaced hypothesis."""

    in_delta: np.ndarray
    tie_count: int

    @property
    def n_max(self):
        return len(self.in_delta) - 1

    def region(self, n):
        return NDELTA if self.in_delta[n] else N0

    def rows(self):
        return [(n, self.region(n)) for n in range(self.n_max + 1)]


@dataclass(frozen=True)
class ErrorReport:
    p_fp: float
    p_fn: float
    p_tot: float
    tail_fp: float = 0.0
    tail_fn: float = 0.0
    p_sq: Optional[float] = None

    @property
    def p_tot_bound(self):
        """Conservative total error, charging truncated mass to both error types."""
        return self.p_tot + self.tail_fp + self.tail_fn

    def to_dict(self):
        d = asdict(self)
        d["p_tot_bound"] = self.p_tot_bound
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


def _aligned(p0: PhotonDistribution, pdelta: PhotonDistribution):
    n = max(p0.n_max, pdelta.n_max)
    return p0.padded(n), pdelta.padded(n)


def ml_partition(p0: PhotonDistribution, pdelta: PhotonDistribution) -> DecisionRule:
    """Assign each count to the more likely hypothesis; ties go to N0."""
    a, b = _aligned(p0, pdelta)
    a = np.clip(a, 0.0, None)
    b = np.clip(b, 0.0, None)
    tie = np.abs(a - b) <= TIE_TOL
    in_delta = (b > a) & ~tie
    return DecisionRule(in_delta=in_delta, tie_count=int(tie.sum()))


def error_probs(rule: DecisionRule, p0: PhotonDistribution, pdelta: PhotonDistribution,
                p_sq: Optional[float] = None) -> ErrorReport:
    a, b = _aligned(p0, pdelta)
    if len(a) != len(rule.in_delta):
        raise ValueError("decision rule and distributions have different lengths")
    a = np.clip(a, 0.0, None)
    b = np.clip(b, 0.0, None)
    p_fp = math.fsum(a[rule.in_delta])
    p_fn = math.fsum(b[~rule.in_delta])
    return ErrorReport(p_fp=p_fp, p_fn=p_fn, p_tot=p_fp + p_fn,
                       tail_fp=p0.tail_bound, tail_fn=pdelta.tail_bound, p_sq=p_sq)


def discriminate(p0: PhotonDistribution, pdelta: PhotonDistribution) -> ErrorReport:
    return error_probs(ml_partition(p0, pdelta), p0, pdelta)


def _squeezed_variance_factor(r, eta):
    # squeezed (not anti-squeezed) momentum: s = e^{-r} with r >= 0 the magnitude
    s2 = math.exp(-2.0 * abs(r))
    return eta * (s2 - 1.0) + 1.0


def homodyne_pdf(p, delta0, r, eta):
    """Momentum distribution of the displaced squeezed vacuum after loss ``eta``.

    ``r`` is the squeezing magnitude; the momentum quadrature is squeezed.
    Variance is ``(eta (e^{-2r} - 1) + 1) / 4``.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    v = _squeezed_variance_factor(r, eta)
    p = np.asarray(p, dtype=float)
    return math.sqrt(2.0 / (math.pi * v)) * np.exp(-2.0 * (p - math.sqrt(eta) * delta0) ** 2 / v)


def squeezed_baseline(delta0, r, eta):
    """Total error of midpoint-threshold momentum homodyne on a squeezed probe."""
    if delta0 < 0:
        raise ValueError("delta0 must be >= 0")
    v = _squeezed_variance_factor(r, eta)
    return float(erfc(delta0 * math.sqrt(eta / (2.0 * v))))


def baseline_threshold(delta0, eta):
    return math.sqrt(eta) * delta0 / 2.0
