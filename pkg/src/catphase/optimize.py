"""Operating-point search over (delta0, r) and sweeps over (alpha, eta).

All error evaluations use the binomial Fock route with ``eta1 = 1`` and
``eta2 = eta`` (displacement first, loss after it).
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import minimize

from .detection import discriminate, squeezed_baseline
from .fock_stats import NORM_TOL, TruncationError, combinatorial_from_effective

log = logging.getLogger(__name__)

DELTA0_BOUNDS = (0.0, 1.5)
R_BOUNDS = (0.0, 1.7)
COARSE_SHAPE = (31, 35)
LANDSCAPE_SHAPE = (61, 35)
N_REFINE = 5


@dataclass(frozen=True)
class OperatingPoint:
    delta0: float
    r: float
    p_tot: float
    method_tag: str = "combinatorial"


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    eta: float
    best: OperatingPoint
    p_sq_at_best: float
    ratio: float
    error: str = ""

    def row(self):
        return {"alpha": self.alpha, "eta": self.eta, "delta0": self.best.delta0, "r": self.best.r,
                "p_tot": self.best.p_tot, "p_sq": self.p_sq_at_best, "ratio": self.ratio,
                "method": self.best.method_tag, "error": self.error}


@dataclass
class Landscape:
    alpha: float
    eta: float
    delta0_grid: np.ndarray
    r_grid: np.ndarray
    p_tot: np.ndarray  # shape (len(delta0_grid), len(r_grid)); NaN where invalid
    minima: list = field(default_factory=list)

    @property
    def invalid(self):
        return np.isnan(self.p_tot)

    def global_min(self):
        i, j = np.unravel_index(np.nanargmin(self.p_tot), self.p_tot.shape)
        return OperatingPoint(float(self.delta0_grid[i]), float(self.r_grid[j]), float(self.p_tot[i, j]))

    def rows(self):
        for i, d in enumerate(self.delta0_grid):
            for j, r in enumerate(self.r_grid):
                yield {"delta0": float(d), "r": float(r), "p_tot": float(self.p_tot[i, j])}


class ErrorModel:
    """Evaluates ``p_tot(delta0, r)`` at fixed ``(alpha, eta)`` with a fixed Fock basis.

    The basis is sized once for the largest ``(delta0, r)`` in the bounds; the
    no-signal distribution is cached per ``r``.
    """

    def __init__(self, alpha, eta, delta0_max=DELTA0_BOUNDS[1], r_max=R_BOUNDS[1], dim=None, tol=NORM_TOL):
        self.alpha = alpha
        self.eta = eta
        self.tol = tol
        self.dim = dim if dim is not None else self._size_basis(delta0_max, r_max)
        self._null = {}

    def _size_basis(self, delta0_max, r_max):
        dm = 64
        while True:
            try:
                self.distribution(delta0_max, r_max, dim=dm)
                self.distribution(0.0, r_max, dim=dm)
                return dm
            except TruncationError:
                dm *= 2
                if dm > 4096:
                    raise

    def distribution(self, delta0, r, dim=None):
        delta = delta0 * math.sqrt(self.eta)
        return combinatorial_from_effective(self.alpha, r, self.eta, delta,
                                            dim=dim or self.dim, tol=self.tol)

    def null(self, r):
        key = float(r)
        if key not in self._null:
            self._null[key] = self.distribution(0.0, key)
        return self._null[key]

    def report(self, delta0, r):
        return discriminate(self.null(r), self.distribution(delta0, r))

    def p_tot(self, delta0, r):
        return self.report(delta0, r).p_tot


def _local_minima(values, threshold):
    out = []
    n0, n1 = values.shape
    for i in range(n0):
        for j in range(n1):
            v = values[i, j]
            if not np.isfinite(v) or v >= threshold:
                continue
            nb = values[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
            if v <= np.nanmin(nb):
                out.append((i, j, float(v)))
    out.sort(key=lambda t: (t[2], t[0], t[1]))
    return out


def landscape(alpha, eta, delta0_grid=None, r_grid=None, threshold=0.5, model=None):
    """Total error on a ``delta0 x r`` grid; failing cells are NaN."""
    if delta0_grid is None:
        delta0_grid = np.linspace(*DELTA0_BOUNDS, LANDSCAPE_SHAPE[0])
    if r_grid is None:
        r_grid = np.linspace(*R_BOUNDS, LANDSCAPE_SHAPE[1])
    delta0_grid = np.asarray(delta0_grid, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(delta0_grid) <= 0) or np.any(np.diff(r_grid) <= 0):
        raise ValueError("grids must be strictly increasing")
    if model is None:
        model = ErrorModel(alpha, eta, delta0_max=delta0_grid[-1], r_max=r_grid[-1])
    values = np.full((len(delta0_grid), len(r_grid)), np.nan)
    for j, r in enumerate(r_grid):
        for i, d in enumerate(delta0_grid):
            try:
                values[i, j] = model.p_tot(d, r)
            except (TruncationError, FloatingPointError) as exc:
                log.warning("landscape cell (delta0=%g, r=%g) invalid: %s", d, r, exc)
    minima = [(float(delta0_grid[i]), float(r_grid[j]), v) for i, j, v in _local_minima(values, threshold)]
    return Landscape(alpha, eta, delta0_grid, r_grid, values, minima)


def optimize_point(alpha, eta, bounds=(DELTA0_BOUNDS, R_BOUNDS), coarse_shape=COARSE_SHAPE,
                   n_refine=N_REFINE, model=None) -> OperatingPoint:
    """Coarse grid scan, then bounded Nelder-Mead from the best ``n_refine`` cells."""
    (d_lo, d_hi), (r_lo, r_hi) = bounds
    d_grid = np.linspace(d_lo, d_hi, coarse_shape[0])
    r_grid = np.linspace(r_lo, r_hi, coarse_shape[1])
    if model is None:
        model = ErrorModel(alpha, eta, delta0_max=d_hi, r_max=r_hi)
    land = landscape(alpha, eta, d_grid, r_grid, threshold=np.inf, model=model)
    vals = land.p_tot
    order = np.argsort(np.where(np.isnan(vals), np.inf, vals), axis=None, kind="stable")
    i0, j0 = np.unravel_index(order[0], vals.shape)
    best = OperatingPoint(float(d_grid[i0]), float(r_grid[j0]), float(vals[i0, j0]))

    def objective(v):
        try:
            return model.p_tot(float(v[0]), float(v[1]))
        except TruncationError:
            return 2.0

    dd = d_grid[1] - d_grid[0] if len(d_grid) > 1 else 0.1
    dr = r_grid[1] - r_grid[0] if len(r_grid) > 1 else 0.1
    for flat in order[:n_refine]:
        i, j = np.unravel_index(flat, vals.shape)
        if not np.isfinite(vals[i, j]):
            continue
        x0 = np.array([d_grid[i], r_grid[j]])
        simplex = np.array([x0, x0 + [dd / 2, 0.0], x0 + [0.0, dr / 2]])
        simplex[:, 0] = np.clip(simplex[:, 0], d_lo, d_hi)
        simplex[:, 1] = np.clip(simplex[:, 1], r_lo, r_hi)
        res = minimize(objective, x0, method="Nelder-Mead", bounds=[(d_lo, d_hi), (r_lo, r_hi)],
                       options={"initial_simplex": simplex, "xatol": 1e-4, "fatol": 1e-8, "maxiter": 400})
        if res.fun < best.p_tot:
            best = OperatingPoint(float(res.x[0]), float(res.x[1]), float(res.fun))
    return best


def _sweep_cell(args, bounds, coarse_shape, n_refine):
    alpha, eta = args
    try:
        best = optimize_point(alpha, eta, bounds=bounds, coarse_shape=coarse_shape, n_refine=n_refine)
    except Exception as exc:  # per-cell isolation
        nan = OperatingPoint(math.nan, math.nan, math.nan)
        return SweepCell(alpha, eta, nan, math.nan, math.nan, error=repr(exc))
    p_sq = squeezed_baseline(best.delta0, abs(best.r), eta)
    ratio = min(best.p_tot / p_sq, 1.0) if p_sq > 0 else 1.0
    return SweepCell(alpha, eta, best, p_sq, ratio)


def resolve_workers(workers=None):
    if workers is None:
        workers = int(os.environ.get("CATPHASE_THREADS", "1"))
    return max(1, int(workers))


def sweep(alpha_grid, eta_grid, bounds=(DELTA0_BOUNDS, R_BOUNDS), coarse_shape=COARSE_SHAPE,
          n_refine=N_REFINE, workers=None):
    """Optimize every ``(alpha, eta)`` cell; output ordered by (alpha, eta) index."""
    cells = [(float(a), float(e)) for a in alpha_grid for e in eta_grid]
    work = partial(_sweep_cell, bounds=bounds, coarse_shape=coarse_shape, n_refine=n_refine)
    workers = resolve_workers(workers)
    if workers == 1:
        return [work(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, cells))


def cell_to_dict(cell: SweepCell):
    d = asdict(cell)
    d["best"] = asdict(cell.best)
    return d
