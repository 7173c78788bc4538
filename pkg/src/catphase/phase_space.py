"""Wigner function of the anti-squeezed, lossy, displaced even cat state.

Quadratures follow ``x = (a + a^dag)/2``, ``p = (a - a^dag)/(2i)`` so the vacuum
Wigner function is ``(2/pi) exp(-2(x^2 + p^2))``.  Anti-squeezing stretches
``p`` by ``s = e^r`` (``r > 0``); the displacement ``D(i delta)`` shifts ``p``.

After a single effective loss ``eta`` and displacement ``delta``::

    W(x, p) = F * (W_int + W_plus + W_minus)
    W_int   = 2 exp(-C - B (p - delta)^2 - A x^2) cos(D (p - delta))
    W_pm    = exp(-A (x +- xi)^2 - B (p - delta)^2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .special_fn import jacobi_theta3


class QuadratureError(RuntimeError):
    """Raised when a 2-D integral does not reach its tolerance."""

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value:.6g}, estimated error={error:.3g})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class ProbeSpec:
    """Physical inputs of one probe configuration.

    ``delta0`` may be given directly or derived from ``N`` and ``phi`` via
    ``delta0 = sqrt(N) * phi``.
    """

    alpha: float
    r: float = 0.0
    eta1: float = 1.0
    eta2: float = 1.0
    delta0: Optional[float] = None
    N: Optional[float] = None
    phi: Optional[float] = None

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        for name in ("eta1", "eta2"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.N is not None or self.phi is not None:
            if self.N is None or self.phi is None:
                raise ValueError("N and phi must be given together")
            if self.N < 0:
                raise ValueError(f"N must be >= 0, got {self.N}")
            derived = math.sqrt(self.N) * self.phi
            if self.delta0 is None:
                object.__setattr__(self, "delta0", derived)
            elif not math.isclose(self.delta0, derived, rel_tol=1e-12, abs_tol=1e-15):
                raise ValueError(f"delta0={self.delta0} inconsistent with sqrt(N)*phi={derived}")
        if self.delta0 is None:
            object.__setattr__(self, "delta0", 0.0)
        if self.delta0 < 0:
            raise ValueError(f"delta0 must be >= 0, got {self.delta0}")


@dataclass(frozen=True)
class EffectiveChannel:
    eta: float
    delta: float


def effective_channel(spec: ProbeSpec) -> EffectiveChannel:
    """Collapse loss(eta1) -> D(i delta0) -> loss(eta2) into a single loss and displacement."""
    return EffectiveChannel(eta=spec.eta1 * spec.eta2, delta=spec.delta0 * math.sqrt(spec.eta2))


@dataclass(frozen=True)
class WignerCoeffs:
    A: float
    B: float
    C: float
    D: float
    F: float
    xi: float
    delta: float
    s: float
    alpha: float = field(default=0.0)
    eta: float = field(default=1.0)


def wigner_coeffs(alpha: float, r: float, eta: float, delta: float = 0.0) -> WignerCoeffs:
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    s = math.exp(r)
    s2 = s * s
    den_p = 1.0 + eta * (s2 - 1.0)
    den_x = s2 * (1.0 - eta) + eta
    A = 2.0 * s2 / den_x
    B = 2.0 / den_p
    C = 2.0 * alpha**2 * (1.0 - eta) / den_p
    D = 4.0 * s * alpha * math.sqrt(eta) / den_p
    F = s / (math.pi * (1.0 + math.exp(-2.0 * alpha**2))) * math.sqrt(1.0 / (den_p * den_x))
    return WignerCoeffs(A=A, B=B, C=C, D=D, F=F, xi=alpha * math.sqrt(eta) / s,
                        delta=delta, s=s, alpha=alpha, eta=eta)


def wigner_eval(c: WignerCoeffs, x, p):
    """Evaluate the lossy displaced Wigner function; broadcasts over ``x`` and ``p``."""
    x = np.asarray(x, dtype=float)
    q = np.asarray(p, dtype=float) - c.delta
    env_p = np.exp(-c.B * q * q)
    w_int = 2.0 * np.exp(-c.C - c.A * x * x) * np.cos(c.D * q)
    w_bells = np.exp(-c.A * (x + c.xi) ** 2) + np.exp(-c.A * (x - c.xi) ** 2)
    return c.F * env_p * (w_int + w_bells)


def wigner_pure(alpha: float, r: float, x, p):
    """Lossless, undisplaced anti-squeezed cat."""
    s = math.exp(r)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    K = 2.0 * (1.0 + math.exp(-2.0 * alpha**2))
    env_p = np.exp(-2.0 * (p / s) ** 2)
    return (2.0 / (math.pi * K)) * env_p * (
        np.exp(-2.0 * (x * s - alpha) ** 2)
        + np.exp(-2.0 * (x * s + alpha) ** 2)
        + 2.0 * np.exp(-2.0 * (x * s) ** 2) * np.cos(4.0 * alpha * p / s)
    )


# --------------------------------------------------------------------------
# panel Gauss-Legendre quadrature
# --------------------------------------------------------------------------

def gl_nodes(edges, order):
    """Nodes and weights of composite Gauss-Legendre on consecutive ``edges``."""
    g, w = roots_legendre(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def uniform_edges(lo, hi, max_width, anchor=None, step=None):
    """Panel edges covering ``[lo, hi]`` with width <= ``max_width``.

    With ``anchor``/``step`` the edges sit on the lattice ``anchor + k*step``
    (``step`` is shrunk by an integer factor to respect ``max_width``), so
    known kinks of the integrand fall on panel boundaries.
    """
    if anchor is None:
        n = max(1, int(math.ceil((hi - lo) / max_width)))
        return np.linspace(lo, hi, n + 1)
    sub = max(1, int(math.ceil(step / max_width)))
    h = step / sub
    k0 = math.floor((lo - anchor) / h)
    k1 = math.ceil((hi - anchor) / h)
    return anchor + h * np.arange(k0, k1 + 1)


def integrate_2d(func: Callable, x_edges, p_edges, order=12, chunk=256):
    """Tensor-product panel Gauss-Legendre of ``func(x[:, None], p[None, :])``.

    ``func`` may return extra leading axes (e.g. one slice per photon number);
    the result keeps them.
    """
    xs, wx = gl_nodes(x_edges, order)
    ps, wp = gl_nodes(p_edges, order)
    total = 0.0
    for i in range(0, len(xs), chunk):
        vals = func(xs[i:i + chunk, None], ps[None, :])
        total = total + np.tensordot(vals, wp, axes=([-1], [0])) @ wx[i:i + chunk]
    return total


def adaptive_integrate_2d(func, x_range, p_range, hx, hp, *, p_anchor=None, p_step=None,
                          order=12, tol=1e-9, rtol=0.0, max_level=4):
    """Halve all panels until two successive estimates agree within
    ``tol + rtol * |value|``.

    Returns ``(value, error_estimate)``; raises :class:`QuadratureError` when
    ``max_level`` refinements do not reach ``tol``.
    """
    prev, err = None, math.inf
    for level in range(max(max_level, 1) + 1):
        scale = 2.0**-level
        x_edges = uniform_edges(*x_range, hx * scale)
        p_edges = uniform_edges(*p_range, hp * scale, anchor=p_anchor,
                                step=None if p_step is None else p_step)
        val = integrate_2d(func, x_edges, p_edges, order=order)
        if prev is not None:
            err = float(np.max(np.abs(np.asarray(val) - np.asarray(prev))))
            if err < tol + rtol * float(np.max(np.abs(val))):
                return val, err
        prev = val
    raise QuadratureError("2-D quadrature did not converge", float(np.max(np.abs(val))), err)


def integration_box(c: WignerCoeffs, sigmas=8.0):
    """Box covering both bells, the fringe envelope and a fringe of padding."""
    X = c.xi + sigmas / math.sqrt(c.A)
    pad = math.pi / c.D if c.D > 0 else 0.0
    P = sigmas / math.sqrt(c.B) + pad
    return (-X, X), (c.delta - P, c.delta + P)


def _panel_widths(c: WignerCoeffs):
    hx = 0.5 / math.sqrt(c.A)
    hp = 0.5 / math.sqrt(c.B)
    if c.D > 0:
        hp = min(hp, math.pi / (2.0 * c.D))
    return hx, hp


def negativity_numeric(c: WignerCoeffs, tol=1e-8, rtol=1e-4, max_level=5):
    """Negative volume ``(1/2) * int (|W| - W)`` of the full Wigner function."""
    if c.alpha == 0.0:
        return 0.0
    xr, pr = integration_box(c)
    hx, hp = _panel_widths(c)
    step = math.pi / (2.0 * c.D)

    def neg_part(x, p):
        return np.maximum(-wigner_eval(c, x, p), 0.0)

    val, _ = adaptive_integrate_2d(neg_part, xr, pr, hx, hp, p_anchor=c.delta, p_step=step,
                                   tol=tol, rtol=rtol, max_level=max_level)
    return float(val)


def wigner_norm(c: WignerCoeffs, tol=1e-10):
    """Total integral of the Wigner function (should be 1)."""
    xr, pr = integration_box(c)
    hx, hp = _panel_widths(c)
    val, _ = adaptive_integrate_2d(lambda x, p: wigner_eval(c, x, p), xr, pr, hx, hp, tol=tol)
    return float(val)


def negativity_analytic(alpha: float, r: float, eta: float) -> float:
    """Slowly-varying-envelope estimate of the negative volume (interference term only)."""
    if alpha <= 0:
        raise ValueError("negativity_analytic needs alpha > 0")
    s2 = math.exp(2.0 * r)
    den = eta * (s2 - 1.0) + 1.0
    pref = math.exp(-2.0 * alpha**2 * (1.0 - eta) / den) / (math.pi * (1.0 + math.exp(-2.0 * alpha**2)))
    nome = math.exp(-2.0 * s2 * alpha**2 * eta / den)
    return pref * jacobi_theta3(math.pi / 2.0, nome)


def validity_lhs(alpha, r, eta):
    s2 = math.exp(2.0 * r)
    return 3.0 * alpha * math.sqrt(eta) * math.sqrt(eta * (s2 - 1.0) + s2) / s2


def negativity_validity(alpha: float, r: float, eta: float):
    """Bell/fringe separation criterion; returns ``(holds, margin)`` with ``margin = 1 - lhs``."""
    margin = 1.0 - validity_lhs(alpha, r, eta)
    return margin > 0.0, margin


def validity_r_max(alpha, eta, r_hi=20.0):
    """Anti-squeeze ``r`` at which the validity inequality saturates (bisection).

    Returns ``None`` when the inequality cannot be saturated in ``[0, r_hi]``.
    """
    f = lambda r: validity_lhs(alpha, r, eta) - 1.0
    if f(0.0) <= 0.0:
        return 0.0
    if f(r_hi) > 0.0:
        return None
    return brentq(f, 0.0, r_hi, xtol=1e-14)


def fringe_profiles(c: WignerCoeffs, p, amplitude=True):
    """Exact fringe profile at ``x = 0`` and its piecewise-constant-envelope approximation.

    The approximation holds the envelope fixed over each cosine half-period,
    at its value on the half-period's extremum ``delta + j*pi/D``.
    ``amplitude=False`` drops the common factor ``2 exp(-C)``.
    """
    q = np.asarray(p, dtype=float) - c.delta
    cos = np.cos(c.D * q)
    amp = 2.0 * math.exp(-c.C) if amplitude else 1.0
    fine = amp * np.exp(-c.B * q * q) * cos
    j = np.round(q * c.D / math.pi)
    q_ext = j * math.pi / c.D
    approx = amp * np.exp(-c.B * q_ext * q_ext) * cos
    return fine, approx


def fringe_overlap(alpha: float, r: float, eta: float, delta: float = 0.0, order=16) -> float:
    """Normalized inner product of the exact and approximate fringe profiles."""
    if alpha <= 0:
        raise ValueError("fringe_overlap needs alpha > 0")
    c = wigner_coeffs(alpha, r, eta, delta)
    half = math.pi / c.D
    n_half = int(math.ceil((10.0 / math.sqrt(c.B)) / half))
    # panels between consecutive cosine zeros: the approximation is smooth on each
    edges = c.delta + half * (np.arange(-n_half, n_half + 2) - 0.5)
    ps, w = gl_nodes(edges, order)
    fine, approx = fringe_profiles(c, ps, amplitude=False)
    ff = float(w @ (fine * fine))
    aa = float(w @ (approx * approx))
    if ff == 0.0 or aa == 0.0:
        raise ValueError("fringe_overlap: zero-norm profile")
    return float(w @ (fine * approx)) / math.sqrt(ff * aa)


def wigner_grid(c: WignerCoeffs, x, p):
    """Rows ``(x, p, W)`` over the tensor grid ``x`` by ``p``."""
    X, P = np.meshgrid(np.asarray(x, float), np.asarray(p, float), indexing="ij")
    return np.column_stack([X.ravel(), P.ravel(), wigner_eval(c, X, P).ravel()])
