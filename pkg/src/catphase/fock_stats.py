"""Photon-number statistics of the lossy displaced anti-squeezed cat.

Three independent routes:

* :func:`closed_form_distribution` -- finite double sum over Laguerre
  polynomials obtained by integrating the Wigner function against Fock-state
  Wigner functions term by term.
* :func:`quadrature_distribution` -- direct numerical phase-space overlap
  ``p_n = pi * int W_rho W_n dx dp``.
* :func:`pn_combinatorial` -- truncated Fock-basis state vector followed by
  binomial thinning.

Overlap normalization: with vacuum quadrature variance 1/4 the trace of a
product of two operators is ``pi * int W_1 W_2``, so the overall prefactor of
the closed form is ``2 F`` (see ``_closed_form_moments``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.special import gammaln
from scipy.stats import binom

from .phase_space import (
    ProbeSpec,
    WignerCoeffs,
    adaptive_integrate_2d,
    effective_channel,
    integration_box,
    wigner_coeffs,
    wigner_eval,
)
from .special_fn import gamma_half_ratio, laguerre

N_STABLE = 23
DEFAULT_DIM = 64
NORM_TOL = 1e-10
MAX_AUTO_DIM = 2048


class TruncationError(ValueError):
    """The Fock truncation leaves more than the allowed norm outside the basis."""

    def __init__(self, message, defect):
        super().__init__(f"{message}: norm defect {defect:.3e}")
        self.defect = defect


class ClosedFormRangeError(ValueError):
    pass


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number distribution ``p_0 .. p_{n_max}``.

    ``tail_bound`` is the probability mass not represented (``1 - sum(probs)``).
    Raw values are kept; tiny negative round-off is only removed by :meth:`clipped`.
    """

    probs: np.ndarray
    tail_bound: float

    @classmethod
    def from_probs(cls, probs):
        probs = np.asarray(probs, dtype=float)
        return cls(probs=probs, tail_bound=float(max(1.0 - math.fsum(probs), 0.0)))

    @property
    def n_max(self):
        return len(self.probs) - 1

    def clipped(self):
        return np.clip(self.probs, 0.0, None)

    def padded(self, n_max):
        if n_max < self.n_max:
            raise ValueError("cannot pad to a shorter length")
        out = np.zeros(n_max + 1)
        out[: self.n_max + 1] = self.probs
        return out

    def mean(self):
        return float(np.arange(self.n_max + 1) @ self.probs)

    def to_json(self):
        return json.dumps({"n_max": self.n_max, "probs": [float(v) for v in self.probs],
                           "tail_bound": self.tail_bound})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        probs = np.asarray(d["probs"], dtype=float)
        if len(probs) != d["n_max"] + 1:
            raise ValueError("n_max does not match the number of probabilities")
        return cls(probs=probs, tail_bound=float(d["tail_bound"]))


@dataclass(frozen=True)
class FockStateVector:
    amps: np.ndarray
    dim: int
    norm_defect: float


def distribution_distance(p: PhotonDistribution, q: PhotonDistribution) -> float:
    """``sum_n |p_n - q_n|`` with the shorter distribution zero-padded."""
    n = max(p.n_max, q.n_max)
    return float(np.abs(p.padded(n) - q.padded(n)).sum())


# --------------------------------------------------------------------------
# closed form
# --------------------------------------------------------------------------

def _closed_form_moments(c: WignerCoeffs, k_max, dps=None):
    """Inner sums ``c_k`` (k <= k_max) of the closed form and the prefactor.

    ``p_n = prefactor * (-1)^n * sum_k C(n,k) (-4)^k c_k``.  ``c_k`` is a
    Cauchy product over ``m`` of an x-factor and a p-factor for the bell and
    interference parts.
    """
    if dps is None:
        exp, sqrt, pi = math.exp, math.sqrt, math.pi
        zi = complex(c.D, 2.0 * c.B * c.delta) ** 2 / (4.0 * (c.B + 2.0))
        phase = complex(math.cos(2 * c.D * c.delta / (c.B + 2)), math.sin(2 * c.D * c.delta / (c.B + 2)))
        A, B, C, D, xi, d, F = c.A, c.B, c.C, c.D, c.xi, c.delta, c.F
        ratio = gamma_half_ratio
    else:
        exp, sqrt, pi = mpmath.exp, mpmath.sqrt, mpmath.pi
        A, B, C, D, xi, d, F = (mpmath.mpf(v) for v in (c.A, c.B, c.C, c.D, c.xi, c.delta, c.F))
        zi = mpmath.mpc(D, 2 * B * d) ** 2 / (4 * (B + 2))
        phase = mpmath.expjpi(2 * D * d / (B + 2) / pi)
        ratio = lambda m: mpmath.gamma(m + mpmath.mpf(0.5)) / mpmath.factorial(m)

    e_bell = exp(-2 * A * xi**2 / (A + 2) - 2 * B * d**2 / (B + 2))
    e_int = exp(-C - 2 * B * d**2 / (B + 2) - D**2 / (4 * B + 8))
    zx = -(A**2) * xi**2 / (A + 2)
    zp = -(B**2) * d**2 / (B + 2)
    half = 0.5 if dps is None else mpmath.mpf(0.5)

    x_bell, x_int, p_bell, p_int = [], [], [], []
    for j in range(k_max + 1):
        ux = (A + 2) ** -(j + half)
        up = (B + 2) ** -(j + half)
        x_bell.append(laguerre(j, -half, zx) * ux)
        x_int.append(ratio(j) * ux)
        p_bell.append(laguerre(j, -half, zp) * up)
        p_int.append((phase * laguerre(j, -half, zi)).real * up)

    if dps is None:
        bell = np.convolve(x_bell, p_bell)[: k_max + 1]
        inter = np.convolve(x_int, p_int)[: k_max + 1]
        moments = 2 * pi * e_bell * bell + 2 * sqrt(pi) * e_int * inter
    else:
        moments = []
        for k in range(k_max + 1):
            bell = mpmath.fsum(x_bell[m] * p_bell[k - m] for m in range(k + 1))
            inter = mpmath.fsum(x_int[m] * p_int[k - m] for m in range(k + 1))
            moments.append(2 * pi * e_bell * bell + 2 * sqrt(pi) * e_int * inter)
    return 2 * F, moments


def _binomial_transform(prefactor, moments, n, dps=None):
    if dps is None:
        terms = [math.comb(n, k) * (-4.0) ** k * moments[k] for k in range(n + 1)]
        return (-1) ** n * prefactor * math.fsum(terms)
    total = mpmath.fsum(mpmath.binomial(n, k) * (-4) ** k * moments[k] for k in range(n + 1))
    return (-1) ** n * prefactor * total


def _check_range(n, n_stable, dps):
    if dps is None and n > n_stable:
        raise ClosedFormRangeError(
            f"closed form requested at n={n} > n_stable={n_stable}; double precision "
            "loses all digits there. Use pn_combinatorial, or pass dps=... for "
            "extended-precision evaluation."
        )


def pn_closed_form(alpha, r, eta, delta, n, n_stable=N_STABLE, dps=None):
    """Single closed-form photon-number probability.

    ``delta`` is the displacement after the effective loss ``eta``.  In double
    precision ``n`` is limited to ``n_stable``; with ``dps`` the same finite sum
    is evaluated by mpmath at that many decimal digits and no limit applies.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_range(n, n_stable, dps)
    c = wigner_coeffs(alpha, r, eta, delta)
    return closed_form_distribution(c, n, n_stable=n_stable, dps=dps).probs[n]


def closed_form_distribution(c: WignerCoeffs, n_max, n_stable=N_STABLE, dps=None):
    _check_range(n_max, n_stable, dps)
    if dps is None:
        with np.errstate(over="raise", invalid="raise"):
            pref, moments = _closed_form_moments(c, n_max)
            probs = [_binomial_transform(pref, moments, n) for n in range(n_max + 1)]
        if not np.all(np.isfinite(probs)):
            raise FloatingPointError("closed form produced a non-finite probability")
    else:
        with mpmath.workdps(dps):
            pref, moments = _closed_form_moments(c, n_max, dps=dps)
            probs = [float(_binomial_transform(pref, moments, n, dps=dps)) for n in range(n_max + 1)]
    return PhotonDistribution.from_probs(probs)


def auto_dps(n_max):
    """Working precision that comfortably covers the cancellation up to ``n_max``."""
    return 30 + n_max


# --------------------------------------------------------------------------
# phase-space quadrature
# --------------------------------------------------------------------------

def fock_wigner(n_max, x, p):
    """Fock-state Wigner functions ``W_0 .. W_{n_max}`` stacked on a leading axis."""
    rho2 = np.asarray(x) ** 2 + np.asarray(p) ** 2
    z = 4.0 * rho2
    gauss = (2.0 / math.pi) * np.exp(-2.0 * rho2)
    out = np.empty((n_max + 1,) + np.broadcast(x, p).shape)
    prev, cur = np.ones_like(z), 1.0 - z
    out[0] = gauss * prev
    if n_max >= 1:
        out[1] = -gauss * cur
    for k in range(1, n_max):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
        out[k + 1] = gauss * cur * (-1) ** (k + 1)
    return out


def quadrature_distribution(c: WignerCoeffs, n_max, tol=1e-11):
    """``p_n = pi * int W_rho W_n`` for ``n <= n_max`` by panel Gauss-Legendre."""
    xr, pr = integration_box(c)
    # the Fock functions confine the integrand to |x|,|p| <~ sqrt(n_max)+6 of the origin
    reach = math.sqrt(n_max + 1) + 6.0
    xr = (max(xr[0], -reach), min(xr[1], reach))
    pr = (max(pr[0], -reach), min(pr[1], reach))
    if xr[0] >= xr[1] or pr[0] >= pr[1]:
        return PhotonDistribution.from_probs(np.zeros(n_max + 1))
    h = 0.25
    hp = min(h, math.pi / (2.0 * c.D)) if c.D > 0 else h

    def integrand(x, p):
        return math.pi * fock_wigner(n_max, x, p) * wigner_eval(c, x, p)

    val, _ = adaptive_integrate_2d(integrand, xr, pr, h, hp, tol=tol, order=12)
    return PhotonDistribution.from_probs(val)


def pn_quadrature(c: WignerCoeffs, n) -> float:
    return float(quadrature_distribution(c, n).probs[n])


# --------------------------------------------------------------------------
# truncated Fock basis
# --------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _displacement_eig(dim):
    off = np.sqrt(np.arange(1.0, dim))
    return eigh_tridiagonal(np.zeros(dim), off)


@lru_cache(maxsize=16)
def _squeeze_eig(dim):
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    gen = 0.5 * (a @ a - a.T @ a.T)  # real antisymmetric
    return eigh(1j * gen)


def coherent_amplitudes(alpha, dim):
    n = np.arange(dim)
    if alpha == 0:
        return (n == 0).astype(float)
    log_abs = -0.5 * alpha * alpha + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_abs) * np.sign(alpha) ** n


def apply_squeeze(vec, r):
    """``exp(r/2 (a^2 - a^dag^2)) vec`` in the truncated basis."""
    if r == 0.0:
        return np.array(vec, dtype=complex)
    w, V = _squeeze_eig(len(vec))
    # gen = -i H with H = i*gen, so exp(r*gen) = V exp(-i r w) V^dag
    return V @ (np.exp(-1j * r * w) * (V.conj().T @ vec))


def apply_displacement(vec, delta):
    """``exp(i delta (a + a^dag)) vec`` in the truncated basis."""
    w, V = _displacement_eig(len(vec))
    return V @ (np.exp(1j * delta * w) * (V.T @ vec))


@lru_cache(maxsize=256)
def _squeezed_cat(alpha, r, dim):
    keep = 3 * dim // 4
    cat = coherent_amplitudes(alpha, dim) + coherent_amplitudes(-alpha, dim)
    cat = cat / np.linalg.norm(cat)
    vec = apply_squeeze(cat.astype(complex), r)
    vec.setflags(write=False)
    return vec, 1.0 - float(np.vdot(vec[:keep], vec[:keep]).real)


def pure_cat_fock_amplitudes(alpha, r, delta_pre, dim=DEFAULT_DIM, tol=NORM_TOL):
    """Number-basis amplitudes of ``D(i delta_pre) S(r) (|alpha> + |-alpha>)/sqrt(K)``.

    The operators act on a ``dim``-level basis; the top quarter is a guard
    band and only the lower ``3*dim//4`` amplitudes are returned.
    """
    keep = 3 * dim // 4
    vec, mid_defect = _squeezed_cat(float(alpha), float(r), dim)
    if mid_defect > tol:
        raise TruncationError(f"squeezed cat does not fit in dim={dim}", mid_defect)
    if delta_pre != 0.0:
        vec = apply_displacement(vec, delta_pre)
    amps = vec[:keep]
    defect = 1.0 - float(np.vdot(amps, amps).real)
    if defect > tol:
        raise TruncationError(f"displaced cat does not fit in dim={dim}", defect)
    return FockStateVector(amps=amps, dim=dim, norm_defect=max(defect, 0.0))


@lru_cache(maxsize=64)
def _loss_matrix(size, eta):
    n = np.arange(size)
    return binom.pmf(n[:, None], n[None, :], eta)


def binomial_loss(d: PhotonDistribution, eta: float) -> PhotonDistribution:
    """Binomial thinning ``p_n -> sum_{m>=n} C(m,n) eta^n (1-eta)^(m-n) p_m``."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if eta == 1.0:
        return PhotonDistribution(probs=d.probs.copy(), tail_bound=d.tail_bound)
    out = _loss_matrix(len(d.probs), float(eta)) @ d.probs
    return PhotonDistribution(probs=out, tail_bound=d.tail_bound + max(0.0, 1.0 - out.sum() - d.tail_bound))


def combinatorial_from_effective(alpha, r, eta, delta, dim=None, tol=NORM_TOL):
    """Binomial route for squeeze -> loss ``eta`` -> displacement ``delta``.

    Displacement and loss commute as ``loss(eta) D(delta) = D(delta/sqrt(eta)) loss(eta)``
    read right to left, so the pure state is displaced by ``delta/sqrt(eta)``
    before thinning.
    """
    delta_pre = delta / math.sqrt(eta)
    dims = [dim] if dim is not None else _auto_dims()
    err = None
    for dm in dims:
        try:
            state = pure_cat_fock_amplitudes(alpha, r, delta_pre, dm, tol=tol)
        except TruncationError as exc:
            err = exc
            continue
        pure = PhotonDistribution(probs=np.abs(state.amps) ** 2, tail_bound=state.norm_defect)
        return binomial_loss(pure, eta)
    raise err


def _auto_dims():
    dm = DEFAULT_DIM
    while dm <= MAX_AUTO_DIM:
        yield dm
        dm *= 2


def pn_combinatorial(spec: ProbeSpec, dim=None, tol=NORM_TOL) -> PhotonDistribution:
    """Photon statistics of ``spec`` by Fock-basis evolution and binomial loss.

    ``dim=None`` doubles the basis from 64 until the norm defect is below ``tol``.
    """
    ch = effective_channel(spec)
    return combinatorial_from_effective(spec.alpha, spec.r, ch.eta, ch.delta, dim=dim, tol=tol)
