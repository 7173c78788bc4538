"""Special functions used by the phase-space and photon-statistics code.

Conventions
-----------
* ``jacobi_theta3(z, q) = 1 + 2 * sum_{k>=1} q**(k*k) * cos(2*k*z)`` (nome form).
  Only ``z = pi/2`` is needed downstream, where it reduces to
  ``1 + 2 * sum (-1)**k q**(k*k)``.
* Squeezing in decibels: ``dB = 10 * log10(exp(2 r))``.
"""
import math

import numpy as np
from scipy import special as _sp

STIRLING_THRESHOLD = 20

_SQRT_PI = math.sqrt(math.pi)


def laguerre(n, a, z):
    """Generalized Laguerre polynomial ``L_n^a(z)`` by the three-term recurrence.

    ``z`` may be a real or complex scalar, a numpy array, or an mpmath number;
    only ``+ - * /`` are used so the arithmetic type of ``z`` is preserved.

    Raises
    ------
    ValueError
        If ``n`` is negative.
    OverflowError
        If a floating-point result is not finite.
    """
    if n < 0:
        raise ValueError(f"laguerre: n must be >= 0, got {n}")
    prev = 1 + 0 * z
    if n == 0:
        return prev
    cur = 1 + a - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - z) * cur - (k + a) * prev) / (k + 1)
    if isinstance(cur, (float, complex, np.ndarray, np.number)):
        if not np.all(np.isfinite(cur)):
            raise OverflowError(f"laguerre: non-finite value for n={n}, a={a}")
    return cur


def laguerre_sum(n, a, z):
    """Explicit finite sum ``sum_k Gamma(n+a+1)/(Gamma(k+a+1)(n-k)!k!) (-z)^k``.

    Slow and cancellation-prone; kept as an independent check of :func:`laguerre`.
    """
    total = 0 * z
    for k in range(n + 1):
        coef = math.exp(
            math.lgamma(n + a + 1) - math.lgamma(k + a + 1) - math.lgamma(n - k + 1) - math.lgamma(k + 1)
        )
        # sign of Gamma(n+a+1)/Gamma(k+a+1) for a = -1/2 is always positive
        total = total + coef * (-z) ** k
    return total


def _gamma_half_ratio_exact(m):
    # sqrt(pi) * prod_{j=1..m} (j - 1/2)/j, no overflow for any m
    val = _SQRT_PI
    for j in range(1, m + 1):
        val *= (j - 0.5) / j
    return val


def stirling_factor_2nd(m):
    """The second-order factor ``S(m) = exp(-(144 m + 7) / (1152 m^2))``.

    ``S(m)/sqrt(m)`` approximates ``Gamma(m+1/2)/m!`` with a relative error of
    order ``1/m^2`` (about 1.4e-5 at m = 21). :func:`gamma_half_ratio` uses the
    full asymptotic series instead.
    """
    if m <= 0:
        raise ValueError("stirling_factor_2nd needs m >= 1")
    return math.exp(-(144.0 * m + 7.0) / (1152.0 * m * m))


def _gamma_half_ratio_stirling(m):
    # log(Gamma(m+1/2)/Gamma(m+1)) + log(m)/2, asymptotic in 1/m
    x = 1.0 / m
    log_s = -x / 8 + x**3 / 192 - x**5 / 640 + 17 * x**7 / 14336
    return math.exp(log_s) / math.sqrt(m)


def gamma_half_ratio(m):
    """``Gamma(m + 1/2) / m!`` for integer ``m >= 0``.

    Uses the exact product for ``m <= 20`` and a Stirling-type series
    ``S(m)/sqrt(m)`` above that; the two branches agree to ~1e-13 at the switch.
    """
    m = int(m)
    if m < 0:
        raise ValueError(f"gamma_half_ratio: m must be >= 0, got {m}")
    if m <= STIRLING_THRESHOLD:
        return _gamma_half_ratio_exact(m)
    return _gamma_half_ratio_stirling(m)


def erfc(x):
    """Complementary error function (scipy backend, works on arrays)."""
    return _sp.erfc(x)


def jacobi_theta3(z, q, tol=1e-16):
    """Jacobi theta function ``theta_3(z, q)`` in nome form, ``0 <= q < 1``.

    For ``q > 1/2`` the nome series cancels badly (at ``z = pi/2`` the value
    tends to 0), so the Poisson-dual sum
    ``sqrt(pi/t) * sum_n exp(-(z + n pi)^2 / t)`` with ``q = exp(-t)`` is used.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"jacobi_theta3: nome must satisfy 0 <= q < 1, got {q}")
    if q == 0.0:
        return 1.0
    log_q = math.log(q)
    if q > 0.5:
        t = -log_q
        z0 = math.remainder(z, math.pi)
        # terms with |z0 + n pi| beyond sqrt(40 t) are below e^-40 of the largest
        n_max = int(math.ceil((math.sqrt(40.0 * t) + abs(z0)) / math.pi)) + 1
        total = math.fsum(math.exp(-((z0 + n * math.pi) ** 2) / t) for n in range(-n_max, n_max + 1))
        return math.sqrt(math.pi / t) * total
    total = 1.0
    k = 1
    while True:
        term = math.exp(k * k * log_q)
        if term < tol:
            break
        total += 2.0 * term * math.cos(2 * k * z)
        k += 1
    return total


def db_from_r(r):
    return 20.0 * r / math.log(10.0)


def r_from_db(db):
    return db * math.log(10.0) / 20.0
