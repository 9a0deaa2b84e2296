"""Closed forms for Gaussian and unitary-invariant Hermitian ensembles.

Hermite polynomials here are monic and orthogonal for ``exp(-N x^2/2)`` with
``N`` equal to the matrix size, matching the GUE/GOE variance conventions of
:mod:`permpoly.ensembles`.
"""

from __future__ import annotations

import math
from functools import partial

import numpy as np
from numpy.polynomial import Polynomial

from .._sampling import MCEstimate, resolve_seed, run_blocks
from ..ensembles import Potential
from ..errors import ConditioningError, DomainError, SizeError
from ..orthopoly import (
    gauss_from_recurrence,
    hermite_monic,
    hermite_monic_scaled,
    monic_ops_from_potential,
)

GENERAL_MEAN_MAX_N = 10
GOE_MOMENTS_MAX_N = 20


# ------------------------------------------------------------- mean values


def mean_perm_poly_coefficients(potential, n, recurrence=None):
    """Raw coefficients ``a_0..a_n`` of the mean permanental polynomial.

    ``a_k = (-1)^(n-k) C(2n-1, k) int exp(-n V) l^(2n-1-k) pi_{n-1}(l) dl``,
    the coefficient of ``mu^k`` in ``int exp(-n V) (mu - l)^(2n-1) pi_{n-1}(l) dl``
    up to the overall sign ``(-1)^(n-1)``, chosen so that ``a_n`` is positive.
    For ``V = x^2/2`` the top coefficient equals
    :func:`gaussian_normalization`.
    """
    if not isinstance(potential, Potential):
        potential = Potential(tuple(potential))
    if n < 1 or n > GENERAL_MEAN_MAX_N:
        raise SizeError(f"mean_perm_poly_general supports 1 <= n <= {GENERAL_MEAN_MAX_N}")
    degree = 3 * n - 2
    m = max(1, -(-(degree + 1) // 2))
    k_needed = max(m - 1, n - 1)
    if recurrence is None:
        recurrence = monic_ops_from_potential(potential, n, k_needed)
    if recurrence.k_max < k_needed:
        raise SizeError(f"recurrence must reach index {k_needed} for {m}-node quadrature")
    nodes, weights = gauss_from_recurrence(recurrence, m)
    pi = recurrence.evaluate(n - 1, nodes).real
    a = np.empty(n + 1)
    for k in range(n + 1):
        integral = float(np.sum(weights * nodes ** (2 * n - 1 - k) * pi))
        a[k] = (-1) ** (n - k) * math.comb(2 * n - 1, k) * integral
    return a


def mean_perm_poly_general(potential, n, recurrence=None):
    """Expected permanental polynomial of an ``n x n`` unitary-invariant ensemble.

    The ensemble has eigenvalue weight ``exp(-n V(x))``.  The one-fold integral
    over the monic orthogonal polynomial ``pi_{n-1}`` is evaluated by Gauss
    quadrature built from the Stieltjes recurrence for that weight.

    Returns
    -------
    numpy.polynomial.Polynomial
        Monic of degree ``n``.

    Raises
    ------
    ConditioningError
        If the top coefficient vanishes to rounding.
    """
    a = mean_perm_poly_coefficients(potential, n, recurrence)
    if abs(a[n]) <= 1e-13 * np.max(np.abs(a)):
        raise ConditioningError("normalizing coefficient a_n vanished", index=n)
    coeffs = a / a[n]
    coeffs[n] = 1.0
    return Polynomial(coeffs)


def gaussian_normalization(n):
    """``a_n`` for ``V = x^2/2``: ``(2n-1)! / (n^n (n-1)!) sqrt(2 pi / n)``."""
    log = math.lgamma(2 * n) - n * math.log(n) - math.lgamma(n) + 0.5 * math.log(2 * math.pi / n)
    return math.exp(log)


def mean_perm_poly_gue(n, mu):
    """``<Per(mu I - H)>`` over ``n x n`` GUE, equal to ``i^n pi_n(-i mu)``."""
    return (1j ** n) * hermite_monic(n, n, -1j * np.asarray(mu, dtype=np.complex128))


def mean_perm_poly_goe(n, mu):
    """``<Per(mu I - H)>`` over ``n x n`` GOE, equal to ``i^n 2^(-n/2) pi_n(-i sqrt(2) mu)``."""
    x = -1j * math.sqrt(2.0) * np.asarray(mu, dtype=np.complex128)
    return (1j ** n) * 2.0 ** (-n / 2) * hermite_monic(n, n, x)


def mean_char_poly_gue(n, mu):
    """``<det(mu I - H)>`` over GUE, the monic Hermite polynomial ``pi_n(mu)``."""
    return hermite_monic(n, n, mu)


# ------------------------------------------------------- two-point, GUE


def _char_two_point_scaled(n, x, y):
    # (value / exp(log_scale), log_scale) of <d(x) d(y)> over n x n GUE
    px, px1, sx = hermite_monic_scaled(n, n, x)
    py, py1, sy = hermite_monic_scaled(n, n, y)
    # sign fixed against the 1x1 case: <(x-h)(y-h)> = xy + 1
    num = px * py1 - py * px1
    return num / (complex(y) - complex(x)), float(sx + sy)


def _char_two_point_confluent_scaled(n, x):
    p, p1, s = hermite_monic_scaled(n, n, x)
    x = complex(x)
    # d/dx pi_k = k pi_{k-1};  n pi_{n-1} = n (x pi_n - pi_{n+1}) with N = n
    value = (n + 1) * p * p - n * (x * p - p1) * p1
    return complex(value), 2.0 * float(s)


def char_two_point_gue(n, x, y, confluent=False):
    """``<det(x I - H) det(y I - H)>`` over ``n x n`` GUE.

    Determinant of ``pi_n, pi_{n+1}`` at ``x, y`` divided by ``y - x``.  With
    ``confluent=True`` coincident arguments use the derivative limit
    ``pi_n pi_{n+1}' - pi_n' pi_{n+1}``.
    """
    x, y = complex(x), complex(y)
    scale = max(1.0, abs(x), abs(y))
    if abs(y - x) <= 1e-12 * scale:
        if not confluent:
            raise DomainError("coincident arguments; pass confluent=True for the derivative limit")
        value, log_scale = _char_two_point_confluent_scaled(n, 0.5 * (x + y))
    else:
        value, log_scale = _char_two_point_scaled(n, x, y)
    return complex(value) * math.exp(log_scale)


def two_point_gue(n, mu1, mu2, confluent=False):
    """``<p(mu1) p(mu2)>`` for permanental polynomials of ``n x n`` GUE matrices.

    Equals ``<d(-i mu1) d(i mu2)>``: the characteristic two-point function at
    rotated arguments.  The arguments coincide when ``mu1 = -mu2``; pass
    ``confluent=True`` to take the derivative limit there.
    """
    return char_two_point_gue(n, -1j * complex(mu1), 1j * complex(mu2), confluent=confluent)


def char_two_point_gue_cd(n, x, y):
    """Christoffel-Darboux sum ``sum_k n!/(k! n^(n-k)) pi_k(x) pi_k(y)``.

    Independent of the determinant form and free of the ``1/(y-x)`` pole.
    """
    total = 0j
    for k in range(n + 1):
        log_w = math.lgamma(n + 1) - math.lgamma(k + 1) - (n - k) * math.log(n)
        total += math.exp(log_w) * complex(hermite_monic(k, n, x)) * complex(hermite_monic(k, n, y))
    return total


def semicircle(x, radius=2.0):
    """Semicircle density on ``[-radius, radius]`` with unit mass."""
    x = np.asarray(x, dtype=float)
    r2 = radius * radius
    out = np.where(np.abs(x) < radius, 2.0 * np.sqrt(np.clip(r2 - x * x, 0, None)) / (math.pi * r2), 0.0)
    return out[()] if out.ndim == 0 else out


def dyson_kernel_ratio(n, mu, delta, weighted=True):
    """Normalized two-point function of GUE characteristic polynomials in the bulk.

    Returns ``<d(mu1) d(mu2)> / <d(mu1)^2>`` at ``mu1 = mu`` and
    ``mu2 = mu + delta / (pi n rho(mu))``, with ``rho`` the semicircle density,
    so that the result tends to ``sin(delta) / delta`` as ``n`` grows.

    With ``weighted=True`` (default) the ratio is multiplied by
    ``exp(-n (mu2^2 - mu1^2) / 4)``, the square root of the Gaussian weight
    ratio, which removes the non-oscillating growth of the Hermite
    polynomials away from ``mu = 0``.  Degrees in the hundreds are handled in
    log-scaled arithmetic.
    """
    if not -2.0 < mu < 2.0:
        raise DomainError(f"mu = {mu} is outside the bulk (-2, 2)")
    if delta == 0:
        return 1.0
    rho = float(semicircle(mu))
    mu2 = mu + delta / (math.pi * n * rho)
    num, s_num = _char_two_point_scaled(n, mu, mu2)
    den, s_den = _char_two_point_confluent_scaled(n, mu)
    ratio = complex(num) / complex(den) * math.exp(s_num - s_den)
    if weighted:
        ratio *= math.exp(-n * (mu2 * mu2 - mu * mu) / 4.0)
    return ratio.real


# -------------------------------------------------------- two-point, GOE


def _gauss_moment(k, var):
    if k % 2:
        return 0.0
    return math.prod(range(k - 1, 0, -2)) * var ** (k // 2)


def _shifted_moment(mu, a, var):
    # E[(mu + x)^a] for x ~ N(0, var)
    return sum(math.comb(a, k) * mu ** (a - k) * _gauss_moment(k, var) for k in range(0, a + 1, 2))


def two_point_goe(n, mu1, mu2, method="moments", m_samples=None, seed=None, workers=1):
    """``<p(mu1) p(mu2)>`` for permanental polynomials of ``n x n`` GOE matrices.

    Evaluates the five-variable Gaussian integral of
    ``[(mu1 + q11)(mu2 - q22) + |q12|^2 + |q3|^2]^n`` under the normalized
    weight ``exp(-n (Tr q^2 + 2 |q3|^2))``: ``q11, q22`` real with variance
    ``1/(2n)``, ``q12, q3`` complex with ``E|.|^2 = 1/(2n)``.

    ``method="moments"`` expands the power and integrates each term exactly
    (n <= 20).  ``method="mc"`` samples ``q`` instead and returns an
    :class:`MCEstimate`.
    """
    mu1, mu2 = complex(mu1), complex(mu2)
    s = 1.0 / (2.0 * n)
    if method == "moments":
        if n > GOE_MOMENTS_MAX_N:
            raise SizeError(f"moment expansion supports n <= {GOE_MOMENTS_MAX_N}; use method='mc'")
        total = 0j
        for a in range(n + 1):
            b = n - a
            # |q12|^2 + |q3|^2 is Gamma(2, s): E[r^b] = (b+1)! s^b
            r_moment = math.factorial(b + 1) * s ** b
            total += math.comb(n, a) * _shifted_moment(mu1, a, s) * _shifted_moment(-mu2, a, s) * (-1) ** a * r_moment
        return total
    if method == "mc":
        if m_samples is None:
            raise ValueError("method='mc' needs m_samples")
        seed = resolve_seed(seed)
        values = run_blocks(partial(_goe_aux_samples, n, mu1, mu2), m_samples, seed, workers)
        return MCEstimate.from_samples(values, seed)
    raise ValueError(f"unknown method {method!r}")


def _goe_aux_samples(n, mu1, mu2, rng, count):
    s = 1.0 / (2.0 * n)
    q11, q22 = rng.standard_normal((2, count)) * math.sqrt(s)
    r = rng.exponential(s, (2, count)).sum(axis=0)
    return ((mu1 + q11) * (mu2 - q22) + r) ** n
