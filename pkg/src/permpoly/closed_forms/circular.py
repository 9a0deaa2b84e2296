"""Two-point functions of permanental polynomials for CUE and complex Ginibre.

For non-Hermitian ensembles the natural two-point function pairs a
polynomial with the complex conjugate of another:
``<Per(a - U) conj(Per(b - U))>``.  Both depend on ``a, b`` only through
``x = a conj(b)``.
"""

from __future__ import annotations

import math
from functools import partial

import numpy as np
from scipy import integrate, special
from scipy.special import logsumexp

from .._sampling import MCEstimate, resolve_seed, run_blocks
from ..ensembles import sample_cue
from ..errors import DomainError


def _x(a, b):
    return complex(a) * complex(b).conjugate()


def _power_series(log_coeffs, x):
    # sum_j exp(log_coeffs[j]) x^j, Horner for accuracy at small |x|
    coeffs = np.exp(np.asarray(log_coeffs) - np.max(log_coeffs))
    total = 0j
    for c in coeffs[::-1]:
        total = total * x + c
    return total * math.exp(np.max(log_coeffs))


def two_point_cue(n, a, b, form="sum"):
    """``<Per(a I - U) conj(Per(b I - U))>`` over ``n x n`` Haar unitaries.

    Parameters
    ----------
    form : {"sum", "integral"}
        ``"sum"``: ``n! (n-1)! sum_{j<=n} x^j / (j! (2n-1-j)!)``.
        ``"integral"``: ``(n-1) int_0^1 (1-t)^(n-2) (x+t)^n dt`` by Gauss-Jacobi
        quadrature; for ``n = 1`` the weight concentrates at ``t = 1`` and the
        value is ``1 + x``.
    """
    x = _x(a, b)
    if n < 1:
        raise DomainError("n must be >= 1")
    if form == "sum":
        j = np.arange(n + 1)
        logc = math.lgamma(n + 1) + math.lgamma(n) - special.gammaln(j + 1) - special.gammaln(2 * n - j)
        return _power_series(logc, x)
    if form == "integral":
        if n == 1:
            return 1.0 + x
        # t = (1 + s)/2 maps [-1, 1] onto [0, 1]; (1-t)^(n-2) = 2^-(n-2) (1-s)^(n-2)
        s, w = special.roots_jacobi(n + 2, n - 2, 0.0)
        t = 0.5 * (1.0 + s)
        return complex((n - 1) * 0.5 ** (n - 1) * np.sum(w * (x + t) ** n))
    raise ValueError(f"unknown form {form!r}")


def log_two_point_cue_diag(n, r2):
    """``log <|Per(a I - U)|^2>`` for ``|a|^2 = r2 >= 0``, stable for large ``n``."""
    j = np.arange(n + 1)
    logc = math.lgamma(n + 1) + math.lgamma(n) - special.gammaln(j + 1) - special.gammaln(2 * n - j)
    if r2 == 0:
        return float(logc[0])
    return float(logsumexp(logc + j * math.log(r2)))


def two_point_ginibre(n, a, b, form="sum"):
    """``<Per(a I - Z) conj(Per(b I - Z))>`` over ``n x n`` complex Ginibre.

    Parameters
    ----------
    form : {"sum", "integral"}
        ``"sum"``: ``(n!/n^n) sum_{k<=n} (n x)^k / k!``.
        ``"integral"``: ``n int_0^inf exp(-n R) (x + R)^n dR`` by Gauss-Laguerre
        quadrature.
    """
    x = _x(a, b)
    if n < 1:
        raise DomainError("n must be >= 1")
    if form == "sum":
        k = np.arange(n + 1)
        logc = math.lgamma(n + 1) - n * math.log(n) + k * math.log(n) - special.gammaln(k + 1)
        return _power_series(logc, x)
    if form == "integral":
        u, w = special.roots_laguerre(n + 2)
        return complex(np.sum(w * (x + u / n) ** n))
    raise ValueError(f"unknown form {form!r}")


def log_two_point_ginibre_diag(n, r2):
    """``log <|Per(a I - Z)|^2>`` for ``|a|^2 = r2 >= 0``."""
    k = np.arange(n + 1)
    logc = math.lgamma(n + 1) - n * math.log(n) + k * math.log(n) - special.gammaln(k + 1)
    if r2 == 0:
        return float(logc[0])
    return float(logsumexp(logc + k * math.log(r2)))


def log_char_two_point_cue_diag(n, r2):
    """``log <|det(a I - U)|^2> = log sum_{k<=n} r2^k``."""
    if r2 == 1.0:
        return math.log(n + 1)
    k = np.arange(n + 1)
    if r2 == 0:
        return 0.0
    return float(logsumexp(k * math.log(r2)))


def fk_rank_one(v2, n, method="series"):
    """``int_U(n) exp(Tr[A U + U* B*]) dU`` when ``A B*`` has rank one.

    Depends only on ``v2``, the nonzero eigenvalue of ``A B*``.

    Parameters
    ----------
    v2 : complex
        Accepts complex values for analytic continuation.
    method : {"series", "quadrature"}
        ``"series"``: ``(n-1)! sum_j v2^j / (j! (n-1+j)!)`` to relative tail 1e-17.
        ``"quadrature"``: ``(n-1) int_0^1 (1-t)^(n-2) I_0(2 sqrt(t v2)) dt``
        (adaptive, algebraic endpoint weight).

    Raises
    ------
    DomainError
        For ``n < 2``, where the integral representation does not apply.
    """
    v2 = complex(v2)
    if n < 2:
        raise DomainError("fk_rank_one needs n >= 2")
    if method == "series":
        term = complex(math.exp(-math.lgamma(n)))
        total = term
        j = 0
        while True:
            j += 1
            term *= v2 / (j * (n - 1 + j))
            total += term
            if abs(term) <= 1e-17 * abs(total) and j > abs(v2) ** 0.5:
                break
            if j > 100000:
                break
        return total * math.factorial(n - 1)
    if method == "quadrature":
        def f(t, part):
            val = special.iv(0, 2.0 * np.sqrt(t * v2 + 0j))
            return val.real if part == 0 else val.imag

        kw = dict(weight="alg", wvar=(0.0, float(n - 2)), epsabs=0.0, epsrel=1e-13, limit=200)
        re = integrate.quad(f, 0.0, 1.0, args=(0,), **kw)[0]
        im = integrate.quad(f, 0.0, 1.0, args=(1,), **kw)[0] if v2.imag != 0 else 0.0
        return (n - 1) * complex(re, im)
    raise ValueError(f"unknown method {method!r}")


def _fk_samples(alpha, beta, n, rng, count):
    u11 = sample_cue(n, rng, count)[:, 0, 0]
    return np.exp(alpha * u11 + beta * np.conj(u11))


def fk_mc(alpha, beta, n, m_samples=100000, seed=None, workers=1):
    """Haar Monte-Carlo of ``int exp(Tr[A U + U* B*]) dU`` for ``A = alpha e1 e1^T``, ``B* = beta e1 e1^T``.

    Here ``A B*`` has the single nonzero eigenvalue ``v2 = alpha beta``, so the
    result estimates ``fk_rank_one(alpha * beta, n)``.
    """
    seed = resolve_seed(seed)
    values = run_blocks(partial(_fk_samples, complex(alpha), complex(beta), n), m_samples, seed, workers)
    return MCEstimate.from_samples(values, seed)
