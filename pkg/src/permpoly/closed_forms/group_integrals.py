"""Harish-Chandra-Itzykson-Zuber integrals and complete symmetric polynomials."""

from __future__ import annotations

import math
from functools import partial

import numpy as np

from .._sampling import MCEstimate, resolve_seed, run_blocks
from ..ensembles import sample_cue
from ..errors import ConditioningError, DomainError



def complete_symmetric(n, x):
    """Complete homogeneous symmetric polynomial ``h_n(x_1, ..., x_N)``.

    ``h_0 = 1`` and ``h_n = 0`` for negative ``n``.

    Examples
    --------
    >>> complete_symmetric(2, [1.0, 2.0])
    7.0
    """
    return complete_symmetric_all(n, x)[n] if n >= 0 else 0.0


def complete_symmetric_all(n_max, x):
    """``[h_0, ..., h_{n_max}]`` of the variables ``x`` by the one-variable-at-a-time recursion."""
    x = np.asarray(x)
    dtype = np.complex128 if np.iscomplexobj(x) else float
    h = np.zeros(n_max + 1, dtype=dtype)
    h[0] = 1.0
    for xi in x:
        # h_k(x_1..x_i) = h_k(x_1..x_{i-1}) + x_i h_{k-1}(x_1..x_i)
        for k in range(1, n_max + 1):
            h[k] = h[k] + xi * h[k - 1]
    return h


def divided_difference_sum(n, x):
    """``(-1)^(N-1) sum_i x_i^(n+N-1) / prod_{j != i} (x_j - x_i)`` for distinct ``x``."""
    x = np.asarray(x, dtype=np.complex128)
    big_n = len(x)
    total = 0j
    for i in range(big_n):
        others = np.delete(x, i)
        total += x[i] ** (n + big_n - 1) / np.prod(others - x[i])
    return (-1) ** (big_n - 1) * total


def identity_check_symfun1(n, x):
    """Compare the divided-difference sum with ``h_n(x)``.

    Returns
    -------
    lhs, rhs, residual : complex, complex, float
        ``residual`` is ``|lhs - rhs| / max(1, |rhs|)``.

    Raises
    ------
    DomainError
        If ``n < 1 - N``.  Below that the powers turn negative and the sum
        no longer vanishes.
    """
    if n < 1 - len(x):
        raise DomainError(f"identity holds for n >= 1 - N = {1 - len(x)}, got n = {n}")
    lhs = divided_difference_sum(n, x)
    rhs = complex(complete_symmetric(n, x)) if n >= 0 else 0j
    return lhs, rhs, abs(lhs - rhs) / max(1.0, abs(rhs))


def _hciz_rank_one_series(lam, t, tol=1e-14, max_terms=5000):
    big_n = len(lam)
    amax = float(np.max(np.abs(lam))) * abs(t)
    total = 0j
    abs_total = 0.0
    # term_n = (N-1)!/(N+n-1)! t^n h_n
    log_pref = 0.0
    hs = complete_symmetric_all(min(max_terms, int(2 * amax) + 60), lam)
    for n in range(len(hs)):
        if n > 0:
            log_pref -= math.log(big_n + n - 1)
        term = complex(hs[n]) * t ** n * math.exp(log_pref)
        total += term
        abs_total += abs(term)
        if n > amax and abs(term) <= tol * abs(total):
            break
    return total, abs_total


def _hciz_rank_one_closed(lam, t):
    big_n = len(lam)
    total = 0j
    worst = 0.0
    for i in range(big_n):
        denom = np.prod(lam[i] - np.delete(lam, i))
        term = np.exp(t * lam[i]) / denom
        total += term
        worst = max(worst, abs(term))
    pref = math.factorial(big_n - 1) / t ** (big_n - 1)
    return pref * total, abs(pref) * worst


def hciz_rank_one(lam, t, method="auto"):
    """``int_U(N) exp(t (U Lambda U*)_11) dU`` for ``Lambda = diag(lam)``.

    Closed form ``(N-1)!/t^(N-1) sum_i exp(t l_i) / prod_{j != i} (l_i - l_j)``;
    series form ``sum_n (N-1)!/(N+n-1)! t^n h_n(lam)``.

    Parameters
    ----------
    method : {"auto", "closed", "series"}
        ``"auto"`` evaluates whichever form has the smaller rounding-error
        estimate.  Near-degenerate eigenvalues or small ``t`` therefore fall
        back to the series, truncated at relative tail 1e-14.
    """
    lam = np.asarray(lam, dtype=np.complex128).ravel()
    t = complex(t)
    big_n = len(lam)
    if big_n == 0:
        raise DomainError("need at least one eigenvalue")
    if big_n == 1:
        return complex(np.exp(t * lam[0]))
    gaps = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(big_n, 1)]
    closed_ok = t != 0 and np.min(gaps) > 0
    if method == "closed":
        if not closed_ok:
            raise ConditioningError("closed form needs distinct eigenvalues and t != 0")
        return complex(_hciz_rank_one_closed(lam, t)[0])
    series, series_abs = _hciz_rank_one_series(lam, t)
    if method == "series" or not closed_ok:
        return complex(series)
    closed, closed_abs = _hciz_rank_one_closed(lam, t)
    scale = max(abs(series), abs(closed), 1e-300)
    if closed_abs / scale < series_abs / scale:
        return complex(closed)
    return complex(series)


def _vandermonde(x):
    # prod_{i<j} (x_i - x_j)
    x = np.asarray(x)
    iu = np.triu_indices(len(x), 1)
    return np.prod((x[:, None] - x[None, :])[iu])


def hciz_full(lam, gam, beta=1.0):
    """``int_U(N) exp(beta Tr[U Lambda U* Gamma]) dU`` by the determinantal formula.

    ``beta^(-N(N-1)/2) (prod_{k<N} k!) det[exp(beta l_i g_j)] / (Delta(lam) Delta(gam))``
    with ``Delta(x) = prod_{i<j} (x_i - x_j)``.

    Raises
    ------
    ConditioningError
        If two eigenvalues of either matrix are closer than 1e-8 after
        scaling by the largest magnitude.
    """
    lam = np.asarray(lam, dtype=np.complex128).ravel()
    gam = np.asarray(gam, dtype=np.complex128).ravel()
    big_n = len(lam)
    if len(gam) != big_n:
        raise DomainError("Lambda and Gamma must have the same size")
    beta = complex(beta)
    if beta == 0:
        return 1.0 + 0j
    for name, v in (("Lambda", lam), ("Gamma", gam)):
        scale = max(1.0, float(np.max(np.abs(v))))
        gaps = np.abs(v[:, None] - v[None, :])[np.triu_indices(big_n, 1)]
        if len(gaps) and np.min(gaps) / scale <= 1e-8:
            k = int(np.argmin(gaps))
            raise ConditioningError(f"{name} has near-degenerate eigenvalues (gap {np.min(gaps):.2e})", index=k)
    m = np.exp(beta * lam[:, None] * gam[None, :])
    log_pref = sum(math.lgamma(k + 1) for k in range(big_n))
    pref = math.exp(log_pref) * beta ** (-(big_n * (big_n - 1) // 2))
    return complex(pref * np.linalg.det(m) / (_vandermonde(lam) * _vandermonde(gam)))


def _hciz_samples(lam, gam, beta, rng, count):
    u = sample_cue(len(lam), rng, count)
    w = np.abs(u) ** 2
    # Tr[U L U* G] = sum_ij g_i |U_ij|^2 l_j
    return np.exp(beta * np.einsum("i,mij,j->m", gam, w, lam))


def hciz_mc(lam, gam, beta=1.0, m_samples=100000, seed=None, workers=1):
    """Monte-Carlo estimate of the HCIZ integral over Haar unitaries."""
    lam = np.asarray(lam, dtype=np.complex128).ravel()
    gam = np.asarray(gam, dtype=np.complex128).ravel()
    seed = resolve_seed(seed)
    values = run_blocks(partial(_hciz_samples, lam, gam, complex(beta)), m_samples, seed, workers)
    return MCEstimate.from_samples(values, seed)
