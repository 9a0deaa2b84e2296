"""Monic orthogonal polynomials for weights ``exp(-N V(x)) dx`` and their quadratures.

Recurrence convention::

    pi_{k+1}(x) = (x - b_k) pi_k(x) - c_k pi_{k-1}(x),   pi_{-1} = 0, pi_0 = 1

``c[0]`` stores the total mass of the measure and is not used by the recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_legendre

from .ensembles import Potential
from .errors import ConditioningError, SizeError

STIELTJES_MAX_K = 20


# ---------------------------------------------------------------- Hermite case


def hermite_monic(k, n_param, x):
    """Monic orthogonal polynomial of degree ``k`` for the weight ``exp(-n_param x^2 / 2)``.

    Uses ``pi_{k+1} = x pi_k - (k / n_param) pi_{k-1}``; accepts complex ``x``
    (scalar or array).

    Examples
    --------
    >>> hermite_monic(2, 4, 1.0)
    (0.75+0j)
    """
    x = np.asarray(x, dtype=np.complex128)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        prev, cur = cur, x * cur - (j / n_param) * prev
    return cur[()] if cur.ndim == 0 else cur


def hermite_monic_scaled(k, n_param, x):
    """``(pi_k(x), pi_{k+1}(x))`` divided by a common factor ``exp(log_scale)``.

    The recurrence is renormalized whenever the magnitude leaves ``[1e-100, 1e100]``
    so that degrees in the hundreds neither overflow nor underflow.

    Returns
    -------
    pk, pk1 : complex ndarray
    log_scale : ndarray
    """
    x = np.asarray(x, dtype=np.complex128)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    log_scale = np.zeros(x.shape)
    for j in range(k + 1):
        prev, cur = cur, x * cur - (j / n_param) * prev
        mag = np.maximum(np.abs(cur), np.abs(prev))
        big = (mag > 1e100) | ((mag < 1e-100) & (mag > 0))
        if np.any(big):
            f = np.where(big, mag, 1.0)
            cur = cur / f
            prev = prev / f
            log_scale = log_scale + np.log(f)
    return prev, cur, log_scale


def hermite_recurrence(n_param, k_max):
    """Closed-form recurrence for ``V(x) = x^2/2``: ``b_k = 0``, ``c_k = k / n_param``."""
    c = np.arange(k_max + 1, dtype=float) / n_param
    c[0] = math.sqrt(2.0 * math.pi / n_param)
    return RecurrenceCoeffs(np.zeros(k_max + 1), c)


# ------------------------------------------------------------ general weights


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Three-term recurrence ``pi_{k+1} = (x - b_k) pi_k - c_k pi_{k-1}``."""

    b: np.ndarray
    c: np.ndarray

    @property
    def k_max(self):
        return len(self.b) - 1

    @property
    def mass(self):
        return float(self.c[0])

    def evaluate(self, k, x):
        """``pi_k(x)`` for complex ``x`` (scalar or array)."""
        if k > self.k_max + 1:
            raise SizeError(f"recurrence known up to degree {self.k_max + 1}, asked for {k}")
        x = np.asarray(x, dtype=np.complex128)
        prev = np.zeros_like(x)
        cur = np.ones_like(x)
        for j in range(k):
            prev, cur = cur, (x - self.b[j]) * cur - (self.c[j] if j > 0 else 0.0) * prev
        return cur[()] if cur.ndim == 0 else cur

    def monomial_coeffs(self, k):
        """Ascending power-basis coefficients of ``pi_k`` (leading entry exactly 1)."""
        prev = np.zeros(k + 1)
        cur = np.zeros(k + 1)
        cur[0] = 1.0
        for j in range(k):
            nxt = np.zeros(k + 1)
            nxt[1:] = cur[:-1]
            nxt -= self.b[j] * cur
            if j > 0:
                nxt -= self.c[j] * prev
            prev, cur = cur, nxt
        return cur

    def jacobi_matrix(self, m):
        return self.b[:m].copy(), np.sqrt(self.c[1:m])


def _support_radius(potential, n_param):
    # where n_param * (V(x) - min V) exceeds ~800 the weight is below double range
    v = potential
    xs = np.linspace(-50, 50, 20001)
    vmin = float(np.min(v(xs)))
    r = 1.0
    while n_param * (float(min(v(r), v(-r))) - vmin) < 800.0:
        r *= 1.25
        if r > 1e6:
            raise ConditioningError("could not bracket the support of the weight")
    return r


def discretized_measure(potential, n_param, panels=64, order=40):
    """Composite Gauss-Legendre discretization of ``exp(-n_param V(x)) dx``.

    Returns nodes and weights whose weighted sums integrate polynomials of
    moderate degree against the measure to near machine precision.
    """
    if not isinstance(potential, Potential):
        potential = Potential(tuple(potential))
    r = _support_radius(potential, n_param)
    t, w = roots_legendre(order)
    edges = np.linspace(-r, r, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wx = (half[:, None] * w[None, :]).ravel() * np.exp(-n_param * potential(x))
    return x, wx


def monic_ops_from_potential(potential, n_param, k_max):
    """Recurrence coefficients for ``exp(-n_param V(x)) dx`` by the discretized Stieltjes procedure.

    Parameters
    ----------
    potential : Potential
    n_param : float
        The ``N`` in ``exp(-N V)``.
    k_max : int
        Highest index of ``b`` and ``c`` returned (at most 20).

    Raises
    ------
    ConditioningError
        If a squared norm stops being positive; ``index`` names the degree.
    """
    if k_max > STIELTJES_MAX_K:
        raise SizeError(f"k_max <= {STIELTJES_MAX_K} for general potentials, got {k_max}")
    if not isinstance(potential, Potential):
        potential = Potential(tuple(potential))
    x, w = discretized_measure(potential, n_param)
    b = np.zeros(k_max + 1)
    c = np.zeros(k_max + 1)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    norm_prev = None
    for k in range(k_max + 1):
        norm = float(np.sum(w * cur * cur))
        if not norm > 0:
            raise ConditioningError(f"squared norm of pi_{k} is not positive", index=k)
        b[k] = float(np.sum(w * x * cur * cur)) / norm
        if k == 0:
            c[0] = norm
        else:
            c[k] = norm / norm_prev
            if not c[k] > 0:
                raise ConditioningError(f"recurrence weight c_{k} lost positivity", index=k)
        prev, cur = cur, (x - b[k]) * cur - (c[k] if k > 0 else 0.0) * prev
        norm_prev = norm
    if potential.is_even:
        # parity kills b_k exactly; what remains is rounding
        b[:] = 0.0
    return RecurrenceCoeffs(b, c)


def gauss_from_recurrence(rec, n_nodes):
    """Gauss nodes and weights (Golub-Welsch) from the first ``n_nodes`` recurrence terms."""
    if n_nodes > rec.k_max + 1:
        raise SizeError(f"need recurrence up to index {n_nodes - 1}, have {rec.k_max}")
    d, e = rec.jacobi_matrix(n_nodes)
    if n_nodes == 1:
        return d.copy(), np.array([rec.mass])
    nodes, vecs = eigh_tridiagonal(d, e)
    weights = rec.mass * vecs[0, :] ** 2
    return nodes, weights


def quadrature(potential, n_param, n_nodes, degree=None):
    """Gauss quadrature for ``exp(-n_param V(x)) dx``.

    Exact for polynomials up to degree ``2 n_nodes - 1`` against the
    discretized measure.  Pass ``degree`` to have a shortfall raised instead of
    silently returning an inexact rule.
    """
    if degree is not None and degree > 2 * n_nodes - 1:
        raise SizeError(f"{n_nodes} nodes integrate degree <= {2 * n_nodes - 1}, asked for {degree}")
    if not isinstance(potential, Potential):
        potential = Potential(tuple(potential))
    if potential.is_gaussian:
        rec = hermite_recurrence(n_param, n_nodes)
    else:
        rec = monic_ops_from_potential(potential, n_param, n_nodes)
    return gauss_from_recurrence(rec, n_nodes)
