"""Exact and estimated matrix permanents and permanental polynomials.

All kernels accept any square array-like and work in ``complex128``.  The
permanental polynomial is returned as a :class:`numpy.polynomial.Polynomial`
with ascending complex coefficients, monic of degree ``n``.
"""

from __future__ import annotations

import itertools
import math
from functools import partial

import numpy as np
from numpy.polynomial import Polynomial

from . import _kernels
from ._sampling import MCEstimate, resolve_seed, run_blocks
from .errors import AliasingError, DomainError, SizeError

NAIVE_MAX_N = 10
RYSER_MAX_N = 32
CONTOUR_MAX_N = 8
CONTOUR_FULL_MAX_N = 2
MINORS_MAX_N = 14
POLY_RYSER_MAX_N = 20


def as_cmatrix(a):
    """Validate ``a`` as a finite square matrix and return it as complex128."""
    arr = np.ascontiguousarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _check_size(n, cap, name):
    if n > cap:
        raise SizeError(f"{name} supports n <= {cap}, got n = {n}")


def per_naive(a):
    """Permanent by summing over all n! permutations (n <= 10)."""
    a = as_cmatrix(a)
    n = a.shape[0]
    _check_size(n, NAIVE_MAX_N, "per_naive")
    rows = np.arange(n)
    perms = itertools.permutations(range(n))
    total = 0j
    # chunks of permutations keep memory flat at n = 10
    while True:
        chunk = np.array(list(itertools.islice(perms, 50000)), dtype=np.intp).reshape(-1, n)
        if chunk.shape[0] == 0:
            break
        total += np.prod(a[rows, chunk], axis=1).sum()
    return complex(total)


def per_ryser(a):
    """Permanent by Ryser's inclusion-exclusion with Gray-code subset updates.

    O(2^n n) time; n <= 32.
    """
    a = as_cmatrix(a)
    _check_size(a.shape[0], RYSER_MAX_N, "per_ryser")
    return complex(_kernels.ryser(a))


def per_glynn(a):
    """Permanent by Glynn's formula over +-1 sign vectors in Gray-code order.

    O(2^(n-1) n) time; n <= 32.
    """
    a = as_cmatrix(a)
    _check_size(a.shape[0], RYSER_MAX_N, "per_glynn")
    return complex(_kernels.glynn(a))


def per_ryser_batch(stack):
    """Ryser permanents of a stack of matrices with shape ``(m, n, n)``."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected shape (m, n, n), got {stack.shape}")
    _check_size(stack.shape[1], RYSER_MAX_N, "per_ryser_batch")
    return _kernels.ryser_batch(stack)


def per_contour(a, k_points=None, form="reduced"):
    """Permanent from the trapezoid rule on the unit-circle contour integral.

    Parameters
    ----------
    a : array_like
        Square matrix.
    k_points : int, optional
        Equispaced nodes per circle.  Defaults to ``n + 2`` for the reduced form
        and ``max(n + 2, 32)`` for the full form.
    form : {"reduced", "full"}
        ``"reduced"`` keeps only the n z-variables (the conjugate variables are
        integrated analytically), which makes the integrand a polynomial of
        degree <= n in every variable and the rule exact for ``K >= n + 2``.
        ``"full"`` discretizes all 2n circles of the exponential integrand;
        it is supported for n <= 2 and is exact only up to aliasing of the
        exponential's high-order terms.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    if form == "reduced":
        _check_size(n, CONTOUR_MAX_N, "per_contour (reduced)")
        k = n + 2 if k_points is None else int(k_points)
        if k < n + 2:
            raise AliasingError(f"K = {k} aliases the degree-1 coefficient; need K >= {n + 2}")
        return complex(_kernels.contour_reduced(a, k))
    if form == "full":
        _check_size(n, CONTOUR_FULL_MAX_N, "per_contour (full)")
        k = max(n + 2, 32) if k_points is None else int(k_points)
        if k < n + 2:
            raise AliasingError(f"K = {k} aliases the degree-1 coefficient; need K >= {n + 2}")
        value = _contour_full(a, k)
        # the first aliased terms of exp(xi* F z) have total degree n + K
        norm1 = float(np.abs(a).sum())
        bound = math.exp((n + k) * math.log(max(norm1, 1e-300)) - math.lgamma(n + k + 1))
        if bound > 1e-10 * max(1.0, abs(value)):
            raise AliasingError(f"K = {k} too small for the full form: alias bound {bound:.2e}")
        return value
    raise ValueError(f"unknown form {form!r}")


def _contour_full(a, k):
    n = a.shape[0]
    nodes = np.exp(2j * np.pi * np.arange(k) / k)
    grids = np.meshgrid(*([nodes] * (2 * n)), indexing="ij", sparse=True)
    z, xib = grids[:n], grids[n:]
    exponent = 0
    for i in range(n):
        for j in range(n):
            exponent = exponent + a[i, j] * xib[i] * z[j]
    weight = 1
    for g in grids:
        weight = weight * np.conj(g)
    return complex(np.mean(np.exp(exponent) * weight))


def perm_poly(a, method="minors"):
    """Permanental polynomial ``p(mu) = Per(mu I - a)``.

    Parameters
    ----------
    a : array_like
        Square matrix.
    method : {"minors", "ryser"}
        ``"minors"`` sums the permanents of all principal submatrices of each
        size (n <= 14).  ``"ryser"`` runs one Ryser sum whose row sums are
        linear polynomials in ``mu`` (n <= 20, O(2^n n^2)).

    Returns
    -------
    numpy.polynomial.Polynomial
        Monic, degree ``n``, ascending coefficients.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    if method == "minors":
        _check_size(n, MINORS_MAX_N, "perm_poly (minors)")
        coeffs = _kernels.perm_poly_minors(a)
    elif method == "ryser":
        _check_size(n, POLY_RYSER_MAX_N, "perm_poly (ryser)")
        coeffs = _kernels.perm_poly_ryser(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    coeffs[n] = 1.0
    return Polynomial(coeffs)


def perm_poly_batch(stack):
    """Coefficient rows (ascending) of the permanental polynomials of a stack."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected shape (m, n, n), got {stack.shape}")
    n = stack.shape[1]
    _check_size(n, POLY_RYSER_MAX_N, "perm_poly_batch")
    out = _kernels.perm_poly_ryser_batch(stack)
    out[:, n] = 1.0
    return out


def _bose_samples(factor, rng, count):
    n = factor.shape[0]
    v = (rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))) / np.sqrt(2.0)
    w = v @ factor.T
    return np.prod(w.real ** 2 + w.imag ** 2, axis=1)


def per_gaussian_estimate(f, m_samples, seed=None, workers=1):
    """Unbiased Monte-Carlo estimate of the permanent of a positive-definite matrix.

    Writes ``F = E E*`` (Cholesky) and averages ``prod_i |(E v)_i|^2`` over
    standard complex Gaussian vectors ``v`` (``E|v_i|^2 = 1``).

    Returns
    -------
    MCEstimate
        Use ``relative_stderr`` to detect variance blow-up.
    """
    f = as_cmatrix(f)
    if not np.allclose(f, f.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(f).max())):
        raise DomainError("matrix is not Hermitian")
    eig = np.linalg.eigvalsh(f)
    if eig[0] <= 0:
        raise DomainError(f"matrix is not positive definite (smallest eigenvalue {eig[0]:.3g})")
    factor = np.linalg.cholesky(f)
    seed = resolve_seed(seed)
    values = run_blocks(partial(_bose_samples, factor), m_samples, seed, workers)
    return MCEstimate.from_samples(values, seed)
