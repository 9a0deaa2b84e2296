"""Compiled inner loops for the exponential-time permanent kernels.

Everything here operates on contiguous ``complex128`` arrays that the public
wrappers in :mod:`permpoly.perm_core` have already validated.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _trailing_zeros(k):
    j = 0
    while (k & 1) == 0:
        k >>= 1
        j += 1
    return j


@njit(cache=True)
def ryser(a):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rows = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    in_set = np.zeros(n, dtype=np.bool_)
    size = 0
    for k in range(1, 1 << n):
        j = _trailing_zeros(k)
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(n):
                rows[i] -= a[i, j]
        else:
            in_set[j] = True
            size += 1
            for i in range(n):
                rows[i] += a[i, j]
        prod = rows[0]
        for i in range(1, n):
            prod *= rows[i]
        if size & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        return -total
    return total


@njit(cache=True)
def ryser_sub(a, idx, m, rows, in_set):
    # permanent of a[idx[:m]][:, idx[:m]] using caller-provided scratch buffers
    if m == 0:
        return 1.0 + 0.0j
    for i in range(m):
        rows[i] = 0.0
        in_set[i] = False
    total = 0.0 + 0.0j
    size = 0
    for k in range(1, 1 << m):
        j = _trailing_zeros(k)
        cj = idx[j]
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(m):
                rows[i] -= a[idx[i], cj]
        else:
            in_set[j] = True
            size += 1
            for i in range(m):
                rows[i] += a[idx[i], cj]
        prod = rows[0]
        for i in range(1, m):
            prod *= rows[i]
        if size & 1:
            total -= prod
        else:
            total += prod
    if m & 1:
        return -total
    return total


@njit(cache=True)
def glynn(a):
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    rows = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            rows[i] += a[i, j]
    delta = np.ones(n, dtype=np.int8)
    sign = 1
    prod = rows[0]
    for i in range(1, n):
        prod *= rows[i]
    total = prod
    for k in range(1, 1 << (n - 1)):
        j = _trailing_zeros(k) + 1
        if delta[j] == 1:
            delta[j] = -1
            for i in range(n):
                rows[i] -= 2.0 * a[i, j]
        else:
            delta[j] = 1
            for i in range(n):
                rows[i] += 2.0 * a[i, j]
        sign = -sign
        prod = rows[0]
        for i in range(1, n):
            prod *= rows[i]
        if sign > 0:
            total += prod
        else:
            total -= prod
    return total / (1 << (n - 1))


@njit(cache=True)
def ryser_batch(stack):
    out = np.empty(stack.shape[0], dtype=np.complex128)
    for b in range(stack.shape[0]):
        out[b] = ryser(stack[b])
    return out


@njit(cache=True)
def perm_poly_minors(a):
    """Ascending coefficients of Per(mu*I - a) from principal-minor sums."""
    n = a.shape[0]
    elem = np.zeros(n + 1, dtype=np.complex128)
    elem[0] = 1.0
    idx = np.empty(n, dtype=np.int64)
    rows = np.empty(n, dtype=np.complex128)
    in_set = np.empty(n, dtype=np.bool_)
    for mask in range(1, 1 << n):
        m = 0
        for i in range(n):
            if (mask >> i) & 1:
                idx[m] = i
                m += 1
        elem[m] += ryser_sub(a, idx, m, rows, in_set)
    coeffs = np.empty(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        # mu^(n-k) carries (-1)^k e_k
        if k & 1:
            coeffs[n - k] = -elem[k]
        else:
            coeffs[n - k] = elem[k]
    return coeffs


@njit(cache=True)
def perm_poly_ryser(a):
    """Ascending coefficients of Per(mu*I - a) from a polynomial-valued Ryser sum.

    For a column subset S the row sums of ``mu*I - a`` are ``mu*[i in S] - s_i``,
    so each Ryser term is a polynomial of degree ``|S|``; O(2^n n^2) overall.
    """
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    if n == 0:
        coeffs[0] = 1.0
        return coeffs
    rows = np.zeros(n, dtype=np.complex128)
    in_set = np.zeros(n, dtype=np.bool_)
    work = np.zeros(n + 1, dtype=np.complex128)
    size = 0
    for k in range(1, 1 << n):
        j = _trailing_zeros(k)
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(n):
                rows[i] -= a[i, j]
        else:
            in_set[j] = True
            size += 1
            for i in range(n):
                rows[i] += a[i, j]
        scalar = 1.0 + 0.0j
        for i in range(n):
            if not in_set[i]:
                scalar *= -rows[i]
        if scalar == 0.0:
            continue
        work[0] = scalar
        deg = 0
        for i in range(n):
            if in_set[i]:
                # multiply by (mu - rows[i])
                work[deg + 1] = work[deg]
                for d in range(deg, 0, -1):
                    work[d] = work[d - 1] - rows[i] * work[d]
                work[0] = -rows[i] * work[0]
                deg += 1
        if (size & 1) == (n & 1):
            for d in range(deg + 1):
                coeffs[d] += work[d]
        else:
            for d in range(deg + 1):
                coeffs[d] -= work[d]
    return coeffs


@njit(cache=True)
def perm_poly_ryser_batch(stack):
    n = stack.shape[1]
    out = np.empty((stack.shape[0], n + 1), dtype=np.complex128)
    for b in range(stack.shape[0]):
        out[b] = perm_poly_ryser(stack[b])
    return out


@njit(cache=True)
def contour_reduced(f, k_points):
    """Trapezoid discretization of the n-fold z-contour form of the permanent.

    The first variable is pinned to 1: the integrand is invariant under a common
    phase rotation, so the remaining K^(n-1) grid points carry the whole sum.
    """
    n = f.shape[0]
    if n == 1:
        return f[0, 0] + 0.0j
    omega = np.empty(k_points, dtype=np.complex128)
    for m in range(k_points):
        omega[m] = np.exp(2j * np.pi * m / k_points)
    digits = np.zeros(n - 1, dtype=np.int64)
    base = np.empty(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    n_outer = k_points ** (n - 2)
    for outer in range(n_outer):
        # base row sums from z_0 = 1 and z_2..z_{n-1}
        outer_phase = 0
        for i in range(n):
            base[i] = f[i, 0]
        for d in range(1, n - 1):
            zj = omega[digits[d]]
            outer_phase += digits[d]
            for i in range(n):
                base[i] += f[i, d + 1] * zj
        for m in range(k_points):
            z1 = omega[m]
            prod = 1.0 + 0.0j
            for i in range(n):
                prod *= base[i] + f[i, 1] * z1
            total += prod * omega[(k_points - (outer_phase + m) % k_points) % k_points]
        # odometer over digits 1..n-2
        d = 1
        while d < n - 1:
            digits[d] += 1
            if digits[d] < k_points:
                break
            digits[d] = 0
            d += 1
    return total / k_points ** (n - 1)
