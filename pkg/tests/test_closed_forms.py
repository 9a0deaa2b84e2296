"""Closed forms against independent oracles.

Gaussian expectations of small permanents are computed symbolically by Wick
moments (sympy), rank-one unitary integrals by the hypergeometric series
(mpmath), and unitary-invariant means by direct eigenvalue quadrature (scipy).
"""

import itertools
import math
from functools import lru_cache

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from conftest import complex_scalars
from permpoly import closed_forms as cf
from permpoly.ensembles import Potential
from permpoly.errors import ConditioningError, DomainError, SizeError

# ----------------------------------------------------------------- oracles


def _gauss_moment(var, p):
    if p % 2:
        return 0
    return var ** (p // 2) * sp.factorial2(p - 1) if p else 1


def _expect(expr, variances):
    """Expectation of a polynomial in independent centred Gaussians."""
    syms = list(variances)
    poly = sp.Poly(sp.expand(expr), *syms)
    total = 0
    for powers, coeff in poly.terms():
        term = coeff
        for s, p in zip(syms, powers):
            term *= _gauss_moment(variances[s], p)
        total += term
    return total


@lru_cache(maxsize=None)
def _hermitian_symbolic(n, real):
    """Symbolic Hermitian (or real symmetric) matrix and the variances of its parts."""
    n_r = sp.Rational(n)
    h = sp.zeros(n, n)
    var = {}
    for i in range(n):
        x = sp.Symbol(f"x{i}", real=True)
        h[i, i] = x
        var[x] = 1 / n_r
        for j in range(i + 1, n):
            u = sp.Symbol(f"u{i}{j}", real=True)
            if real:
                h[i, j] = h[j, i] = u
                var[u] = 1 / (2 * n_r)
            else:
                v = sp.Symbol(f"v{i}{j}", real=True)
                h[i, j] = u + sp.I * v
                h[j, i] = u - sp.I * v
                var[u] = var[v] = 1 / (2 * n_r)
    return h, var


def _per_sym(m):
    n = m.shape[0]
    return sum(sp.prod(m[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def _sym_c(z):
    z = complex(z)
    return sp.Rational(z.real).limit_denominator(10 ** 6) + sp.I * sp.Rational(z.imag).limit_denominator(10 ** 6)


def wick_two_point(n, mu1, mu2, real=False):
    h, var = _hermitian_symbolic(n, real)
    eye = sp.eye(n)
    expr = _per_sym(_sym_c(mu1) * eye - h) * _per_sym(_sym_c(mu2) * eye - h)
    return complex(sp.N(_expect(expr, var), 30))


def wick_mean(n, mu, real=False):
    h, var = _hermitian_symbolic(n, real)
    return complex(sp.N(_expect(_per_sym(_sym_c(mu) * sp.eye(n) - h), var), 30))


def wick_ginibre_two_point(n, a, b):
    syms, var = [], {}
    z = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            x, y = sp.symbols(f"x{i}{j} y{i}{j}", real=True)
            z[i, j] = x + sp.I * y
            var[x] = var[y] = sp.Rational(1, 2 * n)
            syms += [x, y]
    eye = sp.eye(n)
    pa = _per_sym(_sym_c(a) * eye - z)
    pb = _per_sym(_sym_c(b) * eye - z)
    return complex(sp.N(_expect(pa * sp.conjugate(pb), var), 30))


MUS = [0.3, 0.4 + 0.5j, -1.2 + 0.1j]

# ---------------------------------------------------------------- Gaussian


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu", MUS)
def test_gue_mean_matches_wick(n, mu):
    assert cf.mean_perm_poly_gue(n, mu) == pytest.approx(wick_mean(n, mu), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu", MUS)
def test_goe_mean_matches_wick(n, mu):
    assert cf.mean_perm_poly_goe(n, mu) == pytest.approx(wick_mean(n, mu, real=True), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu1,mu2", [(0.3, -0.1), (0.4 + 0.5j, 0.7), (-1.2 + 0.1j, 0.2 - 0.3j)])
def test_gue_two_point_matches_wick(n, mu1, mu2):
    assert cf.two_point_gue(n, mu1, mu2) == pytest.approx(wick_two_point(n, mu1, mu2), rel=1e-11)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("mu1,mu2", [(0.4, 0.2), (0.4 + 0.5j, 0.7), (-1.2 + 0.1j, 0.2 - 0.3j)])
def test_goe_two_point_matches_wick(n, mu1, mu2):
    assert cf.two_point_goe(n, mu1, mu2) == pytest.approx(wick_two_point(n, mu1, mu2, real=True), rel=1e-11)


@given(st.integers(1, 12), complex_scalars(), complex_scalars())
def test_gue_two_point_is_symmetric(n, mu1, mu2):
    assume(abs(mu1 + mu2) > 1e-3)
    a, b = cf.two_point_gue(n, mu1, mu2), cf.two_point_gue(n, mu2, mu1)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@given(st.integers(1, 15), complex_scalars())
def test_gue_two_point_confluent_limit_is_continuous(n, mu):
    eps = 1e-6
    near = cf.two_point_gue(n, mu, -mu + eps)
    at = cf.two_point_gue(n, mu, -mu, confluent=True)
    assert abs(near - at) <= 1e-4 * max(1.0, abs(at))


def test_gue_two_point_coincident_needs_confluent_flag():
    with pytest.raises(DomainError):
        cf.two_point_gue(3, 0.5, -0.5)


@given(st.integers(1, 20), complex_scalars(), complex_scalars())
def test_char_two_point_matches_christoffel_darboux(n, x, y):
    assume(abs(x - y) > 1e-2)
    a, b = cf.char_two_point_gue(n, x, y), cf.char_two_point_gue_cd(n, x, y)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


def test_gue_mean_char_poly_is_hermite():
    # the averaged characteristic polynomial is the monic Hermite polynomial itself
    mu = np.linspace(-2, 2, 7)
    from permpoly.orthopoly import hermite_monic

    np.testing.assert_allclose(cf.mean_char_poly_gue(5, mu), hermite_monic(5, 5, mu), rtol=1e-13, atol=1e-14)


def test_goe_two_point_rejects_large_moment_expansion():
    with pytest.raises(SizeError):
        cf.two_point_goe(cf.gaussian.GOE_MOMENTS_MAX_N + 1, 0.1, 0.2)


def test_goe_two_point_mc_agrees_with_moments():
    est = cf.two_point_goe(3, 0.4, 0.2, method="mc", m_samples=100000, seed=1)
    assert est.z_score(cf.two_point_goe(3, 0.4, 0.2)) < 4


@pytest.mark.parametrize("n", range(1, 9))
def test_gaussian_general_mean_matches_gue(n):
    p = cf.mean_perm_poly_general(Potential.gaussian(), n)
    for mu in MUS:
        assert p(mu) == pytest.approx(cf.mean_perm_poly_gue(n, mu), rel=1e-9, abs=1e-10)


def _eigen_quadrature_mean_n2(pot, mu):
    # n = 2: E Per(mu - H) = mu^2 - mu E tr H + E[l1 l2 + (l1 - l2)^2 / 3] (Haar average of |h12|^2)
    w = lambda a, b: (a - b) ** 2 * math.exp(-2 * (pot(a) + pot(b)))  # noqa: E731
    lim = 8.0
    z = integrate.dblquad(lambda a, b: w(a, b), -lim, lim, -lim, lim, epsabs=1e-12, epsrel=1e-11)[0]
    e_tr = integrate.dblquad(lambda a, b: (a + b) * w(a, b), -lim, lim, -lim, lim, epsabs=1e-12, epsrel=1e-11)[0] / z
    e_c = integrate.dblquad(lambda a, b: (a * b + (a - b) ** 2 / 3) * w(a, b), -lim, lim, -lim, lim, epsabs=1e-12, epsrel=1e-11)[0] / z
    return mu * mu - mu * e_tr + e_c


@pytest.mark.parametrize("coeffs", [(0, 0, 0.5, 0, 0.1), (0, 0.3, 0.25, 0, 0.2), (0, 0, -0.5, 0, 0.25)])
def test_general_mean_matches_eigenvalue_quadrature(coeffs):
    pot = Potential(coeffs)
    p = cf.mean_perm_poly_general(pot, 2)
    for mu in (0.0, 0.7, -0.4 + 0.3j):
        assert p(mu) == pytest.approx(_eigen_quadrature_mean_n2(pot, mu), rel=1e-7, abs=1e-9)


def test_general_mean_coefficient_ratio_is_gaussian_normalization():
    a = cf.mean_perm_poly_coefficients(Potential.gaussian(), 4)
    assert a[4] == pytest.approx(cf.gaussian_normalization(4), rel=1e-10)


@pytest.mark.parametrize("delta", [0.5, 1.5, 3.0])
def test_dyson_ratio_approaches_sine_kernel(delta):
    e100 = abs(cf.dyson_kernel_ratio(100, 0.0, delta) - math.sin(delta) / delta)
    e400 = abs(cf.dyson_kernel_ratio(400, 0.0, delta) - math.sin(delta) / delta)
    assert e400 < e100 and e400 < 5e-3


def test_semicircle_integrates_to_one():
    val, _ = integrate.quad(lambda x: cf.semicircle(x), -2, 2)
    assert val == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------- circular


def test_cue_and_ginibre_n1():
    a, b = 0.3 + 0.2j, -0.5j
    for f in (cf.two_point_cue, cf.two_point_ginibre):
        for form in ("sum", "integral"):
            assert f(1, a, b, form) == pytest.approx(1 + a * np.conj(b), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("a,b", [(0.3 + 0.2j, -0.5j), (0.9, 0.1 + 0.4j)])
def test_ginibre_two_point_matches_wick(n, a, b):
    assert cf.two_point_ginibre(n, a, b) == pytest.approx(wick_ginibre_two_point(n, a, b), rel=1e-12)


@given(st.integers(1, 20), complex_scalars(1.0), complex_scalars(1.0))
def test_circular_two_point_hermitian_symmetry(n, a, b):
    for f in (cf.two_point_cue, cf.two_point_ginibre):
        x, y = f(n, a, b), f(n, b, a)
        assert abs(x - np.conj(y)) <= 1e-12 * max(1.0, abs(x))


@given(st.integers(1, 20), complex_scalars(1.0), complex_scalars(1.0), st.floats(0, 2 * math.pi))
def test_circular_two_point_is_rotation_invariant(n, a, b, theta):
    r = complex(math.cos(theta), math.sin(theta))
    for f in (cf.two_point_cue, cf.two_point_ginibre):
        x = f(n, a, b)
        assert abs(f(n, a * r, b * r) - x) <= 1e-11 * max(1.0, f(n, abs(a * b), 1.0).real)


@given(st.integers(1, 20), complex_scalars(1.0), complex_scalars(1.0))
def test_circular_sum_equals_integral(n, a, b):
    for f in (cf.two_point_cue, cf.two_point_ginibre):
        scale = f(n, abs(a * b), 1.0).real
        assert abs(f(n, a, b, "integral") - f(n, a, b)) <= 1e-10 * scale


@pytest.mark.parametrize("n", [1, 5, 40, 300])
@pytest.mark.parametrize("r2", [0.0, 0.3, 1.0, 2.5])
def test_log_diagonal_forms(n, r2):
    a = math.sqrt(r2)
    if n <= 40:
        assert cf.log_two_point_cue_diag(n, r2) == pytest.approx(math.log(cf.two_point_cue(n, a, a).real), rel=1e-12, abs=1e-12)
        assert cf.log_two_point_ginibre_diag(n, r2) == pytest.approx(math.log(cf.two_point_ginibre(n, a, a).real), rel=1e-12, abs=1e-12)
    assert math.isfinite(cf.log_two_point_cue_diag(n, r2))


@pytest.mark.parametrize("n", [2, 3, 6, 10])
@pytest.mark.parametrize("v2", [0.5, -3.0, 4.0, 1.5 + 2j])
def test_fk_rank_one_matches_hypergeometric(n, v2):
    ref = complex(mpmath.hyp0f1(n, v2))
    for method in ("series", "quadrature"):
        assert cf.fk_rank_one(v2, n, method) == pytest.approx(ref, rel=1e-11)


def test_fk_rank_one_rejects_n1():
    with pytest.raises(DomainError):
        cf.fk_rank_one(1.0, 1)


def test_fk_mc_matches_series():
    est = cf.fk_mc(0.8 + 0.3j, 1.1 - 0.4j, 3, 100000, seed=2)
    assert est.z_score(cf.fk_rank_one((0.8 + 0.3j) * (1.1 - 0.4j), 3)) < 4


# --------------------------------------------------------- group integrals


@given(st.integers(0, 6), st.lists(st.floats(-2, 2), min_size=1, max_size=4))
def test_complete_symmetric_matches_brute_force(n, x):
    ref = sum(math.prod(c) for c in itertools.combinations_with_replacement(x, n))
    assert cf.complete_symmetric(n, x) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(st.integers(-3, 6), st.lists(st.floats(-2, 2), min_size=2, max_size=4, unique=True))
def test_divided_difference_identity(n, x):
    x = np.array(x)
    gaps = np.abs(np.subtract.outer(x, x))[np.triu_indices(len(x), 1)]
    assume(gaps.min() > 0.05)
    if n < 1 - len(x):
        with pytest.raises(DomainError):
            cf.identity_check_symfun1(n, x)
        return
    _, _, res = cf.identity_check_symfun1(n, x)
    assert res < 1e-9


def test_complete_symmetric_negative_degree():
    assert cf.complete_symmetric(-1, [1.0, 2.0]) == 0.0


@given(st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2, unique=True), st.floats(0.1, 3.0))
def test_hciz_rank_one_n2_closed_form(lam, t):
    l1, l2 = lam
    assume(abs(l1 - l2) > 1e-3)
    ref = (math.exp(t * l1) - math.exp(t * l2)) / (t * (l1 - l2))
    for method in ("closed", "series", "auto"):
        assert cf.hciz_rank_one(lam, t, method) == pytest.approx(ref, rel=1e-9)


@given(
    st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2),
    st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2),
    st.floats(0.2, 2.0),
)
def test_hciz_full_n2_closed_form(lam, gam, beta):
    (a1, a2), (b1, b2) = lam, gam
    assume(abs(a1 - a2) > 1e-2 and abs(b1 - b2) > 1e-2)
    ref = (math.exp(beta * (a1 * b1 + a2 * b2)) - math.exp(beta * (a1 * b2 + a2 * b1))) / (beta * (a1 - a2) * (b1 - b2))
    assert cf.hciz_full(lam, gam, beta) == pytest.approx(ref, rel=1e-9)


def test_hciz_full_reduces_to_rank_one():
    lam = [0.3, -0.5]
    assert cf.hciz_full(lam, [1.7, 0.0]) == pytest.approx(cf.hciz_rank_one(lam, 1.7), rel=1e-12)


def test_hciz_rank_one_near_degenerate_falls_back_to_series():
    lam = [0.2, 0.2 + 1e-10, -0.4]
    ref = cf.hciz_rank_one(lam, 1.0, "series")
    assert cf.hciz_rank_one(lam, 1.0) == pytest.approx(ref, rel=1e-12)


def test_hciz_full_degenerate_spectrum_raises():
    with pytest.raises(ConditioningError):
        cf.hciz_full([0.1, 0.1], [1.0, 2.0])


@pytest.mark.parametrize("n", [2, 3])
def test_hciz_mc(n):
    rng = np.random.default_rng(n)
    lam, gam = np.sort(rng.uniform(-1, 1, n)), np.sort(rng.uniform(-1, 1, n))
    est = cf.hciz_mc(lam, gam, 1.0, 50000, seed=n)
    assert est.z_score(cf.hciz_full(lam, gam)) < 4


# -------------------------------------------------------------- asymptotics


@pytest.mark.parametrize("kind", cf.PHI_KINDS)
@pytest.mark.parametrize("z", [0.3 + 0.5j, 1.4 - 0.2j, -0.8 + 1.1j])
def test_finite_phi_converges(kind, z):
    e200 = abs(cf.finite_phi(kind, 200, z) - cf.asymptotic_phi(kind, z))
    e400 = abs(cf.finite_phi(kind, 400, z) - cf.asymptotic_phi(kind, z))
    assert e400 < 0.02 and e400 <= 0.6 * e200 + 1e-12


@pytest.mark.parametrize("kind", cf.DENSITY_KINDS)
def test_profiles_have_unit_mass(kind):
    assert cf.AsymptoticProfile.for_kind(kind).mass() == pytest.approx(1.0, abs=1e-8)


@given(complex_scalars(3.0))
def test_gue_phi_is_even_in_both_axes(z):
    f = lambda w: cf.asymptotic_phi("GUE", w)  # noqa: E731
    assert f(z) == pytest.approx(f(z.conjugate()), rel=1e-12, abs=1e-12)
    assert f(z) == pytest.approx(f(-z), rel=1e-12, abs=1e-12)


@given(complex_scalars(3.0))
def test_disk_phi_is_radial(z):
    for kind in ("CUE", "Ginibre", "CUE-char"):
        assert cf.asymptotic_phi(kind, z) == pytest.approx(cf.asymptotic_phi(kind, abs(z)), rel=1e-12, abs=1e-12)


def test_density_oracle_values():
    assert cf.density_oracle("Ginibre", 0.5j) == pytest.approx(1 / math.pi)
    assert cf.density_oracle("Ginibre", 1.5) == 0.0
    assert cf.density_oracle("CUE", 0.0) == pytest.approx(2 / math.pi)
    assert cf.density_oracle("GUE", 0.0) == pytest.approx(1 / math.pi)
    assert cf.density_oracle("GOE", 2.9j) == 0.0


@pytest.mark.parametrize("kind", ["CUE", "CUE-char"])
def test_disk_phi_is_continuous_across_the_unit_circle(kind):
    for theta in np.linspace(0, 2 * math.pi, 7):
        u = complex(math.cos(theta), math.sin(theta))
        inner, outer = cf.asymptotic_phi(kind, (1 - 1e-9) * u), cf.asymptotic_phi(kind, (1 + 1e-9) * u)
        assert abs(inner - outer) < 1e-7


def test_gue_phi_finite_off_the_axis():
    x = np.concatenate([np.linspace(-3, -0.05, 30), np.linspace(0.05, 3, 30)])
    z = x[:, None] + 1j * np.linspace(-4, 4, 41)[None, :]
    assert np.all(np.isfinite(cf.asymptotic_phi("GUE", z)))
