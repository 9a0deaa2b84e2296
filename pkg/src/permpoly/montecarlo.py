"""Monte-Carlo estimators that tie the ensemble samplers to the closed-form oracles.

Every estimator takes ``(m_samples, seed, workers)`` and is reproducible
bit for bit from the seed, whatever the worker count (see
:mod:`permpoly._sampling`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from numpy.polynomial import Polynomial

from ._sampling import MCEstimate, combined_z, resolve_seed, run_blocks
from .ensembles import EnsembleSpec, sample, sample_gue
from .errors import SizeError, UsageError
from .perm_core import MINORS_MAX_N, per_ryser_batch, perm_poly_batch

DUALITY_MAX = 6
MAINGAU_MOMENTS_MAX_N = 20


def _spec(spec):
    if isinstance(spec, EnsembleSpec):
        return spec
    if isinstance(spec, dict):
        return EnsembleSpec.from_dict(spec)
    raise TypeError("expected an EnsembleSpec or a dict")


def _check_m(m_samples):
    if int(m_samples) < 2:
        raise ValueError("need at least two samples")
    return int(m_samples)


# ------------------------------------------------------------- mean polynomial


@dataclass(frozen=True)
class MCPoly:
    """Per-sample permanental-polynomial coefficients with summary statistics.

    ``samples`` has shape ``(n_samples, n + 1)`` with ascending coefficients.
    """

    samples: np.ndarray
    seed: int

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def degree(self):
        return self.samples.shape[1] - 1

    @property
    def coeffs(self):
        """One :class:`MCEstimate` per coefficient, ascending."""
        return [MCEstimate.from_samples(self.samples[:, k], self.seed) for k in range(self.degree + 1)]

    @property
    def mean(self):
        return Polynomial(self.samples.mean(axis=0))

    def at(self, mu):
        """Estimate of ``<p(mu)>`` with the stderr of the per-sample values."""
        powers = complex(mu) ** np.arange(self.degree + 1)
        return MCEstimate.from_samples(self.samples @ powers, self.seed)


def _poly_samples(spec, rng, count):
    return perm_poly_batch(sample(spec, rng, count))


def mc_mean_perm_poly(spec, m_samples, seed=None, workers=1):
    """Coefficientwise Monte-Carlo mean of ``Per(mu I - H)`` over ``spec``.

    The leading coefficient is exactly 1 in every sample, so its stderr is 0.
    """
    spec = _spec(spec)
    if spec.n > MINORS_MAX_N:
        raise SizeError(f"mc_mean_perm_poly supports n <= {MINORS_MAX_N}")
    m = _check_m(m_samples)
    seed = resolve_seed(seed)
    return MCPoly(run_blocks(partial(_poly_samples, spec), m, seed, workers), seed)


# ------------------------------------------------------------ two-point

def _shifted(mats, mu):
    n = mats.shape[-1]
    return mu * np.eye(n) - mats


def _two_point_samples(spec, mu1, mu2, conjugate, use_det, rng, count):
    mats = sample(spec, rng, count)
    f = np.linalg.det if use_det else per_ryser_batch
    a = f(_shifted(mats, mu1))
    b = f(_shifted(mats, mu2))
    return a * (np.conj(b) if conjugate else b)


def _resolve_conjugate(spec, conjugate_second):
    if spec.hermitian:
        return bool(conjugate_second) if conjugate_second is not None else False
    if conjugate_second is None:
        raise UsageError(f"{spec.kind} correlators pair p with conj(p); pass conjugate_second=True")
    return bool(conjugate_second)


def mc_two_point(spec, mu1, mu2, m_samples, seed=None, conjugate_second=None, workers=1):
    """Monte-Carlo ``<p(mu1) p(mu2)>``, or ``<p(mu1) conj(p(mu2))>`` when conjugated.

    For CUE and Ginibre the flag ``conjugate_second`` must be given
    explicitly.  The unconjugated product has no closed-form counterpart
    there.
    """
    spec = _spec(spec)
    conj = _resolve_conjugate(spec, conjugate_second)
    m = _check_m(m_samples)
    seed = resolve_seed(seed)
    fn = partial(_two_point_samples, spec, complex(mu1), complex(mu2), conj, False)
    return MCEstimate.from_samples(run_blocks(fn, m, seed, workers), seed)


def mc_char_two_point(spec, mu1, mu2, m_samples, seed=None, conjugate_second=None, workers=1):
    """As :func:`mc_two_point` with characteristic polynomials ``det(mu I - H)``."""
    spec = _spec(spec)
    conj = _resolve_conjugate(spec, conjugate_second)
    m = _check_m(m_samples)
    seed = resolve_seed(seed)
    fn = partial(_two_point_samples, spec, complex(mu1), complex(mu2), conj, True)
    return MCEstimate.from_samples(run_blocks(fn, m, seed, workers), seed)


# ------------------------------------------------------------ duality


@dataclass(frozen=True)
class DualityReport:
    """Both sides of the GUE duality relation and the z-score of their difference."""

    n: int
    big_n: int
    mu: float
    lhs: MCEstimate
    rhs: MCEstimate
    z: float

    def to_dict(self):
        return {
            "n": self.n,
            "N": self.big_n,
            "mu": self.mu,
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "z": self.z,
        }


def _power_perm_samples(dim, scale, mu, power, rng, count):
    h = sample_gue(dim, rng, count, scale=scale)
    return per_ryser_batch(_shifted(h, mu)).real ** power


def duality_check(n, big_n, mu, m_samples, seed=None, workers=1):
    """Compare ``<Per(mu - H)^n>`` over ``N x N`` GUE with ``<Per(mu - q)^N>`` over ``n x n``.

    The left side uses the standard GUE of size ``N`` (weight
    ``exp(-(N/2) Tr H^2)``).  The right side uses ``n x n`` Hermitian ``q``
    with the same weight ``exp(-(N/2) Tr q^2)``.  The two sides use disjoint
    RNG streams derived from ``seed``.
    """
    if not (1 <= n <= DUALITY_MAX and 1 <= big_n <= DUALITY_MAX):
        raise SizeError(f"duality_check supports 1 <= n, N <= {DUALITY_MAX}")
    mu = float(mu)
    m = _check_m(m_samples)
    seed = resolve_seed(seed)
    lhs_vals = run_blocks(partial(_power_perm_samples, big_n, big_n, mu, n), m, seed, workers)
    rhs_seed = int(np.random.SeedSequence(seed, spawn_key=(2**31,)).generate_state(1)[0])
    rhs_vals = run_blocks(partial(_power_perm_samples, n, big_n, mu, big_n), m, rhs_seed, workers)
    lhs = MCEstimate.from_samples(lhs_vals, seed)
    rhs = MCEstimate.from_samples(rhs_vals, seed)
    return DualityReport(n, big_n, mu, lhs, rhs, combined_z(lhs, rhs))


# ------------------------------------------------------------ two-point integral over q


def _exp_moment(b, big_n):
    # r ~ Exp(mean 1/N): E r^b = b! / N^b
    return math.factorial(b) / big_n ** b


def _gauss_shift_moment(mu, a, var):
    total = 0j
    for k in range(0, a + 1, 2):
        total += math.comb(a, k) * mu ** (a - k) * math.prod(range(k - 1, 0, -2)) * var ** (k // 2)
    return total


def _maingau_samples(mu1, mu2, big_n, rng, count):
    q = sample_gue(2, rng, count, scale=big_n)
    per = (mu1 - q[:, 0, 0]) * (mu2 - q[:, 1, 1]) + np.abs(q[:, 0, 1]) ** 2
    return per ** big_n


def maingau_rhs(mus, big_n, method="moments", m_samples=None, seed=None, workers=1):
    """Two-point function as an integral over a ``2 x 2`` Hermitian ``q``.

    Evaluates ``<[Per(M - q)]^N>`` with ``M = diag(mu1, mu2)`` and ``q``
    drawn from the normalized weight ``exp(-(N/2) Tr q^2)``.  The value equals
    ``<p(mu1) p(mu2)>`` over ``N x N`` GUE.

    Parameters
    ----------
    mus : sequence of two complex
    big_n : int
        Matrix size ``N`` of the original ensemble.
    method : {"moments", "mc"}
        ``"moments"`` expands ``[(mu1 - q11)(mu2 - q22) + |q12|^2]^N`` and
        integrates termwise with Gaussian and exponential moments (N <= 20).
        ``"mc"`` samples ``q`` and returns an :class:`MCEstimate`.
    """
    mus = [complex(m) for m in mus]
    if len(mus) != 2:
        raise SizeError(f"maingau_rhs evaluates the two-point case only; got {len(mus)} points")
    mu1, mu2 = mus
    if method == "moments":
        if big_n > MAINGAU_MOMENTS_MAX_N:
            raise SizeError(f"moment expansion supports N <= {MAINGAU_MOMENTS_MAX_N}")
        var = 1.0 / big_n
        total = 0j
        for a in range(big_n + 1):
            b = big_n - a
            # odd powers of q_ii vanish, so (mu - q)^a and (mu + q)^a share moments
            total += (math.comb(big_n, a) * _gauss_shift_moment(mu1, a, var)
                      * _gauss_shift_moment(mu2, a, var) * _exp_moment(b, big_n))
        return total
    if method == "mc":
        if m_samples is None:
            raise ValueError("method='mc' needs m_samples")
        m = _check_m(m_samples)
        seed = resolve_seed(seed)
        values = run_blocks(partial(_maingau_samples, mu1, mu2, big_n), m, seed, workers)
        return MCEstimate.from_samples(values, seed)
    raise ValueError(f"unknown method {method!r}")
