"""Samplers for the classical random-matrix ensembles.

Variance conventions (size ``n``, weights read off the matrix densities):

=========  ===================================  =================================
ensemble   density of entries                   second moments
=========  ===================================  =================================
GUE        exp(-n/2 H_ii^2) exp(-n |H_ij|^2)    E H_ii^2 = 1/n, E |H_ij|^2 = 1/n
GOE        exp(-n/2 H_ii^2) exp(-n H_ij^2)      E H_ii^2 = 1/n, E H_ij^2 = 1/(2n)
Ginibre    exp(-n |Z_ij|^2)                     E |Z_ij|^2 = 1/n
CUE        Haar measure on U(n)                 E |U_ij|^2 = 1/n
=========  ===================================  =================================

Every sampler takes an explicit :class:`numpy.random.Generator` and an optional
``size`` to draw a stack of matrices at once.  This module is the single place
where these conventions live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

KINDS = ("GUE", "GOE", "CUE", "Ginibre", "UnitaryInvariant")
HERMITIAN_KINDS = ("GUE", "GOE", "UnitaryInvariant")


@dataclass(frozen=True)
class Potential:
    """Polynomial potential ``V(x) = sum_k coeffs[k] x^k`` (ascending, real).

    The degree must be even and the leading coefficient positive so that
    ``exp(-N V(x))`` is integrable on the real line.
    """

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        degree = len(c) - 1
        if degree < 2 or degree % 2:
            raise DomainError(f"potential must have even degree >= 2, got degree {degree}")
        if c[-1] <= 0:
            raise DomainError("leading coefficient of the potential must be positive")

    @classmethod
    def gaussian(cls):
        """``V(x) = x^2 / 2``."""
        return cls((0.0, 0.0, 0.5))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_even(self):
        return all(c == 0.0 for c in self.coeffs[1::2])

    @property
    def is_gaussian(self):
        return self.coeffs == (0.0, 0.0, 0.5)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble kind plus dimension; ``potential`` only for ``UnitaryInvariant``."""

    kind: str
    n: int
    potential: Potential | None = field(default=None)

    def __post_init__(self):
        kind = _canonical_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.n) < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if (kind == "UnitaryInvariant") != (self.potential is not None):
            raise ValueError("a potential is required for, and only for, UnitaryInvariant")

    @property
    def hermitian(self):
        return self.kind in HERMITIAN_KINDS

    def to_dict(self):
        out = {"kind": self.kind, "n": self.n}
        if self.potential is not None:
            out["potential"] = list(self.potential.coeffs)
        return out

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"kind", "n", "potential"}
        if unknown:
            raise ValueError(f"unknown ensemble keys: {sorted(unknown)}")
        pot = data.get("potential")
        return cls(data["kind"], int(data["n"]), Potential(tuple(pot)) if pot is not None else None)


def _canonical_kind(kind):
    for k in KINDS:
        if str(kind).lower() == k.lower():
            return k
    raise ValueError(f"unknown ensemble kind {kind!r}; expected one of {KINDS}")


def _shape(n, size):
    return (n, n) if size is None else (int(size), n, n)


def sample_gue(n, rng, size=None, scale=None):
    """GUE matrix (or stack) with weight ``exp(-(scale/2) Tr H^2)``.

    ``scale`` defaults to ``n``; other values are used for the auxiliary
    Hermitian integration variables of the duality relations.
    """
    s = n if scale is None else scale
    shape = _shape(n, size)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    # (g + g*)/2 has diagonal variance 1 and off-diagonal E|.|^2 = 1
    h = (g + np.swapaxes(g, -1, -2).conj()) / 2.0
    return h / math.sqrt(s)


def sample_goe(n, rng, size=None, scale=None):
    """Real symmetric GOE matrix (or stack) with weight ``exp(-(scale/2) Tr H^2)``."""
    s = n if scale is None else scale
    g = rng.standard_normal(_shape(n, size))
    # (g + g^T)/2 has diagonal variance 1 and off-diagonal variance 1/2
    h = (g + np.swapaxes(g, -1, -2)) / 2.0
    return h / math.sqrt(s)


def sample_ginibre(n, rng, size=None):
    """Complex Ginibre matrix (or stack) with ``E|Z_ij|^2 = 1/n``."""
    shape = _shape(n, size)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0 * n)


def sample_cue(n, rng, size=None):
    """Haar-distributed unitary matrix (or stack).

    QR of a complex Ginibre draw, with the phases of ``diag(R)`` moved into
    ``Q`` so that the factorization is unique and ``Q`` exactly Haar.
    """
    z = sample_ginibre(n, rng, size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def sample(spec, rng, size=None):
    """Draw from ``spec``; UnitaryInvariant goes through :func:`unitary_invariant_matrices`."""
    if spec.kind == "GUE":
        return sample_gue(spec.n, rng, size)
    if spec.kind == "GOE":
        return sample_goe(spec.n, rng, size)
    if spec.kind == "CUE":
        return sample_cue(spec.n, rng, size)
    if spec.kind == "Ginibre":
        return sample_ginibre(spec.n, rng, size)
    count = 1 if size is None else int(size)
    mats = unitary_invariant_matrices(spec.potential, spec.n, rng, count)
    return mats[0] if size is None else mats


@dataclass
class EigenvalueChain:
    """Output of :func:`sample_unitary_invariant`.

    ``samples`` has shape ``(n_samples, n)``; ``acceptance_rate`` is the
    fraction of accepted single-eigenvalue moves over the whole run.
    """

    samples: np.ndarray
    acceptance_rate: float
    burn_in: int
    thin: int
    step: float


MCMC_MAX_N = 8


def _log_density(lam, pot, n):
    diff = lam[:, None] - lam[None, :]
    iu = np.triu_indices(len(lam), 1)
    return 2.0 * np.sum(np.log(np.abs(diff[iu]))) - n * np.sum(pot(lam))


def sample_unitary_invariant(potential, n, rng, n_samples=1, burn_in=2000, thin=10, step=None):
    """Metropolis sampler for the eigenvalue density of a unitary-invariant ensemble.

    Targets ``prod_{i<j} (l_i - l_j)^2 prod_i exp(-n V(l_i))``.  One sweep
    proposes a Gaussian move of each eigenvalue in turn; ``thin`` sweeps
    separate recorded samples.

    Parameters
    ----------
    potential : Potential
    n : int
        Number of eigenvalues, at most 8.
    rng : numpy.random.Generator
    n_samples : int
    burn_in : int
        Sweeps discarded before recording.
    thin : int
        Sweeps between recorded samples.
    step : float, optional
        Proposal standard deviation; defaults to ``1.5 / sqrt(n)``.
    """
    if not isinstance(potential, Potential):
        potential = Potential(tuple(potential))
    if n < 1 or n > MCMC_MAX_N:
        raise ValueError(f"sample_unitary_invariant supports 1 <= n <= {MCMC_MAX_N}")
    step = 1.5 / math.sqrt(n) if step is None else float(step)
    lam = np.sort(rng.standard_normal(n)) / math.sqrt(n)
    logp = _log_density(lam, potential, n)
    out = np.empty((n_samples, n))
    accepted = 0
    proposed = 0
    total_sweeps = burn_in + n_samples * thin
    recorded = 0
    for sweep in range(total_sweeps):
        moves = rng.standard_normal(n) * step
        thresholds = np.log(rng.random(n))
        for i in range(n):
            old = lam[i]
            lam[i] = old + moves[i]
            new_logp = _log_density(lam, potential, n)
            proposed += 1
            if thresholds[i] < new_logp - logp:
                logp = new_logp
                accepted += 1
            else:
                lam[i] = old
        if sweep >= burn_in and (sweep - burn_in + 1) % thin == 0:
            out[recorded] = lam
            recorded += 1
    return EigenvalueChain(out, accepted / proposed, burn_in, thin, step)


def unitary_invariant_matrices(potential, n, rng, count, **chain_kwargs):
    """Matrices ``U diag(l) U*`` with eigenvalues from the Metropolis chain and Haar ``U``."""
    chain = sample_unitary_invariant(potential, n, rng, count, **chain_kwargs)
    u = sample_cue(n, rng, count)
    return (u * chain.samples[:, None, :]) @ np.swapaxes(u, -1, -2).conj()
