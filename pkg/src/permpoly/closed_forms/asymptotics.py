"""Large-N potentials ``Phi(x, y) = lim (1/N) ln <|p(z)|^2>`` and the root densities they imply.

Root densities follow from ``rho = (1/4 pi) Laplacian(Phi)``.  For GUE the
potential is harmonic off the imaginary axis, and the density sits on the
segment ``[-2i, 2i]`` as a line density.  For CUE and Ginibre it is an
areal density on the unit disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ..errors import DomainError
from .circular import log_char_two_point_cue_diag, log_two_point_cue_diag, log_two_point_ginibre_diag
from .gaussian import _char_two_point_confluent_scaled, _char_two_point_scaled

PHI_KINDS = ("GUE", "CUE", "CUE-char", "Ginibre")
DENSITY_KINDS = ("GUE", "GOE", "CUE", "Ginibre")


def _canonical(kind, allowed):
    for k in allowed:
        if str(kind).lower() == k.lower():
            return k
    raise DomainError(f"unknown kind {kind!r}; expected one of {allowed}")


def gue_psi(q):
    """``Psi(q) = (q - s)^2 / 8 - ln(q - s) + ln 2`` with ``s = sqrt(q - 2) sqrt(q + 2)``.

    The constant ``ln 2`` makes ``2 Re Psi`` equal the finite-N limit itself
    rather than a shifted copy; it plays no role in the root density.

    The product of principal square roots is analytic off ``[-2, 2]`` and
    behaves like ``q`` at infinity.  On the cut itself, a zero imaginary part
    is read as ``+0``, which gives the limit from ``Im q > 0``.
    """
    q = np.asarray(q, dtype=np.complex128)
    q = q.real + 1j * (q.imag + 0.0)
    s = np.sqrt(q - 2.0) * np.sqrt(q + 2.0)
    w = q - s
    return w * w / 8.0 - np.log(w) + math.log(2.0)


def asymptotic_phi(kind, z):
    """Limiting ``(1/N) ln <|p(z)|^2>`` for ``kind`` in ``PHI_KINDS``.

    ``"CUE-char"`` is the characteristic-polynomial counterpart for CUE.  On the cut
    ``x = 0, |y| < 2`` the GUE value is the limit from ``x > 0``.
    """
    kind = _canonical(kind, PHI_KINDS)
    z = np.asarray(z, dtype=np.complex128)
    x, y = z.real, z.imag
    if kind == "GUE":
        # x = 0 is read as +0 so the cut takes the limit from the right
        out = 2.0 * np.real(gue_psi(y + 1j * (x + 0.0)))
    else:
        r2 = x * x + y * y
        with np.errstate(divide="ignore"):
            outside = np.log(r2)
        if kind == "CUE":
            inside = 2.0 * np.log((1.0 + r2) / 2.0)
        elif kind == "Ginibre":
            inside = r2 - 1.0
        else:
            inside = np.zeros_like(r2)
        out = np.where(r2 < 1.0, inside, outside)
    return out[()] if out.ndim == 0 else out


def finite_phi(kind, n, z):
    """``(1/n) ln <|p(z)|^2>`` at finite ``n`` from the exact two-point functions."""
    kind = _canonical(kind, PHI_KINDS)
    z = complex(z)
    if kind == "GUE":
        # <|p(z)|^2> = <p(z) p(conj z)> = <d(-i z) d(i conj z)>
        a, b = -1j * z, 1j * z.conjugate()
        if abs(a - b) <= 1e-12 * max(1.0, abs(a)):
            value, log_scale = _char_two_point_confluent_scaled(n, a)
        else:
            value, log_scale = _char_two_point_scaled(n, a, b)
        return (math.log(abs(value)) + log_scale) / n
    r2 = abs(z) ** 2
    if kind == "CUE":
        return log_two_point_cue_diag(n, r2) / n
    if kind == "Ginibre":
        return log_two_point_ginibre_diag(n, r2) / n
    return log_char_two_point_cue_diag(n, r2) / n


def density_oracle(kind, z):
    """Conjectured limiting density of permanental roots at ``z``.

    GUE and GOE return a line density in ``Im z`` on the imaginary-axis
    segment (semicircle of radius 2 and ``2 sqrt 2``).  Their value is
    independent of ``Re z``.  CUE (``(2/pi)(1 + |z|^2)^-2``) and Ginibre
    (``1/pi``) return areal densities on the closed unit disk.
    """
    kind = _canonical(kind, DENSITY_KINDS)
    z = np.asarray(z, dtype=np.complex128)
    y = z.imag
    if kind in ("GUE", "GOE"):
        r2 = 4.0 if kind == "GUE" else 8.0
        out = np.where(y * y < r2, 2.0 * np.sqrt(np.clip(r2 - y * y, 0.0, None)) / (math.pi * r2), 0.0)
    else:
        rr = np.abs(z) ** 2
        inside = rr <= 1.0
        if kind == "CUE":
            out = np.where(inside, 2.0 / (math.pi * (1.0 + rr) ** 2), 0.0)
        else:
            out = np.where(inside, 1.0 / math.pi, 0.0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class AsymptoticProfile:
    """Limiting potential and root density of one ensemble.

    ``support`` is ``"segment"`` for a line density on ``[-i radius, i radius]``
    or ``"disk"`` for an areal density on ``|z| <= radius``.
    """

    kind: str
    phi: Callable | None
    density: Callable
    support: str
    radius: float

    @classmethod
    def for_kind(cls, kind):
        kind = _canonical(kind, DENSITY_KINDS)
        phi = (lambda z, k=kind: asymptotic_phi(k, z)) if kind in PHI_KINDS else None
        density = lambda z, k=kind: density_oracle(k, z)  # noqa: E731
        if kind in ("GUE", "GOE"):
            return cls(kind, phi, density, "segment", 2.0 if kind == "GUE" else 2.0 * math.sqrt(2.0))
        return cls(kind, phi, density, "disk", 1.0)

    def mass(self):
        """Total mass of the density by adaptive quadrature; should be 1."""
        r = self.radius
        if self.support == "segment":
            return integrate.quad(lambda y: float(self.density(1j * y)), -r, r, epsabs=1e-13, epsrel=1e-13)[0]
        # radial: density depends on |z| only
        val = integrate.quad(lambda t: 2.0 * math.pi * t * float(self.density(t)), 0.0, r, epsabs=1e-13, epsrel=1e-13)[0]
        return val
