"""Permanental roots of random matrices and their empirical densities.

The conjectured limiting densities (see
:func:`permpoly.closed_forms.density_oracle`) are asymptotic statements, so the
comparisons here report distances and trends rather than pass/fail verdicts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from ._sampling import resolve_seed, run_blocks
from .closed_forms.asymptotics import density_oracle
from .ensembles import EnsembleSpec, sample
from .errors import ConvergenceError, PermPolyError, SizeError
from .perm_core import POLY_RYSER_MAX_N, perm_poly_batch

ROOT_CLOUD_MAX_N = POLY_RYSER_MAX_N
PAIR_TOL = 1e-8
ABERTH_MAX_ITER = 60


# ------------------------------------------------------------------- solver


def _horner(coeffs, z):
    # value and derivative of sum coeffs[k] z^k
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _residuals(coeffs, roots):
    p, dp = _horner(coeffs, roots)
    absval = np.abs(coeffs)
    scale = np.zeros(len(roots))
    for c in absval[::-1]:
        scale = scale * np.abs(roots) + c
    newton = np.where(dp != 0, np.abs(p) / np.where(dp != 0, np.abs(dp), 1.0), np.inf)
    backward = np.abs(p) / np.maximum(scale, 1e-300)
    return newton, backward


def poly_roots(p, polish=True):
    """All roots of a monic polynomial.

    Companion-matrix eigenvalues, refined by simultaneous Aberth iterations.

    Parameters
    ----------
    p : numpy.polynomial.Polynomial or array_like
        Ascending coefficients; the leading one must be 1.

    Returns
    -------
    ndarray of complex
        ``degree`` roots with multiplicity, sorted by (real, imag).

    Raises
    ------
    ConvergenceError
        When some root has Newton step ``|p/p'| > 1e-8 max(1, |r|)`` and
        backward error above 1e-12 after refinement; ``residuals`` carries
        the Newton steps.
    """
    coeffs = np.asarray(getattr(p, "coef", p))
    if coeffs.ndim != 1 or len(coeffs) < 2:
        raise ValueError("need a polynomial of degree >= 1")
    if not np.isclose(coeffs[-1], 1.0, rtol=0, atol=1e-12):
        raise ValueError("polynomial must be monic")
    real = not np.iscomplexobj(coeffs) or not np.any(coeffs.imag)
    coeffs = coeffs.real.astype(float) if real else coeffs.astype(np.complex128)
    roots = np.polynomial.polynomial.polyroots(coeffs).astype(np.complex128)
    if polish and len(roots) > 1:
        roots = _aberth(coeffs, roots)
    newton, backward = _residuals(coeffs, roots)
    bad = (newton > 1e-8 * np.maximum(1.0, np.abs(roots))) & (backward > 1e-12)
    if np.any(bad):
        raise ConvergenceError(f"{int(bad.sum())} roots failed to converge", residuals=newton)
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _aberth(coeffs, roots):
    r = roots.copy()
    n = len(r)
    eye = np.eye(n, dtype=bool)
    for _ in range(ABERTH_MAX_ITER):
        p, dp = _horner(coeffs, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = r[:, None] - r[None, :]
            diff[eye] = 1.0
            inv = 1.0 / diff
            inv[eye] = 0.0
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0.0)
        r = r - w
        if np.all(np.abs(w) <= 4e-16 * np.maximum(1.0, np.abs(r))):
            break
    return r


def conjugate_closed(roots, tol=PAIR_TOL):
    """True if ``roots`` is closed under conjugation.

    Pairing is greedy nearest-neighbour with tolerance ``tol max(1, |r|)``.
    """
    left = list(np.asarray(roots, dtype=np.complex128))
    while left:
        r = left.pop()
        target = np.conj(r)
        if abs(r.imag) <= tol * max(1.0, abs(r)):
            continue
        if not left:
            return False
        d = np.abs(np.asarray(left) - target)
        k = int(np.argmin(d))
        if d[k] > tol * max(1.0, abs(r)):
            return False
        left.pop(k)
    return True


# ------------------------------------------------------------------- clouds


@dataclass(frozen=True)
class RootCloud:
    """Roots of ``m`` sampled permanental polynomials.

    ``roots`` has shape ``(m, n)``; row ``i`` holds the roots of sample ``i``.
    """

    roots: np.ndarray
    spec: EnsembleSpec
    seed: int

    @property
    def flat(self):
        return self.roots.ravel()

    @property
    def n_samples(self):
        return self.roots.shape[0]

    def conjugate_closure(self, tol=PAIR_TOL):
        """Per-sample conjugate-closure flags."""
        return np.array([conjugate_closed(row, tol) for row in self.roots])


def _cloud_samples(spec, rng, count):
    coeffs = perm_poly_batch(sample(spec, rng, count))
    if spec.hermitian:
        # Hermitian input gives real coefficients; what is left is rounding
        coeffs = coeffs.real
    return np.stack([poly_roots(c) for c in coeffs])


def root_cloud(spec, m_samples, seed=None, workers=1):
    """Sample ``m_samples`` matrices and return the roots of their permanental polynomials."""
    spec = spec if isinstance(spec, EnsembleSpec) else EnsembleSpec.from_dict(spec)
    if spec.n > ROOT_CLOUD_MAX_N:
        raise SizeError(f"root_cloud supports n <= {ROOT_CLOUD_MAX_N} (exact permanental polynomials), got {spec.n}")
    if int(m_samples) < 1:
        raise ValueError("need at least one sample")
    seed = resolve_seed(seed)
    roots = run_blocks(partial(_cloud_samples, spec), int(m_samples), seed, workers)
    return RootCloud(roots, spec, seed)


# --------------------------------------------------------------- histograms


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid of ``nx x ny`` bins over ``[x0, x1] x [y0, y1]``."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    @property
    def x_edges(self):
        return np.linspace(self.x0, self.x1, self.nx + 1)

    @property
    def y_edges(self):
        return np.linspace(self.y0, self.y1, self.ny + 1)

    @property
    def bin_area(self):
        return (self.x1 - self.x0) / self.nx * (self.y1 - self.y0) / self.ny


DEFAULT_GRIDS = {
    "CUE": GridSpec(-1.5, 1.5, -1.5, 1.5, 20, 20),
    "Ginibre": GridSpec(-1.5, 1.5, -1.5, 1.5, 20, 20),
    "GUE": GridSpec(-1.5, 1.5, -3.0, 3.0, 20, 40),
    "GOE": GridSpec(-1.5, 1.5, -3.5, 3.5, 20, 40),
    "UnitaryInvariant": GridSpec(-2.0, 2.0, -3.0, 3.0, 20, 30),
}


@dataclass(frozen=True)
class DensityHistogram:
    """Normalized 2-D histogram of points in the complex plane.

    ``counts[i, j]`` counts points in x-bin ``i`` and y-bin ``j``.  ``density``
    is normalized over the in-grid points, so ``sum(density) * bin_area == 1``.
    ``n_total`` also counts the points that fell outside the grid.
    """

    grid: GridSpec
    counts: np.ndarray
    n_total: int

    @property
    def n_inside(self):
        return int(self.counts.sum())

    @property
    def density(self):
        return self.counts / (self.n_inside * self.grid.bin_area)

    @property
    def centers(self):
        xe, ye = self.grid.x_edges, self.grid.y_edges
        xc = 0.5 * (xe[1:] + xe[:-1])
        yc = 0.5 * (ye[1:] + ye[:-1])
        return xc[:, None] + 1j * yc[None, :]

    def to_csv(self):
        """CSV text with header ``re,im,count,density``, one row per bin, x-major."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "count", "density"])
        c, d = self.centers, self.density
        for i in range(self.grid.nx):
            for j in range(self.grid.ny):
                w.writerow([repr(float(c[i, j].real)), repr(float(c[i, j].imag)), int(self.counts[i, j]), repr(float(d[i, j]))])
        return buf.getvalue()

    def marginal(self, axis="im"):
        """1-D marginal along ``"re"`` or ``"im"`` from the 2-D counts."""
        if axis == "im":
            return Marginal("im", self.grid.y_edges, self.counts.sum(axis=0), self.n_total)
        if axis == "re":
            return Marginal("re", self.grid.x_edges, self.counts.sum(axis=1), self.n_total)
        raise ValueError("axis must be 're' or 'im'")


@dataclass(frozen=True)
class Marginal:
    """1-D histogram; ``density`` is normalized over the in-range points."""

    axis: str
    edges: np.ndarray
    counts: np.ndarray
    n_total: int

    @property
    def width(self):
        return float(self.edges[1] - self.edges[0])

    @property
    def density(self):
        return self.counts / (self.counts.sum() * self.width)

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def to_csv(self):
        """CSV text with header ``coord,count,density``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coord", "count", "density"])
        for c, k, d in zip(self.centers, self.counts, self.density):
            w.writerow([repr(float(c)), int(k), repr(float(d))])
        return buf.getvalue()


def _points(cloud_or_points):
    if isinstance(cloud_or_points, RootCloud):
        return cloud_or_points.flat
    return np.asarray(cloud_or_points, dtype=np.complex128).ravel()


def density_histogram(cloud, grid=None):
    """Histogram a :class:`RootCloud` (or a plain array of points) on ``grid``."""
    pts = _points(cloud)
    if pts.size == 0:
        raise ValueError("cannot histogram an empty cloud")
    if grid is None:
        kind = cloud.spec.kind if isinstance(cloud, RootCloud) else "Ginibre"
        grid = DEFAULT_GRIDS[kind]
    counts, _, _ = np.histogram2d(pts.real, pts.imag, bins=[grid.x_edges, grid.y_edges])
    if counts.sum() == 0:
        raise ValueError("no points fall inside the grid")
    return DensityHistogram(grid, counts.astype(np.int64), int(pts.size))


def marginal(cloud, axis="im", lo=-3.0, hi=3.0, bins=40):
    """1-D histogram of ``Im z`` (``axis="im"``) or ``Re z`` over all points."""
    pts = _points(cloud)
    if pts.size == 0:
        raise ValueError("cannot histogram an empty cloud")
    coord = pts.imag if axis == "im" else pts.real
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(coord, bins=edges)
    return Marginal(axis, edges, counts.astype(np.int64), int(pts.size))


# -------------------------------------------------------------- distances


def _bin_masses_2d(kind, grid, sub=8):
    # oracle mass per bin by a sub x sub midpoint rule
    xe, ye = grid.x_edges, grid.y_edges
    dx = (xe[1] - xe[0]) / sub
    dy = (ye[1] - ye[0]) / sub
    xs = xe[0] + dx * (np.arange(grid.nx * sub) + 0.5)
    ys = ye[0] + dy * (np.arange(grid.ny * sub) + 0.5)
    vals = density_oracle(kind, xs[:, None] + 1j * ys[None, :]) * dx * dy
    return vals.reshape(grid.nx, sub, grid.ny, sub).sum(axis=(1, 3))


def l1_distance_2d(hist, kind):
    """L1 distance between the empirical and oracle root distributions on the grid.

    Uses masses over the full cloud: ``sum |p_hat - p|`` over bins plus the
    difference of the masses outside the grid.
    """
    p = _bin_masses_2d(kind, hist.grid)
    p_hat = hist.counts / hist.n_total
    outside_hat = 1.0 - p_hat.sum()
    outside = max(0.0, 1.0 - p.sum())
    return float(np.abs(p_hat - p).sum() + abs(outside_hat - outside))


def _semicircle_cdf(y, radius):
    t = np.clip(np.asarray(y) / radius, -1.0, 1.0)
    return 0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / math.pi


def l1_distance_marginal(marg, radius=2.0):
    """L1 distance of a 1-D marginal to the semicircle of the given radius."""
    cdf = _semicircle_cdf(marg.edges, radius)
    p = np.diff(cdf)
    p_hat = marg.counts / marg.n_total
    return float(np.abs(p_hat - p).sum() + abs((1.0 - p_hat.sum()) - (1.0 - p.sum())))


# ----------------------------------------------------------------- report

SEGMENT_RADIUS = {"GUE": 2.0, "GOE": 2.0 * math.sqrt(2.0)}
# eigenvalue edge of GOE under the sampled weight; reported next to the oracle
GOE_WEIGHT_RADIUS = math.sqrt(2.0)


@dataclass
class ConjectureReport:
    """Per-size statistics of permanental roots and their trends over size."""

    kind: str
    sizes: list
    m_samples: int
    seed: int
    rows: list = field(default_factory=list)
    trends: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind,
            "sizes": list(self.sizes),
            "m_samples": self.m_samples,
            "seed": self.seed,
            "rows": self.rows,
            "trends": self.trends,
        }


def _strictly_decreasing(values):
    if len(values) < 2 or any(v is None for v in values):
        return None
    return bool(all(b < a for a, b in zip(values, values[1:])))


def cloud_statistics(cloud, grid=None):
    """Summary statistics of one cloud against the conjectured density of its kind."""
    kind = cloud.spec.kind
    pts = cloud.flat
    row = {"n": cloud.spec.n, "n_roots": int(pts.size)}
    row["conjugate_closed_fraction"] = float(np.mean(cloud.conjugate_closure())) if cloud.spec.hermitian else None
    if kind in SEGMENT_RADIUS:
        radius = SEGMENT_RADIUS[kind]
        row["median_abs_re"] = float(np.median(np.abs(pts.real)))
        row["edge_estimate"] = float(2.0 * np.sqrt(np.mean(pts.imag ** 2)))
        row["edge_oracle"] = radius
        marg = marginal(cloud, "im", -radius - 1.0, radius + 1.0, 40)
        row["l1"] = l1_distance_marginal(marg, radius)
        row["l1_kind"] = "im-marginal vs semicircle"
        if kind == "GOE":
            r = GOE_WEIGHT_RADIUS
            row["l1_radius_sqrt2"] = l1_distance_marginal(marginal(cloud, "im", -r - 1.0, r + 1.0, 40), r)
    elif kind in ("CUE", "Ginibre"):
        hist = density_histogram(cloud, grid or DEFAULT_GRIDS[kind])
        row["l1"] = l1_distance_2d(hist, kind)
        row["l1_kind"] = "2-D vs " + ("(2/pi)(1+|z|^2)^-2" if kind == "CUE" else "1/pi") + " on unit disk"
        row["fraction_inside_1_3"] = float(np.mean(np.abs(pts) <= 1.3))
    else:
        row["median_abs_re"] = float(np.median(np.abs(pts.real)))
        row["l1"] = None
    return row


def conjecture_report(spec_kind, sizes, m_samples, seed=None, workers=1, grid=None):
    """Root statistics for each size and their trends; never raises for size caps.

    Sizes beyond the exact-polynomial cap are reported with an ``error`` field
    and make the affected trends ``None``.
    """
    seed = resolve_seed(seed)
    kind = EnsembleSpec(spec_kind, 1).kind
    report = ConjectureReport(kind, list(sizes), int(m_samples), seed)
    for n in sizes:
        try:
            cloud = root_cloud(EnsembleSpec(kind, n), m_samples, seed, workers)
            row = cloud_statistics(cloud, grid)
        except PermPolyError as exc:
            row = {"n": n, "error": f"{type(exc).__name__}: {exc}"}
        report.rows.append(row)
    l1 = [r.get("l1") for r in report.rows]
    report.trends["l1_decreasing"] = _strictly_decreasing(l1)
    if kind in SEGMENT_RADIUS:
        med = [r.get("median_abs_re") for r in report.rows]
        report.trends["median_abs_re_decreasing"] = _strictly_decreasing(med)
    return report
