"""Isoperimetric quantities of geodesic balls and the mean curvature bound
for spacelike graphs into a line.

For a spacelike graph of ``f`` over a bounded domain ``D`` with
``b_D = sup_D |grad f|_1``, the divergence theorem applied to
``grad f / sqrt(1 - |grad f|^2)`` gives

    inf_D |<H, nu>|  <=  b_D / sqrt(1 - b_D^2) * A_1(dD) / V_1(D)

with ``H`` the trace mean curvature.  The hyperboloid over a Euclidean ball
is the equality case.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import DomainError, SpacelikeError
from .extrinsic import hypersurface_mean_curvature
from .metrics import geodesic_ball_measures

__all__ = [
    "DomainMeasures",
    "MeanCurvatureBound",
    "domain_measures",
    "mean_curvature_bound",
    "prop9_check",
    "cheeger_witness",
    "ball_samples",
]


@dataclass(frozen=True)
class DomainMeasures:
    """Geodesic ball ``D = B(center, radius)`` with its g1-measures and ``b_D``."""

    center: tuple
    radius: float
    coord_radius: float
    volume: float
    boundary_area: float
    quadrature_error: float
    b_D: float = None
    cheeger_witness: float = None

    @property
    def ratio(self):
        return self.boundary_area / self.volume


@dataclass(frozen=True)
class MeanCurvatureBound:
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    verdict: str
    measures: DomainMeasures
    samples: int
    mean_curvature_spread: float

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_record(self):
        return {
            "name": "mean_curvature_bound",
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "samples": self.samples,
            "mean_curvature_spread": self.mean_curvature_spread,
            "radius": self.measures.radius,
            "volume": self.measures.volume,
            "boundary_area": self.measures.boundary_area,
            "b_D": self.measures.b_D,
        }


def ball_samples(dim, coord_radius, count, seed=0, center=None, boundary_fraction=0.25):
    """Halton points filling a coordinate ball plus an evenly spread boundary set."""
    center = np.zeros(dim) if center is None else np.asarray(center, float)
    # the 0-sphere has two points, so a one-dimensional ball needs only two boundary samples
    n_bnd = 2 if dim == 1 else max(int(count * boundary_fraction), 2 * dim)
    n_int = count - n_bnd
    u = qmc.Halton(d=dim + 1, scramble=True, seed=seed).random(n_int + n_bnd)
    dirs = _sphere_points(u[:, :dim])
    interior = dirs[:n_int] * coord_radius * u[:n_int, dim:] ** (1.0 / dim)
    if dim == 1:
        boundary = np.array([[coord_radius], [-coord_radius]])
    elif dim == 2:
        t = 2 * np.pi * (np.arange(n_bnd) + 0.5) / n_bnd
        boundary = coord_radius * np.stack([np.cos(t), np.sin(t)], axis=1)
    else:
        boundary = dirs[n_int:] * coord_radius
    return np.vstack([interior, boundary]) + center


def _sphere_points(u):
    # inverse-normal transform keeps the low-discrepancy structure roughly intact
    from scipy.special import ndtri

    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    if g.shape[1] == 1:
        return np.sign(g + 1e-300)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def domain_measures(metric, radius, center=None, resolution=64, witness_count=None):
    """Measures of ``B(center, radius)``; the Cheeger witness only when ``witness_count`` is given."""
    center = np.zeros(metric.dim) if center is None else np.asarray(center, float)
    meas = geodesic_ball_measures(metric, center, radius, resolution)
    return DomainMeasures(
        tuple(center.tolist()),
        float(radius),
        meas.coord_radius,
        meas[0],
        meas[1],
        meas.error,
        cheeger_witness=cheeger_witness(metric, radius, witness_count, center) if witness_count else None,
    )


def mean_curvature_bound(product, f, radius, samples=1024, seed=0, tolerance=1e-6, center=None):
    """Check ``inf |<H, nu>| <= b/sqrt(1-b^2) * A/V`` on the geodesic ball of ``radius``."""
    if product.n != 1:
        raise DomainError("the mean curvature bound needs a one-dimensional target")
    if samples < 8:
        raise ValueError("need at least 8 samples")
    meas = domain_measures(product.sigma1, radius, center)
    pts = ball_samples(product.m, meas.coord_radius, samples, seed, center=meas.center)
    for p in pts:
        product.sigma1.point(p)
    hnu, slopes = hypersurface_mean_curvature(product, f, pts)
    if not np.all(slopes < 1.0):
        k = int(np.argmax(np.where(np.isfinite(slopes), slopes, np.inf)))
        raise SpacelikeError(f"graph is not spacelike on the domain near {pts[k]}", lambda1=float(slopes[k]), location=pts[k])
    b = float(np.max(slopes))
    lhs = float(np.min(np.abs(hnu)))
    rhs = b / np.sqrt(1 - b**2) * meas.ratio
    slack = rhs - lhs
    meas = DomainMeasures(**{**meas.__dict__, "b_D": b})
    return MeanCurvatureBound(
        lhs, float(rhs), float(slack), tolerance, "pass" if slack >= -tolerance else "fail",
        meas, len(pts), float(np.std(hnu)),
    )


prop9_check = mean_curvature_bound


def cheeger_witness(metric, radius, count=64, center=None):
    """Upper bound for the Cheeger constant of ``B(center, radius)``.

    Minimum of ``A(dB_s)/V(B_s)`` over the concentric balls ``s = radius*k/count``.
    Closed manifolds report 0 (the whole manifold has no boundary).
    """
    if metric.closed:
        return 0.0
    if not radius > 0:
        raise ValueError("radius must be positive")
    center = np.zeros(metric.dim) if center is None else np.asarray(center, float)
    best = np.inf
    for k in range(1, count + 1):
        vol, area = geodesic_ball_measures(metric, center, radius * k / count)
        best = min(best, area / vol)
    return float(best)
