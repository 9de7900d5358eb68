"""Riemannian metrics on single coordinate charts and their curvature.

A :class:`MetricField` wraps a pure ``jax.numpy`` function ``fn(params, x)``
returning the symmetric positive definite matrix ``g_ij(x)``.  Christoffel
symbols, the Riemann tensor and Ricci curvature are computed from exact
forward-mode derivatives of ``fn``.

Curvature sign convention: ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and
``R(X, Y, Z, W) = g(R(Z, W) Y, X)``, so ``R(u, v, u, v) = K |u ^ v|^2`` and the
round sphere has ``K = +1``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gamma, inf, pi

import numpy as np
from scipy import optimize

from ._ad import as_params, compiled, compiled_jet, derivative, jax, jnp, to_numpy
from .errors import DomainError, NumericalError

__all__ = [
    "MetricField",
    "RadialModel",
    "CurvatureData",
    "BallMeasures",
    "METRIC_REGISTRY",
    "make_metric",
    "christoffel_fn",
    "riemann_fn",
    "eval_christoffel",
    "eval_curvature",
    "geodesic_ball_measures",
    "finite_difference",
    "sphere_area",
]

POINCARE_MARGIN = 1e-3
SPHERE_CAP_RADIUS = 1e2


@dataclass(frozen=True)
class RadialModel:
    """Warped-product description ``dr^2 + sn(r)^2 dS^2`` about the chart origin.

    ``to_coord`` maps geodesic radius to coordinate radius in the chart.
    """

    kind: str
    warp: object
    to_coord: object
    to_geodesic: object


_RADIAL = {
    "flat": RadialModel("flat", lambda r: np.asarray(r, float), lambda r: r, lambda rho: rho),
    "hyperbolic": RadialModel(
        "hyperbolic", np.sinh, lambda r: np.tanh(np.asarray(r) / 2), lambda rho: 2 * np.arctanh(rho)
    ),
    "spherical": RadialModel(
        "spherical", np.sin, lambda r: np.tan(np.asarray(r) / 2), lambda rho: 2 * np.arctan(rho)
    ),
}


@dataclass(frozen=True, eq=False)
class MetricField:
    """A Riemannian metric on one chart of ``R^dim``.

    ``chart_radius`` bounds the admissible coordinate radius (about the
    origin); ``period`` marks a periodic (flat torus) chart.  ``homogeneous``
    metrics are symmetric about every point; otherwise only about the origin.
    """

    name: str
    dim: int
    fn: object
    params: object = ()
    chart_radius: float = inf
    period: float = None
    homogeneous: bool = True
    radial: RadialModel = None
    curvature_sign: int = 0
    description: str = ""
    _jparams: object = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_jparams", as_params(self.params))

    @property
    def closed(self):
        return self.period is not None

    @property
    def jparams(self):
        return self._jparams

    def point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if p.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected a point of length {self.dim}, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError(f"{self.name}: non-finite point {p}")
        if self.period is None and np.linalg.norm(p) >= self.chart_radius:
            raise DomainError(
                f"{self.name}: point {p} outside chart (|x| must be < {self.chart_radius})"
            )
        return p

    def contains(self, p):
        try:
            self.point(p)
        except DomainError:
            return False
        return True

    def eval(self, p):
        p = self.point(p)
        return np.asarray(compiled(self.fn)(self.jparams, jnp.asarray(p)))

    def jet(self, p, order=2):
        """``[g, dg, ..., d^order g]`` at ``p``; derivative indices last."""
        p = self.point(p)
        return list(to_numpy(compiled_jet(self.fn, order)(self.jparams, jnp.asarray(p))))

    def is_symmetric_about(self, center):
        return self.homogeneous or np.linalg.norm(center) < 1e-12

    def max_coord_radius(self, center):
        if self.period is not None:
            return 0.5 * self.period
        return self.chart_radius - np.linalg.norm(center)


def _euclidean(params, x):
    return jnp.eye(x.shape[0])


def _poincare(params, x):
    return 4.0 / (1.0 - x @ x) ** 2 * jnp.eye(x.shape[0])


def _sphere_stereo(params, x):
    return 4.0 / (1.0 + x @ x) ** 2 * jnp.eye(x.shape[0])


def euclidean(dim=2):
    return MetricField("euclidean", dim, _euclidean, radial=_RADIAL["flat"], description="flat R^m")


def poincare_ball(dim=2):
    return MetricField(
        "poincare_ball",
        dim,
        _poincare,
        chart_radius=1.0 - POINCARE_MARGIN,
        homogeneous=False,
        radial=_RADIAL["hyperbolic"],
        curvature_sign=-1,
        description="hyperbolic space H^m, Poincare ball model",
    )


def sphere_stereo(dim=2):
    return MetricField(
        "sphere_stereo",
        dim,
        _sphere_stereo,
        chart_radius=SPHERE_CAP_RADIUS,
        homogeneous=False,
        radial=_RADIAL["spherical"],
        curvature_sign=1,
        description="unit round sphere S^m, stereographic chart without the pole cap",
    )


def flat_torus(dim=2, period=1.0):
    return MetricField(
        "flat_torus",
        dim,
        _euclidean,
        params=(),
        period=float(period),
        radial=_RADIAL["flat"],
        description="flat torus R^m / (period Z)^m",
    )


def circle(period=2 * pi):
    return MetricField(
        "circle", 1, _euclidean, period=float(period), radial=_RADIAL["flat"], description="circle S^1"
    )


def line():
    return MetricField("line", 1, _euclidean, radial=_RADIAL["flat"], description="real line R")


METRIC_REGISTRY = {
    "circle": circle,
    "euclidean": euclidean,
    "flat_torus": flat_torus,
    "line": line,
    "poincare_ball": poincare_ball,
    "sphere_stereo": sphere_stereo,
}


def make_metric(name, **params):
    try:
        factory = METRIC_REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown metric {name!r}; known: {sorted(METRIC_REGISTRY)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# jax-level curvature (used directly by the graph kernels)


def christoffel_fn(gfn):
    """``(params, x) -> Gamma[k, i, j]`` for the metric function ``gfn``."""
    dgfn = derivative(gfn, 1)

    def gamma_(params, x):
        g = gfn(params, x)
        dg = dgfn(params, x)  # dg[i, j, k] = d_k g_ij
        ginv = jnp.linalg.inv(g)
        lower = 0.5 * (jnp.transpose(dg, (0, 2, 1)) + dg - jnp.transpose(dg, (2, 0, 1)))
        return jnp.einsum("kl,lij->kij", ginv, lower)

    return gamma_


def riemann_fn(gfn):
    """``(params, x) -> (R_up[a,b,c,d], R[a,b,c,d])``.

    ``R(d_c, d_d) d_b = R_up[a, b, c, d] d_a`` and ``R = g_ae R_up[e, ...]``.
    """
    gam = christoffel_fn(gfn)
    dgam = derivative(gam, 1)

    def riemann(params, x):
        G = gam(params, x)
        dG = dgam(params, x)  # dG[a, i, j, c] = d_c Gamma^a_ij
        rup = (
            jnp.einsum("adbc->abcd", dG)
            - jnp.einsum("acbd->abcd", dG)
            + jnp.einsum("ace,edb->abcd", G, G)
            - jnp.einsum("ade,ecb->abcd", G, G)
        )
        g = gfn(params, x)
        return rup, jnp.einsum("ae,ebcd->abcd", g, rup)

    return riemann


@lru_cache(maxsize=None)
def _curvature_kernel(gfn):
    gam = christoffel_fn(gfn)
    riem = riemann_fn(gfn)

    def kernel(params, x):
        rup, r = riem(params, x)
        return gfn(params, x), gam(params, x), rup, r

    return jax.jit(kernel)


@lru_cache(maxsize=None)
def _christoffel_kernel(gfn):
    return jax.jit(christoffel_fn(gfn))


@dataclass(frozen=True)
class CurvatureData:
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    riemann_up: np.ndarray
    ricci: np.ndarray

    def sectional(self, u, v):
        """Sectional curvature of the plane spanned by ``u`` and ``v``."""
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        g = self.metric
        area = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
        if area <= 1e-14 * (u @ g @ u) * (v @ g @ v) or area <= 0:
            raise ValueError("sectional curvature needs two linearly independent vectors")
        return float(np.einsum("abcd,a,b,c,d->", self.riemann, u, v, u, v) / area)

    @property
    def scalar(self):
        return float(np.einsum("ij,ij->", np.linalg.inv(self.metric), self.ricci))


def eval_christoffel(metric, p):
    """Christoffel symbols ``Gamma[k, i, j]`` of ``metric`` at ``p``."""
    p = metric.point(p)
    return np.asarray(_christoffel_kernel(metric.fn)(metric.jparams, jnp.asarray(p)))


def eval_curvature(metric, p):
    p = metric.point(p)
    g, gam, rup, r = to_numpy(_curvature_kernel(metric.fn)(metric.jparams, jnp.asarray(p)))
    ricci = np.einsum("ac,abcd->bd", np.linalg.inv(g), r)
    return CurvatureData(metric=g, christoffel=gam, riemann=r, riemann_up=rup, ricci=ricci)


# ---------------------------------------------------------------------------
# geodesic balls


def sphere_area(m):
    """Area of the unit sphere S^(m-1) in R^m (two points when m = 1)."""
    return 2 * pi ** (m / 2) / gamma(m / 2)


class BallMeasures(tuple):
    """``(volume, boundary_area)`` of a geodesic ball, with quadrature metadata."""

    def __new__(cls, volume, boundary_area, error, coord_radius):
        obj = super().__new__(cls, (volume, boundary_area))
        obj.volume = volume
        obj.boundary_area = boundary_area
        obj.error = error
        obj.coord_radius = coord_radius
        return obj


@lru_cache(maxsize=None)
def _batched_metric(fn):
    return jax.jit(jax.vmap(fn, in_axes=(None, 0)))


def _radial_coefficients(metric, center):
    """Return vectorised ``t -> (g_rr, g_tangential)`` along the first axis."""
    m = metric.dim
    batched = _batched_metric(metric.fn)
    params = metric.jparams

    def coeffs(t):
        t = np.atleast_1d(np.asarray(t, float))
        pts = np.tile(center, (t.size, 1))
        pts[:, 0] += t
        g = np.asarray(batched(params, jnp.asarray(pts)))
        tang = g[:, 1, 1] if m > 1 else np.ones(t.size)
        return g[:, 0, 0], tang

    return coeffs


def geodesic_ball_measures(metric, center, radius, resolution=64):
    """Volume and boundary area of the geodesic ball ``B(center, radius)``.

    Only valid for rotationally symmetric metrics, where geodesic balls about
    the symmetry centre are coordinate balls.  The geodesic radius is
    converted to a coordinate radius by root finding on the radial arclength;
    the volume is a Gauss-Legendre quadrature with ``resolution`` nodes whose
    error estimate is the change under doubling the node count.
    """
    center = np.atleast_1d(np.asarray(center, float))
    if center.shape != (metric.dim,):
        raise DomainError(f"center must have length {metric.dim}")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if not metric.is_symmetric_about(center):
        raise ValueError(f"{metric.name} is only rotationally symmetric about the chart origin")
    m = metric.dim
    coeffs = _radial_coefficients(metric, center)

    nodes, weights = np.polynomial.legendre.leggauss(32)

    def arclength(rho):
        # composite Gauss-Legendre, doubling the panel count until two levels agree
        prev = None
        for k in range(12):
            edges = np.linspace(0.0, rho, 2**k + 1)
            half = 0.5 * np.diff(edges)[:, None]
            t = (edges[:-1, None] + half * (nodes + 1.0)).ravel()
            val = float(np.sum((half * weights).ravel() * np.sqrt(coeffs(t)[0])))
            if prev is not None and abs(val - prev) <= 1e-14 * (1.0 + abs(val)):
                return val
            prev = val
        raise NumericalError(f"radial arclength quadrature did not converge on [0, {rho}]")

    limit = metric.max_coord_radius(center)
    if np.isfinite(limit):
        if arclength(limit) <= radius:
            raise DomainError(f"geodesic ball of radius {radius} exits the {metric.name} chart")
        upper = limit
    else:
        upper = 1.0
        while arclength(upper) <= radius:
            upper *= 2.0
    rho = optimize.brentq(lambda s: arclength(s) - radius, 0.0, upper, xtol=1e-15, rtol=1e-15)

    def volume(n):
        nodes, weights = np.polynomial.legendre.leggauss(n)
        t = 0.5 * rho * (nodes + 1.0)
        grr, gtt = coeffs(t)
        integrand = np.sqrt(grr) * (t * np.sqrt(gtt)) ** (m - 1)
        return sphere_area(m) * 0.5 * rho * np.dot(weights, integrand)

    vol = volume(resolution)
    err = abs(volume(2 * resolution) - vol)
    _, gtt = coeffs(rho)
    area = sphere_area(m) * (rho * np.sqrt(gtt[0])) ** (m - 1)
    return BallMeasures(float(vol), float(area), float(err), float(rho))


# ---------------------------------------------------------------------------
# finite-difference oracle


def finite_difference(fn, x, h=1e-5):
    """Central differences of ``fn`` at ``x`` with one Richardson level.

    The derivative axis is appended last, matching the AD convention.
    """
    x = np.asarray(x, float)

    def central(step):
        cols = []
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = step
            cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * step))
        return np.stack(cols, axis=-1)

    return (4.0 * central(h / 2) - central(h)) / 3.0
