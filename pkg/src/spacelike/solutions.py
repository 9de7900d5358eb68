"""Explicit spacelike graphs: slices, affine maps, hyperboloids, geodesic
cylinders, polynomial and periodic test maps, and the radial constant mean
curvature family over hyperbolic space.

The radial CMC profile over H^m is

    I(r)   = c / sinh(r)^(m-1) * int_0^r sinh(t)^(m-1) dt
    f_c(r) = int_0^r I / sqrt(1 + I^2) ds

composed with the hyperbolic distance ``r(x) = log((1+|x|)/(1-|x|))`` to the
centre of the Poincare ball.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from ._ad import jax, jnp
from .errors import DomainError, NumericalError, SpacelikeError
from .graph import GraphMap, ProductMetric
from .metrics import make_metric, poincare_ball

__all__ = [
    "CmcFamily",
    "BuiltinGraph",
    "GRAPH_REGISTRY",
    "builtin_graph",
    "cmc_family_eval",
    "random_polynomial",
    "random_periodic",
    "hyperbolic_distance",
    "verify_family_properties",
    "family_samples",
]

_GL16 = np.polynomial.legendre.leggauss(16)
_NUM_PANELS = 32


def hyperbolic_distance(x):
    """Distance to the origin of the Poincare ball."""
    rho = np.linalg.norm(np.asarray(x, float))
    return float(np.log((1 + rho) / (1 - rho)))


# ---------------------------------------------------------------------------
# radial profile


def _shc(z):
    """sinh(z)/z, smooth through z = 0."""
    small = jnp.abs(z) < 1e-2
    zs = jnp.where(small, 1.0, z)
    series = 1 + z**2 / 6 + z**4 / 120 + z**6 / 5040
    return jnp.where(small, series, jnp.sinh(zs) / zs)


def _composite_gl(fun, a, b, panels=_NUM_PANELS):
    nodes, weights = _GL16
    edges = a + (b - a) * jnp.linspace(0.0, 1.0, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = 0.5 * (hi - lo) * (jnp.asarray(nodes)[None, :] + 1) + lo
    return jnp.sum(0.5 * (hi - lo) * jnp.asarray(weights)[None, :] * fun(t))


def _sinh_ratio(t, r):
    """sinh(t)/sinh(r) for 0 <= t <= r, stable for small and large r."""
    small = r < 1.0
    rs = jnp.where(small, 1.0, r)
    rsm = jnp.where(small, r, 1.0)
    near = (t / rsm) * _shc(t) / _shc(rsm)
    far = jnp.exp(t - rs) * (-jnp.expm1(-2 * t)) / (-jnp.expm1(-2 * rs))
    return jnp.where(small, near, far)


def profile_ratio(m, c, r):
    """I(r) for the CMC family (jax-differentiable in r and c)."""
    r = jnp.asarray(r, dtype=jnp.float64)
    if m == 2:
        return c * jnp.tanh(r / 2)
    if m == 3:
        small = r < 0.5
        rs = jnp.where(small, r, 0.5)
        rl = jnp.where(small, 1.0, r)
        # (sinh(2r)/2 - r) / r^3 as a power series
        series = sum(4.0**k * rs ** (2 * k - 2) / float(np.prod(np.arange(1, 2 * k + 2))) for k in range(1, 13))
        near = c * rs * series / (2 * _shc(rs) ** 2)
        far = c * (jnp.sinh(2 * rl) / 2 - rl) / (2 * jnp.sinh(rl) ** 2)
        return jnp.where(small, near, far)
    # int_0^r (sinh t / sinh r)^(m-1) dt; the integrand is below e^-40 for t < r - 40/(m-1)
    def integral(r):
        lo = jnp.maximum(0.0, r - 40.0 / (m - 1))
        return _composite_gl(lambda t: _sinh_ratio(t, r) ** (m - 1), lo, r)

    return c * jnp.vectorize(integral)(r)


def profile_slope(m, c, r):
    """f_c'(r) = I / sqrt(1 + I^2)."""
    i = profile_ratio(m, c, r)
    return i / jnp.sqrt(1 + i**2)


@lru_cache(maxsize=None)
def _profile_value(m):
    @jax.custom_jvp
    def value(c, r):
        return _composite_gl(lambda t: profile_slope(m, c, t), 0.0, r)

    @value.defjvp
    def _value_jvp(primals, tangents):
        c, r = primals
        dc, dr = tangents
        out = value(c, r)
        dval_dc = _composite_gl(lambda t: _dslope_dc(m, c, t), 0.0, r)
        return out, profile_slope(m, c, r) * dr + dval_dc * dc

    return value


def _dslope_dc(m, c, t):
    # slope depends on c only through I = c * I_1, so d slope / dc = I_1 / (1 + I^2)^(3/2)
    i1 = profile_ratio(m, 1.0, t)
    i = c * i1
    return i1 / (1 + i**2) ** 1.5


def profile_value(m, c, r):
    return _profile_value(m)(jnp.asarray(c, dtype=jnp.float64), jnp.asarray(r, dtype=jnp.float64))


def _series_coefficients(m, c):
    a = 2 * c / m
    b = 4 * c / (3 * m) - 16 * (c * (m - 1) / (12 * m * (m + 2)) + c**3 / (8 * m**3))
    return a, b


def _cmc_fn(params, x):
    c, d = params[0], params[1]
    m = x.shape[0]
    s = x @ x
    small = s < 1e-8
    ss = jnp.where(small, 0.25, s)
    r = 2 * jnp.arctanh(jnp.sqrt(ss))
    a, b = _series_coefficients(m, c)
    near = a * s + b * s**2
    far = profile_value(m, c, r)
    return jnp.reshape(jnp.where(small, near, far) + d, (1,))


@dataclass(frozen=True)
class CmcFamily:
    """The constant mean curvature graphs ``f_c + d`` over H^m (Poincare ball)."""

    m: int
    c: float
    d: float = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("the CMC family needs m >= 2")

    def ratio(self, r):
        return float(profile_ratio(self.m, self.c, r))

    def slope(self, r):
        return float(profile_slope(self.m, self.c, r))

    def value(self, r):
        """f_c + d as a function of hyperbolic distance r (any r >= 0)."""
        return float(profile_value(self.m, self.c, r)) + self.d

    def gradient_bound(self):
        """Supremum of |grad f_c|^2, approached as r -> infinity."""
        q = self.c**2 / (self.m - 1) ** 2
        return q / (1 + q)

    def graph_map(self):
        return GraphMap(
            f"cmc_family(m={self.m}, c={self.c}, d={self.d})",
            self.m,
            1,
            _cmc_fn,
            params=np.array([self.c, self.d], float),
            info={"kind": "cmc_family", "c": self.c, "d": self.d},
        )

    def product(self):
        return ProductMetric(poincare_ball(self.m), make_metric("line"))


def cmc_family_eval(m, c, x, d=0.0):
    """Value and g1-gradient vector of ``f_c + d`` at a point of the Poincare ball."""
    x = np.atleast_1d(np.asarray(x, float))
    if x.shape != (m,):
        raise DomainError(f"expected a point of length {m}")
    ball = poincare_ball(m)
    if np.linalg.norm(x) >= ball.chart_radius:
        raise DomainError(f"|x| = {np.linalg.norm(x):.6g} reaches the chart boundary")
    f = CmcFamily(m, c, d).graph_map()
    value = float(f.eval(x)[0])
    df = f.jacobian(x)[0]
    grad = np.linalg.solve(ball.eval(x), df)
    return value, grad


# ---------------------------------------------------------------------------
# other builtin maps


def _constant(params, x):
    return params + 0.0 * jnp.sum(x)


def _affine(params, x):
    A, b = params
    return A @ x + b


def _hyperboloid(params, x):
    return jnp.reshape(jnp.sqrt(params**2 + x @ x), (1,))


def _polynomial(params, x):
    c0, c1, c2, c3 = params
    return (
        c0
        + c1 @ x
        + jnp.einsum("aij,i,j->a", c2, x, x)
        + jnp.einsum("aijk,i,j,k->a", c3, x, x, x)
    )


def _periodic(params, x):
    c0, waves, cos_amp, sin_amp, period = params
    phase = 2 * jnp.pi * (waves @ x) / period
    return c0 + jnp.cos(phase) @ cos_amp + jnp.sin(phase) @ sin_amp


def _geodesic_hyperbolic(params, x):
    speed, direction = params
    return jnp.tanh(speed * x[0] / 2) * direction


def _geodesic_flat(params, x):
    speed, direction = params
    return speed * x[0] * direction


def _inverse_stereographic(x):
    s = x @ x
    return jnp.concatenate([2 * x, jnp.reshape(s - 1, (1,))]) / (1 + s)


def _sphere_height(params, x):
    eps, v, d = params
    return jnp.reshape(eps * _inverse_stereographic(x) @ v + d, (1,))


def _sphere_quadratic(params, x):
    eps, Q = params
    X = _inverse_stereographic(x)
    return jnp.reshape(eps * X @ Q @ X, (1,))


@dataclass(frozen=True)
class BuiltinGraph:
    name: str
    parameters: dict
    graph: GraphMap
    product: ProductMetric
    totally_geodesic: bool = False


def _slice(m=2, n=1, value=None, sigma1="euclidean", sigma2=None):
    value = np.zeros(n) if value is None else np.atleast_1d(np.asarray(value, float))
    g = GraphMap("slice", m, n, _constant, params=value)
    s2 = sigma2 or ("line" if n == 1 else "euclidean")
    return g, _product(sigma1, m, s2, n), True


def _product(name1, m, name2, n):
    def build(name, dim):
        if name in ("line", "circle"):
            if dim != 1:
                raise DomainError(f"{name} is one-dimensional")
            return make_metric(name)
        return make_metric(name, dim=dim)

    return ProductMetric(build(name1, m), build(name2, n))


def _affine_builder(A=None, b=None, m=2, n=2):
    A = np.array([[0.5, 0.0], [0.0, 1.0 / 3.0]]) if A is None else np.atleast_2d(np.asarray(A, float))
    n, m = A.shape
    b = np.zeros(n) if b is None else np.atleast_1d(np.asarray(b, float))
    if np.linalg.norm(A, 2) >= 1:
        raise SpacelikeError("affine map with operator norm >= 1 is not spacelike", lambda1=float(np.linalg.norm(A, 2)))
    g = GraphMap("affine", m, n, _affine, params=(A, b))
    return g, _product("euclidean", m, "line" if n == 1 else "euclidean", n), True


def _hyperboloid_builder(m=2, a=1.0):
    g = GraphMap("hyperboloid", m, 1, _hyperboloid, params=np.asarray(float(a)))
    return g, _product("euclidean", m, "line", 1), False


def _geodesic_cylinder(m=2, n=2, speed=0.6, direction=None, target="hyperbolic"):
    if not 0 <= speed < 1:
        raise SpacelikeError(f"geodesic speed {speed} must be < 1 for a spacelike graph", lambda1=float(speed))
    u = np.zeros(n) if direction is None else np.asarray(direction, float)
    if direction is None:
        u[0] = 1.0
    u = u / np.linalg.norm(u)
    if target == "hyperbolic":
        fn, s2 = _geodesic_hyperbolic, "poincare_ball"
    elif target == "flat":
        fn, s2 = _geodesic_flat, "euclidean"
    else:
        raise ValueError(f"unknown geodesic target {target!r}")
    g = GraphMap("geodesic_cylinder", m, n, fn, params=(np.asarray(float(speed)), u), info={"target": target})
    return g, _product("euclidean", m, s2, n), True


def random_polynomial(m=2, n=2, seed=0, target_lambda=0.7, radius=1.0, sigma1="euclidean", sigma2="euclidean"):
    """Random cubic map scaled so the largest singular value on the ball is ``target_lambda``."""
    rng = np.random.default_rng(seed)
    c0 = rng.normal(size=n) * 0.1
    c1 = rng.normal(size=(n, m))
    c2 = rng.normal(size=(n, m, m))
    c2 = 0.5 * (c2 + np.swapaxes(c2, 1, 2))
    c3 = rng.normal(size=(n, m, m, m)) / 3
    probe = _product(sigma1, m, sigma2, n)
    pts = _ball_samples(m, radius, 400, rng)
    # curved factors make lambda depend nonlinearly on the scale; a Euclidean
    # first guess keeps the image inside the chart, then a few rescalings settle it
    euclid = max(np.linalg.norm(c1 + 2 * np.einsum("aij,j->ai", c2, p) + 3 * np.einsum("aijk,j,k->ai", c3, p, p), 2) for p in pts)
    scale = 0.5 * target_lambda / (euclid * _metric_scale(probe))
    for _ in range(6):
        params = (c0 * scale, c1 * scale, c2 * scale, c3 * scale)
        g = GraphMap("polynomial", m, n, _polynomial, params=params)
        worst = max(_largest_singular(probe, g, p) for p in pts)
        if abs(worst - target_lambda) < 1e-3 * target_lambda:
            break
        scale *= target_lambda / worst
    return GraphMap("polynomial", m, n, _polynomial, params=params, info={"seed": seed, "radius": radius})


def _metric_scale(product):
    """Rough ratio of target to base metric scale at the chart origins."""
    g1 = product.sigma1.eval(np.zeros(product.m))
    g2 = product.sigma2.eval(np.zeros(product.n))
    return float(np.sqrt(np.max(np.linalg.eigvalsh(g2)) / np.min(np.linalg.eigvalsh(g1))))


def _largest_singular(product, g, p):
    g1 = product.sigma1.eval(p)
    g2 = product.sigma2.eval(g.eval(p))
    J = g.jacobian(p)
    return float(np.sqrt(max(scipy.linalg.eigvalsh(J.T @ g2 @ J, g1)[-1], 0.0)))


def _ball_samples(m, radius, count, rng):
    v = rng.normal(size=(count, m))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * radius * rng.uniform(size=(count, 1)) ** (1.0 / m)


def random_periodic(m=2, n=1, seed=0, modes=3, max_slope=0.5, period=1.0, mean=None):
    """Random trigonometric polynomial on the flat torus with sup |df| = ``max_slope``."""
    rng = np.random.default_rng(seed)
    grid = np.array(np.meshgrid(*[np.arange(-modes, modes + 1)] * m, indexing="ij")).reshape(m, -1).T
    keep = [k for k in grid if tuple(k) > tuple(-k)]  # one representative per +/- pair
    waves = np.array(keep, float)
    norms = np.linalg.norm(waves, axis=1)
    cos_amp = rng.normal(size=(len(waves), n)) / (1 + norms[:, None] ** 2)
    sin_amp = rng.normal(size=(len(waves), n)) / (1 + norms[:, None] ** 2)
    c0 = rng.normal(size=n) if mean is None else np.atleast_1d(np.asarray(mean, float))
    params = (c0, waves, cos_amp, sin_amp, np.asarray(float(period)))
    g = GraphMap("periodic", m, n, _periodic, params=params)
    pts = rng.uniform(0, period, size=(600 if m > 1 else 200, m))
    slope = max(np.linalg.norm(g.jacobian(p), 2) for p in pts)
    scale = max_slope / slope
    params = (c0, waves, cos_amp * scale, sin_amp * scale, np.asarray(float(period)))
    return GraphMap("periodic", m, n, _periodic, params=params, info={"seed": seed, "period": period})


def _polynomial_builder(m=2, n=2, seed=0, target_lambda=0.7, radius=1.0, sigma1="euclidean", sigma2="euclidean"):
    g = random_polynomial(m, n, seed, target_lambda, radius, sigma1, sigma2)
    return g, _product(sigma1, m, sigma2, n), False


def _periodic_builder(m=2, n=1, seed=0, modes=3, max_slope=0.5, period=1.0, mean=None):
    g = random_periodic(m, n, seed, modes, max_slope, period, mean)
    s2 = "line" if n == 1 else "euclidean"
    product = ProductMetric(make_metric("flat_torus", dim=m, period=period), make_metric(s2) if n == 1 else make_metric(s2, dim=n))
    return g, product, False


def _cmc_builder(m=2, c=1.0, d=0.0):
    fam = CmcFamily(m, c, d)
    return fam.graph_map(), fam.product(), c == 0


def _sphere_height_builder(m=2, eps=0.3, direction=None, d=0.0):
    if not 0 <= abs(eps) < 1:
        raise SpacelikeError("height perturbation needs |eps| < 1", lambda1=abs(eps))
    v = np.zeros(m + 1) if direction is None else np.asarray(direction, float)
    if direction is None:
        v[-1] = 1.0
    v = v / np.linalg.norm(v)
    g = GraphMap("sphere_height", m, 1, _sphere_height, params=(np.asarray(float(eps)), v, np.asarray(float(d))))
    return g, _product("sphere_stereo", m, "line", 1), eps == 0


def _sphere_quadratic_builder(m=2, eps=0.2, seed=0):
    rng = np.random.default_rng(seed)
    Q = rng.normal(size=(m + 1, m + 1))
    Q = 0.5 * (Q + Q.T)
    Q /= np.linalg.norm(Q, 2)
    # |grad (X.QX)| <= 2|Q| on the unit sphere
    if not 2 * abs(eps) < 1:
        raise SpacelikeError("quadratic perturbation needs |eps| < 1/2", lambda1=2 * abs(eps))
    g = GraphMap("sphere_quadratic", m, 1, _sphere_quadratic, params=(np.asarray(float(eps)), Q))
    return g, _product("sphere_stereo", m, "line", 1), eps == 0


GRAPH_REGISTRY = {
    "affine": _affine_builder,
    "cmc_family": _cmc_builder,
    "geodesic_cylinder": _geodesic_cylinder,
    "hyperboloid": _hyperboloid_builder,
    "periodic": _periodic_builder,
    "polynomial": _polynomial_builder,
    "slice": _slice,
    "sphere_height": _sphere_height_builder,
    "sphere_quadratic": _sphere_quadratic_builder,
}


def builtin_graph(name, **params):
    """Instantiate a registered graph together with its natural product metric."""
    try:
        builder = GRAPH_REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown graph {name!r}; known: {sorted(GRAPH_REGISTRY)}") from None
    graph, product, geodesic = builder(**params)
    return BuiltinGraph(name, dict(params), graph, product, totally_geodesic=geodesic)


# ---------------------------------------------------------------------------
# family verification

FAMILY_SHELLS = (0.25, 0.5, 1.0, 2.0, 5.0)
PROFILE_SHELLS = FAMILY_SHELLS + (20.0,)


def family_samples(m, count, seed=0, shells=FAMILY_SHELLS):
    """Points of the Poincare ball on hyperbolic shells, cycling through ``shells``."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(count, m))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.array([shells[k % len(shells)] for k in range(count)])
    return dirs * np.tanh(radii / 2)[:, None], radii


def verify_family_properties(m, c, samples=50, seed=0, tolerance_scale=1.0):
    """Constancy of ``<H, nu>``, the gradient bound, the shift foliation and
    monotonicity in ``c`` for the CMC family, as a list of reports."""
    from .extrinsic import calabi_operator, hypersurface_mean_curvature
    from .identities import IdentityReport

    if m not in (2, 3):
        raise ValueError("family verification covers m in {2, 3}")
    if abs(c) > 10:
        raise ValueError("family verification covers |c| <= 10")
    fam = CmcFamily(m, c)
    f, product = fam.graph_map(), fam.product()
    pts, radii = family_samples(m, samples, seed)
    hnu, slopes = hypersurface_mean_curvature(product, f, pts)
    oracle = calabi_operator(product, f, pts)
    if not (np.all(np.isfinite(hnu)) and np.all(np.isfinite(oracle))):
        raise NumericalError(f"non-finite mean curvature for the family m={m}, c={c}")
    reports = []
    origin = (0.0,) * m

    spread = float(np.std(hnu))
    mean = float(np.mean(hnu))
    omean = float(np.mean(oracle))
    tol = 1e-6 * tolerance_scale
    agree = float(np.max(np.abs(hnu - oracle)))
    res = abs(mean - omean) / (1 + abs(mean))
    ok = spread < tol and res < tol and agree < tol and abs(omean - c) < tol
    reports.append(IdentityReport(
        "family_constant_mean_curvature", "family", origin, mean, omean,
        {"std": spread, "max_pointwise_gap": agree, "parameter": c},
        float(res), tol, "pass" if ok else "fail", {},
        {"std_below_tolerance": spread < tol, "matches_parameter": abs(omean - c) < tol},
    ))

    bound = fam.gradient_bound()
    prof = np.array([fam.slope(r) ** 2 for r in PROFILE_SHELLS])
    worst = max(float(np.max(slopes**2)), float(np.max(prof)))
    far = prof[-1]
    approach = abs(bound - far)
    strict = worst < bound or c == 0
    ok = strict and approach < 1e-3 and np.allclose(slopes**2, [fam.slope(r) ** 2 for r in radii], atol=1e-12)
    reports.append(IdentityReport(
        "family_gradient_bound", "family", origin, worst, bound,
        {"profile_at_20": float(far), "gap_at_20": float(approach)},
        float(max(worst - bound, 0.0)), 1e-3, "pass" if ok else "fail", {},
        {"strict": bool(strict), "approached": bool(approach < 1e-3)},
    ))

    shifts = np.array([-1.0, 0.0, 0.5, 2.0])
    vals = np.array([[float(f.eval(p)[0]) + d for d in shifts] for p in pts[: min(samples, 10)]])
    gaps = np.diff(vals, axis=1) - np.diff(shifts)[None, :]
    ok = bool(np.all(np.diff(vals, axis=1) > 0)) and float(np.max(np.abs(gaps))) < 1e-12
    reports.append(IdentityReport(
        "family_shift_foliation", "family", origin, float(np.min(np.diff(vals, axis=1))), float(np.min(np.diff(shifts))),
        {"max_shift_defect": float(np.max(np.abs(gaps)))}, float(np.max(np.abs(gaps))), 1e-12,
        "pass" if ok else "fail",
    ))

    cs = c + np.array([-0.25, 0.0, 0.25])
    rs = np.array([0.25, 1.0, 5.0])
    grid = np.array([[CmcFamily(m, ci).value(r) for ci in cs] for r in rs])
    ok = bool(np.all(np.diff(grid, axis=1) > 0))
    reports.append(IdentityReport(
        "family_monotone_in_c", "family", origin, float(np.min(np.diff(grid, axis=1))), 0.0,
        {"values": grid.tolist()}, 0.0, 0.0, "pass" if ok else "fail",
    ))
    return reports
