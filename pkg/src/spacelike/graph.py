"""Graphs of maps f: Sigma_1 -> Sigma_2 in the product (Sigma_1 x Sigma_2, g1 - g2).

The singular values of ``df`` are the square roots of the eigenvalues of
``f*g2`` relative to ``g1``.  The graph is spacelike iff every singular value
is below 1, and the hyperbolic angle is ``cosh(theta) = 1/sqrt(prod(1 - lambda_i^2))``.

Vectors of the product are stored in product coordinates ``(x, y)`` with
length ``m + n``.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from ._ad import as_params, compiled, compiled_jet, jnp, to_numpy
from .errors import DomainError, SpacelikeError

__all__ = [
    "GraphMap",
    "ProductMetric",
    "SpacelikeFrameData",
    "analyze_graph_point",
    "frame_from_data",
    "pullback_volume_components",
    "SPACELIKE_TOL",
    "RANK_TOL",
]

SPACELIKE_TOL = 1e-8
RANK_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class GraphMap:
    """A smooth map ``f: R^m -> R^n`` given by a jax function ``fn(params, x)``.

    ``domain`` is an optional extra predicate on points of Sigma_1; the
    charts of both factors are checked separately by :class:`ProductMetric`.
    """

    name: str
    m: int
    n: int
    fn: object
    params: object = ()
    domain: object = None
    info: dict = field(default_factory=dict)
    _jparams: object = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_jparams", as_params(self.params))

    @property
    def jparams(self):
        return self._jparams

    def check(self, p):
        p = np.atleast_1d(np.asarray(p, float))
        if p.shape != (self.m,):
            raise DomainError(f"{self.name}: expected a point of length {self.m}")
        if self.domain is not None and not self.domain(p):
            raise DomainError(f"{self.name}: point {p} outside the map's domain")
        return p

    def eval(self, p):
        p = self.check(p)
        return np.asarray(compiled(self.fn)(self.jparams, jnp.asarray(p)))

    def jet(self, p, order=3):
        p = self.check(p)
        return list(to_numpy(compiled_jet(self.fn, order)(self.jparams, jnp.asarray(p))))

    def jacobian(self, p):
        return self.jet(p, 1)[1]

    def second_derivs(self, p):
        return self.jet(p, 2)[2]


@dataclass(frozen=True)
class ProductMetric:
    """The pseudo-Riemannian product ``g1 - g2`` of two metric fields."""

    sigma1: object
    sigma2: object

    @property
    def m(self):
        return self.sigma1.dim

    @property
    def n(self):
        return self.sigma2.dim

    @property
    def signature(self):
        return (self.m, self.n)

    def eval(self, x, y):
        g1 = self.sigma1.eval(x)
        g2 = self.sigma2.eval(y)
        return scipy.linalg.block_diag(g1, -g2)

    def check_map(self, f):
        if (f.m, f.n) != (self.m, self.n):
            raise DomainError(
                f"map {f.name} is R^{f.m} -> R^{f.n} but the product is {self.m} + {self.n} dimensional"
            )


@dataclass(frozen=True)
class SpacelikeFrameData:
    """Singular values, adapted frames and volume data at one point.

    ``a_tangent`` / ``a_normal`` hold g1- / g2-orthonormal vectors as columns
    in chart coordinates; ``e_tangent`` / ``e_normal`` hold the adapted
    orthonormal frames of the graph as product-coordinate columns.
    """

    point: np.ndarray
    image: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    jacobian: np.ndarray
    lambdas: np.ndarray
    rank: int
    a_tangent: np.ndarray
    a_normal: np.ndarray
    e_tangent: np.ndarray
    e_normal: np.ndarray
    cosh_theta: float
    delta: float
    omega_top: float
    omega_ai: np.ndarray
    omega_abij: np.ndarray

    @property
    def m(self):
        return self.g1.shape[0]

    @property
    def n(self):
        return self.g2.shape[0]

    @property
    def gbar(self):
        return scipy.linalg.block_diag(self.g1, -self.g2)

    @property
    def tangent_coords(self):
        """Chart components of e_i as vectors on Sigma_1 (i.e. pi_1 e_i)."""
        return self.e_tangent[: self.m]

    def lam(self, i):
        """lambda_i with the convention lambda_i = 0 beyond the map's rank."""
        return self.lambdas[i] if i < self.m else 0.0


def _normalize_sign(v, key):
    """Flip ``v`` so that the largest-magnitude entry of ``key`` is positive."""
    idx = int(np.argmax(np.abs(key) - 1e-12 * np.arange(key.size)))
    return -v if key[idx] < 0 else v


def _gram_schmidt_complete(vectors, metric, dim):
    """Complete metric-orthonormal columns to a basis using coordinate vectors in order."""
    basis = list(vectors.T) if vectors.size else []
    for k in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim)
        v[k] = 1.0
        for b in basis:
            v = v - (b @ metric @ v) * b
        norm = np.sqrt(v @ metric @ v)
        if norm > 1e-8:
            basis.append(v / norm)
    return np.array(basis).T.reshape(dim, dim)


def _reorthonormalize_normals(e_nor, e_tan, gbar):
    # Exact when every rank decision is clean; removes O(lambda) defects
    # when a singular value sits just below RANK_TOL.
    out = e_nor - e_tan @ (e_tan.T @ gbar @ e_nor)
    for k in range(out.shape[1]):
        v = out[:, k]
        for j in range(k):
            v = v + (out[:, j] @ gbar @ v) * out[:, j]
        out[:, k] = v / np.sqrt(-(v @ gbar @ v))
    return out


def frame_from_data(point, image, g1, g2, jacobian):
    """Build :class:`SpacelikeFrameData` from ``g1(p)``, ``g2(f(p))`` and ``df(p)``."""
    g1 = np.asarray(g1, float)
    g2 = np.asarray(g2, float)
    J = np.asarray(jacobian, float)
    m, n = g1.shape[0], g2.shape[0]
    pull = J.T @ g2 @ J
    mu, vecs = scipy.linalg.eigh(0.5 * (pull + pull.T), g1)
    order = np.argsort(-mu, kind="stable")
    mu = np.clip(mu[order], 0.0, None)
    vecs = vecs[:, order]
    lambdas = np.sqrt(mu)
    if mu[0] > 1.0 - SPACELIKE_TOL:
        raise SpacelikeError(
            f"graph is not spacelike at {np.asarray(point)}: lambda_1 = {lambdas[0]:.12g}",
            lambda1=float(lambdas[0]),
            location=np.asarray(point),
        )
    rank = min(int(np.sum(lambdas > RANK_TOL)), n)
    lambdas[rank:] = np.where(lambdas[rank:] > RANK_TOL, lambdas[rank:], 0.0)
    mu = lambdas**2

    a = vecs.copy()
    for i in range(m):
        key = J @ a[:, i] if lambdas[i] > RANK_TOL else a[:, i]
        a[:, i] = _normalize_sign(a[:, i], key)
    if np.linalg.det(a) < 0:
        flat = [i for i in range(m) if lambdas[i] <= RANK_TOL]
        a[:, flat[-1] if flat else m - 1] *= -1

    images = np.array([J @ a[:, i] / lambdas[i] for i in range(rank)]).T.reshape(n, rank)
    a_normal = _gram_schmidt_complete(images, g2, n)

    s = 1.0 / np.sqrt(1.0 - mu)
    e_tan = np.vstack([a, J @ a]) * s
    e_nor = np.zeros((m + n, n))
    for k in range(n):
        lam = lambdas[k] if k < m else 0.0
        top = lam * a[:, k] if k < m else np.zeros(m)
        e_nor[:, k] = np.concatenate([top, a_normal[:, k]]) / np.sqrt(1.0 - lam**2)
    e_nor = _reorthonormalize_normals(e_nor, e_tan, scipy.linalg.block_diag(g1, -g2))

    cosh_theta = float(1.0 / np.sqrt(np.prod(1.0 - mu)))
    partial = dict(
        point=np.asarray(point, float),
        image=np.asarray(image, float),
        g1=g1,
        g2=g2,
        jacobian=J,
        lambdas=lambdas,
        rank=rank,
        a_tangent=a,
        a_normal=a_normal,
        e_tangent=e_tan,
        e_normal=e_nor,
        cosh_theta=cosh_theta,
        delta=float(1.0 - mu[0]),
    )
    top, ai, abij = _volume_components(g1, e_tan[:m], e_nor[:m])
    return SpacelikeFrameData(omega_top=top, omega_ai=ai, omega_abij=abij, **partial)


def _det(cols):
    # exactly singular substitutions are expected (normals with no Sigma_1 part)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.linalg.det(cols)


def _volume_components(g1, tan1, nor1):
    """Substitute frame vectors (Sigma_1 parts) into the g1 volume form."""
    m, n = tan1.shape[0], nor1.shape[1]
    vol = np.sqrt(np.linalg.det(g1))
    top = float(vol * np.linalg.det(tan1))
    ai = np.zeros((n, m))
    abij = np.zeros((n, n, m, m))
    for k in range(n):
        for i in range(m):
            cols = tan1.copy()
            cols[:, i] = nor1[:, k]
            ai[k, i] = vol * _det(cols)
    for i, j in combinations(range(m), 2):
        for k in range(n):
            for l in range(n):
                cols = tan1.copy()
                cols[:, i] = nor1[:, k]
                cols[:, j] = nor1[:, l]
                val = vol * _det(cols)
                abij[k, l, i, j] = val
                abij[l, k, j, i] = val
    return top, ai, abij


def pullback_volume_components(frame):
    """``(Omega_1..m, Omega_{alpha i}, Omega_{alpha beta i j})`` of the g1 volume form.

    Normal indices are shifted to ``0..n-1``; ``Omega_{alpha beta i j}`` puts
    ``e_alpha`` in slot ``i`` and ``e_beta`` in slot ``j``.
    """
    m = frame.m
    return _volume_components(frame.g1, frame.e_tangent[:m], frame.e_normal[:m])


def analyze_graph_point(product, f, p):
    """Singular values, adapted frames and hyperbolic angle of the graph of ``f`` at ``p``."""
    product.check_map(f)
    p = product.sigma1.point(f.check(p))
    y = f.eval(p)
    y = product.sigma2.point(y)
    return frame_from_data(p, y, product.sigma1.eval(p), product.sigma2.eval(y), f.jacobian(p))
