"""Pointwise differential data of a graph immersion, compiled once per model.

The kernel is built from the three jax functions (g1, g2, f) and is cached
on them, so scenarios that only differ in parameters share one compilation.
Everything here is frame-free: tensors are expressed in product coordinates
``(x, y)`` and graph coordinates ``x``.  Adapted frames are applied later in
numpy.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._ad import jax, jnp, to_numpy
from .metrics import christoffel_fn, riemann_fn

__all__ = ["GraphJet", "graph_jet", "graph_geometry"]


def _block(a, b):
    m, n = a.shape[0], b.shape[0]
    top = jnp.concatenate([a, jnp.zeros((m, n))], axis=1)
    bottom = jnp.concatenate([jnp.zeros((n, m)), b], axis=1)
    return jnp.concatenate([top, bottom], axis=0)


def _block3(a, b):
    """Block-diagonal 3-tensor: a on x-indices, b on y-indices."""
    m, n = a.shape[0], b.shape[0]
    out = jnp.zeros((m + n,) * 3)
    out = out.at[:m, :m, :m].set(a)
    return out.at[m:, m:, m:].set(b)


def _block4(a, b):
    m, n = a.shape[0], b.shape[0]
    out = jnp.zeros((m + n,) * 4)
    out = out.at[:m, :m, :m, :m].set(a)
    return out.at[m:, m:, m:, m:].set(b)


def _geometry_fn(g1fn, g2fn, ffn):
    gam1, gam2 = christoffel_fn(g1fn), christoffel_fn(g2fn)
    jac = jax.jacfwd(ffn, argnums=1)
    hess = jax.jacfwd(jac, argnums=1)

    def geometry(P, x):
        p1, p2, pf = P
        y = ffn(pf, x)
        J = jac(pf, x)
        m = x.shape[0]
        dF = jnp.concatenate([jnp.eye(m), J], axis=0)
        g1 = g1fn(p1, x)
        g2 = g2fn(p2, y)
        gbar = _block(g1, -g2)
        G = g1 - J.T @ g2 @ J
        Ginv = jnp.linalg.inv(G)
        Pn = jnp.eye(gbar.shape[0]) - dF @ Ginv @ dF.T @ gbar
        Gbar = _block3(gam1(p1, x), gam2(p2, y))
        acc = jnp.einsum("abc,bi,cj->aij", Gbar, dF, dF)
        acc = acc.at[m:].add(hess(pf, x))
        B = jnp.einsum("ab,bij->aij", Pn, acc)
        H = jnp.einsum("ij,aij->a", Ginv, B)
        return dict(y=y, J=J, dF=dF, gbar=gbar, G=G, Ginv=Ginv, Pn=Pn, Gbar=Gbar, B=B, H=H)

    return geometry


def build_kernel(g1fn, g2fn, ffn):
    riem1, riem2 = riemann_fn(g1fn), riemann_fn(g2fn)
    jac = jax.jacfwd(ffn, argnums=1)

    def induced(P, x):
        p1, p2, pf = P
        J = jac(pf, x)
        return g1fn(p1, x) - J.T @ g2fn(p2, ffn(pf, x)) @ J

    gamM = christoffel_fn(induced)
    riemM = riemann_fn(induced)

    geometry = _geometry_fn(g1fn, g2fn, ffn)

    def cosh_theta(P, x):
        p1, p2, pf = P
        J = jac(pf, x)
        g1 = g1fn(p1, x)
        G = g1 - J.T @ g2fn(p2, ffn(pf, x)) @ J
        return jnp.sqrt(jnp.linalg.det(g1) / jnp.linalg.det(G))

    def second_form(P, x):
        return geometry(P, x)["B"]

    def mean_curvature(P, x):
        return geometry(P, x)["H"]

    def normal_basis(P, x):
        # P_perp applied to the coordinate directions of Sigma_2
        m = x.shape[0]
        return geometry(P, x)["Pn"][:, m:]

    def normal_derivative(P, x):
        """N[a, beta, k] = (nabla-perp_k xi_beta)^a."""
        geo = geometry(P, x)
        xi = normal_basis(P, x)
        dxi = jax.jacfwd(normal_basis, argnums=1)(P, x)
        amb = dxi + jnp.einsum("acd,ck,db->abk", geo["Gbar"], geo["dF"], xi)
        return jnp.einsum("ae,ebk->abk", geo["Pn"], amb)

    def kernel(P, x):
        p1, p2, pf = P
        geo = geometry(P, x)
        y = geo["y"]
        u = cosh_theta(P, x)
        du = jax.grad(cosh_theta, argnums=1)(P, x)
        d2u = jax.jacfwd(jax.grad(cosh_theta, argnums=1), argnums=1)(P, x)
        dB = jax.jacfwd(second_form, argnums=1)(P, x)
        dH = jax.jacfwd(mean_curvature, argnums=1)(P, x)
        N1 = normal_derivative(P, x)
        dN1 = jax.jacfwd(normal_derivative, argnums=1)(P, x)
        # N2[a, beta, k, l] = nabla-perp_l nabla-perp_k xi_beta
        N2 = jnp.einsum(
            "ae,ebkl->abkl",
            geo["Pn"],
            dN1 + jnp.einsum("ecd,cl,dbk->ebkl", geo["Gbar"], geo["dF"], N1),
        )
        r1up, r1 = riem1(p1, x)
        r2up, r2 = riem2(p2, y)
        rMup, rM = riemM(P, x)
        return dict(
            geo,
            x=x,
            u=u,
            du=du,
            d2u=d2u,
            dB=dB,
            dH=dH,
            xi=normal_basis(P, x),
            N1=N1,
            N2=N2,
            g1=g1fn(p1, x),
            g2=g2fn(p2, y),
            R1=r1,
            R2=r2,
            Rbar_up=_block4(r1up, r2up),
            GammaM=gamM(P, x),
            RM=rM,
        )

    return kernel


@lru_cache(maxsize=None)
def _compiled_kernel(g1fn, g2fn, ffn):
    return jax.jit(build_kernel(g1fn, g2fn, ffn))


@lru_cache(maxsize=None)
def _compiled_geometry(g1fn, g2fn, ffn):
    return jax.jit(jax.vmap(_geometry_fn(g1fn, g2fn, ffn), in_axes=(None, 0)))


def graph_geometry(product, f, points):
    """First- and second-order data (``G``, ``B``, ``H``, ...) at a batch of points."""
    P = (product.sigma1.jparams, product.sigma2.jparams, f.jparams)
    kern = _compiled_geometry(product.sigma1.fn, product.sigma2.fn, f.fn)
    pts = np.atleast_2d(np.asarray(points, float))
    return to_numpy(kern(P, jnp.asarray(pts)))


@dataclass(frozen=True)
class GraphJet:
    """All frame-free pointwise data of the graph at one point (numpy arrays)."""

    data: dict

    def __getattr__(self, name):
        try:
            return self.data[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def m(self):
        return self.data["G"].shape[0]

    @property
    def n(self):
        return self.data["g2"].shape[0]


def graph_jet(product, f, p):
    """Evaluate the compiled graph kernel at ``p`` (no chart checks here)."""
    P = (product.sigma1.jparams, product.sigma2.jparams, f.jparams)
    kern = _compiled_kernel(product.sigma1.fn, product.sigma2.fn, f.fn)
    out = to_numpy(kern(P, jnp.asarray(np.asarray(p, float))))
    return GraphJet(out)
