"""Second fundamental form, mean curvature, ambient curvature and the Gauss,
Codazzi and Ricci equations of spacelike graphs.

Conventions: ``B(X, Y) = (nabla-bar_X Y)^perp``, ``H = trace_g B`` and
``h^alpha_ij = -gbar(B(e_i, e_j), e_alpha)`` for the timelike unit normals
``e_alpha``, so that ``B = sum_alpha h^alpha e_alpha``.  For hypersurfaces
``<H, nu> = -gbar(H, nu)`` with the future-pointing unit normal ``nu``; this is
``div(grad f / sqrt(1 - |grad f|^2))`` for graphs into the line.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from functools import lru_cache

from ._ad import jax, jnp, to_numpy
from .graph import analyze_graph_point
from .kernel import graph_geometry, graph_jet
from .metrics import eval_curvature

__all__ = [
    "ExtrinsicData",
    "StructureResiduals",
    "second_fundamental",
    "ambient_curvature",
    "ambient_riemann",
    "hypersurface_mean_curvature",
    "calabi_operator",
    "structure_equation_residuals",
    "PrecisionWarning",
]


class PrecisionWarning(UserWarning):
    """Emitted when a derived quantity is dominated by rounding noise."""


@dataclass(frozen=True)
class ExtrinsicData:
    """Extrinsic data of the graph at one point.

    ``h[alpha, i, j]`` uses the adapted frames of ``frame``; ``commutator[a, b, i, j]``
    is ``sum_k (h^a_ik h^b_jk - h^b_ik h^a_jk)``.  ``projectors`` maps product
    vectors to their tangent and normal parts.
    """

    frame: object
    jet: object
    h: np.ndarray
    H_components: np.ndarray
    H_norm: float
    B_norm_sq: float
    commutator: np.ndarray
    nu: np.ndarray = None
    mean_curvature_nu: float = None
    projectors: dict = field(default_factory=dict)

    @property
    def mean_curvature_vector(self):
        return self.jet.H

    @property
    def m(self):
        return self.h.shape[1]

    @property
    def n(self):
        return self.h.shape[0]


def _frame_components(jet, frame):
    v = frame.tangent_coords  # pi_1 e_i = graph-coordinate components of e_i
    Be = np.einsum("akl,ki,lj->aij", jet.B, v, v)
    return -np.einsum("ab,aij,bc->cij", frame.gbar, Be, frame.e_normal)


def _future_normal(frame):
    nu = frame.e_normal[:, 0].copy()
    return -nu if nu[-1] < 0 else nu


def second_fundamental(product, f, p, frame=None, jet=None):
    """Compute :class:`ExtrinsicData` at ``p``."""
    frame = frame if frame is not None else analyze_graph_point(product, f, p)
    jet = jet if jet is not None else graph_jet(product, f, frame.point)
    h = _frame_components(jet, frame)
    Hc = np.einsum("aii->a", h)
    comm = np.einsum("aik,bjk->abij", h, h)
    comm = comm - np.swapaxes(comm, 0, 1)
    nu = hnu = None
    if frame.n == 1:
        nu = _future_normal(frame)
        hnu = float(-(jet.H @ frame.gbar @ nu))
    projectors = {
        "normal": jet.Pn,
        "tangent": np.eye(jet.Pn.shape[0]) - jet.Pn,
        "differential": jet.dF,
    }
    return ExtrinsicData(
        frame=frame,
        jet=jet,
        h=h,
        H_components=Hc,
        H_norm=float(np.sqrt(np.sum(Hc**2))),
        B_norm_sq=float(np.sum(h**2)),
        commutator=comm,
        nu=nu,
        mean_curvature_nu=hnu,
        projectors=projectors,
    )


def hypersurface_mean_curvature(product, f, points):
    """``<H, nu>`` and ``|grad f|_1`` at a batch of points (one-dimensional target).

    Chart membership is not checked; a non-spacelike point gives ``nan``.
    """
    if product.n != 1:
        raise ValueError("needs a one-dimensional target")
    geo = graph_geometry(product, f, points)
    m = product.m
    g1 = geo["gbar"][:, :m, :m]
    g2 = -geo["gbar"][:, m, m]
    grad = np.linalg.solve(g1, geo["J"][:, 0, :, None])[..., 0] * g2[:, None]
    slope_sq = np.einsum("ka,ka->k", grad, geo["J"][:, 0, :])
    nu = np.concatenate([grad, np.ones((len(g2), 1))], axis=1)
    with np.errstate(invalid="ignore"):
        norm = np.sqrt(g2 * (1.0 - slope_sq))
        hnu = -np.einsum("ka,kab,kb->k", geo["H"], geo["gbar"], nu) / norm
        return hnu, np.sqrt(slope_sq)


@lru_cache(maxsize=None)
def _calabi_kernel(g1fn, g2fn, ffn):
    def flux(P, x):
        p1, p2, pf = P
        g1 = g1fn(p1, x)
        k = g2fn(p2, ffn(pf, x))[0, 0]
        df = jax.jacfwd(ffn, argnums=1)(pf, x)[0]
        grad = jnp.linalg.solve(g1, df)
        w = jnp.sqrt(1.0 - k * df @ grad)
        return jnp.sqrt(jnp.linalg.det(g1)) * jnp.sqrt(k) * grad / w

    def div(P, x):
        p1 = P[0]
        return jnp.trace(jax.jacfwd(flux, argnums=1)(P, x)) / jnp.sqrt(jnp.linalg.det(g1fn(p1, x)))

    return jax.jit(jax.vmap(div, in_axes=(None, 0)))


def calabi_operator(product, f, points):
    """``div_1(grad f / sqrt(1 - |grad f|_1^2))`` computed from ``g1`` and ``f`` alone.

    For a target line with constant metric ``k dt^2`` the height is rescaled by
    ``sqrt(k)``.  This is an independent route to ``<H, nu>``.
    """
    if product.n != 1:
        raise ValueError("needs a one-dimensional target")
    P = (product.sigma1.jparams, product.sigma2.jparams, f.jparams)
    kern = _calabi_kernel(product.sigma1.fn, product.sigma2.fn, f.fn)
    return to_numpy(kern(P, jnp.asarray(np.atleast_2d(np.asarray(points, float)))))


def ambient_riemann(product, x, y):
    """(0,4) curvature of ``g1 - g2`` at ``(x, y)`` in product coordinates."""
    R1 = eval_curvature(product.sigma1, x).riemann
    R2 = eval_curvature(product.sigma2, y).riemann
    m, n = R1.shape[0], R2.shape[0]
    R = np.zeros((m + n,) * 4)
    R[:m, :m, :m, :m] = R1
    R[m:, m:, m:, m:] = -R2
    return R


def ambient_curvature(product, x, y, u, v, w, z):
    """``R1(pi1 u, pi1 v, pi1 w, pi1 z) - R2(pi2 u, pi2 v, pi2 w, pi2 z)``."""
    dim = product.m + product.n
    vecs = [np.asarray(a, float) for a in (u, v, w, z)]
    if any(a.shape != (dim,) for a in vecs):
        raise ValueError(f"product vectors must have length {dim}")
    return float(np.einsum("abcd,a,b,c,d->", ambient_riemann(product, x, y), *vecs))


@dataclass(frozen=True)
class StructureResiduals:
    gauss: float
    codazzi: float
    ricci: float
    warnings: tuple = ()

    def __iter__(self):
        return iter((self.gauss, self.codazzi, self.ricci))


def _normalized(lhs, rhs):
    scale = max(np.max(np.abs(lhs), initial=0.0), np.max(np.abs(rhs), initial=0.0))
    return float(np.max(np.abs(lhs - rhs), initial=0.0) / (1.0 + scale))


def gauss_sides(jet):
    """Intrinsic curvature of the induced metric and the Gauss-equation right side."""
    dF, gbar = jet.dF, jet.gbar
    Rbar = np.einsum("ae,ebcd->abcd", gbar, jet.Rbar_up)
    amb = np.einsum("abcd,ai,bj,ck,dl->ijkl", Rbar, dF, dF, dF, dF)
    BB = np.einsum("aik,ab,bjl->ijkl", jet.B, gbar, jet.B)
    return jet.RM, amb + BB - np.swapaxes(BB, 2, 3)


def codazzi_sides(jet):
    """Both sides of ``(nabla_i B)_jk - (nabla_j B)_ik = (Rbar(F_i, F_j) F_k)^perp``."""
    dF, B, Pn, Gb, Gm = jet.dF, jet.B, jet.Pn, jet.Gbar, jet.GammaM
    amb = np.moveaxis(jet.dB, 3, 1) + np.einsum("acd,ci,djk->aijk", Gb, dF, B)
    cov = np.einsum("ab,bijk->aijk", Pn, amb)
    cov = cov - np.einsum("lij,alk->aijk", Gm, B) - np.einsum("lik,ajl->aijk", Gm, B)
    lhs = cov - np.swapaxes(cov, 1, 2)
    # R(X, Y)Z = Rup[a, b, c, d] Z^b X^c Y^d
    curv = np.einsum("abcd,bk,ci,dj->aijk", jet.Rbar_up, dF, dF, dF)
    rhs = np.einsum("ab,bijk->aijk", Pn, curv)
    return lhs, rhs


def ricci_sides(jet):
    """Both sides of the Ricci equation on the normal basis ``xi_beta``.

    ``lhs[b, c, i, j] = gbar(R-perp(d_i, d_j) xi_b, xi_c)``.
    """
    gbar, xi, dF = jet.gbar, jet.xi, jet.dF
    N2 = jet.N2
    Rperp = np.einsum("abji,ac,cd->bdij", N2, gbar, xi) - np.einsum("abij,ac,cd->bdij", N2, gbar, xi)
    Rbar_v = np.einsum("abcd,bB,ci,dj->aBij", jet.Rbar_up, xi, dF, dF)
    amb = np.einsum("aBij,ac,cC->BCij", Rbar_v, gbar, xi)
    # shape operators A_xi^i_j = G^ik gbar(B_kj, xi)
    A = np.einsum("ik,akj,ab,bB->Bij", jet.Ginv, jet.B, gbar, xi)
    comm = np.einsum("Bil,Clj->BCij", A, A) - np.einsum("Cil,Blj->BCij", A, A)
    # g([A_b, A_c] d_i, d_j) = G_jl [A_b, A_c]^l_i
    gcomm = np.einsum("jl,BCli->BCij", jet.G, comm)
    return Rperp, amb + gcomm


def structure_equation_residuals(product, f, p):
    """Normalized max-norm residuals of the Gauss, Codazzi and Ricci equations."""
    frame = analyze_graph_point(product, f, p)
    jet = graph_jet(product, f, frame.point)
    notes = []
    finite = all(np.all(np.isfinite(a)) for a in (jet.RM, jet.dB, jet.N2))
    if not finite:
        notes.append("non-finite derivative data near the chart boundary")
        warnings.warn(notes[-1], PrecisionWarning, stacklevel=2)
    gauss = _normalized(*gauss_sides(jet))
    codazzi = _normalized(*codazzi_sides(jet))
    ricci = _normalized(*ricci_sides(jet))
    return StructureResiduals(gauss, codazzi, ricci, tuple(notes))
