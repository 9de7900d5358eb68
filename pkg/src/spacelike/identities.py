"""Two-path verification of the pointwise identities for the hyperbolic angle.

Every report computes a left side directly from the induced metric
``g = g1 - f*g2`` (derivatives of ``u = cosh(theta) = sqrt(det g1 / det g)``
taken by automatic differentiation) and a right side from frame quantities:
singular values, the second fundamental form in adapted frames and the
curvatures of the two factors.

Frame indices follow the singular value decomposition: ``h[i]`` holds the
components along ``e_{m+i}``, the normal paired with ``a_i``.
"""

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.linalg

from .extrinsic import second_fundamental
from .graph import analyze_graph_point
from .kernel import graph_jet

__all__ = [
    "IDENTITY_TAGS",
    "IdentityReport",
    "PlanePair",
    "PointData",
    "IDENTITY_CHECKS",
    "TOLERANCES",
    "evaluate_point",
    "gradient_identity",
    "laplacian_identity",
    "bernstein_inequality",
    "ricci_bound_report",
    "surface_case_report",
    "diagonal_sum",
    "cross_sum",
    "bernstein_block",
    "bernstein_gap",
    "surface_chain",
]

TOLERANCES = {
    "algebraic": 1e-6,
    "second_order": 1e-5,
    "third_order": 1e-4,
}
HYPOTHESIS_TOL = 1e-10


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of one identity at one point, with the verdict.

    ``residual = |lhs - rhs| / (1 + |lhs|)``; ``checks`` holds any extra
    inequality verdicts (``None`` when a check does not apply).
    """

    name: str
    tag: str
    point: tuple
    lhs: float
    rhs: float
    breakdown: dict
    residual: float
    tolerance: float
    verdict: str
    hypothesis_flags: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_record(self):
        def clean(v):
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, dict):
                return {k: clean(w) for k, w in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(w) for w in v]
            return v

        return clean(
            {
                "name": self.name,
                "tag": self.tag,
                "point": list(self.point),
                "lhs": self.lhs,
                "rhs": self.rhs,
                "residual": self.residual,
                "tolerance": self.tolerance,
                "verdict": self.verdict,
                "breakdown": self.breakdown,
                "hypothesis_flags": self.hypothesis_flags,
                "checks": self.checks,
            }
        )


@dataclass(frozen=True)
class PlanePair:
    """Coordinate planes ``P_ij = span{a_i, a_j}`` and ``P'_ij = span{a_{m+i}, a_{m+j}}``.

    ``k2`` is ``None`` when the primed plane is undefined (a singular value is zero).
    """

    i: int
    j: int
    k1: float
    k2: object = None

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("plane pair needs i != j")

    @property
    def has_primed(self):
        return self.k2 is not None


@dataclass(frozen=True)
class PointData:
    """Frame, jet and extrinsic data bundled for the identity checks."""

    frame: object
    jet: object
    ext: object

    @property
    def point(self):
        return tuple(float(v) for v in self.frame.point)


def evaluate_point(product, f, p):
    frame = analyze_graph_point(product, f, p)
    jet = graph_jet(product, f, frame.point)
    return PointData(frame, jet, second_fundamental(product, f, p, frame=frame, jet=jet))


def _data(product, f, p, data):
    return data if data is not None else evaluate_point(product, f, p)


def _residual(lhs, rhs):
    return float(abs(lhs - rhs) / (1.0 + abs(lhs)))


def _verdict(ok):
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# pure algebra on (h, lambda)


def _paired(h, m):
    """hp[i, j, k] = h^{m+i}_{jk} for i < min(m, n), zero beyond."""
    n = h.shape[0]
    hp = np.zeros((m, m, m))
    hp[: min(m, n)] = h[: min(m, n)]
    return hp


def diagonal_sum(h, lam):
    """sum_{k, i<j} lambda_i lambda_j h^{m+i}_{ik} h^{m+j}_{jk}."""
    lam = np.asarray(lam, float)
    hp = _paired(np.asarray(h, float), lam.size)
    d = np.einsum("iik->ik", hp)  # h^{m+i}_{ik}
    full = np.einsum("i,j,ik,jk->ij", lam, lam, d, d)
    return float(np.sum(np.triu(full, 1)))


def cross_sum(h, lam):
    """sum_{k, i<j} lambda_i lambda_j h^{m+j}_{ik} h^{m+i}_{jk}."""
    lam = np.asarray(lam, float)
    hp = _paired(np.asarray(h, float), lam.size)
    full = np.einsum("i,j,jik,ijk->ij", lam, lam, hp, hp)
    return float(np.sum(np.triu(full, 1)))


def _diag_squares(h, lam):
    """sum_{i,k} lambda_i^2 (h^{m+i}_{ik})^2."""
    lam = np.asarray(lam, float)
    hp = _paired(np.asarray(h, float), lam.size)
    return float(np.sum(lam[:, None] ** 2 * np.einsum("iik->ik", hp) ** 2))


def bernstein_block(h, lam):
    """``|B|^2 - sum lambda_i^2 (h^{m+i}_{ik})^2 - 2 cross_sum``: the h-part of the
    Laplacian of ``ln cosh(theta)``."""
    return float(np.sum(np.asarray(h) ** 2)) - _diag_squares(h, lam) - 2 * cross_sum(h, lam)


def bernstein_gap(h, lam):
    """``bernstein_block - delta |B|^2`` with ``delta = 1 - max lambda^2``; never negative."""
    delta = 1.0 - float(np.max(np.asarray(lam, float) ** 2))
    return bernstein_block(h, lam) - delta * float(np.sum(np.asarray(h) ** 2))


def surface_chain(h, lam):
    """``|B|^2 - 2 diagonal_sum - 2 cross_sum - 2 sum lambda_i^2 (h^{m+i}_{ik})^2``.

    Nonnegative whenever ``m = 2`` and every ``h^alpha`` is traceless.
    """
    return (
        float(np.sum(np.asarray(h) ** 2))
        - 2 * diagonal_sum(h, lam)
        - 2 * cross_sum(h, lam)
        - 2 * _diag_squares(h, lam)
    )


# ---------------------------------------------------------------------------
# curvature in the singular frames


def _r4(R, a, b, c, d):
    return float(np.einsum("abcd,a,b,c,d->", R, a, b, c, d))


def plane_pairs(data):
    fr, jet = data.frame, data.jet
    m, rank = fr.m, fr.rank
    pairs = []
    for i, j in permutations(range(m), 2):
        ai, aj = fr.a_tangent[:, i], fr.a_tangent[:, j]
        k1 = _r4(jet.R1, ai, aj, ai, aj)
        k2 = None
        if i < rank and j < rank:
            bi, bj = fr.a_normal[:, i], fr.a_normal[:, j]
            k2 = _r4(jet.R2, bi, bj, bi, bj)
        pairs.append(PlanePair(i, j, k1, k2))
    return pairs


def _ricci1(data, i):
    fr, jet = data.frame, data.jet
    a = fr.a_tangent
    ric = np.einsum("ac,abcd->bd", np.linalg.inv(fr.g1), jet.R1)
    return float(a[:, i] @ ric @ a[:, i])


def _curvature_blocks(data):
    lam = data.frame.lambdas
    m = lam.size
    ricci = sum(lam[i] ** 2 / (1 - lam[i] ** 2) * _ricci1(data, i) for i in range(m))
    sectional = 0.0
    for pp in plane_pairs(data):
        if pp.has_primed:
            w = lam[pp.i] ** 2 * lam[pp.j] ** 2 / ((1 - lam[pp.i] ** 2) * (1 - lam[pp.j] ** 2))
            sectional += w * (pp.k1 - pp.k2)
    return float(ricci), float(sectional)


def _hypotheses(data, tol=HYPOTHESIS_TOL, epsilon=None):
    fr, jet = data.frame, data.jet
    ric = np.einsum("ac,abcd->bd", np.linalg.inv(fr.g1), jet.R1)
    ric_min = float(scipy.linalg.eigvalsh(0.5 * (ric + ric.T), fr.g1)[0])
    used = [pp for pp in plane_pairs(data) if pp.has_primed]
    gap = min((pp.k1 - pp.k2 for pp in used), default=None)
    bound = 0.0 if epsilon is None else epsilon
    nh = normal_mean_curvature_derivative(data)
    flags = {
        "ricci1_nonnegative": ric_min >= -tol,
        "k1_ge_k2_on_planes": gap is None or gap >= bound - tol,
        "maximal": data.ext.H_norm < tol ** 0.5,
        "parallel_mean_curvature": float(np.max(np.abs(nh), initial=0.0)) < tol ** 0.5,
    }
    details = {
        "ricci1_min": ric_min,
        "planes_checked": len(used),
        "min_k1_minus_k2": gap,
        "max_normal_derivative_H": float(np.max(np.abs(nh), initial=0.0)),
    }
    return flags, details


def normal_mean_curvature_derivative(data):
    """``H^alpha_{,i} = -gbar(nabla-perp_{e_i} H, e_alpha)`` as an (n, m) array."""
    fr, jet = data.frame, data.jet
    amb = jet.dH + np.einsum("abc,bk,c->ak", jet.Gbar, jet.dF, jet.H)
    cov = jet.Pn @ amb  # nabla-perp_{d_k} H in product coordinates
    along = cov @ fr.tangent_coords  # columns: nabla-perp_{e_i} H
    return -np.einsum("ab,ai,bc->ci", fr.gbar, along, fr.e_normal)


def _omega_term(data):
    return float(np.sum(data.frame.omega_ai * normal_mean_curvature_derivative(data)))


# ---------------------------------------------------------------------------
# direct (frame-free) derivatives of u = cosh(theta)


def _grad_norm_sq(jet):
    return float(jet.du @ jet.Ginv @ jet.du)


def _laplacian(jet):
    hess = jet.d2u - np.einsum("kij,k->ij", jet.GammaM, jet.du)
    return float(np.einsum("ij,ij->", jet.Ginv, hess))


def _gradient_rhs(data):
    fr, h = data.frame, data.ext.h
    hp = _paired(h, fr.m)
    return float(np.sum(np.einsum("i,iik->k", fr.lambdas, hp) ** 2))


def _scaled(tol, scale):
    return tol * scale


# ---------------------------------------------------------------------------
# reports


def gradient_identity(product, f, p, *, data=None, tolerance_scale=1.0):
    """``|grad cosh|^2 / cosh^2`` against ``sum_k (sum_i lambda_i h^{m+i}_{ik})^2``."""
    d = _data(product, f, p, data)
    u = d.jet.u
    lhs = _grad_norm_sq(d.jet) / u**2
    rhs = _gradient_rhs(d)
    res = _residual(lhs, rhs)
    tol = _scaled(TOLERANCES["algebraic"], tolerance_scale)
    return IdentityReport(
        "gradient_identity_4_1", "4.1", d.point, lhs, rhs,
        {"squared_weighted_trace": rhs, "cosh_theta": u},
        res, tol, _verdict(res < tol),
    )


def _laplacian_blocks(d):
    u = d.jet.u
    lam, h = d.frame.lambdas, d.ext.h
    ricci, sectional = _curvature_blocks(d)
    return {
        "second_fundamental": u * d.ext.B_norm_sq,
        "diagonal_products": 2 * u * diagonal_sum(h, lam),
        "cross_products": -2 * u * cross_sum(h, lam),
        "ricci": u * ricci,
        "sectional_difference": u * sectional,
        "normal_derivative_H": _omega_term(d),
    }


def laplacian_identity(product, f, p, *, data=None, tolerance_scale=1.0):
    """Laplace-Beltrami of ``cosh(theta)`` against its frame expansion."""
    d = _data(product, f, p, data)
    lhs = _laplacian(d.jet)
    blocks = _laplacian_blocks(d)
    rhs = float(sum(blocks.values()))
    res = _residual(lhs, rhs)
    tol = _scaled(TOLERANCES["second_order"], tolerance_scale)
    flags, details = _hypotheses(d)
    return IdentityReport(
        "laplacian_identity_3_9", "3.9", d.point, lhs, rhs, blocks, res, tol,
        _verdict(res < tol), flags, {"details": details},
    )


def bernstein_inequality(product, f, p, *, data=None, epsilon=None, tolerance_scale=1.0):
    """``Delta ln cosh(theta)`` against its block split and the lower bound ``delta |B|^2``.

    With ``epsilon`` the pointwise strengthened bound using ``K1 - K2 >= epsilon``
    is evaluated as well.
    """
    d = _data(product, f, p, data)
    jet, fr, ext = d.jet, d.frame, d.ext
    u = jet.u
    lhs = _laplacian(jet) / u - _grad_norm_sq(jet) / u**2
    ricci, sectional = _curvature_blocks(d)
    h_block = bernstein_block(ext.h, fr.lambdas)
    blocks = {
        "h_block": h_block,
        "curvature_block": ricci + sectional,
        "normal_derivative_H": _omega_term(d) / u,
    }
    rhs = float(sum(blocks.values()))
    res = _residual(lhs, rhs)
    tol = _scaled(TOLERANCES["second_order"], tolerance_scale)
    lower = fr.delta * ext.B_norm_sq
    flags, details = _hypotheses(d, epsilon=epsilon)
    hyp = flags["ricci1_nonnegative"] and flags["k1_ge_k2_on_planes"] and flags["parallel_mean_curvature"]
    holds = lhs >= lower - tol
    checks = {
        "delta": fr.delta,
        "delta_B_norm_sq": lower,
        "delta_H_norm_sq_over_m": fr.delta * ext.H_norm**2 / fr.m,
        "algebraic": h_block - lower >= -tol,
        "inequality_holds": bool(holds),
        "conditional": bool(holds) if hyp else None,
        "details": details,
    }
    if epsilon is not None:
        lam = fr.lambdas
        eps_term = sum(
            lam[pp.i] ** 2 * lam[pp.j] ** 2 / ((1 - lam[pp.i] ** 2) * (1 - lam[pp.j] ** 2)) * epsilon
            for pp in plane_pairs(d)
            if pp.has_primed
        )
        strengthened = lower + ricci + eps_term
        checks["epsilon"] = epsilon
        checks["epsilon_lower_bound"] = float(strengthened)
        checks["epsilon_conditional"] = bool(lhs >= strengthened - tol) if hyp else None
    ok = res < tol and checks["algebraic"] and checks["conditional"] is not False
    if epsilon is not None:
        ok = ok and checks["epsilon_conditional"] is not False
    return IdentityReport(
        "bernstein_inequality_4_6", "4.6", d.point, lhs, rhs, blocks, res, tol, _verdict(ok), flags, checks,
    )


def _intrinsic_ricci(jet):
    return np.einsum("ac,abcd->bd", jet.Ginv, jet.RM)


def _ambient_ricci_frame(d):
    """T[i, k] = sum_j Rbar(e_i, e_j, e_k, e_j) from the factor curvatures."""
    fr, jet = d.frame, d.jet
    lam, m = fr.lambdas, fr.m
    a, b = fr.a_tangent, fr.a_normal
    T = np.zeros((m, m))
    for i in range(m):
        for k in range(m):
            total = 0.0
            for j in range(m):
                r1 = _r4(jet.R1, a[:, i], a[:, j], a[:, k], a[:, j])
                w = lam[i] * lam[k] * lam[j] ** 2
                r2 = 0.0
                if w != 0.0:
                    r2 = _r4(jet.R2, b[:, i], b[:, j], b[:, k], b[:, j])
                total += (r1 - w * r2) / (1 - lam[j] ** 2)
            T[i, k] = total / np.sqrt((1 - lam[i] ** 2) * (1 - lam[k] ** 2))
    return T


def ricci_bound_report(product, f, p, *, data=None, tolerance_scale=1.0):
    """Intrinsic Ricci eigenvalues against the Gauss-equation decomposition."""
    d = _data(product, f, p, data)
    fr, jet, ext = d.frame, d.jet, d.ext
    ric = _intrinsic_ricci(jet)
    evals, E = scipy.linalg.eigh(0.5 * (ric + ric.T), jet.G)
    A = E.T @ jet.G @ fr.tangent_coords  # A[s, i] = g(E_s, e_i)
    T = _ambient_ricci_frame(d)
    hs = np.einsum("si,aij,tj->ast", A, ext.h, A)  # h in the E frame
    H = ext.H_components
    amb = np.einsum("si,sk,ik->s", A, A, T)
    diag = np.sum((np.einsum("ass->as", hs) - H[:, None] / 2) ** 2, axis=0)
    off = np.sum(hs**2, axis=(0, 2)) - np.einsum("ass->s", hs**2)
    rhs = amb + diag - np.sum(H**2) / 4 + off
    lhs = evals
    scale = float(np.max(np.abs(lhs), initial=0.0))
    res = float(np.max(np.abs(lhs - rhs), initial=0.0) / (1 + scale))
    tol = _scaled(TOLERANCES["third_order"], tolerance_scale)
    flags, details = _hypotheses(d)
    blocks = {
        "ambient": amb.tolist(),
        "centred_diagonal": diag.tolist(),
        "mean_curvature": float(-np.sum(H**2) / 4),
        "off_diagonal": off.tolist(),
        "orthogonality_defect": float(np.max(np.abs(A @ A.T - np.eye(fr.m)))),
    }
    return IdentityReport(
        "ricci_bound_4_7", "4.7", d.point, float(np.min(lhs)), float(rhs[int(np.argmin(lhs))]), blocks,
        res, tol, _verdict(res < tol), flags,
        {"lhs_diagonal": lhs.tolist(), "rhs_diagonal": rhs.tolist(), "details": details},
    )


def surface_case_report(product, f, p, *, data=None, tolerance_scale=1.0):
    """Surface case ``m = 2``: ``Delta(1/cosh)``, the maximal chain and the Gauss curvature."""
    d = _data(product, f, p, data)
    fr, jet, ext = d.frame, d.jet, d.ext
    if fr.m != 2:
        raise ValueError(f"surface case needs m = 2, got m = {fr.m}")
    u = jet.u
    lam, h = fr.lambdas, ext.h
    lhs = -_laplacian(jet) / u**2 + 2 * _grad_norm_sq(jet) / u**3
    ricci, sectional = _curvature_blocks(d)
    chain = surface_chain(h, lam)
    blocks = {
        "chain": -chain / u,
        "curvature": -(ricci + sectional) / u,
        "normal_derivative_H": -_omega_term(d) / u**2,
    }
    rhs = float(sum(blocks.values()))
    res = _residual(lhs, rhs)
    tol = _scaled(TOLERANCES["second_order"], tolerance_scale)

    # Gauss curvature: intrinsic, via the Gauss equation, and the closed ambient form
    k_intrinsic = float(jet.RM[0, 1, 0, 1] / np.linalg.det(jet.G))
    a = fr.a_tangent
    k1 = _r4(jet.R1, a[:, 0], a[:, 1], a[:, 0], a[:, 1])
    k2 = 0.0
    if fr.rank >= 2:
        b = fr.a_normal
        k2 = _r4(jet.R2, b[:, 0], b[:, 1], b[:, 0], b[:, 1])
    rbar = (k1 - lam[0] ** 2 * lam[1] ** 2 * k2) / ((1 - lam[0] ** 2) * (1 - lam[1] ** 2))
    k_gauss = float(rbar - np.sum(h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] ** 2))

    flags, details = _hypotheses(d)
    curv_ok = k1 >= -HYPOTHESIS_TOL and k1 >= k2 - HYPOTHESIS_TOL
    flags = dict(flags, k1_ge_max_0_k2=bool(curv_ok))
    maximal = flags["maximal"]
    chain_ok = chain >= -tol if maximal else None
    sign_ok = (lhs <= tol) if (maximal and curv_ok) else None
    gauss_res = abs(k_intrinsic - k_gauss) / (1 + abs(k_intrinsic))
    checks = {
        "chain_value": chain,
        "chain_nonnegative": chain_ok,
        "superharmonic": sign_ok,
        "gauss_curvature_intrinsic": k_intrinsic,
        "gauss_curvature_gauss_equation": k_gauss,
        "ambient_r1212": float(rbar),
        "gauss_curvature_residual": float(gauss_res),
        "details": details,
    }
    ok = res < tol and gauss_res < tol and chain_ok is not False and sign_ok is not False
    return IdentityReport(
        "surface_case_5_1", "5.1", d.point, lhs, rhs, blocks, res, tol, _verdict(ok), flags, checks,
    )


IDENTITY_CHECKS = {
    "gradient_identity_4_1": gradient_identity,
    "laplacian_identity_3_9": laplacian_identity,
    "bernstein_inequality_4_6": bernstein_inequality,
    "ricci_bound_4_7": ricci_bound_report,
    "surface_case_5_1": surface_case_report,
}

# every check name maps to the equation tag recorded in its reports
IDENTITY_TAGS = {name: ".".join(name.rsplit("_", 2)[-2:]) for name in IDENTITY_CHECKS}
