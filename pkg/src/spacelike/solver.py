"""Damped Newton solver for spacelike graphs of prescribed mean curvature into a line.

The equation is the divergence form

    div_1( grad f / sqrt(1 - |grad f|_1^2) ) = c

discretized with fluxes on cell faces:

* ``torus``: uniform periodic grid on the flat 2-torus; the face-normal
  derivative is a one-sided difference and the tangential one the average of
  the two neighbouring central differences.
* ``interval``: uniform grid with Dirichlet ends.
* ``radial``: radial functions on a rotationally symmetric ball, in the
  geodesic radius, with weight ``sn(r)^(m-1)`` and exact cell volumes.

All three are second order.  Newton steps use the analytic Jacobian and an
Armijo backtracking search that rejects iterates leaving the spacelike region.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._io import write_csv
from .errors import ConvergenceError, DomainError, SpacelikeError
from .graph import GraphMap, ProductMetric
from .metrics import make_metric

__all__ = [
    "DiscreteGraph",
    "SolveOptions",
    "IterationRecord",
    "ExperimentReport",
    "torus_graph",
    "interval_graph",
    "radial_graph",
    "cmc_operator_residual",
    "solve_cmc",
    "bernstein_experiment",
    "interpolate_torus",
    "write_solution_csv",
    "SPACELIKE_MARGIN",
]

SPACELIKE_MARGIN = 1e-6
KINDS = ("torus", "interval", "radial")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    step: float
    max_gradient: float
    value_range: float
    backtracks: int = 0


@dataclass(frozen=True)
class DiscreteGraph:
    """Grid function with its domain.

    ``values`` covers every node, boundary nodes included: torus ``(n, n)``
    over ``[0, period)^2``; interval ``n + 1`` nodes on ``[lower, upper]``;
    radial ``n + 1`` nodes at geodesic radii ``0, h, ..., upper``.  ``boundary``
    holds the Dirichlet values (interval: both ends; radial: the outer node).
    """

    kind: str
    values: np.ndarray
    spacing: float
    lower: float = 0.0
    upper: float = 1.0
    boundary: tuple = ()
    dim: int = 1
    history: tuple = ()
    converged: bool = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "values", np.array(self.values, dtype=float))

    @property
    def shape(self):
        return self.values.shape

    @property
    def iterations(self):
        return max(len(self.history) - 1, 0)

    def nodes(self):
        if self.kind == "torus":
            t = self.spacing * np.arange(self.shape[0])
            return np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1)
        return self.lower + self.spacing * np.arange(self.shape[0])

    def unknown_mask(self):
        mask = np.ones(self.shape, dtype=bool)
        if self.kind == "interval":
            mask[[0, -1]] = False
        elif self.kind == "radial":
            mask[-1] = False
        return mask

    def gradient(self):
        """Central-difference gradient at the nodes (last axis for the torus)."""
        u, h = self.values, self.spacing
        if self.kind == "torus":
            gx = (np.roll(u, -1, 0) - np.roll(u, 1, 0)) / (2 * h)
            gy = (np.roll(u, -1, 1) - np.roll(u, 1, 1)) / (2 * h)
            return np.stack([gx, gy], axis=-1)
        g = np.empty_like(u)
        g[1:-1] = (u[2:] - u[:-2]) / (2 * h)
        g[-1] = (u[-1] - u[-2]) / h
        g[0] = 0.0 if self.kind == "radial" else (u[1] - u[0]) / h
        return g

    def max_gradient(self):
        g = self.gradient()
        if self.kind == "torus":
            return float(np.max(np.linalg.norm(g, axis=-1)))
        return float(np.max(np.abs(g)))

    def value_range(self):
        return float(np.max(self.values) - np.min(self.values))

    def with_values(self, values, **changes):
        return replace(self, values=values, **changes)


@dataclass(frozen=True)
class SolveOptions:
    """Newton parameters; ``damping`` is the first step length, doubled after each accepted step."""

    c: float = 0.0
    max_iterations: int = 100
    tolerance: float = 1e-10
    damping: float = 0.5
    min_step: float = 1e-8
    armijo: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


# ---------------------------------------------------------------------------
# constructors


def _torus_modes(n_modes, seed, max_slope, period):
    from .solutions import random_periodic

    return random_periodic(m=2, n=1, seed=seed, modes=n_modes, max_slope=max_slope, period=period)


def _eval_periodic(params, pts):
    c0, waves, cos_amp, sin_amp, period = (np.asarray(a) for a in params)
    phase = 2 * np.pi * pts @ waves.T / period
    return c0[0] + np.cos(phase) @ cos_amp[:, 0] + np.sin(phase) @ sin_amp[:, 0]


def torus_graph(n, period=1.0, values=None, seed=None, max_slope=0.5, modes=3):
    """Torus grid with ``n x n`` nodes.

    With ``seed`` the values sample a random smooth periodic field whose
    largest slope is ``max_slope``; its grid mean is the field's constant mode
    for every ``n > 2 * modes``, so different resolutions share the same mean.
    """
    h = period / n
    if values is None:
        if seed is None:
            values = np.zeros((n, n))
        else:
            f = _torus_modes(modes, seed, max_slope, period)
            pts = np.stack(np.meshgrid(h * np.arange(n), h * np.arange(n), indexing="ij"), -1).reshape(-1, 2)
            values = _eval_periodic(f.params, pts).reshape(n, n)
    values = np.asarray(values, float)
    if values.shape != (n, n):
        raise ValueError(f"torus values must have shape {(n, n)}")
    return DiscreteGraph("torus", values, h, 0.0, period, (), 2)


def interval_graph(n, left, right, lower=0.0, upper=1.0, values=None):
    """Interval grid with ``n`` cells; the default guess is the affine interpolant."""
    x = np.linspace(lower, upper, n + 1)
    if values is None:
        values = left + (right - left) * (x - lower) / (upper - lower)
    values = np.array(values, float)
    values[0], values[-1] = left, right
    return DiscreteGraph("interval", values, (upper - lower) / n, lower, upper, (float(left), float(right)), 1)


def radial_graph(metric, radius, spacing, boundary_value, values=None):
    """Radial grid on the geodesic ball of ``radius`` about the chart origin."""
    if metric.radial is None:
        raise DomainError(f"{metric.name} has no radial model")
    n = int(round(radius / spacing))
    if not np.isclose(n * spacing, radius, rtol=1e-12, atol=0):
        raise ValueError("radius must be a whole number of grid steps")
    if metric.radial.to_coord(radius) >= metric.chart_radius:
        raise DomainError(f"geodesic radius {radius} leaves the {metric.name} chart")
    if values is None:
        values = np.full(n + 1, float(boundary_value))
    values = np.array(values, float)
    values[-1] = boundary_value
    return DiscreteGraph("radial", values, radius / n, 0.0, float(radius), (float(boundary_value),), metric.dim)


# ---------------------------------------------------------------------------
# operators


def _flux(D2, where):
    if np.any(D2 >= 1.0) or not np.all(np.isfinite(D2)):
        k = np.unravel_index(int(np.argmax(np.where(np.isfinite(D2), D2, np.inf))), D2.shape)
        raise SpacelikeError(
            f"discrete gradient reaches the light cone at {where(k)}",
            lambda1=float(np.sqrt(D2[k])) if np.isfinite(D2[k]) else None,
            location=where(k),
        )
    return np.sqrt(1.0 - D2)


def _torus_faces(u, h, axis):
    other = 1 - axis
    Dn = (np.roll(u, -1, axis) - u) / h
    ct = (np.roll(u, -1, other) - np.roll(u, 1, other)) / (2 * h)
    Dt = 0.5 * (ct + np.roll(ct, -1, axis))
    return Dn, Dt


def _torus_residual(dg, c, jacobian=False):
    u, h = dg.values, dg.spacing
    n = u.shape[0]
    nodes = dg.nodes()
    R = -c * np.ones_like(u)
    blocks = []
    for axis in (0, 1):
        Dn, Dt = _torus_faces(u, h, axis)
        W = _flux(Dn**2 + Dt**2, lambda k: tuple(nodes[k]))
        F = Dn / W
        R += (F - np.roll(F, 1, axis)) / h
        if jacobian:
            blocks.append(_torus_face_jacobian(n, h, axis, Dn, Dt, W))
    if not jacobian:
        return R
    return R, sum(blocks).tocsr()


def _torus_face_jacobian(n, h, axis, Dn, Dt, W):
    idx = np.arange(n * n).reshape(n, n)
    a = ((1 - Dt**2) / W**3).ravel()
    b = (Dn * Dt / W**3).ravel()
    other = 1 - axis
    up = np.roll(idx, -1, axis)  # node across the face
    entries = [
        (idx, -a / h),
        (up, a / h),
        (np.roll(idx, -1, other), b / (4 * h)),
        (np.roll(up, -1, other), b / (4 * h)),
        (np.roll(idx, 1, other), -b / (4 * h)),
        (np.roll(up, 1, other), -b / (4 * h)),
    ]
    rows = np.concatenate([idx.ravel()] * len(entries))
    cols = np.concatenate([e[0].ravel() for e in entries])
    vals = np.concatenate([e[1] for e in entries])
    E = sp.csr_matrix((vals, (rows, cols)), shape=(n * n, n * n))
    # divergence: (F_face(k) - F_face(k - 1)) / h along the axis
    back = np.roll(idx, 1, axis).ravel()
    Dv = sp.csr_matrix(
        (np.concatenate([np.ones(n * n), -np.ones(n * n)]) / h,
         (np.concatenate([idx.ravel(), idx.ravel()]), np.concatenate([idx.ravel(), back]))),
        shape=(n * n, n * n),
    )
    return Dv @ E


def _line_weights(dg, metric):
    n = dg.shape[0] - 1
    h = dg.spacing
    if dg.kind == "interval":
        return np.ones(n), np.full(n + 1, h)
    warp = metric.radial.warp
    m = dg.dim
    faces = h * (np.arange(n) + 0.5)
    S = np.asarray(warp(faces), float) ** (m - 1)
    nodes_gl, w_gl = np.polynomial.legendre.leggauss(24)
    lo = np.maximum(0.0, h * (np.arange(n + 1) - 0.5))
    hi = h * (np.arange(n + 1) + 0.5)
    t = 0.5 * (hi - lo)[:, None] * (nodes_gl[None, :] + 1) + lo[:, None]
    V = 0.5 * (hi - lo) * (np.asarray(warp(t), float) ** (m - 1) @ w_gl)
    return S, V


def _line_residual(dg, metric, c, jacobian=False):
    u, h = dg.values, dg.spacing
    S, V = _line_weights(dg, metric)
    D = np.diff(u) / h
    nodes = dg.nodes()
    W = _flux(D**2, lambda k: float(nodes[k[0]] + 0.5 * h))
    flux = S * D / W
    net = np.zeros_like(u)
    net[:-1] += flux
    net[1:] -= flux
    R = net / V - c
    if not jacobian:
        return R
    # d(flux_e)/du: +-S/(h W^3)
    k = S / (h * W**3)
    n = u.size
    main = np.zeros(n)
    main[:-1] -= k
    main[1:] -= k
    J = sp.diags([k, main, k], [-1, 0, 1], shape=(n, n)) if n > 1 else sp.csr_matrix((1, 1))
    J = sp.diags(1.0 / V) @ J
    return R, J.tocsr()


def _check_metric(dg, metric):
    if dg.kind == "torus":
        if metric.period is None or metric.dim != 2:
            raise DomainError("torus grids need a flat 2-torus metric")
        if not np.isclose(metric.period, dg.upper):
            raise DomainError(f"grid period {dg.upper} differs from the metric period {metric.period}")
    elif dg.kind == "interval":
        if metric.dim != 1:
            raise DomainError("interval grids need a one-dimensional metric")
        if not np.allclose(metric.eval(np.zeros(1)), 1.0):
            raise DomainError("interval grids need the unit line metric")
    else:
        if metric.radial is None or metric.dim != dg.dim:
            raise DomainError(f"radial grids need a rotationally symmetric {dg.dim}-dimensional metric")


def _residual(dg, metric, c, jacobian=False):
    if dg.kind == "torus":
        return _torus_residual(dg, c, jacobian)
    return _line_residual(dg, metric, c, jacobian)


def cmc_operator_residual(dg, metric, c):
    """``div(grad f / sqrt(1 - |grad f|^2)) - c`` on the grid (0 at Dirichlet nodes)."""
    _check_metric(dg, metric)
    R = _residual(dg, metric, c)
    return np.where(dg.unknown_mask(), R, 0.0)


# ---------------------------------------------------------------------------
# Newton


def _admissible(dg):
    return dg.max_gradient() <= 1.0 - SPACELIKE_MARGIN


def _newton_step(dg, metric, c):
    R, J = _residual(dg, metric, c, jacobian=True)
    mask = dg.unknown_mask().ravel()
    r = R.ravel()
    if dg.kind == "torus":
        # bordered system: the mean is held fixed, the multiplier absorbs the null space
        n = r.size
        ones = sp.csr_matrix(np.ones((n, 1)))
        A = sp.bmat([[J, ones], [ones.T, None]], format="csc")
        sol = spla.spsolve(A, np.concatenate([-r, [0.0]]))
        return sol[:n].reshape(dg.shape)
    idx = np.flatnonzero(mask)
    A = J[idx][:, idx].tocsc()
    step = np.zeros_like(r)
    step[idx] = spla.spsolve(A, -r[idx]) if idx.size > 1 else -r[idx] / A.toarray().ravel()
    return step.reshape(dg.shape)


def _norm(dg, R):
    return float(np.max(np.abs(R[dg.unknown_mask()]), initial=0.0))


def solve_cmc(options, initial, metric):
    """Newton iteration from ``initial``; returns the converged :class:`DiscreteGraph`.

    Raises :class:`ConvergenceError` (with the residual history) when the
    iteration budget runs out or the line search stalls.
    """
    _check_metric(initial, metric)
    if initial.kind == "torus" and options.c != 0:
        raise DomainError("a closed torus carries no graph of nonzero constant mean curvature into a line")
    if not _admissible(initial):
        raise SpacelikeError(
            f"initial guess is not discretely spacelike (max |Df_h| = {initial.max_gradient():.6g})",
            lambda1=initial.max_gradient(),
        )
    dg = initial
    R = _residual(dg, metric, options.c)
    res = _norm(dg, R)
    log = [IterationRecord(0, res, 0.0, dg.max_gradient(), dg.value_range())]
    alpha0 = options.damping
    it = 0
    while res >= options.tolerance:
        if it >= options.max_iterations:
            raise ConvergenceError(
                f"no convergence after {it} Newton steps (residual {res:.3e})",
                history=tuple(r.residual for r in log),
            )
        it += 1
        step = _newton_step(dg, metric, options.c)
        mask = dg.unknown_mask()
        l2 = np.linalg.norm(R[mask])
        alpha, tries = alpha0, 0
        while True:
            trial = dg.with_values(dg.values + alpha * step)
            accepted = False
            if _admissible(trial):
                try:
                    Rt = _residual(trial, metric, options.c)
                except SpacelikeError:
                    Rt = None
                if Rt is not None and np.linalg.norm(Rt[mask]) <= (1 - options.armijo * alpha) * l2:
                    accepted = True
            if accepted:
                break
            alpha *= 0.5
            tries += 1
            if alpha < options.min_step:
                raise ConvergenceError(
                    f"line search stalled at iteration {it} (residual {res:.3e})",
                    history=tuple(r.residual for r in log),
                )
        dg, R = trial, Rt
        res = _norm(dg, R)
        log.append(IterationRecord(it, res, alpha, dg.max_gradient(), dg.value_range(), tries))
        alpha0 = min(1.0, 2 * alpha)
    return dg.with_values(dg.values, history=tuple(log), converged=True)


# ---------------------------------------------------------------------------
# output and experiments


def interpolate_torus(dg, cutoff=1e-14):
    """Trigonometric interpolant of a torus grid function as a :class:`GraphMap`."""
    if dg.kind != "torus":
        raise ValueError("interpolation is defined for torus grids")
    from .solutions import _periodic

    n = dg.shape[0]
    coef = np.fft.fft2(dg.values) / n**2
    freqs = np.fft.fftfreq(n, d=1.0 / n)
    K1, K2 = np.meshgrid(freqs, freqs, indexing="ij")
    keep = (np.abs(coef) > cutoff) & ~((K1 == 0) & (K2 == 0))
    waves = np.stack([K1[keep], K2[keep]], axis=1)
    cos_amp = coef.real[keep][:, None]
    sin_amp = -coef.imag[keep][:, None]
    if waves.size == 0:
        waves, cos_amp, sin_amp = np.array([[1.0, 0.0]]), np.zeros((1, 1)), np.zeros((1, 1))
    params = (np.array([coef[0, 0].real]), waves, cos_amp, sin_amp, np.asarray(float(dg.upper)))
    return GraphMap("torus_interpolant", 2, 1, _periodic, params=params, info={"grid": n})


def write_solution_csv(dg, path):
    """One row per node: coordinates, value and central-difference gradient."""
    nodes, grad = dg.nodes(), dg.gradient()
    if dg.kind == "torus":
        header = ["x", "y", "value", "df_dx", "df_dy"]
        rows = zip(nodes[..., 0].ravel(), nodes[..., 1].ravel(), dg.values.ravel(), grad[..., 0].ravel(), grad[..., 1].ravel())
    else:
        header = ["r" if dg.kind == "radial" else "x", "value", "derivative"]
        rows = zip(nodes, dg.values, grad)
    return write_csv(path, header, rows)


@dataclass(frozen=True)
class ExperimentReport:
    seed: int
    grid: int
    target_kind: str
    converged: bool
    iterations: int
    final_max_gradient: float
    final_range: float
    limit_value: float
    initial_max_gradient: float
    seconds: float
    history: tuple
    identity_reports: tuple = field(default_factory=tuple)
    solution: DiscreteGraph = None

    def to_record(self):
        return {
            "seed": self.seed,
            "grid": self.grid,
            "target_kind": self.target_kind,
            "converged": self.converged,
            "iterations": self.iterations,
            "final_max_gradient": self.final_max_gradient,
            "final_range": self.final_range,
            "limit_value": self.limit_value,
            "initial_max_gradient": self.initial_max_gradient,
            "history": [r.__dict__ for r in self.history],
            "identity_reports": [r.to_record() for r in self.identity_reports],
        }


def bernstein_experiment(seed=0, grid=64, target_kind="line", options=None, initial=None, sample_points=3, identities=True):
    """Maximal graph on the flat torus from random spacelike data, then the identity suite."""
    from .identities import bernstein_inequality, evaluate_point, surface_case_report

    if target_kind not in ("line", "circle"):
        raise ValueError("target_kind must be 'line' or 'circle'")
    options = options or SolveOptions(c=0.0, seed=seed)
    if options.c != 0:
        raise ValueError("the experiment solves the maximal equation (c = 0)")
    metric = make_metric("flat_torus", dim=2, period=1.0)
    start = initial if initial is not None else torus_graph(grid, seed=seed)
    t0 = time.perf_counter()
    sol = solve_cmc(options, start, metric)
    seconds = time.perf_counter() - t0
    reports = []
    if identities:
        f = interpolate_torus(sol)
        product = ProductMetric(metric, make_metric(target_kind))
        rng = np.random.default_rng(seed)
        for p in rng.uniform(0, 1, size=(sample_points, 2)):
            d = evaluate_point(product, f, p)
            reports.append(surface_case_report(product, f, p, data=d))
            reports.append(bernstein_inequality(product, f, p, data=d))
    return ExperimentReport(
        seed, grid, target_kind, True, sol.iterations, sol.max_gradient(), sol.value_range(),
        float(np.mean(sol.values)), start.max_gradient(), seconds, sol.history, tuple(reports), sol,
    )
