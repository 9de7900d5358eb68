import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacelike.errors import ConvergenceError, DomainError, SpacelikeError
from spacelike.extrinsic import calabi_operator
from spacelike.graph import ProductMetric
from spacelike.metrics import make_metric
from spacelike.solutions import CmcFamily, random_periodic
from spacelike.solver import (
    SolveOptions,
    bernstein_experiment,
    cmc_operator_residual,
    interpolate_torus,
    interval_graph,
    radial_graph,
    solve_cmc,
    torus_graph,
    write_solution_csv,
)

LINE = make_metric("line")
TORUS = make_metric("flat_torus", dim=2, period=1.0)


def _radial_error(h, m=2, c=1.0, radius=2.0):
    metric = make_metric("poincare_ball", dim=m)
    fam = CmcFamily(m, c)
    sol = solve_cmc(SolveOptions(c=c), radial_graph(metric, radius, h, fam.value(radius)), metric)
    exact = np.array([fam.value(r) for r in sol.nodes()])
    return float(np.max(np.abs(sol.values - exact)))


def test_interval_maximal_is_affine():
    x = np.linspace(0, 1, 41)
    start = interval_graph(40, 0.0, 0.5, values=0.5 * x + 0.1 * np.sin(np.pi * x))
    sol = solve_cmc(SolveOptions(), start, LINE)
    assert sol.converged
    assert np.max(np.abs(sol.values - 0.5 * sol.nodes())) < 1e-12


def test_interval_cmc_second_order():
    # f'/sqrt(1 - f'^2) = x - 1/2 integrates to f = sqrt(1 + (x - 1/2)^2)
    exact = lambda x: np.sqrt(1 + (x - 0.5) ** 2)  # noqa: E731
    errors = []
    for n in (16, 32, 64):
        sol = solve_cmc(SolveOptions(c=1.0), interval_graph(n, exact(0.0), exact(1.0)), LINE)
        errors.append(np.max(np.abs(sol.values - exact(sol.nodes()))))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders > 1.8), errors


def test_radial_hyperbolic_convergence_order():
    errors = [_radial_error(h) for h in (1 / 32, 1 / 64, 1 / 128)]
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert errors[-1] < 1e-4
    assert np.all(orders >= 1.8), (errors, orders)


@pytest.mark.parametrize("seed", [0, 1])
def test_torus_maximal_converges_to_constant(seed):
    start = torus_graph(32, seed=seed)
    sol = solve_cmc(SolveOptions(), start, TORUS)
    assert sol.converged and sol.max_gradient() < 1e-6 and sol.value_range() < 1e-6
    assert np.isclose(sol.values.mean(), start.values.mean(), atol=1e-12)
    residuals = [r.residual for r in sol.history]
    assert residuals[-1] < 1e-10 and residuals[-1] < residuals[0]


def test_torus_grid_mean_is_resolution_independent():
    a, b = torus_graph(16, seed=3), torus_graph(64, seed=3)
    assert np.isclose(a.values.mean(), b.values.mean(), atol=1e-12)


def test_torus_operator_consistency():
    # the discrete operator converges to <H, nu> of the continuous graph at second order
    f = random_periodic(2, 1, seed=2, max_slope=0.4)
    product = ProductMetric(TORUS, LINE)
    errors = []
    for n in (32, 64, 128):
        h = 1.0 / n
        pts = np.stack(np.meshgrid(h * np.arange(n), h * np.arange(n), indexing="ij"), -1).reshape(-1, 2)
        vals = np.array([f.eval(p)[0] for p in pts]).reshape(n, n)
        discrete = cmc_operator_residual(torus_graph(n, values=vals), TORUS, 0.0)
        exact = calabi_operator(product, f, pts).reshape(n, n)
        errors.append(np.max(np.abs(discrete - exact)))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders > 1.8), errors


@settings(max_examples=30)
@given(c0=st.floats(-100, 100), n=st.integers(4, 24))
def test_constant_torus_grid_is_maximal(c0, n):
    R = cmc_operator_residual(torus_graph(n, values=np.full((n, n), c0)), TORUS, 0.0)
    assert np.max(np.abs(R)) == 0.0


@settings(max_examples=30)
@given(left=st.floats(-5, 5), slope=st.floats(-0.95, 0.95), n=st.integers(2, 50))
def test_affine_interval_is_maximal(left, slope, n):
    R = cmc_operator_residual(interval_graph(n, left, left + slope), LINE, 0.0)
    assert np.max(np.abs(R)) < 1e-13 * n**2


def test_torus_requires_maximal():
    with pytest.raises(DomainError):
        solve_cmc(SolveOptions(c=0.5), torus_graph(8, seed=0), TORUS)


def test_initial_guess_must_be_spacelike():
    with pytest.raises(SpacelikeError):
        solve_cmc(SolveOptions(), interval_graph(4, 0.0, 2.0), LINE)


def test_convergence_error_carries_history():
    with pytest.raises(ConvergenceError) as info:
        solve_cmc(SolveOptions(max_iterations=0), torus_graph(16, seed=0), TORUS)
    assert len(info.value.history) == 1 and info.value.history[0] > 0


@pytest.mark.parametrize("kwargs", [{"tolerance": 0.0}, {"damping": 0.0}, {"damping": 1.5}, {"max_iterations": -1}])
def test_bad_options(kwargs):
    with pytest.raises(ValueError):
        SolveOptions(**kwargs)


def test_domain_checks():
    ball = make_metric("poincare_ball", dim=2)
    with pytest.raises(DomainError):
        solve_cmc(SolveOptions(), torus_graph(8), LINE)
    with pytest.raises(DomainError):
        solve_cmc(SolveOptions(), interval_graph(8, 0.0, 0.1), ball)
    with pytest.raises(ValueError):
        radial_graph(ball, 1.0, 0.3, 0.0)
    with pytest.raises(DomainError):
        radial_graph(ball, 20.0, 0.5, 0.0)


def test_interpolation_reproduces_grid():
    dg = torus_graph(16, seed=5)
    f = interpolate_torus(dg)
    nodes = dg.nodes().reshape(-1, 2)
    vals = np.array([f.eval(p)[0] for p in nodes[::17]])
    assert np.allclose(vals, dg.values.reshape(-1)[::17], atol=1e-12)


def test_solution_csv(tmp_path):
    sol = solve_cmc(SolveOptions(), interval_graph(8, 0.0, 0.5), LINE)
    path = write_solution_csv(sol, tmp_path / "field.csv")
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "value", "derivative"] and len(rows) == 10
    assert float(rows[-1][1]) == 0.5
    tsol = torus_graph(4, seed=0)
    rows = list(csv.reader(write_solution_csv(tsol, tmp_path / "t.csv").open()))
    assert rows[0] == ["x", "y", "value", "df_dx", "df_dy"] and len(rows) == 17


@pytest.mark.parametrize("target", ["line", "circle"])
def test_bernstein_experiment(target):
    exp = bernstein_experiment(seed=1, grid=32, target_kind=target)
    assert exp.converged and exp.final_max_gradient < 1e-6
    assert exp.initial_max_gradient > 0.1
    assert all(r.passed for r in exp.identity_reports)
    rec = exp.to_record()
    assert "seconds" not in rec and rec["grid"] == 32


def test_experiment_rejects_unknown_target():
    with pytest.raises(ValueError):
        bernstein_experiment(target_kind="plane")
