import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacelike.errors import DomainError
from spacelike.metrics import (
    METRIC_REGISTRY,
    eval_christoffel,
    eval_curvature,
    finite_difference,
    geodesic_ball_measures,
    make_metric,
    sphere_area,
)


def _ball_point(rng, dim, radius):
    v = rng.normal(size=dim)
    return radius * rng.uniform() ** (1 / dim) * v / np.linalg.norm(v)


def _poincare_christoffel(x):
    # conformal metric e^{2 phi} delta with phi = log 2 - log(1 - |x|^2)
    dphi = 2 * x / (1 - x @ x)
    m = x.size
    eye = np.eye(m)
    return np.einsum("ki,j->kij", eye, dphi) + np.einsum("kj,i->kij", eye, dphi) - np.einsum("ij,k->kij", eye, dphi)


def test_registry_names():
    assert sorted(METRIC_REGISTRY) == ["circle", "euclidean", "flat_torus", "line", "poincare_ball", "sphere_stereo"]


def test_unknown_metric():
    with pytest.raises(KeyError):
        make_metric("lorentzian")


@pytest.mark.parametrize("name", ["euclidean", "flat_torus"])
def test_flat_metrics_have_zero_christoffel(name, rng):
    metric = make_metric(name, dim=3)
    for _ in range(5):
        p = rng.uniform(-0.4, 0.4, 3)
        assert np.array_equal(eval_christoffel(metric, p), np.zeros((3, 3, 3)))
        assert np.max(np.abs(eval_curvature(metric, p).riemann)) == 0.0


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_poincare_christoffel_closed_form(dim, rng):
    metric = make_metric("poincare_ball", dim=dim)
    for _ in range(10):
        p = _ball_point(rng, dim, 0.9)
        assert np.allclose(eval_christoffel(metric, p), _poincare_christoffel(p), atol=1e-12, rtol=1e-12)


@pytest.mark.parametrize("name", ["poincare_ball", "sphere_stereo"])
def test_christoffel_against_finite_differences(name, rng):
    metric = make_metric(name, dim=3)
    for _ in range(5):
        p = _ball_point(rng, 3, 0.7)
        g = metric.eval(p)
        dg = finite_difference(metric.eval, p)  # dg[i, j, k] = d_k g_ij
        lower = 0.5 * (np.transpose(dg, (0, 2, 1)) + dg - np.transpose(dg, (2, 0, 1)))
        oracle = np.einsum("kl,lij->kij", np.linalg.inv(g), lower)
        assert np.allclose(eval_christoffel(metric, p), oracle, atol=1e-8)


@pytest.mark.parametrize("name,sign", [("poincare_ball", -1.0), ("sphere_stereo", 1.0)])
@pytest.mark.parametrize("dim", [2, 3])
def test_constant_curvature_space_forms(name, sign, dim, rng):
    metric = make_metric(name, dim=dim)
    for _ in range(20):
        p = _ball_point(rng, dim, 0.95 if sign < 0 else 3.0)
        cd = eval_curvature(metric, p)
        u, v = rng.normal(size=(2, dim))
        assert abs(cd.sectional(u, v) - sign) < 1e-8
        assert np.allclose(cd.ricci, sign * (dim - 1) * cd.metric, atol=1e-8 * np.max(np.abs(cd.metric)))
        assert abs(cd.scalar - sign * dim * (dim - 1)) < 1e-8


def test_riemann_symmetries(rng):
    metric = make_metric("poincare_ball", dim=3)
    R = eval_curvature(metric, np.array([0.2, -0.3, 0.1])).riemann
    assert np.allclose(R, -np.transpose(R, (1, 0, 2, 3)), atol=1e-12)
    assert np.allclose(R, -np.transpose(R, (0, 1, 3, 2)), atol=1e-12)
    assert np.allclose(R, np.transpose(R, (2, 3, 0, 1)), atol=1e-12)
    bianchi = R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2))
    assert np.max(np.abs(bianchi)) < 1e-12


def test_sectional_rejects_parallel_vectors():
    cd = eval_curvature(make_metric("euclidean", dim=2), np.zeros(2))
    with pytest.raises(ValueError):
        cd.sectional([1.0, 0.0], [2.0, 0.0])


def test_chart_checks():
    ball = make_metric("poincare_ball", dim=2)
    with pytest.raises(DomainError):
        ball.eval(np.array([0.9995, 0.0]))
    with pytest.raises(DomainError):
        ball.eval(np.array([0.1, 0.2, 0.3]))
    with pytest.raises(DomainError):
        ball.eval(np.array([np.nan, 0.0]))
    assert ball.contains([0.5, 0.5]) and not ball.contains([0.8, 0.8])


@pytest.mark.parametrize(
    "dim,radius,expected",
    [(2, 1.0, (np.pi, 2 * np.pi)), (3, 2.0, (32 * np.pi / 3, 16 * np.pi))],
)
def test_euclidean_ball_measures(dim, radius, expected):
    vol, area = geodesic_ball_measures(make_metric("euclidean", dim=dim), np.zeros(dim), radius)
    assert np.allclose((vol, area), expected, rtol=1e-12)


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0, 5.0])
def test_hyperbolic_disc_measures(radius):
    meas = geodesic_ball_measures(make_metric("poincare_ball", dim=2), np.zeros(2), radius)
    assert np.isclose(meas.volume, 2 * np.pi * (np.cosh(radius) - 1), rtol=1e-10)
    assert np.isclose(meas.boundary_area, 2 * np.pi * np.sinh(radius), rtol=1e-10)
    assert np.isclose(meas.coord_radius, np.tanh(radius / 2), rtol=1e-13)


def test_spherical_cap_measures():
    vol, area = geodesic_ball_measures(make_metric("sphere_stereo", dim=2), np.zeros(2), 2.0)
    assert np.isclose(vol, 2 * np.pi * (1 - np.cos(2.0)), rtol=1e-10)
    assert np.isclose(area, 2 * np.pi * np.sin(2.0), rtol=1e-10)


def test_ball_leaving_chart():
    with pytest.raises(DomainError):
        geodesic_ball_measures(make_metric("poincare_ball", dim=2), np.zeros(2), 20.0)


def test_sphere_area_values():
    assert np.isclose(sphere_area(1), 2.0)
    assert np.isclose(sphere_area(2), 2 * np.pi)
    assert np.isclose(sphere_area(3), 4 * np.pi)


@settings(max_examples=25)
@given(
    x=st.floats(-0.6, 0.6),
    y=st.floats(-0.6, 0.6),
    lam=st.floats(0.2, 5.0),
)
def test_euclidean_ball_scaling(x, y, lam):
    metric = make_metric("euclidean", dim=2)
    v1, a1 = geodesic_ball_measures(metric, np.array([x, y]), 1.0)
    v2, a2 = geodesic_ball_measures(metric, np.array([x, y]), lam)
    assert np.isclose(v2 / v1, lam**2, rtol=1e-12)
    assert np.isclose(a2 / a1, lam, rtol=1e-12)
