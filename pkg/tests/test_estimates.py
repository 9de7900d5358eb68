import numpy as np
import pytest

from spacelike.errors import DomainError, SpacelikeError
from spacelike.estimates import ball_samples, cheeger_witness, domain_measures, mean_curvature_bound, prop9_check
from spacelike.graph import GraphMap, ProductMetric
from spacelike.metrics import make_metric
from spacelike.solutions import _affine, builtin_graph


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_hyperboloid_is_sharp(r):
    b = builtin_graph("hyperboloid", m=2)
    res = mean_curvature_bound(b.product, b.graph, r)
    # b = r / sqrt(1 + r^2) so b / sqrt(1 - b^2) = r, and A / V = 2 / r
    assert res.measures.b_D == pytest.approx(r / np.sqrt(1 + r**2), rel=1e-12)
    assert res.lhs == pytest.approx(2.0, abs=1e-10)
    assert res.rhs == pytest.approx(2.0, abs=1e-10)
    assert res.passed and abs(res.slack) < 1e-6


def test_cmc_family_equality_over_hyperbolic_disc():
    b = builtin_graph("cmc_family", m=2, c=1.0)
    res = mean_curvature_bound(b.product, b.graph, 1.0)
    assert res.passed and abs(res.slack) < 1e-6
    assert res.mean_curvature_spread < 1e-9


def test_strict_inequality_for_perturbed_graph():
    b = builtin_graph("polynomial", m=2, n=1, seed=1)
    res = mean_curvature_bound(b.product, b.graph, 0.8, samples=512)
    assert res.passed and res.slack > 0
    assert set(res.to_record()) >= {"lhs", "rhs", "slack", "verdict", "b_D", "volume", "boundary_area"}


def test_alias():
    assert prop9_check is mean_curvature_bound


def test_needs_hypersurface_and_samples():
    b = builtin_graph("polynomial", m=2, n=2, seed=0)
    with pytest.raises(DomainError):
        mean_curvature_bound(b.product, b.graph, 0.5)
    h = builtin_graph("hyperboloid", m=2)
    with pytest.raises(ValueError):
        mean_curvature_bound(h.product, h.graph, 0.5, samples=4)


def test_lightlike_domain_rejected():
    product = ProductMetric(make_metric("euclidean", dim=2), make_metric("line"))
    f = GraphMap("steep", 2, 1, lambda p, x: _affine(p, x) * (1 + x @ x), params=(np.array([[0.9, 0.0]]), np.zeros(1)))
    with pytest.raises(SpacelikeError):
        mean_curvature_bound(product, f, 2.0)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("r", [1.0, 2.0, 4.0, 8.0])
def test_euclidean_cheeger_witness(m, r):
    assert cheeger_witness(make_metric("euclidean", dim=m), r, count=16) == pytest.approx(m / r, rel=1e-8)


def test_hyperbolic_cheeger_witness():
    # A/V = sinh(s) / (cosh(s) - 1) decreases in s, so the outer ball wins
    assert cheeger_witness(make_metric("poincare_ball", dim=2), 1.0, count=8) == pytest.approx(
        np.sinh(1) / (np.cosh(1) - 1), rel=1e-10
    )


def test_closed_manifold_witness():
    assert cheeger_witness(make_metric("flat_torus", dim=2), 0.3) == 0.0


def test_domain_measures_optional_witness():
    d = domain_measures(make_metric("euclidean", dim=2), 2.0)
    assert d.cheeger_witness is None and d.ratio == pytest.approx(1.0)
    d = domain_measures(make_metric("euclidean", dim=2), 2.0, witness_count=4)
    assert d.cheeger_witness == pytest.approx(1.0)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_ball_samples_inside_and_on_boundary(dim):
    pts = ball_samples(dim, 0.7, 200, seed=1)
    r = np.linalg.norm(pts, axis=1)
    assert pts.shape == (200, dim)
    assert np.all(r <= 0.7 + 1e-12)
    assert np.sum(np.isclose(r, 0.7)) >= 2
    assert np.array_equal(pts, ball_samples(dim, 0.7, 200, seed=1))
