import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacelike.errors import DomainError, SpacelikeError
from spacelike.extrinsic import hypersurface_mean_curvature
from spacelike.graph import analyze_graph_point
from spacelike.solutions import (
    GRAPH_REGISTRY,
    CmcFamily,
    builtin_graph,
    cmc_family_eval,
    hyperbolic_distance,
    random_periodic,
    random_polynomial,
    verify_family_properties,
)

# I(r) and f_c(r) from 30-digit mpmath quadrature of the defining integrals
PROFILE_ORACLE = [
    (2, 1.0, 0.5, 0.24491866240370912928, 0.060949614482122802021),
    (2, 1.0, 2.0, 0.76159415595576488812, 0.75651467183243198446),
    (2, 0.5, 1.0, 0.23105857863000487925, 0.11849113612505229814),
    (2, 5.0, 5.0, 4.9330714907571514444, 4.5522105717204138769),
    (3, 1.0, 0.3, 0.098815245509704640545, 0.014874326258094478899),
    (3, 1.0, 2.0, 0.44263553052570294869, 0.5081895991643879353),
    (3, 5.0, 1.0, 1.4724340613325520931, 0.55313716378961158522),
    (4, 1.0, 1.5, 0.2748697926522642222, 0.23433624752947592553),
    (5, 2.0, 3.0, 0.49519790997000025266, 0.99890767302131828633),
]


@pytest.mark.parametrize("m,c,r,ratio,value", PROFILE_ORACLE)
def test_profile_against_quadrature_oracle(m, c, r, ratio, value):
    fam = CmcFamily(m, c)
    assert fam.ratio(r) == pytest.approx(ratio, abs=1e-13)
    assert fam.value(r) == pytest.approx(value, abs=1e-13)
    assert fam.slope(r) == pytest.approx(ratio / np.sqrt(1 + ratio**2), abs=1e-13)


@pytest.mark.parametrize("m,c", [(2, 1.0), (3, 0.5), (3, 5.0), (4, 2.0)])
def test_origin_series_is_continuous(m, c):
    f = CmcFamily(m, c).graph_map()
    e = np.zeros(m)
    e[0] = 1.0
    # |x|^2 = 1e-8 is the switch between the series and the quadrature branch
    for x in (0.99999e-4 * e, 1.00001e-4 * e, 0.3e-4 * e):
        assert f.eval(x)[0] == pytest.approx(CmcFamily(m, c).value(hyperbolic_distance(x)), rel=1e-9)


@pytest.mark.parametrize("m,c", [(2, 1.0), (3, 5.0)])
def test_family_mean_curvature_constant(m, c, rng):
    fam = CmcFamily(m, c)
    pts = rng.uniform(-0.5, 0.5, size=(40, m))
    hnu, slopes = hypersurface_mean_curvature(fam.product(), fam.graph_map(), pts)
    assert np.max(np.abs(hnu - c)) < 1e-9
    assert np.all(slopes**2 < fam.gradient_bound())


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("c", [0.0, 0.5, 1.0, 5.0])
def test_verify_family_properties(m, c):
    reports = verify_family_properties(m, c, samples=50)
    assert [r.name for r in reports] == [
        "family_constant_mean_curvature", "family_gradient_bound", "family_shift_foliation", "family_monotone_in_c"
    ]
    assert all(r.passed for r in reports), [r.to_record() for r in reports if not r.passed]
    assert reports[0].breakdown["std"] < 1e-6


def test_family_verification_range():
    with pytest.raises(ValueError):
        verify_family_properties(4, 1.0)
    with pytest.raises(ValueError):
        verify_family_properties(2, 11.0)
    with pytest.raises(ValueError):
        CmcFamily(1, 1.0)


def test_gradient_bound_approached_far_out():
    fam = CmcFamily(2, 1.0)
    assert fam.gradient_bound() == 0.5
    assert 0.5 - fam.slope(20.0) ** 2 < 1e-3
    assert fam.slope(20.0) ** 2 < 0.5


@settings(max_examples=60)
@given(r=st.floats(0.01, 30.0), c=st.floats(-4.0, 4.0), dc=st.floats(0.01, 1.0), m=st.integers(2, 3))
def test_profile_monotone_and_bounded(r, c, dc, m):
    lo, hi = CmcFamily(m, c), CmcFamily(m, c + dc)
    assert hi.value(r) > lo.value(r)
    assert lo.slope(r) ** 2 < lo.gradient_bound() or c == 0


def test_cmc_family_eval_gradient():
    x = np.array([0.3, -0.2])
    val, grad = cmc_family_eval(2, 1.0, x)
    r = hyperbolic_distance(x)
    assert val == pytest.approx(CmcFamily(2, 1.0).value(r), rel=1e-12)
    # g1-norm of the gradient is the profile slope
    g1 = 4 / (1 - x @ x) ** 2
    assert np.sqrt(g1) * np.linalg.norm(grad) == pytest.approx(CmcFamily(2, 1.0).slope(r), rel=1e-10)
    with pytest.raises(DomainError):
        cmc_family_eval(2, 1.0, [0.9995, 0.0])
    with pytest.raises(DomainError):
        cmc_family_eval(2, 1.0, [0.1, 0.1, 0.1])


def test_shift_parameter():
    a, b = CmcFamily(2, 1.0), CmcFamily(2, 1.0, d=0.75)
    assert b.value(1.3) - a.value(1.3) == pytest.approx(0.75, abs=1e-15)


def test_registry_names():
    assert sorted(GRAPH_REGISTRY) == [
        "affine", "cmc_family", "geodesic_cylinder", "hyperboloid", "periodic",
        "polynomial", "slice", "sphere_height", "sphere_quadratic",
    ]
    with pytest.raises(KeyError):
        builtin_graph("catenoid")


@pytest.mark.parametrize("name,params", [("sphere_height", {"eps": 1.0}), ("sphere_quadratic", {"eps": 0.5})])
def test_builders_reject_timelike_parameters(name, params):
    with pytest.raises(SpacelikeError):
        builtin_graph(name, **params)


@pytest.mark.parametrize(
    "m,n,sigma1,sigma2",
    [(2, 2, "euclidean", "euclidean"), (3, 1, "euclidean", "line"), (2, 2, "sphere_stereo", "poincare_ball")],
)
def test_random_polynomial_hits_target_lambda(m, n, sigma1, sigma2):
    b = builtin_graph("polynomial", m=m, n=n, seed=3, radius=0.5, sigma1=sigma1, sigma2=sigma2)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(60):
        v = rng.normal(size=m)
        p = 0.5 * v / np.linalg.norm(v) * rng.uniform() ** (1 / m)
        worst = max(worst, analyze_graph_point(b.product, b.graph, p).lambdas[0])
    assert 0.6 < worst < 0.75


def test_random_maps_are_reproducible():
    a, b = random_polynomial(2, 2, seed=9), random_polynomial(2, 2, seed=9)
    assert all(np.array_equal(x, y) for x, y in zip(a.params, b.params))
    f = random_periodic(2, 1, seed=4)
    p = np.array([0.3, 0.8])
    assert np.allclose(f.eval(p), f.eval(p + np.array([1.0, -2.0])), atol=1e-12)
