import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spacelike.corpus import CORPUS, run_scenario
from spacelike.identities import (
    IDENTITY_CHECKS,
    IDENTITY_TAGS,
    bernstein_gap,
    bernstein_inequality,
    cross_sum,
    diagonal_sum,
    evaluate_point,
    gradient_identity,
    laplacian_identity,
    surface_case_report,
    surface_chain,
)
from spacelike.solutions import builtin_graph

FAST = [
    "affine_flat_2x2",
    "polynomial_flat_2x1",
    "hyperboloid_plane",
    "torus_periodic_seed0",
    "geodesic_cylinder_h2",
    "slice_sphere",
    "sphere_height",
    "cmc_hyperbolic_plane_c05",
]


def _loops_diagonal(h, lam):
    m = lam.size
    total = 0.0
    for k in range(m):
        for i in range(m):
            for j in range(i + 1, m):
                if i < h.shape[0] and j < h.shape[0]:
                    total += lam[i] * lam[j] * h[i, i, k] * h[j, j, k]
    return total


def _loops_cross(h, lam):
    m = lam.size
    total = 0.0
    for k in range(m):
        for i in range(m):
            for j in range(i + 1, m):
                if i < h.shape[0] and j < h.shape[0]:
                    total += lam[i] * lam[j] * h[j, i, k] * h[i, j, k]
    return total


def _sym(h):
    return 0.5 * (h + np.swapaxes(h, 1, 2))


shapes = st.tuples(st.integers(1, 4), st.integers(1, 4))


@st.composite
def tensors(draw, traceless=False, m=None):
    m = draw(st.integers(2, 4)) if m is None else m
    n = draw(st.integers(1, 4))
    h = _sym(draw(arrays(np.float64, (n, m, m), elements=st.floats(-3, 3))))
    if traceless:
        h = h - np.einsum("aii->a", h)[:, None, None] * np.eye(m) / m
    r = min(m, n)
    lam = np.zeros(m)
    lam[:r] = -np.sort(-draw(arrays(np.float64, (r,), elements=st.floats(0, 0.999))))
    return h, lam


def test_registry_tags():
    assert set(IDENTITY_CHECKS) == set(IDENTITY_TAGS)
    assert IDENTITY_TAGS["laplacian_identity_3_9"] == "3.9"
    assert len(set(IDENTITY_TAGS.values())) == len(IDENTITY_TAGS)


@settings(max_examples=200)
@given(tensors())
def test_pair_sums_match_loops(data):
    h, lam = data
    assert np.isclose(diagonal_sum(h, lam), _loops_diagonal(h, lam), atol=1e-12)
    assert np.isclose(cross_sum(h, lam), _loops_cross(h, lam), atol=1e-12)


@settings(max_examples=300)
@given(tensors())
def test_bernstein_block_dominates(data):
    h, lam = data
    assert bernstein_gap(h, lam) >= -1e-10 * (1 + np.sum(h**2))


@settings(max_examples=300)
@given(tensors(traceless=True, m=2))
def test_surface_chain_nonnegative_when_traceless(data):
    h, lam = data
    assert surface_chain(h, lam) >= -1e-10 * (1 + np.sum(h**2))


def test_surface_chain_needs_tracelessness():
    # an umbilic first component paired with an off-diagonal second breaks the chain
    h = np.array([np.eye(2), [[0.0, 1.0], [1.0, 0.0]]])
    assert surface_chain(h, np.array([0.99, 0.99])) < 0


@pytest.mark.parametrize("scenario", FAST)
def test_corpus_scenario_passes(scenario):
    sc = CORPUS[scenario]
    b = sc.build()
    result = run_scenario(b.product, b.graph, [np.array(p) for p in sc.points], scenario)
    assert result.passed, result.failures
    assert {r.tag for r in result.reports} <= set(IDENTITY_TAGS.values())


@pytest.mark.parametrize("point", [[0.3, 0.1], [-1.2, 0.8], [2.5, -3.0]])
def test_hyperboloid_closed_forms(point):
    # u = cosh(theta) = sqrt(1 + r^2) is cosh of the distance to the apex on H^2,
    # so |grad u|^2 = u^2 - 1 and Delta u = 2 u
    b = builtin_graph("hyperboloid", m=2)
    p = np.array(point)
    r2 = p @ p
    g = gradient_identity(b.product, b.graph, p)
    assert np.isclose(g.lhs, r2 / (1 + r2), rtol=1e-12)
    lap = laplacian_identity(b.product, b.graph, p)
    assert np.isclose(lap.lhs, 2 * np.sqrt(1 + r2), rtol=1e-12)
    assert lap.passed


def test_bernstein_flags_and_conditional_flat():
    sc = CORPUS["polynomial_flat_2x2"]
    b = sc.build()
    for p in sc.points:
        r = bernstein_inequality(b.product, b.graph, np.array(p))
        assert r.hypothesis_flags["ricci1_nonnegative"] and r.hypothesis_flags["k1_ge_k2_on_planes"]
        assert r.checks["algebraic"]


def test_bernstein_fails_without_hypotheses():
    b = builtin_graph("cmc_family", m=2, c=1.0)
    r = bernstein_inequality(b.product, b.graph, np.array([0.3, 0.1]))
    assert not r.hypothesis_flags["ricci1_nonnegative"]
    assert not r.checks["inequality_holds"]
    assert r.checks["conditional"] is None
    assert r.passed  # the identity holds, the inequality is simply not claimed


def test_epsilon_mode():
    sc = CORPUS["sphere_to_hyperbolic"]
    b = sc.build()
    p = np.array(sc.points[0])
    plain = bernstein_inequality(b.product, b.graph, p)
    strong = bernstein_inequality(b.product, b.graph, p, epsilon=0.5)
    assert strong.checks["epsilon"] == 0.5
    assert strong.checks["epsilon_lower_bound"] >= plain.checks["delta_B_norm_sq"]
    assert np.isclose(strong.lhs, plain.lhs)


def test_surface_case_rejects_higher_dimensions():
    b = builtin_graph("hyperboloid", m=3)
    with pytest.raises(ValueError):
        surface_case_report(b.product, b.graph, np.array([0.1, 0.2, 0.3]))


def test_surface_case_gauss_curvature_routes():
    sc = CORPUS["sphere_to_hyperbolic"]
    b = sc.build()
    d = evaluate_point(b.product, b.graph, np.array(sc.points[1]))
    r = surface_case_report(b.product, b.graph, d.point, data=d)
    assert np.isclose(r.checks["gauss_curvature_intrinsic"], r.checks["gauss_curvature_gauss_equation"], atol=1e-10)


def test_tolerance_scale_tightens():
    b = builtin_graph("polynomial", m=2, n=1, seed=1)
    r = gradient_identity(b.product, b.graph, np.array([0.1, 0.2]), tolerance_scale=1e-30)
    assert r.tolerance == pytest.approx(1e-36) and r.verdict == "fail"


def test_report_record_is_plain():
    b = builtin_graph("hyperboloid", m=2)
    rec = laplacian_identity(b.product, b.graph, np.array([0.3, 0.1])).to_record()
    assert rec["name"] == "laplacian_identity_3_9" and rec["tag"] == "3.9"
    assert isinstance(rec["residual"], float)
