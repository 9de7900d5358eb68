"""Named verification scenarios: a graph, its product, and sample points.

The corpus spans flat products, flat tori, hyperbolic and spherical bases,
and hyperbolic targets.  Points are fixed so that reports are reproducible.
"""

from dataclasses import dataclass, field


from .extrinsic import structure_equation_residuals
from .identities import IDENTITY_CHECKS, bernstein_inequality, evaluate_point
from .solutions import builtin_graph

__all__ = ["Scenario", "CORPUS", "scenario", "run_scenario", "ScenarioResult", "STRUCTURE_TOLERANCES"]

STRUCTURE_TOLERANCES = {"flat": 1e-6, "curved": 1e-4}


@dataclass(frozen=True)
class Scenario:
    name: str
    graph: str
    params: dict
    points: tuple
    description: str = ""

    def build(self):
        return builtin_graph(self.graph, **self.params)


def _pts(*rows):
    return tuple(tuple(float(v) for v in r) for r in rows)


CORPUS = {
    s.name: s
    for s in [
        Scenario("affine_flat_2x2", "affine", {"A": [[0.5, 0.1], [-0.2, 0.3]], "b": [0.1, 0.0]},
                 _pts([0.3, -0.4], [1.5, 2.0], [-3.0, 0.7]), "affine map between Euclidean planes"),
        Scenario("affine_flat_3x2", "affine", {"A": [[0.4, 0.0, 0.2], [0.1, -0.3, 0.0]]},
                 _pts([0.1, 0.2, 0.3], [-1.0, 0.5, 2.0], [0.0, 0.0, 0.0]), "affine map R^3 -> R^2"),
        Scenario("polynomial_flat_2x2", "polynomial", {"m": 2, "n": 2, "seed": 0},
                 _pts([0.2, -0.3], [0.5, 0.4], [-0.6, 0.1]), "random cubic R^2 -> R^2"),
        Scenario("polynomial_flat_2x1", "polynomial", {"m": 2, "n": 1, "seed": 1},
                 _pts([0.1, 0.1], [-0.5, 0.3], [0.4, -0.7]), "random cubic R^2 -> R"),
        Scenario("polynomial_flat_3x2", "polynomial", {"m": 3, "n": 2, "seed": 2},
                 _pts([0.1, 0.2, -0.1], [-0.4, 0.3, 0.2], [0.3, -0.3, 0.5]), "random cubic R^3 -> R^2"),
        Scenario("hyperboloid_plane", "hyperboloid", {"m": 2},
                 _pts([0.3, 0.1], [-1.2, 0.8], [2.5, -3.0]), "unit hyperboloid over R^2"),
        Scenario("hyperboloid_space", "hyperboloid", {"m": 3},
                 _pts([0.3, 0.1, -0.2], [1.0, -1.0, 0.5], [-2.0, 0.0, 1.5]), "unit hyperboloid over R^3"),
        Scenario("torus_periodic_seed0", "periodic", {"m": 2, "n": 1, "seed": 0},
                 _pts([0.1, 0.2], [0.55, 0.35], [0.8, 0.9]), "random periodic height on the flat torus"),
        Scenario("torus_periodic_seed3", "periodic", {"m": 2, "n": 1, "seed": 3, "max_slope": 0.7},
                 _pts([0.25, 0.75], [0.6, 0.1], [0.95, 0.45]), "steeper random periodic height"),
        Scenario("torus_periodic_plane_target", "periodic", {"m": 2, "n": 2, "seed": 1},
                 _pts([0.3, 0.3], [0.7, 0.2], [0.15, 0.85]), "periodic map from the torus into R^2"),
        Scenario("cmc_hyperbolic_plane_c1", "cmc_family", {"m": 2, "c": 1.0},
                 _pts([0.3, 0.1], [-0.5, 0.4], [0.1, -0.8]), "constant mean curvature 1 over H^2"),
        Scenario("cmc_hyperbolic_plane_c05", "cmc_family", {"m": 2, "c": 0.5},
                 _pts([0.2, 0.2], [-0.7, 0.1], [0.0, 0.6]), "constant mean curvature 1/2 over H^2"),
        Scenario("cmc_hyperbolic_space_c1", "cmc_family", {"m": 3, "c": 1.0},
                 _pts([0.2, 0.1, -0.1], [-0.4, 0.3, 0.2], [0.1, -0.6, 0.3]), "constant mean curvature 1 over H^3"),
        Scenario("slice_hyperbolic_plane", "cmc_family", {"m": 2, "c": 0.0},
                 _pts([0.3, 0.1], [-0.5, 0.4], [0.0, 0.0]), "slice of H^2 x R"),
        Scenario("geodesic_cylinder_h2", "geodesic_cylinder", {"m": 2, "n": 2, "speed": 0.6},
                 _pts([0.3, 0.1], [-1.0, 2.0], [2.0, -0.5]), "geodesic of H^2 at speed 0.6 along x_1"),
        Scenario("geodesic_cylinder_h3", "geodesic_cylinder", {"m": 2, "n": 3, "speed": 0.4, "direction": [1.0, 1.0, 0.0]},
                 _pts([0.3, 0.1], [-1.5, 0.5], [1.0, 1.0]), "geodesic of H^3 at speed 0.4"),
        Scenario("slice_sphere", "sphere_height", {"m": 2, "eps": 0.0, "d": 0.5},
                 _pts([0.3, 0.1], [-0.5, 0.4], [1.5, -2.0]), "slice of S^2 x R"),
        Scenario("sphere_height", "sphere_height", {"m": 2, "eps": 0.3},
                 _pts([0.3, 0.1], [-0.5, 0.4], [1.5, -2.0]), "height function perturbation over S^2"),
        Scenario("sphere_quadratic", "sphere_quadratic", {"m": 2, "eps": 0.2, "seed": 4},
                 _pts([0.3, 0.1], [-0.5, 0.4], [1.5, -2.0]), "quadratic perturbation over S^2"),
        Scenario("sphere_to_hyperbolic", "polynomial",
                 {"m": 2, "n": 2, "seed": 5, "radius": 0.6, "sigma1": "sphere_stereo", "sigma2": "poincare_ball"},
                 _pts([0.2, -0.1], [-0.3, 0.4], [0.5, 0.2]), "cubic map S^2 -> H^2 (both factors curved)"),
    ]
}


def scenario(name):
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; known: {sorted(CORPUS)}") from None


def _flat(product):
    return all(s.curvature_sign == 0 for s in (product.sigma1, product.sigma2))


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    reports: tuple
    structure: tuple
    flat: bool
    failures: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return not self.failures

    def to_record(self):
        return {
            "name": self.name,
            "flat_ambient": self.flat,
            "passed": self.passed,
            "failures": list(self.failures),
            "reports": [r.to_record() for r in self.reports],
            "structure": [dict(s) for s in self.structure],
        }


def run_scenario(product, f, points, name="scenario", checks=None, tolerance_scale=1.0, structure=True, epsilon=None):
    """Run identity checks (and the structure equations) at each point."""
    checks = list(IDENTITY_CHECKS) if checks is None else list(checks)
    unknown = [c for c in checks if c not in IDENTITY_CHECKS]
    if unknown:
        raise KeyError(f"unknown identity checks {unknown}; known: {sorted(IDENTITY_CHECKS)}")
    if product.m != 2 and "surface_case_5_1" in checks:
        checks.remove("surface_case_5_1")
    flat = _flat(product)
    stol = STRUCTURE_TOLERANCES["flat" if flat else "curved"] * tolerance_scale
    reports, struct, failures = [], [], []
    for p in points:
        d = evaluate_point(product, f, p)
        for c in checks:
            if c == "bernstein_inequality_4_6":
                r = bernstein_inequality(product, f, p, data=d, epsilon=epsilon, tolerance_scale=tolerance_scale)
            else:
                r = IDENTITY_CHECKS[c](product, f, p, data=d, tolerance_scale=tolerance_scale)
            reports.append(r)
            if not r.passed:
                failures.append(f"{c} at {tuple(round(float(v), 6) for v in p)}: residual {r.residual:.3e}")
        if structure:
            s = structure_equation_residuals(product, f, p)
            rec = {"point": [float(v) for v in p], "gauss": s.gauss, "codazzi": s.codazzi, "ricci": s.ricci,
                   "tolerance": stol, "warnings": list(s.warnings)}
            struct.append(tuple(rec.items()))
            for key in ("gauss", "codazzi", "ricci"):
                if not rec[key] < stol:
                    failures.append(f"{key} equation at {tuple(round(float(v), 6) for v in p)}: residual {rec[key]:.3e}")
    return ScenarioResult(name, tuple(reports), tuple(struct), flat, tuple(failures))
