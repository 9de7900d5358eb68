"""Spacelike graphs in pseudo-Riemannian products ``(S1 x S2, g1 - g2)``.

Curvature of the factor metrics, the induced geometry of graphs, pointwise
identities and inequalities for their mean curvature, an explicit family of
constant mean curvature graphs over hyperbolic space, and a Newton solver for
the discrete constant mean curvature equation.
"""

from .config import ConfigError, ScenarioConfig, load_scenario
from .corpus import CORPUS, ScenarioResult, run_scenario
from .errors import ConvergenceError, DomainError, GeometryError, NumericalError, SpacelikeError
from .estimates import DomainMeasures, MeanCurvatureBound, cheeger_witness, domain_measures, mean_curvature_bound, prop9_check
from .extrinsic import (
    ExtrinsicData,
    calabi_operator,
    hypersurface_mean_curvature,
    second_fundamental,
    structure_equation_residuals,
)
from .graph import GraphMap, ProductMetric, SpacelikeFrameData, analyze_graph_point
from .identities import (
    IDENTITY_CHECKS,
    IDENTITY_TAGS,
    IdentityReport,
    bernstein_inequality,
    gradient_identity,
    laplacian_identity,
    ricci_bound_report,
    surface_case_report,
)
from .kernel import graph_geometry, graph_jet
from .metrics import METRIC_REGISTRY, MetricField, eval_curvature, geodesic_ball_measures, make_metric
from .solutions import GRAPH_REGISTRY, CmcFamily, builtin_graph, cmc_family_eval, verify_family_properties
from .solver import DiscreteGraph, SolveOptions, bernstein_experiment, interval_graph, radial_graph, solve_cmc, torus_graph

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_scenario",
    "CORPUS",
    "ScenarioResult",
    "run_scenario",
    "ConvergenceError",
    "DomainError",
    "GeometryError",
    "NumericalError",
    "SpacelikeError",
    "DomainMeasures",
    "MeanCurvatureBound",
    "cheeger_witness",
    "domain_measures",
    "mean_curvature_bound",
    "prop9_check",
    "ExtrinsicData",
    "calabi_operator",
    "hypersurface_mean_curvature",
    "second_fundamental",
    "structure_equation_residuals",
    "GraphMap",
    "ProductMetric",
    "SpacelikeFrameData",
    "analyze_graph_point",
    "IDENTITY_CHECKS",
    "IDENTITY_TAGS",
    "IdentityReport",
    "bernstein_inequality",
    "gradient_identity",
    "laplacian_identity",
    "ricci_bound_report",
    "surface_case_report",
    "graph_geometry",
    "graph_jet",
    "METRIC_REGISTRY",
    "MetricField",
    "eval_curvature",
    "geodesic_ball_measures",
    "make_metric",
    "GRAPH_REGISTRY",
    "CmcFamily",
    "builtin_graph",
    "cmc_family_eval",
    "verify_family_properties",
    "DiscreteGraph",
    "SolveOptions",
    "bernstein_experiment",
    "interval_graph",
    "radial_graph",
    "solve_cmc",
    "torus_graph",
]
