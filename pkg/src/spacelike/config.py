"""Scenario files: TOML tables describing a graph, its product, checks,
a solver run and estimate domains.

Example::

    name = "hyperboloid_flat"

    [graph]
    name = "hyperboloid"
    params = { m = 2 }

    [checks]
    identities = "all"
    points = [[0.3, 0.1], [-1.2, 0.8]]

Unknown keys are rejected so that typos surface as configuration errors.
"""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import tomli

from .corpus import CORPUS
from .errors import GeometryError
from .graph import ProductMetric
from .identities import IDENTITY_CHECKS
from .metrics import METRIC_REGISTRY, make_metric
from .solutions import GRAPH_REGISTRY, builtin_graph

__all__ = ["ConfigError", "ScenarioConfig", "load_scenario", "parse_scenario", "packaged_scenarios"]

_TOP = {"name", "description", "graph", "sigma1", "sigma2", "checks", "solver", "estimates", "output"}
_GRAPH = {"name", "params", "scenario"}
_METRIC = {"name", "params"}
_CHECKS = {"identities", "points", "sample", "structure", "epsilon", "tolerance_scale"}
_SAMPLE = {"count", "radius", "seed"}
_SOLVER = {
    "domain", "grid", "c", "seed", "tolerance", "max_iterations", "damping", "target",
    "left", "right", "lower", "upper", "metric", "radius", "spacing", "boundary", "m", "period",
}
_ESTIMATES = {"radii", "samples", "witness_count", "seed"}
_OUTPUT = {"dir"}


class ConfigError(ValueError):
    """Schema violation in a scenario file."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    description: str
    graph: object = None  # BuiltinGraph
    product: ProductMetric = None
    checks: dict = field(default_factory=dict)
    solver: dict = None
    estimates: dict = None
    output_dir: str = None
    source: str = ""

    def points(self, seed=None):
        pts = self.checks.get("points")
        if pts is not None:
            return [np.asarray(p, float) for p in pts]
        sample = self.checks.get("sample")
        if sample is None or self.graph is None:
            return []
        rng = np.random.default_rng(sample.get("seed", 0) if seed is None else seed)
        m = self.product.m
        v = rng.normal(size=(sample["count"], m))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        r = sample["radius"] * rng.uniform(size=(sample["count"], 1)) ** (1.0 / m)
        return list(v * r)


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError(f"[{where}] must be a table")
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"unknown keys in [{where}]: {extra}; allowed: {sorted(allowed)}")


def _metric(table, where):
    _check_keys(table, _METRIC, where)
    name = table.get("name")
    if name not in METRIC_REGISTRY:
        raise ConfigError(f"[{where}] unknown metric {name!r}; known: {sorted(METRIC_REGISTRY)}")
    try:
        return make_metric(name, **table.get("params", {}))
    except (TypeError, ValueError, GeometryError) as exc:
        raise ConfigError(f"[{where}] bad parameters for {name}: {exc}") from None


def packaged_scenarios():
    root = resources.files("spacelike") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".toml"))


def _resolve(path):
    p = Path(path)
    if p.is_file():
        return p.read_text(), str(p)
    root = resources.files("spacelike") / "scenarios"
    cand = root / p.name
    if cand.is_file():
        return cand.read_text(), f"packaged:{p.name}"
    raise ConfigError(f"scenario file {path!r} not found (packaged: {packaged_scenarios()})")


def load_scenario(path):
    text, source = _resolve(path)
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return parse_scenario(data, source)


def parse_scenario(data, source="<memory>"):
    _check_keys(data, _TOP, "top level")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("scenario needs a non-empty 'name'")
    graph = product = None
    checks = {}
    if "graph" in data:
        g = data["graph"]
        _check_keys(g, _GRAPH, "graph")
        if "scenario" in g:
            if g["scenario"] not in CORPUS:
                raise ConfigError(f"[graph] unknown corpus scenario {g['scenario']!r}")
            sc = CORPUS[g["scenario"]]
            gname, params = sc.graph, dict(sc.params)
            checks["points"] = [list(p) for p in sc.points]
        else:
            gname, params = g.get("name"), dict(g.get("params", {}))
        if gname not in GRAPH_REGISTRY:
            raise ConfigError(f"[graph] unknown graph {gname!r}; known: {sorted(GRAPH_REGISTRY)}")
        try:
            graph = builtin_graph(gname, **params)
        except (TypeError, ValueError, GeometryError) as exc:
            raise ConfigError(f"[graph] bad parameters for {gname}: {exc}") from None
        product = graph.product
        s1 = _metric(data["sigma1"], "sigma1") if "sigma1" in data else product.sigma1
        s2 = _metric(data["sigma2"], "sigma2") if "sigma2" in data else product.sigma2
        product = ProductMetric(s1, s2)
        if (product.m, product.n) != (graph.graph.m, graph.graph.n):
            raise ConfigError(
                f"dimension mismatch: graph is R^{graph.graph.m} -> R^{graph.graph.n}, "
                f"product is {product.m} + {product.n}"
            )
    elif "sigma1" in data or "sigma2" in data:
        raise ConfigError("[sigma1]/[sigma2] need a [graph] table")

    if "checks" in data:
        c = data["checks"]
        _check_keys(c, _CHECKS, "checks")
        if graph is None:
            raise ConfigError("[checks] needs a [graph] table")
        ids = c.get("identities", "all")
        ids = list(IDENTITY_CHECKS) if ids == "all" else ids
        if not isinstance(ids, list) or any(i not in IDENTITY_CHECKS for i in ids):
            raise ConfigError(f"[checks] identities must be 'all' or names from {sorted(IDENTITY_CHECKS)}")
        checks["identities"] = ids
        if "points" in c:
            pts = c["points"]
            if not pts or any(len(p) != product.m for p in pts):
                raise ConfigError(f"[checks] points must be non-empty lists of length {product.m}")
            checks["points"] = pts
        if "sample" in c:
            _check_keys(c["sample"], _SAMPLE, "checks.sample")
            s = c["sample"]
            if int(s.get("count", 0)) < 1 or not float(s.get("radius", 0)) > 0:
                raise ConfigError("[checks.sample] needs count >= 1 and radius > 0")
            checks["sample"] = {"count": int(s["count"]), "radius": float(s["radius"]), "seed": int(s.get("seed", 0))}
        checks["structure"] = bool(c.get("structure", True))
        checks["epsilon"] = c.get("epsilon")
        checks["tolerance_scale"] = float(c.get("tolerance_scale", 1.0))
        if "points" not in checks and "sample" not in checks:
            raise ConfigError("[checks] needs 'points' or a [checks.sample] table")
    elif "points" in checks:
        checks["identities"] = list(IDENTITY_CHECKS)
        checks["structure"] = True

    solver = None
    if "solver" in data:
        s = dict(data["solver"])
        _check_keys(s, _SOLVER, "solver")
        if s.get("domain") not in ("torus", "interval", "radial"):
            raise ConfigError("[solver] domain must be 'torus', 'interval' or 'radial'")
        if s["domain"] == "radial" and s.get("metric", "poincare_ball") not in METRIC_REGISTRY:
            raise ConfigError(f"[solver] unknown metric {s.get('metric')!r}")
        solver = s

    estimates = None
    if "estimates" in data:
        e = data["estimates"]
        _check_keys(e, _ESTIMATES, "estimates")
        if graph is None:
            raise ConfigError("[estimates] needs a [graph] table")
        radii = e.get("radii", [1.0])
        if not radii or any(not float(r) > 0 for r in radii):
            raise ConfigError("[estimates] radii must be positive")
        estimates = {
            "radii": [float(r) for r in radii],
            "samples": int(e.get("samples", 1024)),
            "witness_count": int(e.get("witness_count", 64)),
            "seed": int(e.get("seed", 0)),
        }

    out = None
    if "output" in data:
        _check_keys(data["output"], _OUTPUT, "output")
        out = data["output"].get("dir")

    return ScenarioConfig(name, data.get("description", ""), graph, product, checks, solver, estimates, out, source)
