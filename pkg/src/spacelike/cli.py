"""Command-line front end: ``spacelike {verify,solve,family,estimates,list}``.

Exit codes: 0 when every enabled check passes, 1 when a check fails (the
failing records are listed on stderr), 2 for usage or configuration errors.
Reports are deterministic JSON written atomically into ``--out``.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _io
from .config import ConfigError, load_scenario, packaged_scenarios
from .corpus import CORPUS, run_scenario
from .errors import ConvergenceError, GeometryError, SpacelikeError
from .estimates import cheeger_witness, mean_curvature_bound
from .identities import IDENTITY_TAGS
from .metrics import METRIC_REGISTRY, make_metric
from .solutions import GRAPH_REGISTRY, CmcFamily, verify_family_properties
from .solver import (
    SolveOptions,
    bernstein_experiment,
    interval_graph,
    radial_graph,
    solve_cmc,
    torus_graph,
    write_solution_csv,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SOLVER_GRADIENT_TOL = 1e-6
RADIAL_TOL = 1e-4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    p = _Parser(prog="spacelike", description="Spacelike graphs in pseudo-Riemannian products.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario TOML file (or a packaged scenario name)")
        sp.add_argument("--seed", type=_seed, default=None, help="random seed (overrides the scenario)")
        sp.add_argument("--out", type=Path, default=None, help="report directory (default: reports)")
        sp.add_argument("--tolerance-scale", type=_positive, default=None, help="multiply every tolerance")
        sp.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")

    common(sub.add_parser("verify", help="run identity and structure-equation checks"))
    common(sub.add_parser("solve", help="run the discrete CMC solver"))
    fam = sub.add_parser("family", help="verify the constant mean curvature family over hyperbolic space")
    common(fam, scenario=False)
    fam.add_argument("--m", type=int, default=2)
    fam.add_argument("--c", type=float, default=1.0)
    fam.add_argument("--samples", type=int, default=50)
    common(sub.add_parser("estimates", help="mean curvature bound and Cheeger witness on balls"))
    sub.add_parser("list", help="list registered metrics, graphs, checks and scenarios")
    return p


# ---------------------------------------------------------------------------
# subcommands


def _out_dir(args, cfg=None):
    if args.out is not None:
        return args.out
    if cfg is not None and cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("reports")


def _scale(args, cfg=None):
    base = cfg.checks.get("tolerance_scale", 1.0) if cfg is not None else 1.0
    return base * (args.tolerance_scale if args.tolerance_scale is not None else 1.0)


def _header(command, cfg, args, scale):
    return {
        "command": command,
        "scenario": cfg.name,
        "source": cfg.source,
        "seed": args.seed,
        "tolerance_scale": scale,
    }


def cmd_verify(args):
    cfg = load_scenario(args.scenario)
    if cfg.graph is None or not cfg.checks.get("identities"):
        raise ConfigError(f"{cfg.source}: verify needs [graph] and [checks] tables")
    scale = _scale(args, cfg)
    points = cfg.points(seed=args.seed)
    result = run_scenario(
        cfg.product, cfg.graph.graph, points, cfg.name, checks=cfg.checks["identities"],
        tolerance_scale=scale, structure=cfg.checks.get("structure", True), epsilon=cfg.checks.get("epsilon"),
    )
    suites = sorted({r.name for r in result.reports})
    summary = {
        name: {
            "tag": IDENTITY_TAGS[name],
            "passed": all(r.passed for r in result.reports if r.name == name),
            "max_residual": max(r.residual for r in result.reports if r.name == name),
        }
        for name in suites
    }
    report = {**_header("verify", cfg, args, scale), **result.to_record(), "suites": summary}
    path = _io.write_json(_out_dir(args, cfg) / f"verify_{cfg.name}.json", report)
    lines = [f"{n} ({s['tag']}): {'pass' if s['passed'] else 'FAIL'}  max residual {s['max_residual']:.3e}"
             for n, s in summary.items()]
    return result.passed, lines + [f"report: {path}"], list(result.failures)


def _solver_options(s, seed):
    return SolveOptions(
        c=float(s.get("c", 0.0)),
        max_iterations=int(s.get("max_iterations", 100)),
        tolerance=float(s.get("tolerance", 1e-10)),
        damping=float(s.get("damping", 0.5)),
        seed=seed,
    )


def cmd_solve(args):
    cfg = load_scenario(args.scenario)
    s = cfg.solver
    if s is None:
        raise ConfigError(f"{cfg.source}: solve needs a [solver] table")
    scale = _scale(args, cfg)
    seed = int(args.seed if args.seed is not None else s.get("seed", 0))
    try:
        opts = _solver_options(s, seed)
    except ValueError as exc:
        raise ConfigError(f"[solver] {exc}") from None
    out = _out_dir(args, cfg)
    stem = f"solve_{cfg.name}_seed{seed}"
    failures = []
    domain = s["domain"]
    try:
        if domain == "torus":
            grid = int(s.get("grid", 64))
            exp = bernstein_experiment(seed=seed, grid=grid, target_kind=s.get("target", "line"), options=opts,
                                       initial=torus_graph(grid, period=1.0, seed=seed))
            sol, record = exp.solution, exp.to_record()
            tol = SOLVER_GRADIENT_TOL * scale
            record["final_sup_gradient"] = exp.final_max_gradient
            record["gradient_tolerance"] = tol
            if not exp.final_max_gradient < tol:
                failures.append(f"final sup|Df_h| = {exp.final_max_gradient:.3e} exceeds {tol:.1e}")
            failures += [f"{r.name} at {r.point}: residual {r.residual:.3e}" for r in exp.identity_reports if not r.passed]
        elif domain == "interval":
            grid = int(s.get("grid", 64))
            start = interval_graph(grid, float(s.get("left", 0.0)), float(s.get("right", 0.5)),
                                   float(s.get("lower", 0.0)), float(s.get("upper", 1.0)))
            sol = solve_cmc(opts, start, make_metric("line"))
            record = _solve_record(sol)
        else:
            metric = make_metric(s.get("metric", "poincare_ball"), dim=int(s.get("m", 2)))
            radius, spacing = float(s.get("radius", 2.0)), float(s.get("spacing", 1.0 / 128))
            family = CmcFamily(metric.dim, opts.c) if s.get("boundary", "cmc_family") == "cmc_family" else None
            bval = family.value(radius) if family else float(s["boundary"])
            sol = solve_cmc(opts, radial_graph(metric, radius, spacing, bval), metric)
            record = _solve_record(sol)
            if family is not None:
                exact = np.array([family.value(r) for r in sol.nodes()])
                err = float(np.max(np.abs(sol.values - exact)))
                tol = RADIAL_TOL * scale
                record.update(max_error_vs_family=err, error_tolerance=tol)
                if not err < tol:
                    failures.append(f"radial solution differs from the family by {err:.3e} (tolerance {tol:.1e})")
    except ConvergenceError as exc:
        report = {**_header("solve", cfg, args, scale), "domain": domain, "passed": False,
                  "error": str(exc), "residual_history": exc.history}
        _io.write_json(out / f"{stem}.json", report)
        return False, [], [str(exc)]
    record["converged"] = bool(sol.converged)
    report = {**_header("solve", cfg, args, scale), "domain": domain, "seed": seed, "c": opts.c,
              "passed": not failures, "failures": failures, **record}
    path = _io.write_json(out / f"{stem}.json", report)
    csv_path = write_solution_csv(sol, out / f"{stem}.csv")
    lines = [
        f"{domain} solve: {sol.iterations} Newton steps, sup|Df_h| = {sol.max_gradient():.3e}, "
        f"range = {sol.value_range():.3e}",
        f"report: {path}",
        f"field: {csv_path}",
    ]
    return not failures, lines, failures


def _solve_record(sol):
    return {
        "grid": sol.shape[0] - 1,
        "spacing": sol.spacing,
        "iterations": sol.iterations,
        "final_sup_gradient": sol.max_gradient(),
        "final_range": sol.value_range(),
        "history": [r.__dict__ for r in sol.history],
    }


def cmd_family(args):
    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    scale = args.tolerance_scale or 1.0
    seed = 0 if args.seed is None else args.seed
    try:
        reports = verify_family_properties(args.m, args.c, samples=args.samples, seed=seed, tolerance_scale=scale)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    const = reports[0]
    record = {
        "command": "family", "m": args.m, "c": args.c, "samples": args.samples, "seed": seed,
        "tolerance_scale": scale, "mean_curvature": const.lhs, "oracle_mean_curvature": const.rhs,
        "constancy_std": const.breakdown["std"], "gradient_bound": reports[1].rhs,
        "passed": all(r.passed for r in reports), "reports": [r.to_record() for r in reports],
    }
    path = _io.write_json(_out_dir(args) / f"family_m{args.m}_c{args.c:g}.json", record)
    lines = [f"{r.name}: {r.verdict}" for r in reports]
    lines += [f"<H,nu> = {const.lhs:.12g}, std = {record['constancy_std']:.3e}", f"report: {path}"]
    failures = [f"{r.name}: residual {r.residual:.3e}" for r in reports if not r.passed]
    return not failures, lines, failures


def cmd_estimates(args):
    cfg = load_scenario(args.scenario)
    if cfg.graph is None:
        raise ConfigError(f"{cfg.source}: estimates needs a [graph] table")
    e = cfg.estimates or {"radii": [1.0], "samples": 1024, "witness_count": 64, "seed": 0}
    scale = _scale(args, cfg)
    seed = e["seed"] if args.seed is None else args.seed
    records, failures, lines = [], [], []
    for r in e["radii"]:
        try:
            b = mean_curvature_bound(cfg.product, cfg.graph.graph, r, samples=e["samples"], seed=seed,
                                     tolerance=1e-6 * scale)
        except (SpacelikeError, GeometryError) as exc:
            failures.append(f"radius {r}: {exc}")
            continue
        rec = b.to_record()
        rec["cheeger_witness"] = cheeger_witness(cfg.product.sigma1, r, count=e["witness_count"])
        records.append(rec)
        lines.append(f"r = {r:g}: inf|<H,nu>| = {b.lhs:.10g} <= {b.rhs:.10g} (slack {b.slack:.3e}) {b.verdict}")
        if not b.passed:
            failures.append(f"mean curvature bound at radius {r}: slack {b.slack:.3e}")
    report = {**_header("estimates", cfg, args, scale), "seed": seed, "passed": not failures,
              "failures": failures, "records": records}
    path = _io.write_json(_out_dir(args, cfg) / f"estimates_{cfg.name}.json", report)
    return not failures, lines + [f"report: {path}"], failures


def registry_listing():
    """Text listing of the registries in a stable order."""
    lines = ["metrics:"]
    lines += [f"  {name}" for name in sorted(METRIC_REGISTRY)]
    lines += ["graphs:"]
    lines += [f"  {name}" for name in sorted(GRAPH_REGISTRY)]
    lines += ["identity checks:"]
    lines += [f"  {name}  [{IDENTITY_TAGS[name]}]" for name in sorted(IDENTITY_TAGS)]
    lines += ["corpus scenarios:"]
    lines += [f"  {name}" for name in sorted(CORPUS)]
    lines += ["packaged scenario files:"]
    lines += [f"  {name}" for name in packaged_scenarios()]
    return "\n".join(lines) + "\n"


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "family": cmd_family, "estimates": cmd_estimates}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(registry_listing())
        return EXIT_PASS
    try:
        ok, lines, failures = COMMANDS[args.command](args)
    except (ConfigError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.quiet:
        print("\n".join(lines))
    if not ok:
        print("failing checks:", file=sys.stderr)
        for f in failures:
            print(f"  {f}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
