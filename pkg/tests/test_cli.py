import csv
import json
import subprocess
import sys

import pytest

from spacelike.cli import main, registry_listing
from spacelike.config import ConfigError, load_scenario, packaged_scenarios, parse_scenario


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_list_contents_and_order(capsys):
    code, out, _ = _run(["list"], capsys)
    assert code == 0
    for name in ("poincare_ball", "laplacian_identity_3_9", "cmc_family", "hyperboloid_flat.toml"):
        assert name in out
    assert out == registry_listing()
    assert out.index("metrics:") < out.index("graphs:") < out.index("identity checks:")


def test_list_via_module():
    proc = subprocess.run([sys.executable, "-m", "spacelike", "list"], capture_output=True, text=True, check=True)
    assert "laplacian_identity_3_9  [3.9]" in proc.stdout


def test_verify_packaged_scenario(tmp_path, capsys):
    code, out, _ = _run(["verify", "--scenario", "hyperboloid_flat.toml", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "verify_hyperboloid_flat.json").read_text())
    assert report["passed"] and len(report["suites"]) == 5
    assert all(s["passed"] for s in report["suites"].values())
    assert {r["tag"] for r in report["reports"]} == {"4.1", "3.9", "4.6", "4.7", "5.1"}
    assert len(report["reports"]) == 5 * 4


def test_verify_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    _run(["verify", "--scenario", "hyperboloid_flat.toml", "--out", str(a), "--seed", "3"], capsys)
    _run(["verify", "--scenario", "hyperboloid_flat.toml", "--out", str(b), "--seed", "3"], capsys)
    assert (a / "verify_hyperboloid_flat.json").read_bytes() == (b / "verify_hyperboloid_flat.json").read_bytes()


def test_verify_failure_exit_code(tmp_path, capsys):
    code, _, err = _run(
        ["verify", "--scenario", "hyperboloid_flat.toml", "--out", str(tmp_path), "--tolerance-scale", "1e-20"], capsys
    )
    assert code == 1 and "failing checks" in err


def test_solve_torus(tmp_path, capsys):
    code, _, _ = _run(["solve", "--scenario", "torus_maximal.toml", "--seed", "0", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "solve_torus_maximal_seed0.json").read_text())
    assert report["final_sup_gradient"] < 1e-6 and report["converged"]
    rows = list(csv.reader((tmp_path / "solve_torus_maximal_seed0.csv").open()))
    assert rows[0] == ["x", "y", "value", "df_dx", "df_dy"] and len(rows) == 64 * 64 + 1


def test_solve_radial(tmp_path, capsys):
    code, _, _ = _run(["solve", "--scenario", "radial_cmc.toml", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "solve_radial_cmc_seed0.json").read_text())
    assert report["max_error_vs_family"] < 1e-4


def test_solve_interval_from_file(tmp_path, capsys):
    cfg = tmp_path / "line.toml"
    cfg.write_text('name = "line"\n[solver]\ndomain = "interval"\ngrid = 16\nleft = 0.0\nright = 0.25\n')
    code, _, _ = _run(["solve", "--scenario", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "solve_line_seed0.csv").exists()


def test_solve_convergence_failure(tmp_path, capsys):
    cfg = tmp_path / "tight.toml"
    cfg.write_text('name = "tight"\n[solver]\ndomain = "torus"\ngrid = 16\nmax_iterations = 0\n')
    code, _, err = _run(["solve", "--scenario", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 1 and "no convergence" in err
    assert json.loads((tmp_path / "solve_tight_seed0.json").read_text())["passed"] is False


def test_family(tmp_path, capsys):
    code, out, _ = _run(["family", "--m", "2", "--c", "1", "--samples", "50", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "family_m2_c1.json").read_text())
    assert report["constancy_std"] < 1e-6 and report["gradient_bound"] == 0.5


def test_family_out_of_range(tmp_path, capsys):
    code, _, err = _run(["family", "--m", "7", "--out", str(tmp_path)], capsys)
    assert code == 2 and "configuration error" in err


def test_estimates(tmp_path, capsys):
    code, _, _ = _run(["estimates", "--scenario", "hyperboloid_flat.toml", "--out", str(tmp_path)], capsys)
    assert code == 0
    report = json.loads((tmp_path / "estimates_hyperboloid_flat.json").read_text())
    assert [r["radius"] for r in report["records"]] == [0.5, 1.0, 2.0]
    assert all(abs(r["slack"]) < 1e-6 for r in report["records"])
    assert [r["cheeger_witness"] for r in report["records"]] == pytest.approx([4.0, 2.0, 1.0], rel=1e-8)


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["verify"], ["family", "--seed", "-1"], ["verify", "--scenario", "x", "--tolerance-scale", "0"]],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize(
    "text,message",
    [
        ('name = "x"\n[graph]\nname = "hyperboloid"\nbogus = 1\n', "unknown keys"),
        ('name = "x"\n[graph]\nname = "torus"\n', "unknown graph"),
        ('[graph]\nname = "hyperboloid"\n', "name"),
        ('name = "x"\n[graph]\nname = "hyperboloid"\n[checks]\npoints = [[0.1, 0.2, 0.3]]\n', "length 2"),
        ('name = "x"\n[graph]\nname = "hyperboloid"\n[checks]\nidentities = ["nope"]\npoints = [[0.1, 0.2]]\n', "identities"),
        ('name = "x"\n[graph]\nname = "hyperboloid"\n[sigma1]\nname = "euclidean"\nparams = { dim = 3 }\n', "dimension mismatch"),
        ('name = "x"\n[graph]\nname = "affine"\nparams = { A = [[2.0, 0.0], [0.0, 0.1]] }\n', "bad parameters"),
        ('name = "x"\n[solver]\ndomain = "sphere"\n', "domain"),
        ('name = "x"\n[graph]\nname = "hyperboloid"\n[checks]\nidentities = "all"\n', "points"),
        ("name = \n", "Invalid"),
    ],
)
def test_schema_violations(tmp_path, capsys, text, message):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(text)
    with pytest.raises(ConfigError, match=message):
        load_scenario(cfg)
    code, _, err = _run(["verify", "--scenario", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 2 and "configuration error" in err


def test_missing_scenario(capsys):
    code, _, err = _run(["verify", "--scenario", "no_such_file.toml"], capsys)
    assert code == 2 and "not found" in err


def test_corpus_reference_and_sampling():
    cfg = parse_scenario({"name": "c", "graph": {"scenario": "sphere_height"}})
    assert len(cfg.points()) == 3 and cfg.checks["identities"]
    cfg = parse_scenario({
        "name": "s",
        "graph": {"name": "polynomial", "params": {"m": 3, "n": 1, "seed": 2}},
        "checks": {"sample": {"count": 4, "radius": 0.5}},
    })
    pts = cfg.points()
    assert len(pts) == 4 and all(len(p) == 3 and sum(p**2) <= 0.25 for p in pts)
    assert all((a == b).all() for a, b in zip(pts, cfg.points()))


def test_metric_override():
    cfg = parse_scenario({
        "name": "o",
        "graph": {"name": "hyperboloid", "params": {"m": 2}},
        "sigma1": {"name": "poincare_ball", "params": {"dim": 2}},
    })
    assert cfg.product.sigma1.name == "poincare_ball"


def test_packaged_files():
    assert packaged_scenarios() == ["hyperboloid_flat.toml", "radial_cmc.toml", "torus_maximal.toml"]
