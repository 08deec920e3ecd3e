import csv
import json

import pytest

from nullwave import Grid, InitialDatum, SystemSpec, budget_sequence, picard_solve, triangle
from nullwave.cli import main
from nullwave.cli.config import load_config, parse_config, shipped_configs
from nullwave.cli.output import emit_convergence_table, jsonable
from nullwave.exceptions import ConfigError

from conftest import TARTAR_TRIPLETS

HAT = [[0.0, 0.0], [0.5, 0.25], [1.0, 0.0]]


def tartar_cfg(**extra):
    cfg = {"system": {"p": 2, "speeds": [1.0, -1.0], "coupling": [list(t) for t in TARTAR_TRIPLETS]},
           "data": [HAT, HAT], "grid": {"dx": 0.01, "dt": 0.01}}
    cfg.update(extra)
    return cfg


def write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_shipped_configs_present():
    assert shipped_configs() == ["glue-two-bumps", "resonant-2x2-blowup", "riccati-scalar",
                                 "tartar-2x2", "tartar-2x2-large-data", "wave-bridge-john"]
    for name in shipped_configs():
        assert load_config(name).spec is not None


def test_picard_success(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["picard", "--config", write(tmp_path, tartar_cfg()), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "ok"
    assert report["result"]["report"]["verdict"] == "converged"
    assert report["config"]["system"]["p"] == 2
    assert report["config"]["tolerances"]["max_iter"] == 60
    assert (out / "tables" / "convergence.csv").exists()
    assert (out / "fields" / "u1.csv").exists()
    assert "PASS budget_domination" in capsys.readouterr().out


def test_validate_resonant_scalar(tmp_path):
    cfg = {"system": {"p": 1, "speeds": [1.0], "coupling": [[1, 1, 1, -1.0]]}}
    out = tmp_path / "out"
    assert main(["validate", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["result"]["resonant_triples"] == [[1, 1, 1]]
    assert report["result"]["null_condition_holds"] is False


@pytest.mark.parametrize("cfg, needle", [
    ('{"system": ', "line 1"),
    ({"system": {"p": 2, "speeds": [1.0], "coupling": []}}, "system.speeds"),
    ({"system": {"p": 2, "speeds": [1, -1], "coupling": [[1, 1, 2, -0.5]]}}, "system.coupling"),
    (tartar_cfg(grid={"dx": 0}), "grid.dx"),
    (tartar_cfg(grid={"dx": 0.01, "dz": 1}), "unknown keys"),
    (tartar_cfg(data=[HAT]), "data"),
    (tartar_cfg(data=[HAT, [[0, 1], [1, 0]]]), "data[1]"),
    (tartar_cfg(bogus=1), "top level"),
    (tartar_cfg(expect={"verdict": "great"}), "expect.verdict"),
])
def test_config_errors_exit_1(tmp_path, capsys, cfg, needle):
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    assert needle in capsys.readouterr().err


def test_missing_config_exit_1(tmp_path):
    assert main(["picard", "--config", str(tmp_path / "nope.json")]) == 1


def test_violated_inequality_exit_2(tmp_path):
    cfg = tartar_cfg(tolerances={"ratio_slack": 1e-9, "budget_slack": 1e-9},
                     expect={"verdict": "max_iter"})
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["status"] == "violated"
    failed = [c["name"] for c in report["checks"] if not c["holds"]]
    assert failed == ["expect.verdict"]


def test_unexpected_divergence_exit_2(tmp_path):
    cfg = {"system": {"p": 1, "speeds": [1.0], "coupling": [[1, 1, 1, -1.0]]},
           "data": [[[0, 0], [0.5, 2.0], [1, 0]]], "grid": {"dx": 0.01, "dt": 0.01, "horizon": 1.0}}
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2
    table = (tmp_path / "o" / "tables" / "convergence.csv").read_text().splitlines()
    assert table[-1].startswith("verdict,diverged,")
    cfg["expect"] = {"verdict": "diverged"}
    assert main(["picard", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o2")]) == 0


def test_admissible_blowup_is_a_violation(tmp_path):
    cfg = tartar_cfg(grid={"dx": 0.01, "dt": 0.01, "horizon": 1.0},
                     blowup={"threshold": 0.1})
    assert main(["blowup", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2


def test_overrides(tmp_path):
    cfg = load_config(write(tmp_path, tartar_cfg()), "picard", {"dx": 0.02, "seed": 9, "dt": None})
    assert cfg.raw["grid"]["dx"] == 0.02 and cfg.raw["grid"]["dt"] == 0.01
    assert cfg.raw["seed"] == 9
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, tartar_cfg()), "picard", {"dx": -1.0})


def test_estimates_needs_no_system():
    cfg = parse_config({"experiment": "estimates"})
    assert cfg.spec is None
    with pytest.raises(ConfigError):
        parse_config({"experiment": "picard"})


def test_convergence_table_linear_run():
    spec = SystemSpec([1.0, -1.0], __import__("numpy").zeros((2, 2, 2)))
    D = triangle((0, 1), (1, -1))
    _, rep = picard_solve(spec, [InitialDatum.hat(0, 1, 1.0)] * 2, D, Grid.for_triangle(D, 0.01, 0.01))
    assert emit_convergence_table(rep).splitlines() == [
        "m,r_measured,r_budget,diff_triple,ratio", "1,0,0,0,0"]


def test_convergence_table_budget_column_exact():
    spec = SystemSpec.from_triplets(2, [1, -1], TARTAR_TRIPLETS)
    D = triangle((0, 1), (1, -1))
    _, rep = picard_solve(spec, [InitialDatum(HAT)] * 2, D, Grid.for_triangle(D, 0.01, 0.01))
    rows = list(csv.DictReader(emit_convergence_table(rep).splitlines()))
    budget = budget_sequence(0.5, 0.25, len(rows))
    assert [float(r["r_budget"]) for r in rows] == budget[1:]
    assert [float(r["r_measured"]) for r in rows] == [rec.r_measured for rec in rep.iterations]


def test_jsonable_maps_nonfinite_to_null():
    assert jsonable({"a": float("nan"), "b": [float("inf"), 1.5], "c": (1, 2)}) == \
        {"a": None, "b": [None, 1.5], "c": [1, 2]}


def test_repeated_runs_identical(tmp_path):
    path = write(tmp_path, tartar_cfg())
    for name in ("a", "b"):
        assert main(["picard", "--config", path, "--out", str(tmp_path / name)]) == 0
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.*"))
    assert files
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
