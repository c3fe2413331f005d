"""Batch driver: config parsing, persistence, seed policy, reproducibility."""

import json
from pathlib import Path

import numpy as np
import pytest

from uedabench.cli import main as cli_main
from uedabench.errors import ConfigurationError
from uedabench.harness import (
    SUMMARY_COLUMNS,
    AlgorithmEntry,
    ExperimentSpec,
    load_spec,
    read_summary,
    render_report_text,
    report_from_rows,
    run_ablation,
    run_experiment,
)
from uedabench.optimizers import OptimizerConfig

TINY_CONFIG = {
    "problems": [{"name": "YLLF01", "dim": 2}, {"name": "Ackley", "dim": 2}],
    "algorithms": [
        {"id": "ueda-rf", "algorithm": "UEDA", "surrogate": "RF",
         "pop_size": 8, "o_all_size": 4, "rf_trees": 5},
        {"id": "edals", "algorithm": "EDALS", "pop_size": 6, "o_all_size": 3},
    ],
    "runs": 3,
    "budget": 25,
    "base_seed": 7,
    "baseline_id": "edals",
}


def _write_config(tmp_path, overrides=None, **top):
    cfg = json.loads(json.dumps(TINY_CONFIG))
    if overrides:
        cfg.update(overrides)
    cfg.update(top)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


# ---------------------------------------------------------------- load_spec


def test_load_spec_roundtrip(tmp_path):
    spec = load_spec(_write_config(tmp_path), output_dir=tmp_path / "out")
    assert spec.runs == 3 and spec.budget == 25 and spec.base_seed == 7
    assert [a.id for a in spec.algorithms] == ["ueda-rf", "edals"]
    assert spec.algorithms[0].config.rf_trees == 5
    assert spec.problems == [("YLLF01", 2), ("Ackley", 2)]


@pytest.mark.parametrize("overrides,fragment", [
    ({"runs": "three"}, "must be int"),
    ({"runs": 0}, "runs"),
    ({"baseline_id": "nope"}, "baseline"),
    ({"problems": [{"name": "Missing", "dim": 2}]}, "unknown problem"),
    ({"algorithms": [{"id": "a", "algorithm": "UEDA"},
                     {"id": "a", "algorithm": "EDALS"}]}, "unique"),
    ({"algorithms": [{"id": "a", "bogus_key": 1}]}, "unknown keys"),
])
def test_load_spec_rejects_bad_configs(tmp_path, overrides, fragment):
    path = _write_config(tmp_path, overrides)
    with pytest.raises(ConfigurationError, match=fragment):
        load_spec(path)


def test_load_spec_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_spec(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError, match="valid JSON"):
        load_spec(bad)


# ------------------------------------------------------------- experiments


@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    out = tmp_path_factory.mktemp("exp")
    spec = ExperimentSpec(
        problems=[(n, d) for n, d in TINY_CONFIG_PROBLEMS],
        algorithms=[
            AlgorithmEntry("ueda-rf", OptimizerConfig(
                algorithm="UEDA", surrogate="RF", pop_size=8, o_all_size=4,
                rf_trees=5)),
            AlgorithmEntry("edals", OptimizerConfig(
                algorithm="EDALS", pop_size=6, o_all_size=3)),
        ],
        runs=3,
        budget=25,
        base_seed=7,
        baseline_id="edals",
        output_dir=out,
    )
    report = run_experiment(spec, threads=1)
    return spec, report, out


TINY_CONFIG_PROBLEMS = [("YLLF01", 2), ("Ackley", 2)]


def test_experiment_artifacts(experiment):
    spec, report, out = experiment
    rows = read_summary(out / "summary.csv")
    assert len(rows) == 2 * 2 * 3  # problems x algorithms x runs
    assert set(rows[0]) == set(SUMMARY_COLUMNS)
    assert {int(r["fes_used"]) for r in rows} == {25}
    assert sorted({int(r["seed"]) for r in rows}) == [7, 8, 9]
    assert (out / "report.json").exists() and (out / "report.txt").exists()
    trace = out / "traces" / "ueda-rf__YLLF01__d2__s7.csv"
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("# algo=ueda-rf")
    assert lines[1] == "fe,f,best_so_far"
    assert len(lines) == 25 + 2
    # best_so_far column is the running minimum of f.
    fs = [float(l.split(",")[1]) for l in lines[2:]]
    bests = [float(l.split(",")[2]) for l in lines[2:]]
    assert bests == [min(fs[: i + 1]) for i in range(len(fs))]


def test_report_contents(experiment):
    spec, report, out = experiment
    assert report.baseline == "edals"
    assert set(report.mean_ranks) == {"ueda-rf", "edals"}
    text = render_report_text(report)
    assert "baseline=edals" in text and "mean rank:" in text
    with open(out / "report.json") as fh:
        js = json.load(fh)
    assert js["baseline"] == "edals"
    assert "YLLF01|2" in js["cells"]


def _strip_wall(summary_bytes: bytes) -> bytes:
    # wall_ms is real elapsed time and legitimately varies between replays;
    # every other column must be byte-identical.
    lines = summary_bytes.decode().splitlines()
    return "\n".join(",".join(l.split(",")[:-1]) for l in lines).encode()


def test_summary_byte_identical_across_threads(tmp_path):
    spec_path = _write_config(tmp_path)
    outs = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}"
        spec = load_spec(spec_path, output_dir=out)
        run_experiment(spec, threads=threads)
        outs.append(_strip_wall((out / "summary.csv").read_bytes()))
    assert outs[0] == outs[1]


def test_report_from_rows_rebuilds_from_disk(experiment):
    spec, report, out = experiment
    rebuilt = report_from_rows(read_summary(out / "summary.csv"), "edals")
    assert rebuilt.to_jsonable() == report.to_jsonable()


def test_ablation_writes_curves(tmp_path):
    finals = run_ablation(
        tmp_path / "abl", dims=(2,), runs=3, budget=20, base_seed=0,
        threads=1, problems=("Ellipsoid",),
    )
    key = ("Ellipsoid", 2)
    assert set(finals[key]) == {"UEDA-RF", "UEDA-RF-AL", "UEDA-RF-NS", "EDA-LS"}
    assert all(v.shape == (3,) for v in finals[key].values())
    curve = tmp_path / "abl" / "ablation__Ellipsoid__d2.csv"
    lines = curve.read_text().splitlines()
    assert lines[0].startswith("fe,")
    assert len(lines) == 20 + 1


# -------------------------------------------------------------------- CLI


def test_cli_list_problems(capsys):
    assert cli_main(["list-problems"]) == 0
    out = capsys.readouterr().out
    assert "Ellipsoid" in out and "YLLF13" in out


def test_cli_run_and_stats(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out = tmp_path / "results"
    assert cli_main(["run", "--config", str(cfg), "--out", str(out),
                     "--threads", "1"]) == 0
    capsys.readouterr()
    assert cli_main(["stats", "--dir", str(out)]) == 0
    assert "baseline=edals" in capsys.readouterr().out
    # Explicit baseline override works too.
    assert cli_main(["stats", "--dir", str(out), "--baseline", "ueda-rf"]) == 0


def test_cli_error_exit_codes(tmp_path, capsys):
    assert cli_main(["run", "--config", str(tmp_path / "none.json")]) == 1
    assert cli_main(["stats", "--dir", str(tmp_path)]) == 1
    assert cli_main(["ablation", "--dims", "x,y"]) == 1


def test_cli_demos(tmp_path, capsys):
    out = tmp_path / "demo"
    assert cli_main(["demo-1d", "--seed", "1", "--out", str(out)]) == 0
    assert (out / "demo1d_seed1.csv").exists()
    assert cli_main(["demo-density", "--seed", "1", "--samples", "1500",
                     "--out", str(out)]) == 0
    assert (out / "density_summary.json").exists()
