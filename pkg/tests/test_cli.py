"""CLI 서브커맨드와 종료 코드"""

import importlib.util
import json

import pandas as pd
import pytest

from tests.conftest import ROOT

_spec = importlib.util.spec_from_file_location("run_experiment", ROOT / "scripts" / "run_experiment.py")
cli = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(cli)

FORMAT = "tab:user,object,rating"


@pytest.fixture
def small_config(tmp_path, synthetic_ratings_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps({
        "dataset": {"path": str(synthetic_ratings_path), "format": FORMAT, "like_threshold": 3},
        "runs": 1,
        "list_length": 3,
        "auc_samples": 1000,
        "beta_grid": [0.5, 1.0],
    }), encoding="utf-8")
    return path


def test_ingest_writes_link_files(tmp_path, toy_ratings_path):
    out = tmp_path / "links"
    code = cli.main(["ingest", "--ratings", str(toy_ratings_path), "--format", FORMAT,
                     "--threshold", "3", "--out", str(out)])
    assert code == 0
    assert (out / "links.tsv").read_text(encoding="utf-8").count("\n") == 9
    assert (out / "id_map.json").is_file()


def test_run_writes_results(tmp_path, small_config):
    out = tmp_path / "results"
    code = cli.main(["run", "--config", str(small_config), "--methods", "NBI,CSI,GRM",
                     "--out", str(out), "--dump-lists"])
    assert code == 0
    summary = pd.read_csv(out / "summary.csv")
    assert list(summary["method"]) == ["GRM", "NBI", "CSI"]
    assert (out / "lists" / "run_01_CSI.tsv").is_file()
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["methods"] == ["GRM", "NBI", "CSI"]


def test_flags_override_config_file(tmp_path, small_config):
    out = tmp_path / "results"
    assert cli.main(["run", "--config", str(small_config), "--methods", "CSI",
                     "--runs", "2", "--seed", "7", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["seeds"] == [8, 9]


def test_negative_beta_grid_flag(tmp_path, small_config):
    out = tmp_path / "results"
    assert cli.main(["run", "--config", str(small_config), "--methods", "NBI,IC-NBI",
                     "--beta-grid=-0.5:0.5:0.5", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["beta_grid"] == [-0.5, 0.0, 0.5]
    sweep = pd.read_csv(out / "icnbi_beta" / "run_01.csv")
    assert list(sweep["beta"]) == [-0.5, 0.0, 0.5]


def test_curve_subcommand(tmp_path, small_config):
    out = tmp_path / "curves"
    assert cli.main(["curve", "--config", str(small_config), "--methods", "NBI,IC-NBI,CSI",
                     "--out", str(out)]) == 0
    curves = pd.read_csv(out / "pr_curves.csv")
    assert set(curves["method"]) == {"NBI", "IC-NBI", "CSI"}
    assert not (out / "summary.csv").exists()


def test_invalid_runs_exit_code_one(tmp_path, small_config):
    assert cli.main(["run", "--config", str(small_config), "--runs", "0",
                     "--out", str(tmp_path / "x")]) == 1


def test_missing_threshold_exit_code_one(tmp_path, toy_ratings_path):
    bare = tmp_path / "bare.json"
    bare.write_text("{}", encoding="utf-8")
    code = cli.main(["ingest", "--config", str(bare), "--ratings", str(toy_ratings_path),
                     "--format", FORMAT, "--out", str(tmp_path / "links")])
    assert code == 1


def test_missing_file_exit_code_two(tmp_path, small_config):
    code = cli.main(["run", "--config", str(small_config), "--dataset", str(tmp_path / "nope.tsv"),
                     "--out", str(tmp_path / "x")])
    assert code == 2


def test_malformed_ratings_exit_code_two(tmp_path, small_config):
    bad = tmp_path / "bad.tsv"
    bad.write_text("u1\to1\t4\nu2\to1\n", encoding="utf-8")
    code = cli.main(["ingest", "--ratings", str(bad), "--format", FORMAT,
                     "--threshold", "3", "--out", str(tmp_path / "links")])
    assert code == 2


def test_unknown_subcommand_exits_one():
    with pytest.raises(SystemExit) as err:
        cli.main(["train"])
    assert err.value.code == 1


def test_verify_subcommand_passes():
    assert cli.main(["verify", "--graphs", "5", "--seed", "0"]) == 0
