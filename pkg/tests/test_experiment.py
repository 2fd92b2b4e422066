"""Pipeline orchestration, determinism, and the CLI surface."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

import swrecon as sw
from swrecon.cli import main as cli_main
from swrecon.errors import ConfigError


def small_config(**overrides):
    base = dict(
        n=256,
        dim=2,
        categories=2,
        degree=20.0,
        jitter=0.2,
        seed=5,
        stages=["generate", "partition", "prune", "amoeba", "evaluate"],
        stage_partition=True,
        m2_override=3,
        diam_floor_override=0.0,
        amoeba_n_override=2,
        seed_mode="brute",
        use_loose_prune=False,
        eval_pairs=200,
    )
    base.update(overrides)
    return sw.ExperimentConfig.from_dict(base)


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        sw.ExperimentConfig.from_dict({"n": 101})  # not a perfect square
    with pytest.raises(ConfigError):
        sw.ExperimentConfig.from_dict({"n": 256, "unknown_key": 1})
    with pytest.raises(ConfigError):
        sw.ExperimentConfig.from_dict({"n": 256, "refine": "bogus"})
    with pytest.raises(ConfigError):
        sw.ExperimentConfig.from_dict({"n": 256, "pipeline": "edp", "stages": ["prune"]})


def test_generate_only_writes_artifacts(tmp_path):
    cfg = small_config(stages=["generate"])
    summary = sw.run_experiment(cfg, tmp_path)
    assert (tmp_path / "edges.txt").exists()
    assert (tmp_path / "positions_cat0.csv").exists()
    assert (tmp_path / "ground_truth.txt").exists()
    assert (tmp_path / "summary.json").exists()
    assert "prune" not in summary


def test_summary_byte_identical_across_runs(tmp_path):
    cfg = small_config()
    sw.run_experiment(cfg, tmp_path / "a")
    sw.run_experiment(cfg, tmp_path / "b")
    a = (tmp_path / "a" / "summary.json").read_bytes()
    b = (tmp_path / "b" / "summary.json").read_bytes()
    assert a == b


def test_summary_identical_across_worker_counts(tmp_path):
    sw.run_experiment(small_config(workers=1), tmp_path / "w1")
    sw.run_experiment(small_config(workers=4), tmp_path / "w4")
    a = json.loads((tmp_path / "w1" / "summary.json").read_text())
    b = json.loads((tmp_path / "w4" / "summary.json").read_text())
    a["config"].pop("workers")
    b["config"].pop("workers")
    assert a == b


def test_stage_error_recorded(tmp_path):
    cfg = small_config()
    cfg.amoeba_n_override = 200  # impossible seed clique
    summary = sw.run_experiment(cfg, tmp_path)
    assert summary["stages"]["amoeba"].startswith("error: SeedNotFoundError")
    assert (tmp_path / "pruned.txt").exists()  # earlier artifacts kept


def test_edp_pipeline_runs(tmp_path):
    cfg = sw.ExperimentConfig.from_dict(
        dict(
            n=256,
            dim=2,
            categories=1,
            degree=3.0,
            local="grid",
            pipeline="edp",
            stages=["generate", "edp"],
            seed=2,
            edp_p=3,
            edp_h=3,
        )
    )
    summary = sw.run_experiment(cfg, tmp_path)
    assert summary["stages"]["edp"] == "ok"
    assert summary["edp"]["grid_retained"] is True
    assert (tmp_path / "edp_pruned.txt").exists()


def test_refine_stage_twoball(tmp_path):
    cfg = small_config(
        stages=["generate", "partition", "prune", "amoeba", "refine"],
        refine="twoball",
        refine_pairs=40,
    )
    summary = sw.run_experiment(cfg, tmp_path)
    assert summary["stages"]["refine"] == "ok"
    assert (tmp_path / "estimates_cat0.csv").exists()


def run_cli(args):
    return cli_main(args)


def test_cli_gen_and_exit_codes(tmp_path):
    out = tmp_path / "gen"
    code = run_cli(
        [
            "gen",
            "--n", "256",
            "--dim", "2",
            "--categories", "2",
            "--degree", "8",
            "--jitter", "0.2",
            "--local", "none",
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert (out / "edges.txt").exists()


def test_cli_invalid_config_exit_2(tmp_path):
    code = run_cli(
        ["gen", "--n", "101", "--out", str(tmp_path)]  # 101 is not square
    )
    assert code == 2


def test_cli_run_with_config_overrides(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(small_config().to_dict()))
    code = run_cli(
        ["run", "--config", str(cfg_path), "--out", str(tmp_path / "run"),
         "--seed", "6"]
    )
    assert code == 0
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["config"]["seed"] == 6


def test_cli_stage_failure_exit_3(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    data = small_config().to_dict()
    data["amoeba_n_override"] = 200
    cfg_path.write_text(json.dumps(data))
    code = run_cli(["run", "--config", str(cfg_path)])
    assert code == 3


def test_cli_acceptance_gate_exit_4(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(small_config().to_dict()))
    code = run_cli(
        ["run", "--config", str(cfg_path), "--require-recall", "1.1"]
    )
    assert code == 4


def test_cli_edp_subcommand(tmp_path):
    code = run_cli(
        [
            "edp",
            "--p", "3",
            "--h", "3",
            "--alpha", "1",
            "--out", str(tmp_path),
            "--n", "256",
            "--degree", "3",
            "--categories", "1",
        ]
    )
    assert code == 0


def test_cli_sweep(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    data = small_config(stages=["generate", "partition", "prune"]).to_dict()
    cfg_path.write_text(json.dumps(data))
    code = run_cli(
        ["sweep", "--config", str(cfg_path), "--grid", "m2_override=3,5"]
    )
    assert code == 0
    records = json.loads(capsys.readouterr().out)
    assert len(records) == 2
    assert records[0]["prune"]["m2"] == 3
    assert records[1]["prune"]["m2"] == 5


def test_module_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "swrecon.cli", "gen", "--n", "101"],
        capture_output=True,
        text=True,
        cwd=str(Path(__file__).resolve().parent.parent),
    )
    assert proc.returncode == 2  # invalid config propagates the exit code
