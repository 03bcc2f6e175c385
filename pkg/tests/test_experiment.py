import json
import os

import numpy as np
import pytest

from graphpoison import ConfigError, ExperimentConfig, run_experiment, sbm_graph
from graphpoison.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main
from graphpoison.experiment import flips_path

from .conftest import write_plain_dataset

FAST = dict(surrogate_epochs=60, victim_epochs=60, seeds=(0, 1))


@pytest.fixture
def dataset_dir(tmp_path):
    g = sbm_graph((25, 25), 0.25, 0.02, seed=2)
    return write_plain_dataset(g, tmp_path / "sbm")


def _cfg(dataset_dir, tmp_path, **kw):
    merged = dict(FAST, dataset=dataset_dir, output=str(tmp_path / "report.json"))
    merged.update(kw)
    return ExperimentConfig(**merged)


def test_run_experiment_writes_schema(dataset_dir, tmp_path):
    cfg = _cfg(dataset_dir, tmp_path, budget_fraction=0.05)
    report = run_experiment(cfg)
    blob = json.loads((tmp_path / "report.json").read_text())
    assert set(blob) == {
        "dataset", "attack", "loss", "budget", "flips",
        "per_seed_accuracy", "mean", "ci95", "wall_clock_seconds", "config",
    }
    assert blob["mean"] == pytest.approx(report.mean)
    assert len(blob["flips"]) <= blob["budget"]
    assert blob["config"]["dataset"] == dataset_dir
    flips_blob = json.loads((tmp_path / "report.flips.json").read_text())
    assert flips_blob == blob["flips"]


def test_budget_zero_equals_clean_eval(dataset_dir, tmp_path):
    r0 = run_experiment(_cfg(dataset_dir, tmp_path, budget_fraction=0.0))
    from graphpoison import VictimHyper, evaluate, load_dataset

    clean = load_dataset(dataset_dir)
    direct = evaluate(clean, clean, VictimHyper(epochs=60), seeds=(0, 1))
    assert r0.per_seed_accuracy == direct.per_seed_accuracy
    assert r0.flip_count == 0


def test_identical_config_reproduces_outputs(dataset_dir, tmp_path):
    cfg = _cfg(dataset_dir, tmp_path, budget_fraction=0.05)
    run_experiment(cfg)
    report1 = (tmp_path / "report.json").read_text()
    flips1 = (tmp_path / "report.flips.json").read_text()
    run_experiment(cfg)
    report2 = (tmp_path / "report.json").read_text()
    flips2 = (tmp_path / "report.flips.json").read_text()

    assert flips1 == flips2
    d1, d2 = json.loads(report1), json.loads(report2)
    d1.pop("wall_clock_seconds"); d2.pop("wall_clock_seconds")
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_budget_is_floor_of_fraction(dataset_dir, tmp_path):
    from graphpoison import load_dataset
    from graphpoison.experiment import attack_budget

    clean = load_dataset(dataset_dir)
    cfg = _cfg(dataset_dir, tmp_path, budget_fraction=0.07)
    assert attack_budget(cfg, clean) == int(np.floor(0.07 * clean.n_edges))


def test_dice_experiment_runs(dataset_dir, tmp_path):
    report = run_experiment(_cfg(dataset_dir, tmp_path, attack="dice", budget_fraction=0.05))
    assert report.flip_count > 0


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(budget_fraction=1.5)
    with pytest.raises(ConfigError):
        ExperimentConfig(split_fraction=0.0)
    with pytest.raises(ConfigError):
        ExperimentConfig(attack="gradient-descent")
    with pytest.raises(ConfigError):
        ExperimentConfig(seeds=())
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"no_such_field": 1})


def test_config_dict_roundtrip():
    cfg = ExperimentConfig(dataset="x", ca_enabled=True, alpha1=4.5, seeds=(3, 1))
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_output_dir_env_override(dataset_dir, tmp_path, monkeypatch):
    override = tmp_path / "elsewhere"
    monkeypatch.setenv("GRAPHPOISON_OUTPUT_DIR", str(override))
    run_experiment(_cfg(dataset_dir, tmp_path, budget_fraction=0.0))
    assert (override / "report.json").exists()


def test_flips_path_naming():
    assert flips_path("out/rep.json") == "out/rep.flips.json"
    assert flips_path("rep") == "rep.flips.json"


def test_apply_flips_reproduces_poisoned_graph(dataset_dir):
    """The recorded flip list is a faithful encoding of the poisoned graph."""
    from graphpoison import AttackConfig, LossSpec, SurrogateHyper, apply_flips, load_dataset, meta_attack

    clean = load_dataset(dataset_dir)
    res = meta_attack(
        clean,
        AttackConfig(budget=8, loss_spec=LossSpec("nll"), surrogate_hyper=SurrogateHyper(epochs=60)),
    )
    replayed = apply_flips(clean, res.flips)
    assert np.array_equal(replayed.adjacency, res.poisoned.adjacency)


# --- CLI ---------------------------------------------------------------


def test_cli_run_roundtrip(dataset_dir, tmp_path, capsys):
    out = tmp_path / "cli_report.json"
    rc = main([
        "run", "--dataset", dataset_dir, "--output", str(out),
        "--budget-fraction", "0.05", "--seeds", "0,1",
        "--surrogate-epochs", "60", "--victim-epochs", "60",
    ])
    assert rc == EXIT_OK
    assert out.exists()
    assert "mean accuracy" in capsys.readouterr().out


def test_cli_config_file_with_flag_override(dataset_dir, tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "dataset": dataset_dir, "budget_fraction": 0.05, "seeds": [0, 1],
        "surrogate_epochs": 60, "victim_epochs": 60,
        "output": str(tmp_path / "a.json"),
    }))
    rc = main(["run", "--config", str(cfg_file), "--output", str(tmp_path / "b.json")])
    assert rc == EXIT_OK
    assert (tmp_path / "b.json").exists()
    assert not (tmp_path / "a.json").exists()


def test_cli_attack_then_evaluate(dataset_dir, tmp_path):
    flips_out = tmp_path / "flips.json"
    rc = main([
        "attack", "--dataset", dataset_dir, "--output", str(flips_out),
        "--budget-fraction", "0.05", "--surrogate-epochs", "60",
    ])
    assert rc == EXIT_OK
    blob = json.loads(flips_out.read_text())
    assert blob["flips"], "attack should record flips"

    report_out = tmp_path / "eval.json"
    rc = main([
        "evaluate", "--dataset", dataset_dir, "--flips-file", str(flips_out),
        "--output", str(report_out), "--seeds", "0,1", "--victim-epochs", "60",
    ])
    assert rc == EXIT_OK
    rep = json.loads(report_out.read_text())
    assert rep["budget"] == len(blob["flips"])


def test_cli_scatter_csv(dataset_dir, tmp_path):
    out = tmp_path / "scatter.csv"
    rc = main([
        "scatter", "--dataset", dataset_dir, "--output", str(out),
        "--surrogate-epochs", "60",
    ])
    assert rc == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "node_id,margin,grad_l2"
    assert len(lines) > 1
    node_id, margin, grad = lines[1].split(",")
    int(node_id); float(margin); float(grad)


def test_cli_exit_codes(tmp_path):
    assert main(["run", "--dataset", str(tmp_path / "nope")]) == EXIT_DATA
    assert main(["run", "--dataset", str(tmp_path), "--budget-fraction", "2.0"]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG  # dataset required


def test_cli_runtime_failure_exit_code(tmp_path, capsys):
    from graphpoison.cli import EXIT_RUNTIME

    # a single-class path graph leaves DICE no feasible flip: cross-class
    # additions are impossible and every deletion isolates an endpoint
    d = tmp_path / "stuck"
    os.makedirs(d)
    (d / "edges.txt").write_text("0 1\n1 2\n")
    (d / "labels.txt").write_text("0\n0\n0\n")
    rc = main([
        "run", "--dataset", str(d), "--attack", "dice", "--budget-fraction", "0.5",
        "--split-fraction", "0.34", "--seeds", "0", "--victim-epochs", "20",
        "--surrogate-epochs", "20", "--output", str(tmp_path / "r.json"),
    ])
    assert rc == EXIT_RUNTIME
    assert "[attack]" in capsys.readouterr().err
