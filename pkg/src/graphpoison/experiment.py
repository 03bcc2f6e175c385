"""Experiment orchestration: config schema, end-to-end runs, report files."""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .attack import AttackConfig, AttackConstraints, AttackResult, dice_attack, meta_attack
from .data import load_dataset
from .evaluation import EvalReport, evaluate
from .graph import Graph, flip_edge
from .losses import CAWeightParams, LossSpec
from .models import SurrogateHyper, VictimHyper

OUTPUT_DIR_ENV = "GRAPHPOISON_OUTPUT_DIR"

META = "meta"
DICE = "dice"


class ConfigError(ValueError):
    """An experiment configuration is invalid."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one end-to-end run needs; JSON-serializable, flat."""

    dataset: str = ""
    format: str = "plain"
    split_fraction: float = 0.10
    split_seed: int = 0
    attack: str = META
    base: str = "nll"
    ca_enabled: bool = False
    alpha1: float = 1.0
    beta1: float = 1.0
    alpha2: float = 1.0
    beta2: float = 1.0
    cw_kappa: float = 0.0
    budget_fraction: float = 0.05
    retrain_every: int = 1
    forbid_singletons: bool = True
    degree_test: bool = False
    degree_test_threshold: float = 0.004
    refresh_pseudo_labels: bool = False
    dice_add_prob: float = 0.5
    surrogate_lr: float = 0.1
    surrogate_epochs: int = 200
    surrogate_weight_decay: float = 5e-4
    surrogate_seed: int = 0
    attack_seed: int = 0
    hidden: int = 16
    victim_lr: float = 0.01
    victim_epochs: int = 200
    victim_weight_decay: float = 5e-4
    dropout: float = 0.5
    seeds: tuple = tuple(range(10))
    output: str = "report.json"

    def __post_init__(self) -> None:
        if not 0.0 <= self.budget_fraction <= 1.0:
            raise ConfigError("budget_fraction must be in [0, 1]")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must be in (0, 1)")
        if self.attack not in (META, DICE):
            raise ConfigError(f"attack must be '{META}' or '{DICE}'")
        if self.base not in ("nll", "cw"):
            raise ConfigError("base must be 'nll' or 'cw'")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(str(e))

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["seeds"] = list(self.seeds)
        return out

    def loss_spec(self) -> LossSpec:
        params = (
            CAWeightParams(self.alpha1, self.beta1, self.alpha2, self.beta2)
            if self.ca_enabled
            else None
        )
        return LossSpec(self.base, self.ca_enabled, params, self.cw_kappa)

    def attack_config(self, budget: int) -> AttackConfig:
        return AttackConfig(
            budget=budget,
            loss_spec=self.loss_spec(),
            retrain_every=self.retrain_every,
            surrogate_hyper=SurrogateHyper(
                self.surrogate_lr,
                self.surrogate_epochs,
                self.surrogate_weight_decay,
                self.surrogate_seed,
            ),
            constraints=AttackConstraints(
                self.forbid_singletons, self.degree_test, self.degree_test_threshold
            ),
            seed=self.attack_seed,
            refresh_pseudo_labels=self.refresh_pseudo_labels,
            dice_add_prob=self.dice_add_prob,
        )

    def victim_hyper(self) -> VictimHyper:
        return VictimHyper(
            self.hidden,
            self.victim_lr,
            self.victim_epochs,
            self.victim_weight_decay,
            self.dropout,
        )

    def loss_dict(self) -> dict:
        return {
            "base": self.base,
            "ca_enabled": self.ca_enabled,
            "alpha1": self.alpha1,
            "beta1": self.beta1,
            "alpha2": self.alpha2,
            "beta2": self.beta2,
            "cw_kappa": self.cw_kappa,
        }


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as e:
        if not getattr(e, "_staged", False):
            e.args = (f"[{name}] {e}",)
            e._staged = True  # type: ignore[attr-defined]
        raise


def resolve_output(path: str) -> str:
    """Apply the output-directory environment override, if set."""
    override = os.environ.get(OUTPUT_DIR_ENV)
    if override:
        return os.path.join(override, os.path.basename(path))
    return path


def flips_path(report_path: str) -> str:
    root, ext = os.path.splitext(report_path)
    return f"{root}.flips{ext or '.json'}"


def attack_budget(cfg: ExperimentConfig, g: Graph) -> int:
    """floor(budget_fraction * |E|) on the LCC-reduced graph."""
    return int(np.floor(cfg.budget_fraction * g.n_edges))


def run_attack(cfg: ExperimentConfig, g: Graph) -> AttackResult:
    budget = attack_budget(cfg, g)
    attack_cfg = cfg.attack_config(budget)
    runner = meta_attack if cfg.attack == META else dice_attack
    return runner(g, attack_cfg)


def apply_flips(g: Graph, flips) -> Graph:
    """Replay a recorded flip list onto a graph."""
    out = g
    for i, j, _op in flips:
        out = flip_edge(out, int(i), int(j))
    return out


def report_json(report: EvalReport, cfg: ExperimentConfig, flips, budget: int) -> str:
    payload = {
        "dataset": os.path.basename(os.path.normpath(cfg.dataset)) or cfg.dataset,
        "attack": cfg.attack,
        "loss": cfg.loss_dict(),
        "budget": budget,
        "flips": [{"i": i, "j": j, "op": op} for i, j, op in flips],
        "per_seed_accuracy": report.per_seed_accuracy,
        "mean": report.mean,
        "ci95": report.ci95_halfwidth,
        "wall_clock_seconds": report.wall_clock_seconds,
        "config": cfg.to_dict(),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def run_experiment(cfg: ExperimentConfig) -> EvalReport:
    """Load -> LCC -> split -> attack -> evaluate -> write report and flips.

    Failures carry a stage tag in their message; the CLI maps exception
    types to exit codes.
    """
    start = time.perf_counter()
    clean = _stage(
        "load",
        load_dataset,
        cfg.dataset,
        cfg.format,
        split_fraction=cfg.split_fraction,
        split_seed=cfg.split_seed,
    )
    result = _stage("attack", run_attack, cfg, clean)
    budget = attack_budget(cfg, clean)
    report = _stage(
        "evaluate",
        evaluate,
        clean,
        result.poisoned,
        cfg.victim_hyper(),
        cfg.seeds,
        dataset=cfg.dataset,
        attack=cfg.attack,
        budget_fraction=cfg.budget_fraction,
        config=cfg.to_dict(),
    )
    report = dataclasses.replace(report, wall_clock_seconds=time.perf_counter() - start)

    out_path = resolve_output(cfg.output)
    def _write() -> None:
        os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
        with open(out_path, "w") as fh:
            fh.write(report_json(report, cfg, result.flips, budget))
        with open(flips_path(out_path), "w") as fh:
            fh.write(json.dumps([{"i": i, "j": j, "op": op} for i, j, op in result.flips], indent=2))
    _stage("write", _write)
    return report
