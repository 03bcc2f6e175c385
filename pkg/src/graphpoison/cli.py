"""Command-line interface.

Subcommands: ``run`` (end-to-end), ``attack``, ``evaluate``, ``scatter``.
Every ExperimentConfig field is available as a kebab-case flag; a JSON
config file may supply any subset, with flags taking precedence.

Exit codes: 0 ok, 2 config error, 3 data error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .data import DatasetError, load_dataset
from .evaluation import margin_gradient_scatter
from .experiment import (
    ConfigError,
    ExperimentConfig,
    apply_flips,
    attack_budget,
    report_json,
    resolve_output,
    run_attack,
    run_experiment,
)
from .models import SurrogateHyper

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

_BOOL_FIELDS = {
    "ca_enabled",
    "forbid_singletons",
    "degree_test",
    "refresh_pseudo_labels",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON config file; flags override its fields")
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _BOOL_FIELDS:
            p.add_argument(flag, action=argparse.BooleanOptionalAction, default=None)
        elif f.name == "seeds":
            p.add_argument(flag, default=None, help="comma-separated victim seeds, e.g. 0,1,2")
        elif f.type in ("int", int):
            p.add_argument(flag, type=int, default=None)
        elif f.type in ("float", float):
            p.add_argument(flag, type=float, default=None)
        else:
            p.add_argument(flag, default=None)


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}")
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for f in dataclasses.fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            data[f.name] = val
    if isinstance(data.get("seeds"), str):
        try:
            data["seeds"] = [int(s) for s in data["seeds"].split(",") if s.strip()]
        except ValueError:
            raise ConfigError(f"bad --seeds value {data['seeds']!r}")
    if not data.get("dataset"):
        raise ConfigError("a dataset directory is required (--dataset or config file)")
    return ExperimentConfig.from_dict(data)


def _load(cfg: ExperimentConfig):
    return load_dataset(
        cfg.dataset, cfg.format, split_fraction=cfg.split_fraction, split_seed=cfg.split_seed
    )


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    report = run_experiment(cfg)
    print(
        f"{cfg.attack} on {cfg.dataset}: mean accuracy {report.mean:.4f} "
        f"+- {report.ci95_halfwidth:.4f} over {len(report.per_seed_accuracy)} seeds "
        f"({report.flip_count} flips) -> {resolve_output(cfg.output)}"
    )
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    clean = _load(cfg)
    result = run_attack(cfg, clean)
    payload = {
        "dataset": cfg.dataset,
        "attack": cfg.attack,
        "loss": cfg.loss_dict(),
        "budget": attack_budget(cfg, clean),
        "flips": [{"i": i, "j": j, "op": op} for i, j, op in result.flips],
        "exhausted": result.exhausted,
        "config": cfg.to_dict(),
    }
    out = resolve_output(cfg.output)
    _write(out, json.dumps(payload, indent=2, sort_keys=True))
    if args.poisoned_edges:
        lines = [
            f"{i} {j}"
            for i, j in zip(*[idx.tolist() for idx in result.poisoned.adjacency.nonzero()])
            if i < j
        ]
        _write(args.poisoned_edges, "\n".join(lines) + "\n")
    print(f"{len(result.flips)} flips written to {out}" + (" (budget exhausted early)" if result.exhausted else ""))
    return EXIT_OK


def _read_flips(path: str) -> list[tuple[int, int, str]]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise DatasetError(f"cannot read flips file {path}: {e}")
    records = data["flips"] if isinstance(data, dict) else data
    return [(int(r["i"]), int(r["j"]), str(r.get("op", ""))) for r in records]


def cmd_evaluate(args: argparse.Namespace) -> int:
    from .evaluation import evaluate

    cfg = _build_config(args)
    clean = _load(cfg)
    flips = _read_flips(args.flips_file) if args.flips_file else []
    poisoned = apply_flips(clean, flips)
    report = evaluate(
        clean,
        poisoned,
        cfg.victim_hyper(),
        cfg.seeds,
        dataset=cfg.dataset,
        attack=cfg.attack if flips else "none",
        budget_fraction=cfg.budget_fraction,
        config=cfg.to_dict(),
    )

    out = resolve_output(cfg.output)
    _write(out, report_json(report, cfg, flips, budget=len(flips)))
    print(f"mean accuracy {report.mean:.4f} +- {report.ci95_halfwidth:.4f} -> {out}")
    return EXIT_OK


def cmd_scatter(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    g = _load(cfg)
    rows = margin_gradient_scatter(
        g,
        cfg.loss_spec(),
        SurrogateHyper(
            cfg.surrogate_lr, cfg.surrogate_epochs, cfg.surrogate_weight_decay, cfg.surrogate_seed
        ),
    )
    out = resolve_output(cfg.output)
    lines = ["node_id,margin,grad_l2"]
    lines += [f"{v},{margin:.10g},{norm:.10g}" for v, margin, norm in rows]
    _write(out, "\n".join(lines) + "\n")
    print(f"{len(rows)} nodes -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphpoison",
        description="Graph structure poisoning attacks on GNN node classifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="attack + evaluate, end to end")
    _add_config_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_attack = sub.add_parser("attack", help="run an attack and write the flip list")
    _add_config_flags(p_attack)
    p_attack.add_argument("--poisoned-edges", metavar="FILE", help="also write poisoned edge list")
    p_attack.set_defaults(fn=cmd_attack)

    p_eval = sub.add_parser("evaluate", help="train victims on a (poisoned) graph")
    _add_config_flags(p_eval)
    p_eval.add_argument("--flips-file", metavar="FILE", help="flip list to replay (omit for clean)")
    p_eval.set_defaults(fn=cmd_evaluate)

    p_scatter = sub.add_parser("scatter", help="emit margin/gradient-norm CSV")
    _add_config_flags(p_scatter)
    p_scatter.set_defaults(fn=cmd_scatter)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
