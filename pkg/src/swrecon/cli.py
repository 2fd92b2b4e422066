"""Command-line entry points.

Subcommands map onto the pipeline stages: gen, prune, amoeba, twoball,
rec-twoball, ext-twoball, edp, eval, run (full pipeline), sweep (grid over
tuning constants). Every config field can be overridden on the command line
as ``--key value``. Exit codes: 0 success, 2 invalid config, 3 stage
failure, 4 acceptance check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, SwreconError
from .experiment import ExperimentConfig, run_experiment, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3
EXIT_ACCEPTANCE = 4


def _load_config(args, extra) -> ExperimentConfig:
    data = {}
    if getattr(args, "config", None):
        data.update(json.loads(Path(args.config).read_text()))
    data.update(_parse_overrides(extra))
    return ExperimentConfig.from_dict(data)


def _parse_overrides(extra: list[str]) -> dict:
    if len(extra) % 2 != 0:
        raise ConfigError(f"dangling override token in {extra}")
    out = {}
    for flag, raw in zip(extra[::2], extra[1::2]):
        if not flag.startswith("--"):
            raise ConfigError(f"expected --key, got {flag!r}")
        key = flag[2:].replace("-", "_")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        out[key] = value
    return out


def _finish(summary: dict, json_out: bool) -> int:
    failed = [s for s, status in summary["stages"].items() if status != "ok"]
    if json_out:
        print(json.dumps(summary, sort_keys=True, indent=2))
    else:
        for stage, status in summary["stages"].items():
            print(f"{stage}: {status}")
    return EXIT_STAGE if failed else EXIT_OK


def _cmd_gen(args, extra) -> int:
    overrides = _parse_overrides(extra)
    data = {
        "n": args.n,
        "dim": args.dim,
        "categories": args.categories,
        "degree": args.degree,
        "jitter": args.jitter,
        "local": args.local,
        "seed": args.seed,
        "stages": ["generate"],
    }
    data.update(overrides)
    cfg = ExperimentConfig.from_dict(data)
    summary = run_experiment(cfg, args.out)
    return _finish(summary, args.json)


def _pipeline_command(stages, refine="none"):
    def cmd(args, extra) -> int:
        cfg = _load_config(args, extra)
        cfg.stages = list(stages)
        if refine != "none":
            cfg.refine = refine
            if "refine" not in cfg.stages:
                cfg.stages.append("refine")
        cfg.validate()
        summary = run_experiment(cfg, args.out)
        return _finish(summary, args.json)

    return cmd


def _cmd_edp(args, extra) -> int:
    overrides = _parse_overrides(extra)
    data = {
        "pipeline": "edp",
        "stages": ["generate", "edp"],
        "local": "grid",
        "edp_adaptive": args.adaptive,
        "edp_alpha": args.alpha,
    }
    if args.p is not None:
        data["edp_p"] = args.p
    if args.h is not None:
        data["edp_h"] = args.h
    if args.h_candidates:
        data["h_candidates"] = [int(x) for x in args.h_candidates.split(",")]
    if args.config:
        base = json.loads(Path(args.config).read_text())
        base.update(data)
        data = base
    data.update(overrides)
    cfg = ExperimentConfig.from_dict(data)
    summary = run_experiment(cfg, args.out)
    return _finish(summary, args.json)


def _cmd_run(args, extra) -> int:
    cfg = _load_config(args, extra)
    summary = run_experiment(cfg, args.out)
    code = _finish(summary, args.json)
    if code != EXIT_OK:
        return code
    if args.require_recall is not None:
        recalls = summary.get("amoeba", {}).get("recall", [])
        if not recalls or min(recalls) < args.require_recall:
            print(f"acceptance check failed: min recall {recalls} < {args.require_recall}")
            return EXIT_ACCEPTANCE
    return EXIT_OK


def _cmd_sweep(args, extra) -> int:
    cfg = _load_config(args, [])
    grid = {}
    for spec in args.grid:
        key, _, values = spec.partition("=")
        if not values:
            raise ConfigError(f"grid spec {spec!r} must look like key=v1,v2")
        grid[key.replace("-", "_")] = [json.loads(v) for v in values.split(",")]
    records = run_sweep(cfg, grid, args.out)
    print(json.dumps(records, sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swrecon",
        description="Generate multiplex small-world graphs and reconstruct their latent metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate positions, edges, and ground truth")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--categories", type=int, default=1)
    gen.add_argument("--degree", type=float, default=4.0)
    gen.add_argument("--jitter", type=float, default=0.0)
    gen.add_argument("--local", choices=["grid", "none"], default="none")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--json", action="store_true")
    gen.set_defaults(func=_cmd_gen)

    for name, stages, refine in [
        ("prune", ["generate", "partition", "prune"], "none"),
        ("amoeba", ["generate", "partition", "prune", "amoeba"], "none"),
        (
            "twoball",
            ["generate", "partition", "prune", "amoeba", "refine"],
            "twoball",
        ),
        (
            "rec-twoball",
            ["generate", "partition", "prune", "amoeba", "refine"],
            "rec-twoball",
        ),
        (
            "ext-twoball",
            ["generate", "partition", "prune", "amoeba", "refine"],
            "ext-twoball",
        ),
        (
            "eval",
            ["generate", "partition", "prune", "amoeba", "evaluate"],
            "none",
        ),
    ]:
        p = sub.add_parser(name, help=f"run the pipeline through {name}")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=_pipeline_command(stages, refine))

    edp = sub.add_parser("edp", help="constant-degree pruning pipeline")
    edp.add_argument("--p", type=int)
    edp.add_argument("--h", type=int)
    edp.add_argument("--adaptive", action="store_true")
    edp.add_argument("--h-candidates", dest="h_candidates")
    edp.add_argument("--alpha", type=float, default=1.0)
    edp.add_argument("--config")
    edp.add_argument("--out")
    edp.add_argument("--json", action="store_true")
    edp.set_defaults(func=_cmd_edp)

    run = sub.add_parser("run", help="run the full configured pipeline")
    run.add_argument("--config")
    run.add_argument("--out")
    run.add_argument("--json", action="store_true")
    run.add_argument(
        "--require-recall",
        type=float,
        default=None,
        help="fail with exit code 4 when min category recall is below this",
    )
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="grid sweep over tuning constants")
    sweep.add_argument("--config")
    sweep.add_argument("--grid", action="append", required=True, help="key=v1,v2,...")
    sweep.add_argument("--out")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        return args.func(args, extra)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SwreconError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
