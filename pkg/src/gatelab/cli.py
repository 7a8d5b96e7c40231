"""Command-line entry point.

Subcommands: ``run <config>``, ``eval <policy> <config>``,
``compare <reports...>``, ``serve <config>``, ``dataset inspect <file>``.

Exit codes: 0 ok, 1 runtime failure, 2 configuration error. The
``GATELAB_OUTPUT_ROOT`` environment variable prefixes every output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

from .config import ConfigError, config_hash, parse_config
from .dagger import EVAL_STREAM, derive_seed, run_regime
from .data import load_dataset, load_manifest, save_dataset
from .evaluate import evaluate, load_eval_grid
from .policy import load_policy, save_policy
from .reports import (
    ProtocolMismatchError,
    compare_reports,
    read_report,
    write_report_csv,
    write_report_jsonl,
)

OUTPUT_ROOT_ENV = "GATELAB_OUTPUT_ROOT"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _output_dir(config) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV, "")
    return Path(root) / config.output.directory if root \
        else Path(config.output.directory)


def _write_run_manifest(out: Path, chash: str, complete: bool,
                        artifacts: list[str]) -> None:
    with open(out / "run.manifest.json", "w", encoding="utf-8") as f:
        json.dump({"config_hash": chash, "complete": complete,
                   "artifacts": sorted(artifacts)}, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_run(args) -> int:
    config = parse_config(args.config)
    spec = config.task_spec()
    out = _output_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(config)
    artifacts: list[str] = []
    try:
        report = run_regime(config.regime, spec)
        eval_seed = derive_seed(config.regime.master_seed, EVAL_STREAM)
        names = list(spec.subtask_names)
        if "csv" in config.output.formats:
            write_report_csv(out / "report.csv", report, chash, eval_seed,
                             config.regime.eval_episodes, names)
            artifacts.append("report.csv")
        if "jsonl" in config.output.formats:
            write_report_jsonl(out / "report.jsonl", report, chash, eval_seed,
                               config.regime.eval_episodes, names)
            artifacts.append("report.jsonl")
        save_dataset(out / "dataset.jsonl", report.dataset, spec,
                     seeds=[config.regime.master_seed],
                     extra_manifest={"config_hash": chash})
        artifacts += ["dataset.jsonl", "dataset.jsonl.manifest.json"]
        save_policy(out / "policy.pol", report.final_policy)
        artifacts.append("policy.pol")
    except Exception as e:  # noqa: BLE001 - partial artifacts must be flagged
        _write_run_manifest(out, chash, complete=False, artifacts=artifacts)
        print(f"error: run failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    _write_run_manifest(out, chash, complete=True,
                        artifacts=artifacts + ["run.manifest.json"])
    final = report.final_eval
    print(f"{config.regime.regime.value} on {spec.task_id}: "
          f"success={final.full_success_rate:.3f} "
          f"human_steps={report.human_steps_total} -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    config = parse_config(args.config)
    spec = config.task_spec()
    try:
        policy = load_policy(args.policy)
        grid = load_eval_grid(args.grid) if args.grid else None
        n = args.episodes or config.regime.eval_episodes
        seed = derive_seed(config.regime.master_seed, EVAL_STREAM)
        result = evaluate(policy, spec, n, seed, grid)
    except Exception as e:  # noqa: BLE001
        print(f"error: eval failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for name, rate in zip(spec.subtask_names, result.subtask_rates):
        print(f"success_{name}={rate:.3f}")
    print(f"mean_episode_length={result.mean_episode_length:.2f}")
    print(f"n_episodes={result.n_episodes}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        reports = [read_report(p) for p in args.reports]
        print(compare_reports(reports))
    except ProtocolMismatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001
        print(f"error: compare failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_serve(args) -> int:
    config = parse_config(args.config)
    from .teleop import serve_forever
    try:
        serve_forever(config, host=args.host, port=args.port,
                      policy_path=args.policy, record=args.record,
                      replay=args.replay)
    except KeyboardInterrupt:
        pass
    except Exception as e:  # noqa: BLE001
        print(f"error: serve failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_dataset_inspect(args) -> int:
    try:
        transitions = load_dataset(args.file)
        manifest = load_manifest(args.file)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for key in sorted(manifest):
        print(f"{key}={manifest[key]}")
    by_source = Counter(t.source for t in transitions)
    episodes = len({t.episode for t in transitions})
    print(f"transitions={len(transitions)}")
    print(f"episodes={episodes}")
    for source in sorted(by_source):
        print(f"source_{source}={by_source[source]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatelab",
        description="Human-gated interactive imitation learning lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="evaluate a saved policy")
    p_eval.add_argument("policy")
    p_eval.add_argument("config")
    p_eval.add_argument("--episodes", type=int, default=None)
    p_eval.add_argument("--grid", default=None,
                        help="fixed evaluation grid file")
    p_eval.set_defaults(func=cmd_eval)

    p_cmp = sub.add_parser("compare", help="compare regime reports")
    p_cmp.add_argument("reports", nargs="+")
    p_cmp.set_defaults(func=cmd_compare)

    p_serve = sub.add_parser("serve", help="start the teleop session service")
    p_serve.add_argument("config")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--policy", default=None, help="policy file to serve")
    p_serve.add_argument("--record", default=None,
                         help="record the event transcript to this file")
    p_serve.add_argument("--replay", default=None,
                         help="replay a recorded transcript instead of listening")
    p_serve.set_defaults(func=cmd_serve)

    p_ds = sub.add_parser("dataset", help="dataset utilities")
    ds_sub = p_ds.add_subparsers(dest="ds_command", required=True)
    p_ins = ds_sub.add_parser("inspect", help="print manifest and counts")
    p_ins.add_argument("file")
    p_ins.set_defaults(func=cmd_dataset_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
