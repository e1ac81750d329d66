"""Command line: run experiments, verify stored runs, export artifacts.

    commlab run --config exp.toml [--seeds 0..100] [--out DIR] [--workers K]
    commlab verify --in DIR
    commlab export --in DIR --format dot|csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .export import export_csv, export_dot
from .runner import run_experiment, verify_experiment


def _parse_seeds(text: str | None):
    if text is None:
        return None
    lo, _, hi = text.partition("..")
    return (int(lo), int(hi))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="commlab")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run an experiment sweep")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seeds", help="override seed range, e.g. 0..100")
    p_run.add_argument("--out", help="override output root")
    p_run.add_argument("--workers", type=int)

    p_verify = sub.add_parser("verify", help="re-check invariants from stored traces")
    p_verify.add_argument("--in", dest="in_dir", required=True)

    p_export = sub.add_parser("export", help="export stored runs")
    p_export.add_argument("--in", dest="in_dir", required=True)
    p_export.add_argument("--format", choices=("dot", "csv"), required=True)

    args = parser.parse_args(argv)
    if args.verb == "run":
        try:
            cfg = load_config(args.config, seeds=_parse_seeds(args.seeds),
                              out=args.out, workers=args.workers)
        except (ConfigError, FileNotFoundError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        report, code = run_experiment(cfg)
        agg = report.aggregates
        print(f"{cfg.experiment}: {agg['seeds']} seeds, "
              f"{agg['violations']} violations -> {cfg.out_dir()}")
        return code
    if args.verb == "verify":
        summary, code = verify_experiment(Path(args.in_dir))
        print(f"checked {summary['checked']} traces, "
              f"{len(summary['problems'])} problems")
        for problem in summary["problems"]:
            print(f"  {problem}")
        return code
    if args.verb == "export":
        if args.format == "csv":
            csv_text = export_csv(Path(args.in_dir))
            target = Path(args.in_dir) / "metrics.csv"
            target.write_text(csv_text)
            print(f"wrote {target}")
        else:
            paths = export_dot(Path(args.in_dir))
            print(f"wrote {len(paths)} dot files")
        return 0
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
