"""Command-line entry points: run a campaign, re-render a report, and
sanity-check resource files."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import TextsiegeError
from .harness import (
    RunConfig,
    build_lexicon,
    build_victim,
    emit_report,
    load_dataset,
    report_markdown,
    run_campaign,
)

EXIT_OK = 0
EXIT_CONFIG = 2


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = RunConfig.load(args.config)
        report = run_campaign(cfg)
        json_path, md_path = emit_report(report, cfg.output)
    except (TextsiegeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    agg = report.aggregates
    print(f"wrote {json_path} and {md_path}")
    print(
        f"{report.attack}: accuracy {agg['attack_accuracy_pct']:.2f}% | "
        f"perturbed {agg['perturbed_words_pct']:.2f}% | "
        f"{agg['attack_seconds_per_sample']:.3f} s/sample | "
        f"rouge {agg['rouge_l']:.3f}"
    )
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.format == "md":
        print(report_markdown(data))
    else:
        print(json.dumps(data, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = RunConfig.load(args.config)
        samples = load_dataset(
            cfg.dataset_path, cfg.dataset_format, cfg.labels, cfg.sample_limit
        )
        build_victim(cfg)
        build_lexicon(cfg, samples)
    except (TextsiegeError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: {len(samples)} samples, all referenced resources load cleanly")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="attack", description="Black-box word-level adversarial text attacks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an attack campaign from a config file")
    run_p.add_argument("--config", required=True)
    run_p.set_defaults(func=_cmd_run)

    rep_p = sub.add_parser("report", help="re-render a report.json")
    rep_p.add_argument("--input", required=True)
    rep_p.add_argument("--format", choices=("md", "json"), default="md")
    rep_p.set_defaults(func=_cmd_report)

    val_p = sub.add_parser("validate-resources", help="check config and resource files")
    val_p.add_argument("--config", required=True)
    val_p.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
