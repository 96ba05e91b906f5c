"""Command line entry points: dataset building, baselines, evaluation, reports."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Tuple

from ._version import __version__
from .builder import build_dataset, summarize, write_dataset
from .config import RunConfig, load_config
from .corpus import read_outputs, read_parallel, write_jsonl
from .errors import (
    ConfigError,
    ScorerError,
    UsageError,
    ValidationError,
    WriteError,
)
from .report import (
    build_report,
    evaluate_dataset,
    load_report,
    render_table,
    write_csv,
    write_report,
)
from .semsim import get_scorer
from .verbalizer import load_bank, validate_bank

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3

WORKERS_ENV = "EDITKIT_WORKERS"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; route through the shared exit-code
    # scheme instead (usage problems are validation errors here).
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _worker_count(flag_value) -> int:
    raw = flag_value if flag_value is not None else os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"worker count must be an integer, got {raw!r}") from None
    if workers < 1:
        raise UsageError(f"worker count must be >= 1, got {workers}")
    return workers


def cmd_build_dataset(args) -> int:
    cfg = load_config(args.config)
    build = cfg.build
    if build is None:
        raise ConfigError(f"{args.config} has no build section")
    overrides = {
        key: value
        for key, value in (
            ("seed", args.seed),
            ("setting", args.setting),
            ("style", args.style),
            ("template", args.template),
            ("per_combo_cap", args.cap),
            ("noedit_fraction", args.noedit_fraction),
        )
        if value is not None
    }
    if overrides:
        build = dataclasses.replace(build, **overrides)
    corpora = {
        (entry.task, entry.lang): read_parallel(entry.path, entry.format)
        for entry in cfg.corpora
        if entry.split == args.split
    }
    dataset = build_dataset(corpora, build)
    out_dir = Path(args.out) if args.out else Path(cfg.out_dir) / "dataset"
    records_path, manifest_path = write_dataset(dataset, out_dir)
    for combo, stats in dataset.manifest["combos"].items():
        print(f"{combo}: {stats['count']} records, {stats['noedit']} no-edit")
    print(f"total: {dataset.manifest['total_records']} records")
    print(f"wrote {records_path} and {manifest_path}")
    return EXIT_OK


def cmd_baseline_copy(args) -> int:
    count = write_jsonl(
        (
            {"id": ex.id, "hypothesis": ex.source}
            for ex in read_parallel(args.corpus, args.format)
        ),
        args.out,
    )
    print(f"wrote {count} copy outputs to {args.out}")
    return EXIT_OK


def _parse_system_specs(specs: List[str]) -> Dict[str, str]:
    systems: Dict[str, str] = {}
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"expected NAME=PATH, got {spec!r}")
        if name in systems:
            raise UsageError(f"system {name!r} given twice")
        systems[name] = path
    return systems


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    if not cfg.corpora:
        raise ConfigError(f"{args.config} lists no corpora")
    systems = _parse_system_specs(args.outputs)
    workers = _worker_count(args.workers)

    corpus_ids: Dict[str, set] = {}
    for entry in cfg.corpora:
        corpus_ids[entry.dataset_id] = {
            ex.id for ex in read_parallel(entry.path, entry.format)
        }
    all_ids = set().union(*corpus_ids.values())

    outputs_by_system = {}
    for name, path in systems.items():
        outputs = read_outputs(path)
        unknown = sorted({o.id for o in outputs} - all_ids)
        if unknown:
            raise ValidationError(
                f"system {name!r}: outputs carry ids absent from every "
                f"corpus, e.g. {unknown[:5]}"
            )
        outputs_by_system[name] = outputs

    scorer = get_scorer(cfg.scorer)
    jobs = []
    for name in sorted(systems):
        for entry in cfg.corpora:
            ids = corpus_ids[entry.dataset_id]
            subset = [o for o in outputs_by_system[name] if o.id in ids]
            jobs.append((entry, name, subset))
    try:
        if workers == 1:
            rows = [
                evaluate_dataset(entry, name, subset, cfg, scorer)
                for entry, name, subset in jobs
            ]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(
                    pool.map(
                        lambda job: evaluate_dataset(*job, cfg, scorer), jobs
                    )
                )
    finally:
        close = getattr(scorer, "close", None)
        if close:
            close()

    report = build_report(cfg, rows)
    out_dir = args.out if args.out else cfg.out_dir
    json_path, csv_path = write_report(report, out_dir)
    print(render_table(report), end="")
    print(f"wrote {json_path} and {csv_path}")
    return EXIT_OK


def cmd_report(args) -> int:
    report = load_report(args.report_json)
    print(render_table(report), end="")
    if args.csv:
        write_csv(report, args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_validate_bank(args) -> int:
    bank = load_bank(args.bank, check=False)
    result = validate_bank(bank)
    for (task, lang), count in sorted(result["counts"].items()):
        print(f"{task}/{lang}: {count}")
    print(f"total: {result['total']}")
    print(f"sha256: {bank.checksum}")
    if result["problems"]:
        for problem in result["problems"]:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="editkit", description=__doc__)
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_build = sub.add_parser("build-dataset", help="build an instruction dataset")
    p_build.add_argument("--config", required=True)
    p_build.add_argument("--out", help="output directory (default: <out_dir>/dataset)")
    p_build.add_argument("--split", default="train", help="corpus split to build from")
    p_build.add_argument("--seed", type=int)
    p_build.add_argument("--setting", choices=("english", "native", "random"))
    p_build.add_argument("--style", choices=("encoder_prepend", "causal_wrap"))
    p_build.add_argument("--template")
    p_build.add_argument("--cap", type=int, help="per-combo sample cap")
    p_build.add_argument("--noedit-fraction", type=float, dest="noedit_fraction")
    p_build.set_defaults(func=cmd_build_dataset)

    p_baseline = sub.add_parser("baseline", help="generate baseline outputs")
    baseline_sub = p_baseline.add_subparsers(
        dest="baseline_command", required=True, parser_class=_Parser
    )
    p_copy = baseline_sub.add_parser("copy", help="hypothesis := source")
    p_copy.add_argument("--corpus", required=True)
    p_copy.add_argument("--format", default="jsonl", choices=("jsonl", "tsv"))
    p_copy.add_argument("--out", required=True)
    p_copy.set_defaults(func=cmd_baseline_copy)

    p_eval = sub.add_parser("evaluate", help="score system outputs")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument(
        "--outputs",
        nargs="+",
        required=True,
        metavar="NAME=PATH",
        help="system output files ({'id','hypothesis'} JSONL)",
    )
    p_eval.add_argument("--out", help="report directory (default: config out_dir)")
    p_eval.add_argument(
        "--workers", help=f"worker pool size (default: ${WORKERS_ENV} or 1)"
    )
    p_eval.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="re-render an existing report")
    p_report.add_argument("report_json")
    p_report.add_argument("--csv", help="also write the CSV view here")
    p_report.set_defaults(func=cmd_report)

    p_bank = sub.add_parser("validate-bank", help="check the instruction bank")
    p_bank.add_argument("--bank", help="bank path (default: shipped bank)")
    p_bank.set_defaults(func=cmd_validate_bank)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (WriteError, ScorerError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
