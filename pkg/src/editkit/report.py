"""Dataset evaluation rows and report emission (JSON, CSV, text table)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ._version import __version__
from .aggregate import harmonic_mean, ks_test, length_distribution, task_aggregate
from .config import CorpusEntry, RunConfig
from .corpus import (
    GoldAnnotation,
    GoldEdit,
    SystemOutput,
    parse_m2,
    read_parallel,
)
from .errors import ValidationError
from .gec_align import errant_lite_score, extract_edits, score_gec
from .metrics import BleuAccumulator, GleuAccumulator, SariAccumulator
from .semsim import SimilarityScorer, semantic_accuracy
from .tokenize import tokenize
from .verbalizer import load_bank

REPORT_SCHEMA_VERSION = 1

# Fixed CSV column order; absent values are written as empty cells.
CSV_COLUMNS = (
    "system",
    "dataset",
    "task",
    "lang",
    "split",
    "n_examples",
    "headline_metric",
    "headline_value",
    "precision",
    "recall",
    "f_half",
    "gleu",
    "bleu",
    "sari",
    "sari_add",
    "sari_keep",
    "sari_delete",
    "diversity",
    "semantic_accuracy",
    "aggregate",
    "ks_d",
    "ks_p",
)


@dataclass(frozen=True)
class ReportRow:
    system: str
    dataset: str
    task: str
    lang: str
    split: str
    n_examples: int
    headline_metric: str
    headline_value: float
    metrics: Dict[str, float]
    aggregate: Optional[Dict[str, float]]
    ks: Dict[str, float]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "dataset": self.dataset,
            "task": self.task,
            "lang": self.lang,
            "split": self.split,
            "n_examples": self.n_examples,
            "headline_metric": self.headline_metric,
            "headline_value": self.headline_value,
            "metrics": dict(sorted(self.metrics.items())),
            "aggregate": self.aggregate,
            "ks": self.ks,
        }


def _aligned_hypotheses(
    entry: CorpusEntry, examples: Sequence, outputs: Sequence[SystemOutput]
) -> List[str]:
    by_id = {o.id: o.hypothesis for o in outputs}
    missing = [ex.id for ex in examples if ex.id not in by_id]
    if missing:
        raise ValidationError(
            f"{entry.dataset_id}: no output for ids {missing[:5]} "
            f"({len(missing)} missing in total)"
        )
    extra = sorted(set(by_id) - {ex.id for ex in examples})
    if extra:
        raise ValidationError(
            f"{entry.dataset_id}: outputs carry unknown ids {extra[:5]} "
            f"({len(extra)} extra in total)"
        )
    return [by_id[ex.id] for ex in examples]


def _gold_annotations(
    entry: CorpusEntry,
    examples: Sequence,
    src_toks: Sequence[Tuple[str, ...]],
    ref_toks: Sequence[Sequence[Tuple[str, ...]]],
    granularity: str,
) -> List[GoldAnnotation]:
    """Gold edit sets: from the M2 file when given, else aligned references.

    Without an M2 file every reference acts as one annotator whose edits are
    extracted by aligning the tokenized source to the tokenized reference
    under the same span convention used for scoring.
    """
    if entry.m2_path:
        anns = list(parse_m2(entry.m2_path))
        if len(anns) != len(examples):
            raise ValidationError(
                f"{entry.dataset_id}: {entry.m2_path} holds {len(anns)} "
                f"annotation blocks for {len(examples)} corpus examples"
            )
        return anns
    anns = []
    for toks, refs in zip(src_toks, ref_toks):
        annotators = {
            i: tuple(
                GoldEdit(span=span)
                for span in extract_edits(toks, ref, granularity)
            )
            for i, ref in enumerate(refs)
        }
        anns.append(GoldAnnotation(source_tokens=toks, annotators=annotators))
    return anns


def evaluate_dataset(
    entry: CorpusEntry,
    system: str,
    outputs: Sequence[SystemOutput],
    cfg: RunConfig,
    scorer: Optional[SimilarityScorer] = None,
) -> ReportRow:
    """Score one system on one corpus and return a report row.

    The task decides the metric family; for GEC the routing table picks the
    headline between edit-overlap F0.5 (merged or split spans) and GLEU. The
    length distribution of the outputs is always compared against the pooled
    references with a KS test.
    """
    mcfg = cfg.metric
    lang = entry.lang
    examples = []
    for ex in read_parallel(entry.path, entry.format):
        if ex.task != entry.task or ex.lang != entry.lang:
            raise ValidationError(
                f"{entry.dataset_id}: corpus row {ex.id!r} is "
                f"({ex.task}, {ex.lang})"
            )
        examples.append(ex)
    if not examples:
        raise ValidationError(f"{entry.dataset_id}: corpus is empty")
    hyps = _aligned_hypotheses(entry, examples, outputs)

    lower = mcfg.lowercase
    hyp_toks = [tuple(tokenize(h, lang, lower)) for h in hyps]
    src_toks = [tuple(tokenize(ex.source, lang, lower)) for ex in examples]
    ref_toks = [
        [tuple(tokenize(t, lang, lower)) for t in ex.targets]
        for ex in examples
    ]

    routed = cfg.routed_metric(entry.task, lang)
    if entry.task == "paraphrasing":
        acc = BleuAccumulator(mcfg)
        for h, s in zip(hyp_toks, src_toks):
            acc.add(h, [s])
        diversity = 100.0 - acc.score()
        sem = semantic_accuracy(
            [(ex.source, h) for ex, h in zip(examples, hyps)],
            scorer,
            lang,
            cfg.threshold,
        )
        metrics = {"diversity": diversity, "semantic_accuracy": sem}
        agg = task_aggregate(entry.task, metrics)
        headline = agg.value
    elif entry.task == "simplification":
        sacc = SariAccumulator(mcfg)
        bacc = BleuAccumulator(mcfg)
        for s, h, refs in zip(src_toks, hyp_toks, ref_toks):
            sacc.add(s, h, refs)
            bacc.add(h, refs)
        ss = sacc.score()
        bleu_val = bacc.score()
        metrics = {
            "sari": ss.total,
            "sari_add": ss.add,
            "sari_keep": ss.keep,
            "sari_delete": ss.delete,
            "bleu": bleu_val,
        }
        agg = task_aggregate(entry.task, {"sari": ss.total, "bleu": bleu_val})
        headline = ss.total
    else:
        gacc = GleuAccumulator(mcfg)
        for h, s, refs in zip(hyp_toks, src_toks, ref_toks):
            gacc.add(h, s, refs)
        gleu_val = gacc.score()
        granularity = "split" if routed == "errant" else "merged"
        anns = _gold_annotations(entry, examples, src_toks, ref_toks, granularity)
        scored = (
            errant_lite_score(anns, hyp_toks)
            if routed == "errant"
            else score_gec(anns, hyp_toks)
        )
        metrics = {
            "precision": scored.precision,
            "recall": scored.recall,
            "f_half": scored.f_half,
            "gleu": gleu_val,
        }
        agg = task_aggregate(
            entry.task, {"f_half": scored.f_half, "gleu": gleu_val}
        )
        headline = gleu_val if routed == "gleu" else scored.f_half

    hyp_lens = length_distribution(hyps, lang, lower)
    ref_lens = length_distribution(
        [t for ex in examples for t in ex.targets], lang, lower
    )
    ks = ks_test(hyp_lens, ref_lens)

    return ReportRow(
        system=system,
        dataset=entry.dataset_id,
        task=entry.task,
        lang=lang,
        split=entry.split,
        n_examples=len(examples),
        headline_metric=routed,
        headline_value=headline,
        metrics=metrics,
        aggregate={"value": agg.value, "components": dict(agg.components)},
        ks={
            "d": ks.d,
            "p_value": ks.p_value,
            "n_a": ks.n_a,
            "n_b": ks.n_b,
        },
    )


def build_report(cfg: RunConfig, rows: Sequence[ReportRow]) -> dict:
    """Assemble the full report dict from evaluated rows.

    Rows are sorted by (system, dataset). Per (system, task) the dataset
    aggregates are rolled up with a harmonic mean, recorded as such.
    """
    ordered = sorted(rows, key=lambda r: (r.system, r.dataset))
    rollups = []
    groups: Dict[Tuple[str, str], List[ReportRow]] = {}
    for row in ordered:
        groups.setdefault((row.system, row.task), []).append(row)
    for (system, task), members in sorted(groups.items()):
        scores = [m.aggregate["value"] for m in members if m.aggregate]
        if not scores:
            continue
        rollups.append(
            {
                "system": system,
                "task": task,
                "value": harmonic_mean(scores),
                "combiner": "harmonic_mean",
                "datasets": [m.dataset for m in members if m.aggregate],
            }
        )
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "bank_checksum": load_bank().checksum,
        "config": cfg.to_dict(),
        "rows": [r.to_dict() for r in ordered],
        "rollups": rollups,
    }


def _csv_value(row: dict, column: str):
    if column == "aggregate":
        return row["aggregate"]["value"] if row["aggregate"] else None
    if column == "ks_d":
        return row["ks"]["d"]
    if column == "ks_p":
        return row["ks"]["p_value"]
    if column in row["metrics"]:
        return row["metrics"][column]
    if column in row:
        return row[column]
    return None


def write_csv(report: dict, path: Union[str, Path]):
    """One CSV row per (system, dataset) in the fixed CSV_COLUMNS order.

    Float cells use repr so they parse back to the exact JSON values.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report["rows"]:
            cells = []
            for column in CSV_COLUMNS:
                value = _csv_value(row, column)
                cells.append("" if value is None else
                             repr(value) if isinstance(value, float) else value)
            writer.writerow(cells)


def write_report(report: dict, out_dir: Union[str, Path], stem: str = "report"):
    """Emit report.json and report.csv under out_dir; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{stem}.json"
    csv_path = out / f"{stem}.csv"
    json_path.write_text(
        json.dumps(report, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    write_csv(report, csv_path)
    return json_path, csv_path


def load_report(path: Union[str, Path]) -> dict:
    report = json.loads(Path(path).read_text(encoding="utf-8"))
    if report.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValidationError(
            f"{path}: unsupported report schema "
            f"{report.get('schema_version')!r}"
        )
    return report


def render_table(report: dict) -> str:
    """Human-readable fixed-width table of headline values and aggregates."""
    headers = ("system", "dataset", "metric", "value", "aggregate")
    body = []
    for row in report["rows"]:
        agg = row["aggregate"]
        body.append(
            (
                row["system"],
                row["dataset"],
                row["headline_metric"],
                f"{row['headline_value']:.2f}",
                f"{agg['value']:.2f}" if agg else "-",
            )
        )
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))).rstrip())
    if report.get("rollups"):
        lines.append("")
        lines.append("rollups (harmonic mean over dataset aggregates)")
        for roll in report["rollups"]:
            lines.append(
                f"  {roll['system']}  {roll['task']}  {roll['value']:.2f}  "
                f"({len(roll['datasets'])} datasets)"
            )
    return "\n".join(lines) + "\n"
