"""Instruction dataset construction: sampling, no-edit reservation, prompts."""

from __future__ import annotations

import dataclasses
import json
import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from ._version import __version__
from .corpus import TASKS, EditExample, write_jsonl
from .errors import BuildWarning, ValidationError
from .tokenize import SUPPORTED_LANGS
from .verbalizer import (
    SETTINGS,
    STYLES,
    InstructionBank,
    assemble_prompt,
    load_bank,
    sample_instruction,
)

# Tasks whose datasets reserve a no-edit share (identity pairs).
NOEDIT_TASKS = ("gec", "simplification")


@dataclass(frozen=True)
class BuildConfig:
    combos: Tuple[Tuple[str, str], ...]
    seed: int = 13
    per_combo_cap: int = 10000
    noedit_fraction: float = 0.2
    setting: str = "english"
    style: str = "encoder_prepend"
    template: str = "plain"
    exclude_native: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "combos", tuple((t, lg) for t, lg in self.combos)
        )
        if not self.combos:
            raise ValidationError("combos must be non-empty")
        for task, lang in self.combos:
            if task not in TASKS:
                raise ValidationError(f"unknown task {task!r}")
            if lang not in SUPPORTED_LANGS:
                raise ValidationError(f"unknown lang {lang!r}")
        if len(set(self.combos)) != len(self.combos):
            raise ValidationError("combos contains duplicates")
        if self.per_combo_cap < 1:
            raise ValidationError("per_combo_cap must be >= 1")
        if not 0.0 <= self.noedit_fraction < 1.0:
            raise ValidationError("noedit_fraction must be in [0, 1)")
        if self.setting not in SETTINGS:
            raise ValidationError(f"unknown setting {self.setting!r}")
        if self.style not in STYLES:
            raise ValidationError(f"unknown style {self.style!r}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["combos"] = [list(c) for c in self.combos]
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "BuildConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown build config keys {sorted(unknown)}")
        if "combos" not in d:
            raise ValidationError("build config needs a combos list")
        return cls(**{k: (tuple(tuple(c) for c in v) if k == "combos" else v)
                      for k, v in d.items()})


@dataclass(frozen=True)
class InstructionRecord:
    id: str
    task: str
    lang: str
    setting: str
    instruction: str
    instruction_lang: str
    prompt: str
    source: str
    output: str
    loss_span: Optional[Tuple[int, int]]
    noedit: bool


@dataclass(frozen=True)
class InstructionDataset:
    records: Tuple[InstructionRecord, ...]
    manifest: dict


def noedit_count(n: int, fraction: float) -> int:
    """Deterministic identity-pair count: fraction rounded half-up."""
    return int(math.floor(fraction * n + 0.5))


def _combo_rng(seed: int, task: str, lang: str) -> random.Random:
    # String seeding keeps the stream stable across runs and processes.
    return random.Random(f"{seed}|{task}|{lang}")


def _sample_stream(
    stream: Iterable[EditExample], cap: int, rng: random.Random, combo: str
) -> Tuple[List[EditExample], int]:
    """Reservoir-sample up to cap examples; returns (sample, total seen)."""
    seen_ids = set()
    sample: List[EditExample] = []
    n = 0
    for ex in stream:
        if ex.id in seen_ids:
            raise ValidationError(f"{combo}: duplicate id {ex.id!r} in corpus")
        seen_ids.add(ex.id)
        n += 1
        if len(sample) < cap:
            sample.append(ex)
        else:
            j = rng.randrange(n)
            if j < cap:
                sample[j] = ex
    return sample, n


def build_dataset(
    corpora: Mapping[Tuple[str, str], Iterable[EditExample]],
    config: BuildConfig,
    bank: Optional[InstructionBank] = None,
) -> InstructionDataset:
    """Assemble an instruction dataset from parallel corpora.

    Each requested combo is sampled without replacement up to the cap using a
    generator seeded from (seed, task, lang), so combos may build in any order
    or in parallel without changing the result. For GEC and simplification a
    deterministic share of the sampled records becomes identity pairs: the
    target is replaced by the source and the id gains a "|noedit" suffix.
    Everything else keeps its first target.
    """
    if bank is None:
        bank = load_bank()
    records: List[InstructionRecord] = []
    combo_stats: Dict[str, dict] = {}

    for task, lang in config.combos:
        combo = f"{task}/{lang}"
        if (task, lang) not in corpora:
            raise ValidationError(f"no corpus given for combination {combo}")
        rng = _combo_rng(config.seed, task, lang)
        sample, available = _sample_stream(
            iter(corpora[(task, lang)]), config.per_combo_cap, rng, combo
        )
        if not sample:
            raise ValidationError(f"corpus for {combo} is empty")
        if available < config.per_combo_cap:
            warnings.warn(
                f"{combo}: corpus holds {available} examples, under the cap "
                f"{config.per_combo_cap}; taking all of them",
                BuildWarning,
                stacklevel=2,
            )
        sample.sort(key=lambda ex: ex.id)
        n = len(sample)
        reserved = (
            noedit_count(n, config.noedit_fraction)
            if task in NOEDIT_TASKS
            else 0
        )
        noedit_at = set(rng.sample(range(n), reserved))

        for i, ex in enumerate(sample):
            instr = sample_instruction(
                bank, task, lang, config.setting, rng, config.exclude_native
            )
            is_noedit = i in noedit_at
            target = ex.source if is_noedit else ex.targets[0]
            assembled = assemble_prompt(
                instr,
                ex.source,
                target,
                style=config.style,
                template=config.template,
                setting=config.setting,
            )
            records.append(
                InstructionRecord(
                    id=ex.id + "|noedit" if is_noedit else ex.id,
                    task=task,
                    lang=lang,
                    setting=config.setting,
                    instruction=instr.text,
                    instruction_lang=instr.lang,
                    prompt=assembled.prompt,
                    source=ex.source,
                    output=target,
                    loss_span=assembled.loss_span,
                    noedit=is_noedit,
                )
            )
        combo_stats[combo] = {
            "count": n,
            "noedit": reserved,
            "available": available,
        }

    manifest = {
        "schema_version": 1,
        "tool_version": __version__,
        "bank_checksum": bank.checksum,
        "config": config.to_dict(),
        "combos": combo_stats,
        "instruction_langs": dict(
            sorted(Counter(r.instruction_lang for r in records).items())
        ),
        "total_records": len(records),
        "total_noedit": sum(1 for r in records if r.noedit),
    }
    return InstructionDataset(records=tuple(records), manifest=manifest)


def summarize(dataset: InstructionDataset) -> dict:
    """Recompute per-combo counts and the instruction-language histogram.

    Derived from the records alone, so it can be checked against the manifest.
    """
    combos: Dict[str, dict] = {}
    hist: Counter = Counter()
    for rec in dataset.records:
        combo = f"{rec.task}/{rec.lang}"
        stats = combos.setdefault(combo, {"count": 0, "noedit": 0})
        stats["count"] += 1
        stats["noedit"] += int(rec.noedit)
        hist[rec.instruction_lang] += 1
    return {
        "combos": combos,
        "instruction_langs": dict(sorted(hist.items())),
        "total_records": len(dataset.records),
        "total_noedit": sum(1 for r in dataset.records if r.noedit),
    }


def write_dataset(
    dataset: InstructionDataset, out_dir: Union[str, Path]
) -> Tuple[Path, Path]:
    """Write dataset.jsonl and manifest.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / "dataset.jsonl"
    manifest_path = out / "manifest.json"
    write_jsonl(dataset.records, records_path)
    manifest_path.write_text(
        json.dumps(dataset.manifest, indent=2, ensure_ascii=False, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return records_path, manifest_path
