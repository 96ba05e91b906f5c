"""Data model and readers/writers for editing corpora.

Three record kinds flow through the toolkit: parallel editing examples
(source text plus one or more reference rewrites), gold edit annotations in
the standard "S ... / A ..." block format, and system outputs keyed by
example id. All text is NFC-normalized when it enters through a reader.

Readers stream: they yield records one at a time and never hold a file in
memory. Malformed lines either raise CorpusFormatError (default) or, when a
collector list is passed via `errors=`, are appended there with their line
number while parsing continues.
"""

import dataclasses
import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import CorpusFormatError, ValidationError, WriteError
from .tokenize import SEPARATOR, SUPPORTED_LANGS

TASKS = ("gec", "simplification", "paraphrasing")

_NOOP_CORRECTIONS = ("", "-NONE-")


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class EditExample:
    """One parallel example: a source text and its reference rewrites."""

    id: str
    lang: str
    task: str
    source: str
    targets: Tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise ValidationError("example id must be non-empty")
        if self.task not in TASKS:
            raise ValidationError(f"unknown task {self.task!r} (expected one of {TASKS})")
        if not self.targets:
            raise ValidationError(f"example {self.id!r} has no targets")
        for t in (self.source,) + self.targets:
            if SEPARATOR in t:
                raise ValidationError(f"example {self.id!r} contains reserved U+001F")


@dataclass(frozen=True, order=True)
class EditSpan:
    """Half-open token span [start, end) replaced by `replacement`.

    start == end is an insertion and must carry a non-empty replacement;
    an empty replacement with start < end is a deletion.
    """

    start: int
    end: int
    replacement: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValidationError(f"bad span ({self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise ValidationError(f"zero-width span at {self.start} with empty replacement")


@dataclass(frozen=True)
class GoldEdit:
    """A gold edit: a span plus an optional error-type label (ignored by scoring)."""

    span: EditSpan
    type: Optional[str] = None


@dataclass
class GoldAnnotation:
    """Gold edits for one sentence, grouped by annotator id.

    An annotator that marked the sentence as needing no edits is present with
    an empty edit tuple; a sentence nobody annotated has no annotators at all.
    Edits within one annotator are sorted by span and must not overlap.
    """

    source_tokens: Tuple[str, ...]
    annotators: Dict[int, Tuple[GoldEdit, ...]]

    def __post_init__(self):
        n = len(self.source_tokens)
        for ann_id, edits in self.annotators.items():
            ordered = tuple(sorted(edits, key=lambda e: (e.span.start, e.span.end)))
            prev_end = -1
            prev_start = -1
            for edit in ordered:
                span = edit.span
                if span.end > n:
                    raise ValidationError(
                        f"annotator {ann_id}: span ({span.start}, {span.end}) "
                        f"exceeds sentence length {n}"
                    )
                # zero-width insertions may share a boundary; real spans may not overlap
                if span.start < prev_end or (span.start == prev_start and span.end == prev_end):
                    raise ValidationError(
                        f"annotator {ann_id}: overlapping spans near position {span.start}"
                    )
                prev_start, prev_end = span.start, span.end
            self.annotators[ann_id] = ordered

    def edit_sets(self) -> List[frozenset]:
        """Edit spans per annotator, in annotator-id order, types dropped."""
        return [
            frozenset(e.span for e in self.annotators[k]) for k in sorted(self.annotators)
        ]


@dataclass(frozen=True)
class SystemOutput:
    """One system hypothesis for an example id."""

    id: str
    hypothesis: str


def _report(problem: str, line_no: int, errors: Optional[List[CorpusFormatError]]):
    err = CorpusFormatError(problem, line_no)
    if errors is None:
        raise err
    errors.append(err)


def read_parallel(
    path: Union[str, Path],
    fmt: str = "jsonl",
    extension: bool = False,
    errors: Optional[List[CorpusFormatError]] = None,
) -> Iterator[EditExample]:
    """Stream EditExamples from a JSONL or TSV file.

    JSONL lines carry {"id", "lang", "task", "source", "targets": [...]}.
    TSV columns are id, lang, task, source, then one column per target.
    Languages outside the supported set are rejected unless `extension` is set.
    """
    if fmt not in ("jsonl", "tsv"):
        raise ValidationError(f"unknown corpus format {fmt!r}")
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            try:
                if fmt == "jsonl":
                    obj = json.loads(line)
                    if not isinstance(obj, dict):
                        raise ValueError("line is not a JSON object")
                    rec_id = obj["id"]
                    lang = obj["lang"]
                    task = obj["task"]
                    source = obj["source"]
                    targets = obj["targets"]
                else:
                    cols = line.split("\t")
                    if len(cols) < 5:
                        raise ValueError(f"expected >= 5 tab-separated columns, got {len(cols)}")
                    rec_id, lang, task, source = cols[:4]
                    targets = cols[4:]
                if not isinstance(targets, list) or not targets:
                    raise ValueError("targets must be a non-empty list")
                if not all(isinstance(t, str) for t in targets):
                    raise ValueError("targets must be strings")
                if not isinstance(source, str):
                    raise ValueError("source must be a string")
                if not extension and lang not in SUPPORTED_LANGS:
                    raise ValueError(
                        f"lang {lang!r} not in {SUPPORTED_LANGS} and corpus is not "
                        f"flagged as an extension"
                    )
                example = EditExample(
                    id=str(rec_id),
                    lang=lang,
                    task=task,
                    source=_nfc(source),
                    targets=tuple(_nfc(t) for t in targets),
                )
            except (KeyError, ValueError, TypeError, ValidationError) as exc:
                msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
                _report(msg, line_no, errors)
                continue
            yield example


def parse_m2(
    path: Union[str, Path],
    errors: Optional[List[CorpusFormatError]] = None,
) -> Iterator[GoldAnnotation]:
    """Stream gold annotations from an M2-style file.

    Each block is one "S <tokenized sentence>" line followed by zero or more
    "A start end|||type|||correction|||...|||annotator" lines. A (-1, -1) span
    marks a no-edit annotator, recorded with an explicit empty edit set; a
    block with no A-lines yields an annotation with zero annotators. When
    `errors` is given, a malformed block is reported and skipped.
    """
    source_tokens: Optional[Tuple[str, ...]] = None
    annotators: Dict[int, List[GoldEdit]] = {}
    block_line = 0
    block_bad = False

    def flush() -> Optional[GoldAnnotation]:
        nonlocal source_tokens, annotators, block_bad
        if source_tokens is None:
            return None
        ann = None
        if not block_bad:
            try:
                ann = GoldAnnotation(
                    source_tokens=source_tokens,
                    annotators={k: tuple(v) for k, v in annotators.items()},
                )
            except ValidationError as exc:
                _report(str(exc), block_line, errors)
        source_tokens, annotators, block_bad = None, {}, False
        return ann

    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = _nfc(raw.rstrip("\n"))
            if not line.strip():
                ann = flush()
                if ann is not None:
                    yield ann
                continue
            if line.startswith("S ") or line == "S":
                ann = flush()
                if ann is not None:
                    yield ann
                source_tokens = tuple(line[2:].split())
                block_line = line_no
                continue
            if line.startswith("A "):
                if source_tokens is None:
                    _report("A-line before any S-line", line_no, errors)
                    continue
                try:
                    head, *rest = line[2:].split("|||")
                    if len(rest) < 3:
                        raise ValueError("expected at least 4 |||-separated fields")
                    start_s, end_s = head.split()
                    start, end = int(start_s), int(end_s)
                    ann_id = int(rest[-1])
                    if (start, end) == (-1, -1):
                        annotators.setdefault(ann_id, [])
                        continue
                    if not (0 <= start <= end <= len(source_tokens)):
                        raise ValueError(
                            f"span ({start}, {end}) out of range for sentence of "
                            f"length {len(source_tokens)}"
                        )
                    correction = rest[1]
                    replacement = (
                        () if correction in _NOOP_CORRECTIONS else tuple(correction.split())
                    )
                    edit_type = rest[0] or None
                    edit = GoldEdit(span=EditSpan(start, end, replacement), type=edit_type)
                except (ValueError, ValidationError) as exc:
                    _report(str(exc), line_no, errors)
                    block_bad = True
                    continue
                annotators.setdefault(ann_id, []).append(edit)
                continue
            _report(f"unrecognized line {line[:40]!r}", line_no, errors)
    ann = flush()
    if ann is not None:
        yield ann


def read_outputs(
    path: Union[str, Path],
    errors: Optional[List[CorpusFormatError]] = None,
) -> List[SystemOutput]:
    """Read system outputs ({"id", "hypothesis"} JSONL). Duplicate ids are rejected."""
    seen = set()
    out: List[SystemOutput] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec_id = str(obj["id"])
                hyp = obj["hypothesis"]
                if not isinstance(hyp, str):
                    raise ValueError("hypothesis must be a string")
                if rec_id in seen:
                    raise ValueError(f"duplicate output id {rec_id!r}")
            except (KeyError, ValueError, TypeError) as exc:
                msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
                _report(msg, line_no, errors)
                continue
            seen.add(rec_id)
            out.append(SystemOutput(id=rec_id, hypothesis=_nfc(hyp)))
    return out


def write_jsonl(records: Iterable, path: Union[str, Path]) -> int:
    """Write records (dicts or dataclasses) as JSONL. Returns the record count.

    On an IO failure a WriteError is raised carrying how many records were
    written before the failure.
    """
    written = 0
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                if dataclasses.is_dataclass(rec) and not isinstance(rec, type):
                    rec = dataclasses.asdict(rec)
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
                written += 1
    except OSError as exc:
        raise WriteError(str(exc), written=written) from exc
    return written
