"""Pluggable semantic similarity scoring.

The built-in scorer is deliberately lexical: cosine similarity of character
1..3-gram count vectors over NFC-normalized, whitespace-collapsed text. Any
stronger model can be plugged in as an external process speaking one JSON
object per line: {"a": ..., "b": ..., "lang": ...} in, {"score": s} out,
with s in [0, 1].
"""

import json
import math
import subprocess
import threading
import unicodedata
from collections import Counter
from typing import Dict, Protocol, Sequence, Tuple

from .errors import ScorerError, ValidationError


class SimilarityScorer(Protocol):
    """Scores text pair similarity in [0, 1]. `thread_safe` tells the runner
    whether calls may be issued concurrently."""

    name: str
    thread_safe: bool

    def score(self, a: str, b: str, lang: str) -> float: ...


def _char_ngram_vector(text: str, n_max: int = 3) -> Counter:
    collapsed = " ".join(unicodedata.normalize("NFC", text).split())
    vec: Counter = Counter()
    for n in range(1, n_max + 1):
        for i in range(len(collapsed) - n + 1):
            vec[collapsed[i : i + n]] += 1
    return vec


def lexical_similarity(a: str, b: str) -> float:
    """Cosine of character 1..3-gram count vectors; identical inputs score 1.

    Two empty (or whitespace-only) texts count as identical; exactly one
    empty text scores 0.
    """
    va, vb = _char_ngram_vector(a), _char_ngram_vector(b)
    if not va and not vb:
        return 1.0
    if not va or not vb:
        return 0.0
    if va == vb:
        return 1.0
    dot = sum(count * vb[gram] for gram, count in va.items())
    norm = math.sqrt(sum(c * c for c in va.values())) * math.sqrt(
        sum(c * c for c in vb.values())
    )
    return min(1.0, max(0.0, dot / norm))


class LexicalScorer:
    """The built-in surface-overlap scorer. Stateless, safe to call concurrently."""

    name = "lexical"
    thread_safe = True

    def score(self, a: str, b: str, lang: str) -> float:
        return lexical_similarity(a, b)


class SubprocessScorer:
    """Bridges to an external scorer process over line-delimited JSON.

    The process is spawned lazily on first use and fed one request per line;
    it must answer each with one line carrying {"score": s}. Calls are
    serialized with a lock (thread_safe stays False so runners know not to
    fan out around it).
    """

    thread_safe = False

    def __init__(self, command: Sequence[str], name: str | None = None):
        if not command:
            raise ValidationError("subprocess scorer needs a non-empty command")
        self.command = list(command)
        self.name = name or f"subprocess:{self.command[0]}"
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise ScorerError(f"could not start scorer {self.command}: {exc}") from exc
        return self._proc

    def score(self, a: str, b: str, lang: str) -> float:
        with self._lock:
            proc = self._ensure_proc()
            request = json.dumps({"a": a, "b": b, "lang": lang}, ensure_ascii=False)
            try:
                proc.stdin.write(request + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ScorerError(f"scorer process died: {exc}") from exc
            if not line:
                raise ScorerError("scorer process closed its output stream")
            try:
                value = json.loads(line)["score"]
                score = float(value)
            except (ValueError, KeyError, TypeError) as exc:
                raise ScorerError(f"bad scorer reply {line.strip()!r}") from exc
            if not (0.0 <= score <= 1.0) or math.isnan(score):
                raise ScorerError(f"scorer returned {score}, outside [0, 1]")
            return score

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
            self._proc = None

    def __enter__(self) -> "SubprocessScorer":
        return self

    def __exit__(self, *exc_info):
        self.close()


def get_scorer(spec) -> SimilarityScorer:
    """Build a scorer from a config value: "lexical" or
    {"name": "subprocess", "command": [...]}."""
    if spec in (None, "lexical") or spec == {"name": "lexical"}:
        return LexicalScorer()
    if isinstance(spec, dict) and spec.get("name") == "subprocess":
        return SubprocessScorer(spec.get("command", ()))
    raise ValidationError(f"unknown scorer spec {spec!r}")


def semantic_accuracy(
    pairs: Sequence[Tuple[str, str]],
    scorer: SimilarityScorer | None = None,
    lang: str = "en",
    threshold: float = 0.7,
) -> float:
    """Percentage of pairs whose similarity clears the threshold."""
    if not pairs:
        raise ValidationError("semantic_accuracy needs at least one pair")
    if not (0.0 <= threshold <= 1.0):
        raise ValidationError(f"threshold must be in [0, 1], got {threshold}")
    scorer = scorer or LexicalScorer()
    hits = sum(1 for a, b in pairs if scorer.score(a, b, lang) >= threshold)
    return 100.0 * hits / len(pairs)
