"""Overlap metrics over token sequences: BLEU, Self-BLEU diversity, GLEU, SARI.

All scores live on a 0..100 scale. Sentence scoring and corpus scoring share
the same accumulator paths: an accumulator collects per-order match/total
sums (micro-aggregation) and finalizes once, so accumulating one sentence and
calling the convenience function are identical. Scoring an identical pair
yields exactly 100.0, with no float drift.

Degenerate inputs never produce NaN: an empty hypothesis scores 0.0 under
BLEU/GLEU and is flagged with a MetricWarning.
"""

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .errors import MetricWarning, ValidationError
from .tokenize import ngrams

Tokens = Sequence[str]


@dataclass(frozen=True)
class MetricConfig:
    """Shared metric knobs.

    smoothing="add_k" adds `smoothing_k` to numerator and denominator of the
    modified precisions for orders n >= 2 (unigrams stay unsmoothed); it
    applies to BLEU and Self-BLEU only. `lowercase` is applied by callers at
    tokenization time.
    """

    n_max: int = 4
    smoothing: str = "none"
    smoothing_k: float = 1.0
    lowercase: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise ValidationError(f"n_max must be >= 1, got {self.n_max}")
        if self.smoothing not in ("none", "add_k"):
            raise ValidationError(f"unknown smoothing {self.smoothing!r}")
        if self.smoothing_k <= 0:
            raise ValidationError("smoothing_k must be positive")


def _check_refs(refs: Sequence[Tokens]) -> List[Tuple[str, ...]]:
    if not refs:
        raise ValidationError("at least one reference is required")
    return [tuple(r) for r in refs]


def _warn_empty(what: str):
    warnings.warn(f"scoring an empty {what}; score contribution is 0", MetricWarning)


def _closest_ref_len(hyp_len: int, ref_lens: Sequence[int]) -> int:
    # ties go to the shorter reference
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def _brevity(hyp_len: float, ref_len: float) -> float:
    if hyp_len <= 0:
        return 0.0
    return math.exp(min(0.0, 1.0 - ref_len / hyp_len))


class BleuAccumulator:
    """Micro-aggregated modified n-gram precision with brevity penalty."""

    def __init__(self, cfg: MetricConfig | None = None):
        self.cfg = cfg or MetricConfig()
        n = self.cfg.n_max
        self.matches = [0] * n
        self.totals = [0] * n
        self.hyp_len = 0
        self.ref_len = 0

    def add(self, hyp: Tokens, refs: Sequence[Tokens]) -> "BleuAccumulator":
        refs = _check_refs(refs)
        hyp = tuple(hyp)
        if not hyp:
            _warn_empty("hypothesis")
        self.hyp_len += len(hyp)
        self.ref_len += _closest_ref_len(len(hyp), [len(r) for r in refs])
        for n in range(1, self.cfg.n_max + 1):
            bag = ngrams(hyp, n)
            if bag.total == 0:
                continue
            clip: Counter = Counter()
            for ref in refs:
                for gram, count in ngrams(ref, n).counts.items():
                    if count > clip[gram]:
                        clip[gram] = count
            self.matches[n - 1] += sum(
                min(count, clip[gram]) for gram, count in bag.counts.items()
            )
            self.totals[n - 1] += bag.total
        return self

    def merge(self, other: "BleuAccumulator") -> "BleuAccumulator":
        if other.cfg != self.cfg:
            raise ValidationError("cannot merge accumulators with different configs")
        for i in range(self.cfg.n_max):
            self.matches[i] += other.matches[i]
            self.totals[i] += other.totals[i]
        self.hyp_len += other.hyp_len
        self.ref_len += other.ref_len
        return self

    def score(self) -> float:
        cfg = self.cfg
        logs: List[float] = []
        for n in range(1, cfg.n_max + 1):
            total = self.totals[n - 1]
            if total == 0:  # orders longer than the hypothesis do not vote
                continue
            m = self.matches[n - 1]
            if cfg.smoothing == "add_k" and n >= 2:
                p = (m + cfg.smoothing_k) / (total + cfg.smoothing_k)
            else:
                if m == 0:
                    return 0.0
                p = m / total
            logs.append(math.log(p))
        if not logs:
            return 0.0
        return 100.0 * _brevity(self.hyp_len, self.ref_len) * math.exp(
            sum(logs) / len(logs)
        )


def bleu(hyp: Tokens, refs: Sequence[Tokens], cfg: MetricConfig | None = None) -> float:
    """Sentence BLEU in 0..100. `bleu(x, [x])` is exactly 100 for non-empty x."""
    return BleuAccumulator(cfg).add(hyp, refs).score()


def self_bleu_diversity(hyp: Tokens, source: Tokens, cfg: MetricConfig | None = None) -> float:
    """100 minus BLEU of the hypothesis against its own source.

    Copying the source scores exactly 0; sharing no n-grams scores 100.
    """
    return 100.0 - bleu(hyp, [source], cfg)


def _gleu_order_stats(
    hyp: Tuple[str, ...], source: Tuple[str, ...], ref: Tuple[str, ...], n: int
) -> Tuple[float, int]:
    """(numerator, denominator) for one order: reference matches minus the
    surplus source matches the reference does not sanction, floored at zero."""
    bag = ngrams(hyp, n)
    if bag.total == 0:
        return 0.0, 0
    s_counts = ngrams(source, n).counts
    r_counts = ngrams(ref, n).counts
    m_hr = m_hs = m_hsr = 0
    for gram, count in bag.counts.items():
        m_hr += min(count, r_counts[gram]) if gram in r_counts else 0
        in_s = min(count, s_counts[gram]) if gram in s_counts else 0
        m_hs += in_s
        if in_s:
            m_hsr += min(count, s_counts[gram], r_counts[gram]) if gram in r_counts else 0
    num = m_hr - max(0, m_hs - m_hsr)
    return float(max(0, num)), bag.total


class GleuAccumulator:
    """Corpus GLEU: per-order numerators (averaged over references) and
    denominators are summed across sentences, then combined once."""

    def __init__(self, cfg: MetricConfig | None = None):
        self.cfg = cfg or MetricConfig()
        n = self.cfg.n_max
        self.numerators = [0.0] * n
        self.totals = [0] * n
        self.hyp_len = 0
        self.ref_len = 0.0

    def add(self, hyp: Tokens, source: Tokens, refs: Sequence[Tokens]) -> "GleuAccumulator":
        refs = _check_refs(refs)
        hyp, source = tuple(hyp), tuple(source)
        if not hyp:
            _warn_empty("hypothesis")
        self.hyp_len += len(hyp)
        self.ref_len += sum(len(r) for r in refs) / len(refs)
        for n in range(1, self.cfg.n_max + 1):
            num_sum = 0.0
            total = 0
            for ref in refs:
                num, total = _gleu_order_stats(hyp, source, ref, n)
                num_sum += num
            if total:
                self.numerators[n - 1] += num_sum / len(refs)
                self.totals[n - 1] += total
        return self

    def merge(self, other: "GleuAccumulator") -> "GleuAccumulator":
        if other.cfg != self.cfg:
            raise ValidationError("cannot merge accumulators with different configs")
        for i in range(self.cfg.n_max):
            self.numerators[i] += other.numerators[i]
            self.totals[i] += other.totals[i]
        self.hyp_len += other.hyp_len
        self.ref_len += other.ref_len
        return self

    def score(self) -> float:
        logs: List[float] = []
        for n in range(1, self.cfg.n_max + 1):
            total = self.totals[n - 1]
            if total == 0:
                continue
            num = self.numerators[n - 1]
            if num <= 0.0:
                return 0.0
            logs.append(math.log(num / total))
        if not logs:
            return 0.0
        return 100.0 * _brevity(self.hyp_len, self.ref_len) * math.exp(
            sum(logs) / len(logs)
        )


def gleu(
    hyp: Tokens, source: Tokens, refs: Sequence[Tokens], cfg: MetricConfig | None = None
) -> float:
    """Sentence GLEU: per-reference scores averaged (GLEU has no smoothing)."""
    cfg = cfg or MetricConfig()
    refs = _check_refs(refs)
    hyp, source = tuple(hyp), tuple(source)
    if not hyp:
        _warn_empty("hypothesis")
        return 0.0
    scores = []
    for ref in refs:
        logs: List[float] = []
        dead = False
        for n in range(1, cfg.n_max + 1):
            num, total = _gleu_order_stats(hyp, source, ref, n)
            if total == 0:
                continue
            if num <= 0.0:
                dead = True
                break
            logs.append(math.log(num / total))
        if dead or not logs:
            scores.append(0.0)
            continue
        scores.append(100.0 * _brevity(len(hyp), len(ref)) * math.exp(sum(logs) / len(logs)))
    return sum(scores) / len(scores)


@dataclass(frozen=True)
class SariScore:
    """SARI components on a 0..100 scale; total is their plain mean."""

    add: float
    keep: float
    delete: float
    total: float


def _ratio(num: float, den: float) -> float:
    # a ratio with nothing proposed and/or nothing gold counts as perfect
    return 1.0 if den == 0 else num / den


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def sari(
    source: Tokens, hyp: Tokens, refs: Sequence[Tokens], cfg: MetricConfig | None = None
) -> SariScore:
    """SARI of a simplification hypothesis against source and references.

    Per order n = 1..n_max, reference n-gram counts are averaged across
    references; kept and added n-grams score F1, deleted n-grams score
    precision only. A hypothesis identical to the source with the source as
    sole reference scores 100 everywhere.
    """
    cfg = cfg or MetricConfig()
    refs = _check_refs(refs)
    source, hyp = tuple(source), tuple(hyp)
    if not hyp:
        _warn_empty("hypothesis")
    n_refs = len(refs)
    add_scores, keep_scores, del_scores = [], [], []
    for n in range(1, cfg.n_max + 1):
        s_counts = ngrams(source, n).counts
        h_counts = ngrams(hyp, n).counts
        rbar: Dict[Tuple[str, ...], float] = {}
        for ref in refs:
            for gram, count in ngrams(ref, n).counts.items():
                rbar[gram] = rbar.get(gram, 0.0) + count / n_refs
        grams = set(s_counts) | set(h_counts) | set(rbar)

        keep_sys = keep_gold = keep_true = 0.0
        del_sys = del_gold = del_true = 0.0
        add_sys = add_gold = add_true = 0.0
        for gram in grams:
            s = s_counts.get(gram, 0)
            h = h_counts.get(gram, 0)
            r = rbar.get(gram, 0.0)
            sys_keep = min(s, h)
            gold_keep = min(s, r)
            keep_sys += sys_keep
            keep_gold += gold_keep
            keep_true += min(sys_keep, gold_keep)
            sys_del = max(0, s - h)
            gold_del = max(0.0, s - r)
            del_sys += sys_del
            del_gold += gold_del
            del_true += min(sys_del, gold_del)
            sys_add = max(0, h - s)
            gold_add = max(0.0, r - s)
            add_sys += sys_add
            add_gold += gold_add
            add_true += min(sys_add, gold_add)
        keep_scores.append(_f1(_ratio(keep_true, keep_sys), _ratio(keep_true, keep_gold)))
        del_scores.append(_ratio(del_true, del_sys))
        add_scores.append(_f1(_ratio(add_true, add_sys), _ratio(add_true, add_gold)))
    add = 100.0 * sum(add_scores) / len(add_scores)
    keep = 100.0 * sum(keep_scores) / len(keep_scores)
    delete = 100.0 * sum(del_scores) / len(del_scores)
    return SariScore(add=add, keep=keep, delete=delete, total=(add + keep + delete) / 3.0)


class SariAccumulator:
    """Corpus SARI: the mean of per-sentence components."""

    def __init__(self, cfg: MetricConfig | None = None):
        self.cfg = cfg or MetricConfig()
        self.sums = [0.0, 0.0, 0.0, 0.0]
        self.count = 0

    def add(self, source: Tokens, hyp: Tokens, refs: Sequence[Tokens]) -> "SariAccumulator":
        s = sari(source, hyp, refs, self.cfg)
        for i, v in enumerate((s.add, s.keep, s.delete, s.total)):
            self.sums[i] += v
        self.count += 1
        return self

    def score(self) -> SariScore:
        if self.count == 0:
            raise ValidationError("no sentences accumulated")
        a, k, d, t = (v / self.count for v in self.sums)
        return SariScore(add=a, keep=k, delete=d, total=t)
