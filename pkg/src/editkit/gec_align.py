"""Edit extraction by token alignment, and edit-overlap scoring.

A hypothesis is aligned to its source with unit-cost Levenshtein DP (ties
prefer match, then substitution, then deletion, then insertion), and the
non-match stretches become edit spans. Scoring matches those spans exactly
(start, end, replacement) against gold annotations and reports precision,
recall and F(beta=0.5), picking for every sentence the annotator that is most
favourable to the system.

Two span conventions are exposed: `score_gec` merges each maximal run of
adjacent non-match ops into a single span; `errant_lite_score` additionally
splits runs at op-type boundaries, so a substitution followed by a deletion
stays two separate edits. Both conventions reproduce the hypothesis when the
extracted edits are applied back to the source.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ._kernels import fill_dp
from .corpus import EditSpan, GoldAnnotation
from .errors import ValidationError

MATCH, SUB, DEL, INS = 0, 1, 2, 3
OP_NAMES = ("match", "sub", "del", "ins")


def _intern(source: Sequence[str], hyp: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
    table: Dict[str, int] = {}
    a = np.empty(len(source), dtype=np.int32)
    for i, tok in enumerate(source):
        a[i] = table.setdefault(tok, len(table))
    b = np.empty(len(hyp), dtype=np.int32)
    for i, tok in enumerate(hyp):
        b[i] = table.setdefault(tok, len(table))
    return a, b


def align(source: Sequence[str], hyp: Sequence[str]) -> Tuple[List[int], int]:
    """Align token sequences; returns (op codes source->hyp, edit distance).

    The backtrace is deterministic: on equal cost it prefers match, then
    substitution, then deletion, then insertion.
    """
    a, b = _intern(source, hyp)
    dp = fill_dp(a, b)
    ops: List[int] = []
    i, j = len(a), len(b)
    while i > 0 or j > 0:
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and dp[i, j] == dp[i - 1, j - 1]:
            ops.append(MATCH)
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and dp[i, j] == dp[i - 1, j - 1] + 1:
            ops.append(SUB)
            i -= 1
            j -= 1
        elif i > 0 and dp[i, j] == dp[i - 1, j] + 1:
            ops.append(DEL)
            i -= 1
        elif j > 0 and dp[i, j] == dp[i, j - 1] + 1:
            ops.append(INS)
            j -= 1
        else:  # unreachable on a well-formed DP matrix
            raise AssertionError("backtrace stuck")
    ops.reverse()
    return ops, int(dp[len(a), len(b)])


def extract_edits(
    source: Sequence[str], hyp: Sequence[str], granularity: str = "merged"
) -> List[EditSpan]:
    """Extract edit spans turning `source` into `hyp`.

    granularity="merged": one span per maximal run of adjacent non-match ops.
    granularity="split": runs additionally break where the op type changes.
    """
    if granularity not in ("merged", "split"):
        raise ValidationError(f"unknown granularity {granularity!r}")
    source = tuple(source)
    hyp = tuple(hyp)
    ops, _ = align(source, hyp)
    edits: List[EditSpan] = []
    run_start = None  # (i, j) at the start of the current non-match run
    run_op = None
    i = j = 0
    for op in ops + [MATCH]:
        if op != MATCH and run_start is not None and granularity == "split" and op != run_op:
            edits.append(EditSpan(run_start[0], i, hyp[run_start[1] : j]))
            run_start = None
        if op == MATCH:
            if run_start is not None:
                edits.append(EditSpan(run_start[0], i, hyp[run_start[1] : j]))
                run_start = None
            i += 1
            j += 1
            continue
        if run_start is None:
            run_start = (i, j)
            run_op = op
        if op == SUB:
            i += 1
            j += 1
        elif op == DEL:
            i += 1
        else:
            j += 1
    return edits


def apply_edits(tokens: Sequence[str], edits: Sequence[EditSpan]) -> Tuple[str, ...]:
    """Apply non-overlapping edit spans to a token sequence."""
    tokens = tuple(tokens)
    ordered = sorted(edits, key=lambda e: (e.start, e.end))
    out: List[str] = []
    pos = 0
    prev = None
    for edit in ordered:
        if edit.end > len(tokens):
            raise ValidationError(f"span ({edit.start}, {edit.end}) exceeds length {len(tokens)}")
        if edit.start < pos or (prev is not None and (edit.start, edit.end) == prev):
            raise ValidationError(f"overlapping edit at position {edit.start}")
        out.extend(tokens[pos : edit.start])
        out.extend(edit.replacement)
        pos = edit.end
        prev = (edit.start, edit.end)
    out.extend(tokens[pos:])
    return tuple(out)


@dataclass(frozen=True)
class GecScore:
    """Corpus edit-overlap score. Zero denominators count as perfect (vacuous)."""

    precision: float
    recall: float
    f_half: float
    tp: int
    fp: int
    fn: int


def _prf(tp: int, proposed: int, gold: int, beta: float) -> Tuple[float, float, float]:
    p = 1.0 if proposed == 0 else tp / proposed
    r = 1.0 if gold == 0 else tp / gold
    if p == 0.0 and r == 0.0:
        f = 0.0
    else:
        b2 = beta * beta
        f = (1 + b2) * p * r / (b2 * p + r)
    return p, r, f


def _select_optimal(
    per_sentence: List[List[Tuple[int, int]]], e_total: int, beta: float
) -> Tuple[int, int]:
    """Pick per-sentence annotators maximizing the final corpus F exactly.

    F = (1+b2)*TP / (b2*G + E) with E fixed, so the maximization is a linear
    fractional program over independent per-sentence choices; Dinkelbach
    iteration in exact Fraction arithmetic converges to the global optimum
    (an exhaustive assignment search agrees, see tests).
    """
    b2 = Fraction(beta) ** 2
    scale = 1 + b2
    if e_total == 0:
        # no proposed edits: TP is 0 either way, the kindest gold is the smallest
        gold = sum(min(g for _, g in cands) for cands in per_sentence)
        return 0, gold
    lam = Fraction(0)
    for _ in range(10000):
        tp = gold = 0
        for cands in per_sentence:
            best_key = None
            best = (0, 0)
            for k, (c, g) in enumerate(cands):
                key = (scale * c - lam * b2 * g, c, -g, -k)
                if best_key is None or key > best_key:
                    best_key, best = key, (c, g)
            tp += best[0]
            gold += best[1]
        new_lam = (scale * tp) / (b2 * gold + e_total)
        if new_lam == lam:
            return tp, gold
        lam = new_lam
    raise AssertionError("annotator selection failed to converge")


def _select_greedy(
    per_sentence: List[List[Tuple[int, int]]], e_per_sentence: List[int], beta: float
) -> Tuple[int, int]:
    """Sequential per-sentence best-annotator accumulation (order-dependent)."""
    tp = proposed = gold = 0
    for cands, e_s in zip(per_sentence, e_per_sentence):
        best_key = None
        best = (0, 0)
        for k, (c, g) in enumerate(cands):
            _, _, f = _prf(tp + c, proposed + e_s, gold + g, beta)
            key = (f, c, -g, -k)
            if best_key is None or key > best_key:
                best_key, best = key, (c, g)
        tp += best[0]
        gold += best[1]
        proposed += e_s
    return tp, gold


def _score_edit_overlap(
    gold: Sequence[GoldAnnotation],
    hypotheses: Sequence[Sequence[str]],
    beta: float,
    selection: str,
    granularity: str,
) -> GecScore:
    if len(gold) != len(hypotheses):
        raise ValidationError(
            f"{len(gold)} gold annotations but {len(hypotheses)} hypotheses"
        )
    if selection not in ("optimal", "greedy"):
        raise ValidationError(f"unknown annotator selection {selection!r}")
    per_sentence: List[List[Tuple[int, int]]] = []
    e_per_sentence: List[int] = []
    for ann, hyp in zip(gold, hypotheses):
        hyp_edits = frozenset(extract_edits(ann.source_tokens, tuple(hyp), granularity))
        edit_sets = ann.edit_sets() or [frozenset()]
        cands = [(len(hyp_edits & gset), len(gset)) for gset in edit_sets]
        per_sentence.append(cands)
        e_per_sentence.append(len(hyp_edits))
    e_total = sum(e_per_sentence)
    if selection == "optimal":
        tp, g_total = _select_optimal(per_sentence, e_total, beta)
    else:
        tp, g_total = _select_greedy(per_sentence, e_per_sentence, beta)
    p, r, f = _prf(tp, e_total, g_total, beta)
    return GecScore(
        precision=p, recall=r, f_half=f, tp=tp, fp=e_total - tp, fn=g_total - tp
    )


def score_gec(
    gold: Sequence[GoldAnnotation],
    hypotheses: Sequence[Sequence[str]],
    beta: float = 0.5,
    selection: str = "optimal",
) -> GecScore:
    """Score hypotheses against gold annotations, merged span convention.

    Hypothesis edits come from `extract_edits(..., "merged")` and must match a
    gold edit exactly on (start, end, replacement); type labels are ignored.
    selection="optimal" (default) maximizes the final corpus F over annotator
    choices; "greedy" reproduces sequential best-so-far accumulation, which
    can differ on rare inputs.
    """
    return _score_edit_overlap(gold, hypotheses, beta, selection, "merged")


def errant_lite_score(
    gold: Sequence[GoldAnnotation],
    hypotheses: Sequence[Sequence[str]],
    beta: float = 0.5,
    selection: str = "optimal",
) -> GecScore:
    """Like score_gec, but hypothesis spans never merge across op-type changes."""
    return _score_edit_overlap(gold, hypotheses, beta, selection, "split")
