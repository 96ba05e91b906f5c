"""Score aggregation and distribution comparison.

Task-level headline numbers are harmonic means of a task's two component
metrics, all on a 0..100 scale (edit-overlap F values are scaled by 100
before combining). The harmonic mean is pulled to zero by any non-positive
component, which is the intended behaviour: a system that fails one axis
completely should not look half-good.

Output length distributions are compared with the two-sample
Kolmogorov-Smirnov test using the asymptotic two-sided p-value.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence

from .errors import ValidationError
from .tokenize import tokenize

TASK_COMPONENTS = {
    "gec": ("f_half", "gleu"),
    "simplification": ("sari", "bleu"),
    "paraphrasing": ("diversity", "semantic_accuracy"),
}


def harmonic_mean(values: Sequence[float]) -> float:
    """k / sum(1/v). Any value <= 0 collapses the mean to 0."""
    if not values:
        raise ValidationError("harmonic_mean needs at least one value")
    if any(v <= 0 for v in values):
        return 0.0
    return len(values) / sum(1.0 / v for v in values)


@dataclass(frozen=True)
class TaskAggregate:
    task: str
    value: float
    components: Dict[str, float]


def task_aggregate(task: str, components: Mapping[str, float]) -> TaskAggregate:
    """Combine a task's two component metrics into one headline value.

    gec: HM(f_half * 100, gleu); simplification: HM(sari, bleu);
    paraphrasing: HM(diversity, semantic_accuracy). Raises if a required
    component is missing, naming it.
    """
    if task not in TASK_COMPONENTS:
        raise ValidationError(f"unknown task {task!r}")
    required = TASK_COMPONENTS[task]
    for key in required:
        if key not in components:
            raise ValidationError(f"task {task!r} aggregate is missing component {key!r}")
    first, second = (components[k] for k in required)
    if task == "gec":
        first *= 100.0  # f_half lives on 0..1
    value = harmonic_mean([first, second])
    return TaskAggregate(task=task, value=value, components=dict(components))


@dataclass(frozen=True)
class KsResult:
    d: float
    p_value: float
    n_a: int
    n_b: int


def _kolmogorov_sf(y: float) -> float:
    """Two-sided asymptotic survival function 2*sum((-1)^(k-1) exp(-2 k^2 y^2)),
    truncated once a term drops below 1e-10 of the running sum."""
    if y < 1e-6:
        return 1.0
    total = 0.0
    k = 1
    while k < 10_000_000:
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * y * y)
        total += term
        if abs(term) <= 1e-10 * max(abs(total), 1e-300):
            break
        k += 1
    return min(1.0, max(0.0, total))


def ks_test(a: Sequence[float], b: Sequence[float]) -> KsResult:
    """Two-sample KS test: exact D, asymptotic p with effective size nm/(n+m)."""
    if not a or not b:
        raise ValidationError("ks_test needs two non-empty samples")
    xs, ys = sorted(a), sorted(b)
    n_a, n_b = len(xs), len(ys)
    i = j = 0
    d = 0.0
    while i < n_a and j < n_b:
        v = xs[i] if xs[i] <= ys[j] else ys[j]
        while i < n_a and xs[i] <= v:
            i += 1
        while j < n_b and ys[j] <= v:
            j += 1
        gap = abs(i / n_a - j / n_b)
        if gap > d:
            d = gap
    effective = math.sqrt(n_a * n_b / (n_a + n_b))
    return KsResult(d=d, p_value=_kolmogorov_sf(d * effective), n_a=n_a, n_b=n_b)


def length_distribution(
    texts: Iterable[str], lang: str, lowercase: bool = False
) -> List[int]:
    """Token count per text under the language's tokenization scheme."""
    return [len(tokenize(t, lang, lowercase)) for t in texts]
