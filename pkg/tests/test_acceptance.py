"""Release gate: one test per shipped guarantee.

Each test here pins down one user-facing contract of the package — exact
metric values against independent oracles, determinism of dataset builds,
optimality of the grammar-scoring assignment, and an end-to-end CLI run on
the bundled corpora.  The terminal summary prints one PASS/FAIL line per
criterion (see conftest.py).
"""

from __future__ import annotations

import json
import math
import random
import time
import warnings

import pytest

from editkit import (
    align,
    apply_edits,
    build_dataset,
    extract_edits,
    harmonic_mean,
    ks_test,
    load_bank,
    parse_m2,
    read_parallel,
    sample_instruction,
    score_gec,
    task_aggregate,
    validate_bank,
    write_dataset,
    BuildConfig,
    BuildWarning,
    EditSpan,
    GoldAnnotation,
    GoldEdit,
)
from editkit.cli import main

import oracles
from test_metrics import BLEU_CASES, GLEU_CASES, SARI_CASES, T, _quiet

from editkit.metrics import MetricConfig, bleu, gleu, sari

pytestmark = pytest.mark.acceptance


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _rows_by_key(report: dict) -> dict:
    return {(row["system"], row["dataset"]): row for row in report["rows"]}


def _write_outputs(path, pairs) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for ex_id, hyp in pairs:
            handle.write(json.dumps({"id": ex_id, "hypothesis": hyp}) + "\n")


# ---------------------------------------------------------------------------
# 1. copy baseline on paraphrasing data scores identically zero
# ---------------------------------------------------------------------------


def test_criterion_1_copy_baseline_paraphrase_identity(tmp_path, capsys):
    """Copying the source must yield diversity 0.0 and semantic accuracy 100.0."""
    nouns = ("committee", "museum", "report", "garden", "engine", "library", "method")
    verbs = ("described", "presented", "organized", "reviewed", "improved")
    corpus = tmp_path / "para.jsonl"
    with open(corpus, "w", encoding="utf-8") as handle:
        for i in range(1000):
            src = (
                f"the {nouns[i % len(nouns)]} {verbs[i % len(verbs)]} "
                f"the plan {i} in detail ."
            )
            handle.write(
                json.dumps(
                    {
                        "id": f"p{i:04d}",
                        "lang": "en",
                        "task": "paraphrasing",
                        "source": src,
                        "targets": [f"the plan {i} was handled carefully ."],
                    }
                )
                + "\n"
            )
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "out_dir": str(tmp_path / "out"),
                "corpora": [
                    {
                        "task": "paraphrasing",
                        "lang": "en",
                        "path": str(corpus),
                        "split": "test",
                    }
                ],
            }
        )
    )
    copy_out = tmp_path / "copy.jsonl"

    started = time.monotonic()
    assert main(["baseline", "copy", "--corpus", str(corpus), "--out", str(copy_out)]) == 0
    assert main(["evaluate", "--config", str(config), "--outputs", f"copy={copy_out}"]) == 0
    elapsed = time.monotonic() - started
    capsys.readouterr()

    report = json.loads((tmp_path / "out" / "report.json").read_text())
    row = _rows_by_key(report)[("copy", "paraphrasing/en/test")]
    assert row["n_examples"] == 1000
    assert row["metrics"]["diversity"] == 0.0
    assert row["metrics"]["semantic_accuracy"] == 100.0
    assert row["aggregate"]["value"] == 0.0
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# 2. frozen metric fixtures agree with a brute-force oracle
# ---------------------------------------------------------------------------


def test_criterion_2_metric_fixtures_match_oracle():
    """BLEU/GLEU/SARI fixtures agree with the reference implementation to 1e-9."""
    total = len(BLEU_CASES) + len(GLEU_CASES) + len(SARI_CASES)
    assert total >= 30

    for name, hyp, refs, cfg_kwargs, expected in BLEU_CASES:
        cfg = MetricConfig(**cfg_kwargs)
        got = _quiet(bleu, T(hyp), [T(r) for r in refs], cfg)
        want = oracles.bleu_oracle(
            T(hyp),
            [T(r) for r in refs],
            n_max=cfg.n_max,
            smoothing=cfg.smoothing,
            smoothing_k=cfg.smoothing_k,
        )
        assert got == pytest.approx(expected, abs=1e-9), name
        assert got == pytest.approx(want, abs=1e-9), name

    # The canonical two-thirds-of-bigrams case must be part of the table.
    assert any(
        expected == pytest.approx(57.735026918962575, abs=1e-9)
        for _, _, _, _, expected in BLEU_CASES
    )

    for name, hyp, src, refs, expected in GLEU_CASES:
        got = _quiet(gleu, T(hyp), T(src), [T(r) for r in refs])
        want = oracles.gleu_oracle(T(hyp), T(src), [T(r) for r in refs])
        assert got == pytest.approx(expected, abs=1e-9), name
        assert got == pytest.approx(want, abs=1e-9), name

    for name, src, hyp, refs, expected in SARI_CASES:
        got = _quiet(sari, T(src), T(hyp), [T(r) for r in refs])
        want = oracles.sari_oracle(T(src), T(hyp), [T(r) for r in refs])
        for got_part, want_part, frozen in zip(
            (got.add, got.keep, got.delete, got.total), want, expected
        ):
            assert got_part == pytest.approx(frozen, abs=1e-9), name
            assert got_part == pytest.approx(want_part, abs=1e-9), name


# ---------------------------------------------------------------------------
# 3. annotator selection equals exhaustive enumeration
# ---------------------------------------------------------------------------


def _random_small_corpus(rng: random.Random):
    """A corpus of up to 6 sentences, up to 8 tokens, up to 2 annotators."""
    gold, hypotheses = [], []
    for s in range(rng.randint(1, 6)):
        n = rng.randint(2, 8)
        source = tuple(f"s{s}w{i}" for i in range(n))
        even = list(range(0, n, 2))
        hyp_positions = sorted(rng.sample(even, rng.randint(0, len(even))))
        hyp = list(source)
        hyp_edits = []
        for pos in hyp_positions:
            hyp[pos] = f"h{s}x{pos}"
            hyp_edits.append(EditSpan(pos, pos + 1, (f"h{s}x{pos}",)))
        annotators = {}
        for a in range(rng.randint(0, 2)):
            agreed = [e for e in hyp_edits if rng.random() < 0.6]
            extra_positions = [p for p in even if p not in hyp_positions]
            extras = [
                EditSpan(p, p + 1, (f"a{a}x{p}",))
                for p in extra_positions
                if rng.random() < 0.4
            ]
            annotators[a] = tuple(GoldEdit(e) for e in agreed + extras)
        gold.append(GoldAnnotation(source_tokens=source, annotators=annotators))
        hypotheses.append(tuple(hyp))
    return gold, hypotheses


def test_criterion_3_gec_score_equals_exhaustive_enumeration():
    """score_gec reproduces best-assignment F0.5 on 200 random corpora."""
    rng = random.Random(7013)
    started = time.monotonic()
    mismatches = 0
    for _ in range(200):
        gold, hypotheses = _random_small_corpus(rng)
        got = score_gec(gold, hypotheses).f_half
        sentences = []
        for ann, hyp in zip(gold, hypotheses):
            hyp_edits = frozenset(
                (e.start, e.end, e.replacement)
                for e in extract_edits(ann.source_tokens, hyp)
            )
            annotator_sets = [
                frozenset((s.start, s.end, s.replacement) for s in edit_set)
                for edit_set in ann.edit_sets()
            ]
            sentences.append((hyp_edits, annotator_sets))
        want = oracles.exhaustive_gec_oracle(sentences)
        if abs(got - want) > 1e-12:
            mismatches += 1
    elapsed = time.monotonic() - started
    assert mismatches == 0
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 4. edit extraction round-trips and alignment cost is optimal
# ---------------------------------------------------------------------------


def test_criterion_4_alignment_round_trip_and_cost():
    """apply(extract(s, h), s) == h on 10^4 pairs; cost matches the DP oracle."""
    rng = random.Random(9241)
    vocab = ("a", "b", "c", "d", "e")

    def random_tokens(max_len: int):
        return tuple(rng.choice(vocab) for _ in range(rng.randint(0, max_len)))

    def mutate(tokens):
        out = list(tokens)
        for _ in range(rng.randint(0, 4)):
            op = rng.randrange(3)
            if op == 0 and out:
                out[rng.randrange(len(out))] = rng.choice(vocab)
            elif op == 1 and out:
                del out[rng.randrange(len(out))]
            else:
                out.insert(rng.randint(0, len(out)), rng.choice(vocab))
        return tuple(out)

    for i in range(10_000):
        source = random_tokens(14)
        hyp = mutate(source) if i % 2 else random_tokens(14)
        granularity = "merged" if i % 2 else "split"
        edits = extract_edits(source, hyp, granularity=granularity)
        assert apply_edits(source, edits) == hyp

    for _ in range(1_000):
        a = random_tokens(12)
        b = random_tokens(12)
        _, cost = align(a, b)
        assert cost == oracles.lev_cost_oracle(a, b)


# ---------------------------------------------------------------------------
# 5. KS statistic against brute force; p-value behaviour
# ---------------------------------------------------------------------------


def test_criterion_5_ks_statistic_and_p_value():
    """D matches the oracle to 1e-12; p falls monotonically in D*sqrt(nm/(n+m))."""
    rng = random.Random(5521)
    results = []
    for _ in range(500):
        a = [rng.randint(0, 15) for _ in range(rng.randint(1, 50))]
        b = [rng.randint(0, 15) for _ in range(rng.randint(1, 50))]
        res = ks_test(a, b)
        assert abs(res.d - oracles.ks_d_oracle(a, b)) <= 1e-12
        effective = math.sqrt(res.n_a * res.n_b / (res.n_a + res.n_b))
        results.append((res.d * effective, res.p_value))

    results.sort(key=lambda item: item[0])
    for (y_lo, p_lo), (y_hi, p_hi) in zip(results, results[1:]):
        if y_hi > y_lo + 1e-12:
            assert p_hi <= p_lo + 1e-12
        else:
            assert abs(p_hi - p_lo) <= 1e-12

    a = [0] * 540 + [1] * 1460
    b = [1] * 2000
    res = ks_test(a, b)
    assert res.d == 0.27
    assert res.n_a == res.n_b == 2000
    assert res.p_value < 0.001


# ---------------------------------------------------------------------------
# 6. dataset builds are deterministic with the pinned no-edit share
# ---------------------------------------------------------------------------


def test_criterion_6_builder_determinism_and_noedit_share(toy_dir, tmp_path):
    """398 examples -> 398 records with exactly 80 no-edit pairs, byte-stable."""
    examples = list(read_parallel(toy_dir / "gec_es.jsonl"))
    assert len(examples) == 398
    config = BuildConfig(combos=(("gec", "es"),), noedit_fraction=0.2)

    def quiet_build():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BuildWarning)
            return build_dataset({("gec", "es"): examples}, config)

    dataset = quiet_build()

    assert len(dataset.records) == 398
    noedit = [r for r in dataset.records if r.noedit]
    assert len(noedit) == round(0.2 * 398) == 80
    for record in noedit:
        assert record.output == record.source
        assert record.id.endswith("|noedit")
    assert dataset.manifest["combos"]["gec/es"] == {
        "count": 398,
        "noedit": 80,
        "available": 398,
    }

    first = tmp_path / "first"
    second = tmp_path / "second"
    write_dataset(quiet_build(), first)
    write_dataset(quiet_build(), second)
    assert (first / "dataset.jsonl").read_bytes() == (second / "dataset.jsonl").read_bytes()
    assert (first / "manifest.json").read_bytes() == (second / "manifest.json").read_bytes()

    # Language draws under the random setting are uniform: chi-square over
    # 10^4 draws stays below the alpha=0.01 critical value for 6 degrees of
    # freedom (16.8119).
    bank = load_bank()
    languages = bank.languages("gec")
    assert len(languages) == 7
    rng = random.Random(4099)
    counts = {lang: 0 for lang in languages}
    draws = 10_000
    for _ in range(draws):
        instruction = sample_instruction(bank, "gec", "es", "random", rng)
        counts[instruction.lang] += 1
    expected = draws / len(languages)
    chi_square = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi_square < 16.8119


# ---------------------------------------------------------------------------
# 7. the bundled instruction bank satisfies its contract
# ---------------------------------------------------------------------------


def test_criterion_7_instruction_bank_contract():
    """21 task/language combinations, each with 14..27 instructions."""
    bank = load_bank()
    result = validate_bank(bank)
    assert result["problems"] == []
    assert len(result["counts"]) == 21
    for combo, count in result["counts"].items():
        assert 14 <= count <= 27, combo
    # The grand total is reported for inspection and must be internally
    # consistent; no particular value is asserted.
    assert result["total"] == sum(result["counts"].values())
    assert result["total"] == bank.total()


# ---------------------------------------------------------------------------
# 8. aggregation identities
# ---------------------------------------------------------------------------


def test_criterion_8_harmonic_mean_identities():
    """HM(x, x) == x, HM(0, x) == 0, HM(20, 80) == 32; copy aggregate is 0."""
    for x in (0.5, 1.0, 7.25, 32.0, 99.9, 100.0):
        assert harmonic_mean([x, x]) == pytest.approx(x, abs=1e-12)
    for x in (0.0, 1.0, 55.5, 100.0):
        assert harmonic_mean([0.0, x]) == 0.0
    assert harmonic_mean([20.0, 80.0]) == 32.0

    rng = random.Random(8080)
    for _ in range(500):
        values = [rng.uniform(0.01, 100.0) for _ in range(rng.randint(1, 6))]
        hm = harmonic_mean(values)
        assert min(values) - 1e-9 <= hm <= sum(values) / len(values) + 1e-9

    copy_row = task_aggregate(
        "paraphrasing", {"diversity": 0.0, "semantic_accuracy": 100.0}
    )
    assert copy_row.value == 0.0


# ---------------------------------------------------------------------------
# 9. end-to-end run over the bundled corpora
# ---------------------------------------------------------------------------


def test_criterion_9_end_to_end_desk_run(toy_dir, tmp_path, capsys):
    """Copy baseline vs. an editor that applies the gold edits, under 30 s."""
    started = time.monotonic()

    corpora = [
        ("gec", "de", "gec_de.jsonl", "gec_de.m2"),
        ("gec", "ja", "gec_ja.jsonl", None),
        ("simplification", "en", "simp_en.jsonl", None),
        ("paraphrasing", "en", "para_en.jsonl", None),
    ]
    config_entries = []
    for task, lang, name, m2_name in corpora:
        entry = {"task": task, "lang": lang, "path": str(toy_dir / name)}
        if m2_name:
            entry["m2_path"] = str(toy_dir / m2_name)
        config_entries.append(entry)
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps({"out_dir": str(tmp_path / "out"), "corpora": config_entries})
    )

    # Copy baseline through the CLI, one file per corpus, then merged.
    copy_parts = []
    for task, lang, name, _ in corpora:
        part = tmp_path / f"copy_{task}_{lang}.jsonl"
        assert (
            main(["baseline", "copy", "--corpus", str(toy_dir / name), "--out", str(part)])
            == 0
        )
        copy_parts.append(part)
    copy_out = tmp_path / "copy.jsonl"
    copy_out.write_text("".join(p.read_text() for p in copy_parts))

    # Scripted editor: applies the first annotator's gold edits for gec/de,
    # and emits the first reference elsewhere.
    editor_pairs = []
    de_examples = list(read_parallel(toy_dir / "gec_de.jsonl"))
    de_gold = list(parse_m2(toy_dir / "gec_de.m2"))
    assert len(de_examples) == len(de_gold)
    for example, annotation in zip(de_examples, de_gold):
        spans = [edit.span for edit in annotation.annotators.get(0, ())]
        fixed = apply_edits(annotation.source_tokens, spans)
        editor_pairs.append((example.id, " ".join(fixed)))
    for task, lang, name, _ in corpora[1:]:
        for example in read_parallel(toy_dir / name):
            editor_pairs.append((example.id, example.targets[0]))
    editor_out = tmp_path / "editor.jsonl"
    _write_outputs(editor_out, editor_pairs)

    assert (
        main(
            [
                "evaluate",
                "--config",
                str(config),
                "--outputs",
                f"copy={copy_out}",
                f"editor={editor_out}",
                "--workers",
                "1",
            ]
        )
        == 0
    )
    capsys.readouterr()

    report = json.loads((tmp_path / "out" / "report.json").read_text())
    rows = _rows_by_key(report)

    editor_de = rows[("editor", "gec/de/test")]
    assert editor_de["metrics"]["f_half"] == 1.0
    assert editor_de["metrics"]["precision"] == 1.0
    assert editor_de["metrics"]["recall"] == 1.0

    editor_ja = rows[("editor", "gec/ja/test")]
    assert editor_ja["metrics"]["gleu"] == 100.0
    assert editor_ja["headline_value"] == 100.0

    editor_simp = rows[("editor", "simplification/en/test")]
    copy_simp = rows[("copy", "simplification/en/test")]
    assert editor_simp["metrics"]["sari"] >= copy_simp["metrics"]["sari"]

    # The copy system does no editing, so it cannot beat the editor's gec F.
    copy_de = rows[("copy", "gec/de/test")]
    assert copy_de["metrics"]["f_half"] <= editor_de["metrics"]["f_half"]

    elapsed = time.monotonic() - started
    assert elapsed < 30.0
