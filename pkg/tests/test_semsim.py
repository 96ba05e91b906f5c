import sys

import pytest
from hypothesis import given, strategies as st

from editkit import (
    LexicalScorer,
    ScorerError,
    SubprocessScorer,
    ValidationError,
    get_scorer,
    lexical_similarity,
    semantic_accuracy,
)

from oracles import char_ngram_cosine_oracle

TOL = 1e-9


def test_lexical_similarity_frozen_values():
    assert lexical_similarity("he goes", "he go") == pytest.approx(
        0.8391463916782737, abs=TOL
    )
    assert lexical_similarity("abc", "xyz") == 0.0


def test_lexical_similarity_identity_and_normalization():
    assert lexical_similarity("same text", "same text") == 1.0
    assert lexical_similarity("Café", "Café") == 1.0  # NFC applied
    assert lexical_similarity("a   b", "a b") == 1.0  # whitespace collapsed


def test_lexical_similarity_empty_conventions():
    assert lexical_similarity("", "") == 1.0
    assert lexical_similarity("   ", "\n") == 1.0
    assert lexical_similarity("", "x") == 0.0
    assert lexical_similarity("x", "   ") == 0.0


texts = st.text(alphabet="ab xy", max_size=20)


@given(texts, texts)
def test_lexical_similarity_matches_oracle_and_is_symmetric(a, b):
    got = lexical_similarity(a, b)
    assert got == pytest.approx(min(1.0, char_ngram_cosine_oracle(a, b)), abs=TOL)
    assert got == lexical_similarity(b, a)
    assert 0.0 <= got <= 1.0


def test_lexical_scorer_protocol():
    scorer = LexicalScorer()
    assert scorer.name == "lexical"
    assert scorer.thread_safe is True
    assert scorer.score("a", "a", "en") == 1.0


ECHO_SCORER = (
    "import json, sys\n"
    "for line in sys.stdin:\n"
    "    req = json.loads(line)\n"
    "    score = 1.0 if req['a'] == req['b'] else 0.25\n"
    "    print(json.dumps({'score': score}), flush=True)\n"
)


def test_subprocess_scorer_round_trip():
    with SubprocessScorer([sys.executable, "-c", ECHO_SCORER]) as scorer:
        assert scorer.thread_safe is False
        assert scorer.name.startswith("subprocess:")
        assert scorer.score("same", "same", "en") == 1.0
        assert scorer.score("one", "two", "de") == 0.25
        assert scorer.score("unicode ü", "unicode ü", "de") == 1.0


def test_subprocess_scorer_rejects_bad_replies():
    with SubprocessScorer([sys.executable, "-c",
                           "import sys\nsys.stdin.readline()\nprint('not json')"]) as scorer:
        with pytest.raises(ScorerError):
            scorer.score("a", "b", "en")


def test_subprocess_scorer_rejects_out_of_range_scores():
    bad = ("import json, sys\n"
           "sys.stdin.readline()\n"
           "print(json.dumps({'score': 1.5}), flush=True)\n")
    with SubprocessScorer([sys.executable, "-c", bad]) as scorer:
        with pytest.raises(ScorerError):
            scorer.score("a", "b", "en")


def test_subprocess_scorer_reports_dead_process():
    with SubprocessScorer([sys.executable, "-c", "pass"]) as scorer:
        with pytest.raises(ScorerError):
            scorer.score("a", "b", "en")


def test_subprocess_scorer_reports_unlaunchable_command():
    scorer = SubprocessScorer(["/no/such/binary-anywhere"])
    with pytest.raises(ScorerError):
        scorer.score("a", "b", "en")


def test_subprocess_scorer_requires_command():
    with pytest.raises(ValidationError):
        SubprocessScorer([])


def test_get_scorer_routing():
    assert isinstance(get_scorer("lexical"), LexicalScorer)
    assert isinstance(get_scorer(None), LexicalScorer)
    sub = get_scorer({"name": "subprocess", "command": ["cat"]})
    assert isinstance(sub, SubprocessScorer)
    with pytest.raises(ValidationError):
        get_scorer("neural")
    with pytest.raises(ValidationError):
        get_scorer({"name": "subprocess", "command": []})


def test_semantic_accuracy_thresholding():
    pairs = [("same", "same"), ("alpha", "omega")]
    assert semantic_accuracy(pairs, threshold=0.99) == 50.0
    assert semantic_accuracy(pairs, threshold=0.0) == 100.0


def test_semantic_accuracy_identity_pairs_are_exactly_100():
    pairs = [(t, t) for t in ("a", "many words here", "ü ö")]
    assert semantic_accuracy(pairs) == 100.0


def test_semantic_accuracy_validation():
    with pytest.raises(ValidationError):
        semantic_accuracy([])
    with pytest.raises(ValidationError):
        semantic_accuracy([("a", "a")], threshold=1.5)


def test_semantic_accuracy_uses_the_given_scorer():
    class Stub:
        name = "stub"
        thread_safe = True

        def score(self, a, b, lang):
            return 0.9 if lang == "de" else 0.1

    assert semantic_accuracy([("x", "y")], scorer=Stub(), lang="de") == 100.0
    assert semantic_accuracy([("x", "y")], scorer=Stub(), lang="en") == 0.0
