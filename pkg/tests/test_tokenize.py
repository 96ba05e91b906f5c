import pytest
from collections import Counter
from hypothesis import given, strategies as st

from editkit import (
    SEPARATOR,
    SUPPORTED_LANGS,
    NGramBag,
    TokenSeq,
    ValidationError,
    ngrams,
    scheme_for,
    tokenize,
)

from oracles import ngram_counts


def test_word_scheme_splits_on_whitespace_and_detaches_punctuation():
    ts = tokenize("He didn't go.", "en")
    assert ts.tokens == ("He", "didn", "'", "t", "go", ".")
    assert ts.scheme == "word"
    assert ts.lang == "en"


def test_word_scheme_keeps_case_by_default_and_lowercases_on_request():
    assert tokenize("The Cat", "en").tokens == ("The", "Cat")
    assert tokenize("The Cat", "en", lowercase=True).tokens == ("the", "cat")


def test_word_scheme_handles_multiple_adjacent_punctuation():
    assert tokenize("wait!!", "en").tokens == ("wait", "!", "!")


def test_char_scheme_for_japanese_and_chinese():
    ts = tokenize("猫が好き", "ja")
    assert ts.tokens == ("猫", "が", "好", "き")
    assert ts.scheme == "char"
    assert tokenize("他 的猫", "zh").tokens == ("他", "的", "猫")


def test_char_scheme_drops_all_whitespace_kinds():
    assert tokenize("猫　が\nい る", "ja").tokens == ("猫", "が", "い", "る")


def test_arabic_word_scheme_detaches_trailing_punctuation():
    ts = tokenize("ذهب إلى المدرسة.", "ar")
    assert ts.tokens[-1] == "."
    assert ts.tokens[-2] == "المدرسة"


def test_scheme_for_known_langs():
    assert scheme_for("ja") == "char"
    assert scheme_for("zh") == "char"
    for lang in ("ar", "de", "en", "es", "ko"):
        assert scheme_for(lang) == "word"


def test_scheme_for_extension_lang_falls_back_to_word():
    assert scheme_for("fr") == "word"
    assert tokenize("bonjour le monde", "fr").tokens == ("bonjour", "le", "monde")


def test_empty_text_gives_empty_sequence():
    assert tokenize("", "en").tokens == ()
    assert tokenize("   \n ", "en").tokens == ()
    assert len(tokenize("", "ja")) == 0


def test_separator_rejected_in_text():
    with pytest.raises(ValidationError):
        tokenize(f"a{SEPARATOR}b", "en")


def test_separator_and_empty_tokens_rejected_in_token_seq():
    with pytest.raises(ValidationError):
        TokenSeq((f"a{SEPARATOR}",), "en", "word")
    with pytest.raises(ValidationError):
        TokenSeq(("a", ""), "en", "word")


def test_token_seq_is_a_sequence():
    ts = tokenize("a b c", "en")
    assert len(ts) == 3
    assert list(ts) == ["a", "b", "c"]
    assert ts[1] == "b"
    assert ts[1:] == ("b", "c")


@given(st.text(alphabet=st.characters(blacklist_characters=SEPARATOR), max_size=80),
       st.sampled_from(SUPPORTED_LANGS))
def test_tokens_preserve_all_non_whitespace_characters(text, lang):
    ts = tokenize(text, lang)
    assert "".join(ts.tokens) == "".join(text.split())


@given(st.text(alphabet=st.characters(blacklist_characters=SEPARATOR), max_size=80),
       st.sampled_from(SUPPORTED_LANGS))
def test_tokenize_is_idempotent_on_its_own_join(text, lang):
    ts = tokenize(text, lang)
    again = tokenize(" ".join(ts.tokens), lang)
    assert again.tokens == ts.tokens


def test_ngrams_counts_and_total():
    bag = ngrams(("a", "b", "a", "b"), 2)
    assert bag.n == 2
    assert bag.total == 3
    assert bag.counts == Counter({("a", "b"): 2, ("b", "a"): 1})


def test_ngrams_order_longer_than_sequence_is_empty():
    bag = ngrams(("a",), 3)
    assert bag.total == 0
    assert bag.counts == Counter()


def test_ngrams_rejects_nonpositive_order():
    with pytest.raises(ValidationError):
        ngrams(("a",), 0)


@given(st.lists(st.sampled_from("abcd"), max_size=12), st.integers(1, 4))
def test_ngrams_match_bruteforce(tokens, n):
    bag = ngrams(tokens, n)
    assert bag.counts == ngram_counts(tokens, n)
    assert bag.total == max(0, len(tokens) - n + 1)
    assert sum(bag.counts.values()) == bag.total


def test_ngram_bag_defaults():
    bag = NGramBag(n=1)
    assert bag.total == 0 and not bag.counts
