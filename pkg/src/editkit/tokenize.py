"""Language-aware tokenization and n-gram counting.

Chinese and Japanese are tokenized per codepoint (no whitespace assumption);
all other languages split on whitespace and then detach punctuation into
separate tokens. Tokenization never invents or drops non-whitespace
characters, so joining the tokens reproduces the input minus its whitespace.

U+001F is reserved as an internal separator (kernels intern token sequences
into joined keys) and is rejected wherever text or tokens enter the system.
"""

import re
from dataclasses import dataclass, field
from typing import Counter as CounterT
from collections import Counter
from typing import Iterator, Sequence, Tuple

from .errors import ValidationError

SEPARATOR = ""

SUPPORTED_LANGS = ("ar", "de", "en", "es", "ja", "ko", "zh")
CHAR_LEVEL_LANGS = frozenset({"ja", "zh"})

# Within a whitespace-delimited chunk every character is either a word
# character or not, so this pattern partitions the chunk exactly.
_WORD_OR_PUNCT = re.compile(r"\w+|\W", re.UNICODE)


@dataclass(frozen=True)
class TokenSeq:
    """An immutable token sequence tagged with its language and scheme."""

    tokens: Tuple[str, ...]
    lang: str
    scheme: str  # "char" or "word"

    def __post_init__(self):
        for t in self.tokens:
            if not t:
                raise ValidationError("empty token in TokenSeq")
            if SEPARATOR in t:
                raise ValidationError("token contains reserved separator U+001F")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def scheme_for(lang: str) -> str:
    """Tokenization scheme for a language; unknown (extension) languages are word-level."""
    return "char" if lang in CHAR_LEVEL_LANGS else "word"


def tokenize(text: str, lang: str, lowercase: bool = False) -> TokenSeq:
    """Tokenize `text` under the scheme for `lang`.

    Raises ValidationError if the text contains the reserved U+001F separator.
    Case is preserved unless `lowercase` is set.
    """
    if SEPARATOR in text:
        raise ValidationError("text contains reserved separator U+001F")
    if lowercase:
        text = text.lower()
    scheme = scheme_for(lang)
    if scheme == "char":
        tokens = tuple(ch for ch in text if not ch.isspace())
    else:
        tokens = tuple(
            tok for chunk in text.split() for tok in _WORD_OR_PUNCT.findall(chunk)
        )
    return TokenSeq(tokens, lang, scheme)


@dataclass
class NGramBag:
    """Multiset of the order-`n` n-grams of one token sequence.

    `total` is the number of n-gram positions, max(0, len(tokens) - n + 1),
    which is the precision denominator used by the overlap metrics.
    """

    n: int
    counts: CounterT[Tuple[str, ...]] = field(default_factory=Counter)
    total: int = 0


def ngrams(tokens: Sequence[str], n: int) -> NGramBag:
    """Count the n-grams of `tokens`. Requires n >= 1."""
    if n < 1:
        raise ValidationError(f"n-gram order must be >= 1, got {n}")
    seq = tuple(tokens)
    counts: CounterT[Tuple[str, ...]] = Counter(
        seq[i : i + n] for i in range(len(seq) - n + 1)
    )
    return NGramBag(n=n, counts=counts, total=max(0, len(seq) - n + 1))
