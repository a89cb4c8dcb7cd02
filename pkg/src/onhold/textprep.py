"""Comment text normalization: abstraction, cleaning, lemmatization.

The pipeline turns raw comment text into a flat token sequence:
abstract issue ids/URLs, lowercase, strip special characters, split on
whitespace, lemmatize each token.  Stop words are deliberately kept --
words like "when" and "until" carry the waiting-condition signal this
package exists to detect.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .issues import Patterns, abstract_terms

TokenSequence = list[str]

_SPECIAL_CHARS = re.compile(r"[^A-Za-z0-9]+")
_LOWER_ALPHA = re.compile(r"^[a-z]+$")

_VOWELS = frozenset("aeiou")
# Undoubling skips l/s/z so "fall"/"miss"/"buzz" style stems survive.
_NO_UNDOUBLE = frozenset("lsz")


def clean(text: str) -> str:
    """Replace every run of non-alphanumeric characters with one space.

    Runs become a single space (deleting them outright would fuse
    neighbouring words); leading/trailing runs are trimmed.
    """
    return _SPECIAL_CHARS.sub(" ", text).strip()


@lru_cache(maxsize=1)
def _default_lemma_table() -> dict[str, str]:
    data = (
        resources.files("onhold")
        .joinpath("data/lemma_exceptions.tsv")
        .read_text("utf-8")
    )
    return _parse_lemma_table(data)


def _parse_lemma_table(data: str) -> dict[str, str]:
    table: dict[str, str] = {}
    for lineno, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"lemma table line {lineno}: expected 'token<TAB>lemma'")
        table[parts[0]] = parts[1]
    return table


def load_lemma_table(path: str | Path | None = None) -> dict[str, str]:
    """Load a token->lemma table; ``None`` loads the bundled one."""
    if path is None:
        return dict(_default_lemma_table())
    return _parse_lemma_table(Path(path).read_text("utf-8"))


def _is_vowel(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return True
    # y acts as a vowel when it follows a consonant ("try", "style").
    return c == "y" and i > 0 and not _is_vowel(word, i - 1)


def _measure(stem: str) -> int:
    """Number of vowel->consonant transitions (Porter's m)."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        vowel = _is_vowel(stem, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    return (
        not _is_vowel(stem, len(stem) - 3)
        and _is_vowel(stem, len(stem) - 2)
        and not _is_vowel(stem, len(stem) - 1)
        and stem[-1] not in "wxy"
    )


def _repair_stem(stem: str) -> str:
    """Fix up a stem after removing -ed/-ing/-er/-est."""
    if (
        len(stem) >= 4
        and stem[-1] == stem[-2]
        and not _is_vowel(stem, len(stem) - 1)
        and stem[-1] not in _NO_UNDOUBLE
    ):
        return stem[:-1]          # stopped -> stop
    if stem[-1] in "uvz":
        return stem + "e"         # remov -> remove, issu -> issue, siz -> size
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"         # mak -> make, writ -> write
    return stem


def _strip_once(token: str) -> str:
    if len(token) <= 3:
        return token
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("ied") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("es") and token[:-2].endswith(("ss", "x", "zz", "ch", "sh")):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    if token.endswith("ed") and len(token) >= 5 and token[-3] != "e":
        return _repair_stem(token[:-2])
    if token.endswith("ing") and len(token) >= 6:
        return _repair_stem(token[:-3])
    if token.endswith(("er", "est")):
        cut = 2 if token.endswith("er") else 3
        if len(token) - cut >= 3:
            return _repair_stem(token[:-cut])
    return token


def lemmatize(token: str, table: dict[str, str] | None = None) -> str:
    """Map a lowercase alphabetic token to its lemma.

    Dictionary lemmas (irregular verbs/nouns plus guarded common words)
    win; otherwise suffix rules for plurals, -ed, -ing and comparatives
    apply until a fixed point, which makes the function idempotent.
    Tokens outside [a-z]+ pass through unchanged.
    """
    if not _LOWER_ALPHA.match(token):
        return token
    lemmas = table if table is not None else _default_lemma_table()
    if token in lemmas:
        return lemmas[token]
    current = token
    for _ in range(10):
        stripped = _strip_once(current)
        if stripped == current:
            return current
        if stripped in lemmas:
            return lemmas[stripped]
        current = stripped
    return current


def preprocess(
    comment_text: str,
    patterns: Patterns,
    lemma_table: dict[str, str] | None = None,
) -> TokenSequence:
    """Full pipeline: abstract, lowercase, clean, tokenize, lemmatize."""
    abstracted = abstract_terms(comment_text, patterns)
    cleaned = clean(abstracted.lower())
    return [lemmatize(tok, lemma_table) for tok in cleaned.split()]
