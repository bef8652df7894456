"""Transcript text normalization for TTS prompts.

Rules: expand abbreviations and integer numerals, handle punctuation per
policy, collapse whitespace, uppercase. Annotation tags are expected to be
stripped upstream (corpus triage); this stage only sees plain text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

STRIP = "strip"
KEEP_SENTENCE_FINAL = "keep_sentence_final"

_NUMBER_RE = re.compile(r"^(?:\d{1,3}(?:,\d{3})+|\d+)$")
_FINAL_PUNCT_RE = re.compile(r"([.!?])[\s\"'\)\]]*$")
# apostrophe kept only between word characters
_EDGE_APOSTROPHE_RE = re.compile(r"(?<![0-9A-Za-z])'|'(?![0-9A-Za-z])")
_NON_WORD_RE = re.compile(r"[^0-9A-Za-z'À-ɏ]+")

_ONES = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "twenty thirty forty fifty sixty seventy eighty ninety".split()

MAX_SPELLED_NUMBER = 999_999


def int_to_words(n: int) -> str:
    """Spell out 0..999,999 in plain English (no hyphens, no 'and')."""
    if n < 0 or n > MAX_SPELLED_NUMBER:
        raise ValueError(f"{n} outside spellable range")
    if n < 20:
        return _ONES[n]
    if n < 100:
        tens, rest = divmod(n, 10)
        word = _TENS[tens - 2]
        return f"{word} {_ONES[rest]}" if rest else word
    if n < 1000:
        hundreds, rest = divmod(n, 100)
        word = f"{_ONES[hundreds]} hundred"
        return f"{word} {int_to_words(rest)}" if rest else word
    thousands, rest = divmod(n, 1000)
    word = f"{int_to_words(thousands)} thousand"
    return f"{word} {int_to_words(rest)}" if rest else word


def load_abbreviations(path: str | Path) -> dict[str, str]:
    """Two-column UTF-8 file: key, then the (possibly multi-word) expansion."""
    table = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, expansion = line.partition(" ")
        key = key.lower()
        if key in table:
            raise ValueError(f"duplicate abbreviation key: {key}")
        table[key] = expansion.strip()
    return table


def default_abbreviations() -> dict[str, str]:
    text = resources.files("ttskit.data").joinpath("abbreviations.txt").read_text("utf-8")
    table = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, _, expansion = line.partition(" ")
            table[key.lower()] = expansion.strip()
    return table


@dataclass(frozen=True)
class NormConfig:
    """Keys ending in '.' are number-prefix abbreviations: they match only
    when written with the period AND followed by a digit, so 'no. 5' expands
    while a sentence-final 'no.' stays the word 'no'."""

    abbreviations: dict[str, str] = field(default_factory=default_abbreviations)
    punctuation_policy: str = STRIP
    uppercase: bool = True


def _expand_token(tok: str, abbr: dict[str, str], next_tok: str | None = None) -> list[str]:
    # strip leading/trailing non-word chars, remembering a trailing period
    i, j = 0, len(tok)
    while i < j and not (tok[i].isalnum() or tok[i] == "'"):
        i += 1
    had_dot = False
    while j > i and not (tok[j - 1].isalnum() or tok[j - 1] == "'"):
        if tok[j - 1] == ".":
            had_dot = True
        j -= 1
    core = tok[i:j]
    if not core:
        return []

    key = core.lower()
    # dotted keys ("no." -> number) are prefix abbreviations: they only expand
    # when a digit follows, so a sentence-final "no." stays the word "no"
    if had_dot and key + "." in abbr and next_tok is not None and next_tok[:1].isdigit():
        return abbr[key + "."].split()
    if key in abbr:
        return abbr[key].split()
    if _NUMBER_RE.match(core):
        value = int(core.replace(",", ""))
        if value <= MAX_SPELLED_NUMBER:
            return int_to_words(value).split()
        return [core]

    # break on interior punctuation (apostrophes survive inside words)
    stripped = _EDGE_APOSTROPHE_RE.sub("", core)
    stripped = _NON_WORD_RE.sub(" ", stripped)
    parts = stripped.split()
    if parts == [core]:
        return [core]
    out: list[str] = []
    for idx, part in enumerate(parts):
        following = parts[idx + 1] if idx + 1 < len(parts) else next_tok
        out.extend(_expand_token(part, abbr, following))
    return out


def normalize_text(raw: str, cfg: NormConfig | None = None) -> str:
    """Normalize one line of transcript text. Idempotent."""
    cfg = cfg or NormConfig()

    final_punct = ""
    if cfg.punctuation_policy == KEEP_SENTENCE_FINAL:
        m = _FINAL_PUNCT_RE.search(raw)
        if m:
            final_punct = m.group(1)

    words: list[str] = []
    tokens = raw.split()
    for idx, tok in enumerate(tokens):
        next_tok = tokens[idx + 1] if idx + 1 < len(tokens) else None
        words.extend(_expand_token(tok, cfg.abbreviations, next_tok))

    out = " ".join(words)
    if final_punct and out:
        out += final_punct
    if cfg.uppercase:
        out = out.upper()
    return out
