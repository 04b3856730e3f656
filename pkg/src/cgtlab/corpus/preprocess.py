"""Text normalization pipeline.

Stage order is fixed: strip URLs, lowercase, split on non-alphanumeric
boundaries (apostrophes join word parts), drop symbol-only tokens, drop
short tokens, drop stoplisted tokens, lemmatize, drop numeric tokens.
After lemmatization the short/stoplist filters are re-applied so the
pipeline is idempotent: a lemma that lands on a stoplist entry (e.g.
"theses" -> "these") must not survive a pass its own output would fail.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from ..seeds import digest_json

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
# alphanumeric runs, optionally joined by single apostrophes ("o'clock")
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*", re.UNICODE)
_ALNUM_RE = re.compile(r"[^\W_]", re.UNICODE)

_VOWELS = "aeiou"
_DOUBLE_UNDO = set("bdgmnprt")


def _load_default_stoplist() -> frozenset[str]:
    text = resources.files("cgtlab.corpus").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def _load_default_exceptions() -> dict[str, str]:
    text = resources.files("cgtlab.corpus").joinpath("data/lemma_exceptions.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class PreprocessConfig:
    """Tunables for the normalization pipeline and vocabulary pruning."""

    stoplist: frozenset[str] = field(default_factory=_load_default_stoplist)
    min_token_len: int = 2
    min_df: int = 5
    max_df_ratio: float = 0.5
    lemma_exceptions: dict[str, str] = field(default_factory=_load_default_exceptions)
    keep_numbers: bool = False

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if not (0 < self.max_df_ratio <= 1):
            raise ValueError("max_df_ratio must be in (0, 1]")
        bad = [w for w in self.stoplist if w != w.lower()]
        if bad:
            raise ValueError(f"stoplist entries must be lowercase: {bad[:5]}")

    def digest(self) -> str:
        return digest_json(
            {
                "stoplist": sorted(self.stoplist),
                "min_token_len": self.min_token_len,
                "min_df": self.min_df,
                "max_df_ratio": self.max_df_ratio,
                "lemma_exceptions": self.lemma_exceptions,
                "keep_numbers": self.keep_numbers,
            }
        )


def lemmatize(token: str, exceptions: dict[str, str]) -> str:
    """Rule-based suffix lemmatizer: exception table, then possessive,
    plural (-s/-es/-ies), then -ing/-ed with doubling undo. Plural and
    verbal rules cascade so "bookings" reduces through "booking" to
    "book"."""
    hit = exceptions.get(token)
    if hit is not None:
        return hit
    t = token
    if t.endswith("'s"):
        t = t[:-2]
        hit = exceptions.get(t)
        if hit is not None:
            return hit
    if t.endswith("ies") and len(t) >= 5:
        t = t[:-3] + "y"
    elif t.endswith("es") and len(t) >= 4 and t[:-2].endswith(("ss", "sh", "ch", "x", "z", "o")):
        t = t[:-2]
        if t.endswith("zz"):
            t = t[:-1]
    elif t.endswith("s") and len(t) >= 4 and not t.endswith(("ss", "us", "is")):
        t = t[:-1]
    hit = exceptions.get(t)
    if hit is not None:
        return hit
    for suffix in ("ing", "ed"):
        if t.endswith(suffix) and not t.endswith("thing"):
            stem = t[: -len(suffix)]
            if len(stem) < 3 or stem.endswith("e"):
                continue
            if stem[-1] == stem[-2] and (
                stem[-1] in _DOUBLE_UNDO or (stem[-1] == "l" and len(stem) >= 6)
            ):
                stem = stem[:-1]
            elif stem.endswith(("v", "u")):
                stem += "e"
            elif suffix == "ed" and stem.endswith("i"):
                stem = stem[:-1] + "y"
            t = stem
            break
    return t


def _pipeline(text: str, config: PreprocessConfig, with_spans: bool):
    masked = _URL_RE.sub(lambda m: " " * len(m.group()), text)
    masked = masked.replace("’", "'")
    out = []
    for m in _TOKEN_RE.finditer(masked):
        raw = m.group()
        token = raw.lower()
        if not _ALNUM_RE.search(token):
            continue
        if len(token) < config.min_token_len:
            continue
        if token in config.stoplist:
            continue
        lemma = lemmatize(token, config.lemma_exceptions)
        if len(lemma) < config.min_token_len or lemma in config.stoplist:
            continue
        if lemma.isdigit() and not config.keep_numbers:
            continue
        if with_spans:
            out.append((lemma, m.start(), m.end()))
        else:
            out.append(lemma)
    return out


def preprocess(text: str, config: PreprocessConfig) -> list[str]:
    """Normalize arbitrary text to an ordered token list (never raises)."""
    return _pipeline(text, config, with_spans=False)


def token_spans(text: str, config: PreprocessConfig) -> list[tuple[str, int, int]]:
    """Like preprocess but each token carries its (start, end) character
    offsets in the original text, for highlighting."""
    return _pipeline(text, config, with_spans=True)
