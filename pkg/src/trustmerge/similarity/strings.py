"""Attribute-level string similarity measures.

Edit-distance and Jaro-family scores come from :mod:`rapidfuzz`; the
TF-IDF measures and n-gram counts are computed here.  Every measure returns a
similarity in [0, 1] except :func:`ngram_overlap`, which returns a count.
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from rapidfuzz.distance import Jaro as _Jaro
from rapidfuzz.distance import JaroWinkler as _JaroWinkler
from rapidfuzz.distance import Levenshtein as _Levenshtein

_SPLIT = re.compile(r"[\W_]+", re.UNICODE)


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def tokenize(text) -> list[str]:
    """Lowercase, strip diacritics and split on whitespace and punctuation."""
    return [t for t in _SPLIT.split(strip_diacritics(str(text)).lower()) if t]


def levenshtein(a: str, b: str) -> float:
    """1 - edit distance / length of the longer string."""
    a, b = str(a), str(b)
    if not a and not b:
        return 1.0
    return _Levenshtein.normalized_similarity(a, b)


def _ordered(a: str, b: str) -> tuple[str, str]:
    # the greedy character matching is order dependent for some inputs
    return (a, b) if (len(a), a) <= (len(b), b) else (b, a)


def jaro(a: str, b: str) -> float:
    a, b = str(a), str(b)
    if a == b:
        return 1.0
    return _Jaro.similarity(*_ordered(a, b))


def jaro_winkler(a: str, b: str, prefix_weight: float = 0.1) -> float:
    """Jaro-Winkler with a common-prefix bonus over at most four characters."""
    a, b = str(a), str(b)
    if a == b:
        return 1.0
    return _JaroWinkler.similarity(*_ordered(a, b), prefix_weight=prefix_weight)


def _grams(text: str, n: int) -> Counter:
    return Counter(text[i:i + n] for i in range(len(text) - n + 1))


def ngram_overlap(a: str, b: str, n: int = 6) -> int:
    """Size of the multiset intersection of the character n-grams of a and b."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ga, gb = _grams(str(a), n), _grams(str(b), n)
    return sum((ga & gb).values())


def ngram_similarity(a: str, b: str, n: int = 3) -> float:
    """Dice coefficient over boundary-padded character n-grams."""
    a, b = str(a).lower(), str(b).lower()
    if a == b:
        return 1.0
    pad = "\x02" * (n - 1)
    ga, gb = _grams(pad + a + pad, n), _grams(pad + b + pad, n)
    total = sum(ga.values()) + sum(gb.values())
    if total == 0:
        return 0.0
    return 2.0 * sum((ga & gb).values()) / total


@dataclass(frozen=True)
class CorpusStats:
    """Document frequencies of tokens over a snapshot of attribute values."""

    n_docs: int
    doc_freq: Mapping[str, int]

    @classmethod
    def from_texts(cls, texts: Iterable) -> "CorpusStats":
        df: Counter = Counter()
        n = 0
        for t in texts:
            n += 1
            df.update(set(tokenize(t)))
        return cls(n, dict(df))

    def idf(self, token: str) -> float:
        # smoothed so that unseen and ubiquitous tokens keep a positive weight
        return math.log((self.n_docs + 1) / (self.doc_freq.get(token, 0) + 1)) + 1.0

    def vector(self, text) -> dict[str, float]:
        tf = Counter(tokenize(text))
        vec = {tok: math.log1p(c) * self.idf(tok) for tok, c in tf.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        if norm == 0:
            return {}
        return {tok: w / norm for tok, w in vec.items()}


def _require(stats: CorpusStats | None) -> CorpusStats:
    if stats is None or stats.n_docs == 0:
        raise ValueError("TF-IDF measures need corpus statistics built from a non-empty corpus")
    return stats


def _degenerate(a, b) -> float | None:
    ta, tb = tokenize(a), tokenize(b)
    if ta and tb:
        return None
    if not ta and not tb:
        return 1.0 if str(a).strip().lower() == str(b).strip().lower() else 0.0
    return 0.0


def tfidf_cosine(a, b, corpus_stats: CorpusStats) -> float:
    stats = _require(corpus_stats)
    if a == b and tokenize(a):
        return 1.0
    d = _degenerate(a, b)
    if d is not None:
        return d
    va, vb = stats.vector(a), stats.vector(b)
    dot = math.fsum(w * vb[t] for t, w in va.items() if t in vb)
    return min(1.0, max(0.0, dot))


def _soft_directed(va, vb, inner, threshold) -> float:
    total = []
    for tok, wa in va.items():
        best, best_tok = 0.0, None
        for other in vb:
            s = 1.0 if other == tok else inner(tok, other)
            if s > best or (s == best and best_tok is not None and other < best_tok):
                best, best_tok = s, other
        if best_tok is not None and best >= threshold:
            total.append(wa * vb[best_tok] * best)
    return math.fsum(total)


def soft_tfidf(a, b, corpus_stats: CorpusStats, inner: Callable[[str, str], float] = jaro_winkler,
               inner_threshold: float = 0.9) -> float:
    """TF-IDF cosine where tokens also match through a secondary similarity.

    The classic formulation is asymmetric; the two directions are averaged.
    """
    stats = _require(corpus_stats)
    if a == b and tokenize(a):
        return 1.0
    d = _degenerate(a, b)
    if d is not None:
        return d
    va, vb = stats.vector(a), stats.vector(b)
    score = 0.5 * (_soft_directed(va, vb, inner, inner_threshold)
                   + _soft_directed(vb, va, inner, inner_threshold))
    return min(1.0, max(0.0, score))


STRING_METRICS = ("levenshtein", "jaro", "jarowinkler", "tfidf", "softtfidf", "ngram")


def get_metric(name: str, corpus_stats: CorpusStats | None = None) -> Callable[[str, str], float]:
    """Resolve a configured metric name to a two-argument similarity function."""
    if name == "levenshtein":
        return levenshtein
    if name == "jaro":
        return jaro
    if name == "jarowinkler":
        return jaro_winkler
    if name == "ngram":
        return ngram_similarity
    if name == "tfidf":
        stats = _require(corpus_stats)
        return lambda a, b: tfidf_cosine(a, b, stats)
    if name == "softtfidf":
        stats = _require(corpus_stats)
        return lambda a, b: soft_tfidf(a, b, stats)
    raise ValueError(f"unknown string metric {name!r}; expected one of {STRING_METRICS}")
