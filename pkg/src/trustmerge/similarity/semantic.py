"""Semantic match rules for typed attribute values.

Each rule answers a yes/no question about two values: ``1.0`` for a match,
``0.0`` for a mismatch and ``None`` when the rule does not apply to the
values at hand (for instance a number rule given free text).
"""

from __future__ import annotations

import re
from typing import Callable, Mapping, Sequence

from ..model import Literal, is_numeric
from .strings import jaro_winkler, tokenize

MATCH = 1.0
NO_MATCH = 0.0


def _tokens_match(s: str, t: str, token_similarity, token_threshold) -> bool:
    if s == t or t.startswith(s) or s.startswith(t):
        return True
    if token_similarity is not None and token_similarity(s, t) >= token_threshold:
        return True
    return False


def _max_token_matching(short: Sequence[str], long: Sequence[str], ok) -> int:
    """Size of a maximum one-to-one matching between tokens (Kuhn's method)."""
    adj = [[j for j, t in enumerate(long) if ok(s, t)] for s in short]
    owner: list[int | None] = [None] * len(long)

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if owner[j] is None or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    return sum(1 for i in range(len(short)) if augment(i, set()))


def _split_by_information(ta, tb):
    # the value with fewer tokens carries less information and is checked
    if (len(ta), ta) <= (len(tb), tb):
        return ta, tb
    return tb, ta


def name_metric(a, b, token_similarity: Callable[[str, str], float] | None = None,
                token_threshold: float = 0.9, synonyms: Mapping[str, set] | None = None):
    """Match names allowing abbreviations, prefixes and reordering.

    Every token of the shorter name has to pair up with a distinct token of
    the longer one, either by equality or because one is a prefix of the
    other (which covers initials such as ``W.`` for ``William``).
    """
    ta, tb = tokenize(a), tokenize(b)
    if not ta or not tb:
        return None
    short, long = _split_by_information(ta, tb)

    def ok(s, t):
        if _tokens_match(s, t, token_similarity, token_threshold):
            return True
        if synonyms:
            return t in synonyms.get(s, ()) or s in synonyms.get(t, ())
        return False

    return MATCH if _max_token_matching(short, long, ok) == len(short) else NO_MATCH


def shared_token_count(a, b) -> int:
    ta, tb = tokenize(a), tokenize(b)
    short, long = _split_by_information(ta, tb)
    return _max_token_matching(short, long, lambda s, t: _tokens_match(s, t, None, 1.0))


def number_metric(a: Literal, b: Literal, tolerance: float = 0.0):
    if not (is_numeric(a) and is_numeric(b)):
        return None
    return MATCH if abs(float(a) - float(b)) <= tolerance else NO_MATCH


_HAS_ALPHA = re.compile(r"[a-z]")
_HAS_DIGIT = re.compile(r"\d")


def product_codes(value) -> set[str]:
    """Alphanumeric tokens with both letters and digits, at least 4 long."""
    return {t for t in tokenize(value)
            if len(t) >= 4 and _HAS_ALPHA.search(t) and _HAS_DIGIT.search(t)}


def product_metric(a, b, k: int = 2):
    """Match products on a shared serial code, else on at least k shared name tokens."""
    if not tokenize(a) or not tokenize(b):
        return None
    if product_codes(a) & product_codes(b):
        return MATCH
    return MATCH if shared_token_count(a, b) >= k else NO_MATCH


def restaurant_rule(name_sim: float, phone_sim: float, address_sim: float,
                    threshold: float) -> float:
    return MATCH if name_sim >= threshold and (phone_sim >= threshold
                                               or address_sim >= threshold) else NO_MATCH


def _best(values_i, values_j, sim) -> float:
    return max((sim(str(x), str(y)) for x in values_i for y in values_j), default=0.0)


def restaurant_metric(chunks_i, chunks_j, threshold: float = 0.95,
                      similarity: Callable[[str, str], float] = jaro_winkler,
                      name_attr: str = "name", phone_attr: str = "phone",
                      address_attr: str = "addr"):
    """Restaurants match when the name and either the phone or the address agree.

    ``chunks_i`` and ``chunks_j`` are iterables of knowledge chunks (the two
    clusters).  Each attribute similarity is the best score over value pairs.
    """
    def vals(chunks, attr):
        return [v for c in chunks for v in c.values(attr)]

    return restaurant_rule(
        _best(vals(chunks_i, name_attr), vals(chunks_j, name_attr), similarity),
        _best(vals(chunks_i, phone_attr), vals(chunks_j, phone_attr), similarity),
        _best(vals(chunks_i, address_attr), vals(chunks_j, address_attr), similarity),
        threshold,
    )


_PART_MARKER = re.compile(
    r"[\s,:;.\-(\[]*\bpart\s+(?:[ivxlc]+|\d+|one|two|three|four)\b[\s)\].]*$", re.IGNORECASE)


def strip_part_marker(title: str) -> str:
    return _PART_MARKER.sub("", str(title)).strip()


def title_metric(a, b, synonyms: Mapping[str, set] | None = None):
    """Name-style matching for titles, tolerant to synonyms and part markers."""
    return name_metric(strip_part_marker(a), strip_part_marker(b), synonyms=synonyms or {})


SEMANTIC_METRICS = ("name", "number", "product", "restaurant", "title")
