"""Slow, independent reference implementations used to check the fast code paths.

Nothing here imports the scoring code under test; each function is written
from the textbook definition.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations


def levenshtein_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


def _ordered(a, b):
    return (a, b) if (len(a), a) <= (len(b), b) else (b, a)


def jaro(a: str, b: str) -> float:
    if a == b:
        return 1.0
    a, b = _ordered(a, b)
    if not a or not b:
        return 0.0
    window = max(0, max(len(a), len(b)) // 2 - 1)
    used_b = [False] * len(b)
    matched_a = []
    for i, ch in enumerate(a):
        for j in range(max(0, i - window), min(len(b), i + window + 1)):
            if not used_b[j] and b[j] == ch:
                used_b[j] = True
                matched_a.append(ch)
                break
    m = len(matched_a)
    if m == 0:
        return 0.0
    matched_b = [b[j] for j in range(len(b)) if used_b[j]]
    # integer halving, as in Winkler's reference C code
    half_t = sum(x != y for x, y in zip(matched_a, matched_b)) // 2
    return (m / len(a) + m / len(b) + (m - half_t) / m) / 3


def jaro_winkler(a: str, b: str, p: float = 0.1) -> float:
    if a == b:
        return 1.0
    j = jaro(a, b)
    if j <= 0.7:
        return j
    ell = 0
    for x, y in zip(a[:4], b[:4]):
        if x != y:
            break
        ell += 1
    return j + ell * p * (1 - j)


# ---------------------------------------------------------------- relational


def neighborhood(cid, clusters: dict[int, frozenset], store) -> set:
    """Every other cluster that holds a neighbor of some member."""
    out = set()
    for other, members in clusters.items():
        if other == cid:
            continue
        if any(n in members for m in clusters[cid] for n in store[m].neighbors):
            out.add(other)
    return out


def sim_rel(ci, cj, clusters: dict[int, frozenset], store, link_trust=None,
            aligned=True) -> float:
    link_trust = link_trust or (lambda a, b: 1.0)
    ni, nj = neighborhood(ci, clusters, store), neighborhood(cj, clusters, store)
    union = ni | nj
    if not ni or not nj:
        return 0.0

    def best(c, target):
        return max((link_trust(m, n) for m in clusters[c] for n in store[m].neighbors
                    if n in clusters[target]), default=0.0)

    num = sum(min(best(ci, c), best(cj, c)) for c in ni & nj)
    raw = num / len(union)
    return 1 - (1 - raw) ** 10 if aligned else raw


# ---------------------------------------------------------------- evaluation


def pairwise_counts(predicted, gold) -> tuple[int, int, int]:
    """TP, FP, FN by enumerating every record pair."""
    p = {m: i for i, g in enumerate(predicted) for m in g}
    t = {m: i for i, g in enumerate(gold) for m in g}
    tp = fp = fn = 0
    for a, b in combinations(sorted(p), 2):
        same_p, same_t = p[a] == p[b], t[a] == t[b]
        tp += same_p and same_t
        fp += same_p and not same_t
        fn += same_t and not same_p
    return tp, fp, fn


# ---------------------------------------------------------------- redundancy


def bayes_argmax(values, trusts) -> int:
    """First position whose value maximises the exact posterior numerator.

    Trusts are read as the decimals they print as, so 0.3 means 3/10.
    """
    trusts = [Fraction(str(t)) for t in trusts]
    score = {}
    for v in values:
        if v in score:
            continue
        s = Fraction(1)
        for w, t in zip(values, trusts):
            s *= t if w == v else 1 - t
        score[v] = s
    top = max(score.values())
    return next(i for i, v in enumerate(values) if score[v] == top)


def majority_first(values) -> int:
    counts = {v: values.count(v) for v in values}
    top = max(counts.values())
    return next(i for i, v in enumerate(values) if counts[v] == top)


def restricted_growth_strings(n: int):
    """All set partitions of n positions, as label sequences."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(top + 2):
            yield from rec(prefix + [lab], max(top, lab))
    if n == 0:
        yield ()
        return
    yield from rec([0], 0)


# ---------------------------------------------------------------- clustering


def greedy_agglomerative(clusters, candidate_pairs, score, theta):
    """Recompute every candidate score after every merge and take the best.

    ``clusters`` is a ClusterSet (mutated), ``candidate_pairs(clusters)``
    lists the unordered live pairs and ``score(ci, cj)`` scores one.
    Ties go to the smallest id pair.
    """
    while True:
        best = None
        for ci, cj in candidate_pairs(clusters):
            s = score(ci, cj)
            if s >= theta and (best is None or (-s, ci, cj) < (-best[0], best[1], best[2])):
                best = (s, ci, cj)
        if best is None:
            return clusters
        clusters.merge(best[1], best[2])


def isclose(a, b, tol=1e-9) -> bool:
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
