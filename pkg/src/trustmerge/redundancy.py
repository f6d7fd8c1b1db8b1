"""Redundancy elimination: collapse each resolved cluster into one chunk.

For every attribute of a cluster one representative value is chosen.
Selectors return the *position* of the winning candidate, so callers that
track per-value flags (the noise experiment) can tell which occurrence won
even when two candidates are equal as strings.
"""

from __future__ import annotations

import math
import random
import string
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_chunks
from .model import KnowledgeChunk, Literal, Pair
from .similarity.strings import jaro_winkler
from .trust import TrustModel

KINDS = ("random", "naive", "naive_plus", "trust", "bayes")
EPS = 1e-6
_TIE = 1e-9


class ProviderError(RuntimeError):
    """A hit-count lookup failed; ``value`` is the string being looked up."""

    def __init__(self, value: str, cause: BaseException | None = None):
        super().__init__(f"hit-count lookup failed for {value!r}: {cause}")
        self.value = value


class HitCountProvider:
    """Wraps a ``str -> count`` lookup and checks what it returns."""

    def __init__(self, lookup: Callable[[str], int]):
        self._lookup = lookup

    def hits(self, text: str) -> int:
        try:
            n = self._lookup(text)
        except Exception as exc:
            raise ProviderError(text, exc) from exc
        if not isinstance(n, (int, float)) or isinstance(n, bool) or n < 0 or n != int(n):
            raise ProviderError(text, ValueError(f"invalid hit count {n!r}"))
        return int(n)

    __call__ = hits


class CorpusHitCounter(HitCountProvider):
    """Offline stand-in for web hit counts: occurrences in a reference corpus."""

    def __init__(self, texts: Iterable[str], case_sensitive: bool = False):
        self.case_sensitive = case_sensitive
        docs = [str(t) for t in texts]
        if not case_sensitive:
            docs = [d.casefold() for d in docs]
        # \x00 never appears in queries, so a match cannot span two documents
        self._corpus = "\x00".join(docs)
        super().__init__(self._count)

    def _count(self, text: str) -> int:
        needle = text if self.case_sensitive else text.casefold()
        if not needle:
            return 0
        return self._corpus.count(needle)

    @classmethod
    def from_file(cls, path, case_sensitive: bool = False) -> "CorpusHitCounter":
        with open(path, encoding="utf-8") as fh:
            return cls((line.rstrip("\n") for line in fh), case_sensitive)


def _as_rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


_CLASSES = (string.ascii_lowercase, string.ascii_uppercase, string.digits)


def _char_class(ch: str) -> str | None:
    for cls in _CLASSES:
        if ch in cls:
            return cls
    return None


def perturb(value: str, letters: int = 4, rng=None) -> str:
    """Replace ``letters`` alphanumeric characters with different ones of the same class."""
    rng = _as_rng(rng)
    chars = list(str(value))
    positions = [i for i, ch in enumerate(chars) if _char_class(ch) is not None]
    for i in rng.sample(positions, min(letters, len(positions))):
        cls = _char_class(chars[i])
        chars[i] = rng.choice([c for c in cls if c != chars[i]])
    return "".join(chars)


def _key(value: Literal) -> str:
    return str(value).strip()


def _argmax(scores: Sequence[float]) -> int:
    """First index whose score is within tolerance of the maximum."""
    best = max(scores)
    if best == -math.inf:
        return 0
    for i, s in enumerate(scores):
        if s >= best - _TIE * max(1.0, abs(best)):
            return i
    raise AssertionError("unreachable")


def choose_random(values: Sequence[Literal], rng=None) -> int:
    if not values:
        raise ValueError("no candidate values")
    return _as_rng(rng).randrange(len(values))


def choose_naive(values: Sequence[Literal]) -> int:
    """Most frequent value after trimming; ties go to the first occurrence."""
    if not values:
        raise ValueError("no candidate values")
    counts = Counter(_key(v) for v in values)
    top = max(counts.values())
    for i, v in enumerate(values):
        if counts[_key(v)] == top:
            return i
    raise AssertionError("unreachable")


def naive_plus_scores(values: Sequence[Literal], metric=jaro_winkler) -> list[float]:
    texts = [str(v) for v in values]
    return [math.fsum(metric(texts[k], texts[i]) for k in range(len(texts)) if k != i)
            for i in range(len(texts))]


def choose_naive_plus(values: Sequence[Literal], metric=jaro_winkler) -> int:
    if not values:
        raise ValueError("no candidate values")
    return _argmax(naive_plus_scores(values, metric))


def bayes_scores(values_with_trust: Sequence[tuple[Literal, float]]) -> dict[str, float]:
    """Log-probability that each distinct value is the true one.

    A value ``v`` is scored by the product of the trust of every candidate
    equal to ``v`` and the distrust of every other candidate.
    """
    logs = []
    for v, t in values_with_trust:
        t = min(max(float(t), EPS), 1.0 - EPS)
        logs.append((_key(v), math.log(t), math.log1p(-t)))
    out: dict[str, float] = {}
    for key, _, _ in logs:
        if key not in out:
            out[key] = math.fsum(lt if k == key else lf for k, lt, lf in logs)
    return out


def choose_bayes(values_with_trust: Sequence[tuple[Literal, float]]) -> int:
    if not values_with_trust:
        raise ValueError("no candidate values")
    scores = bayes_scores(values_with_trust)
    return _argmax([scores[_key(v)] for v, _ in values_with_trust])


def trust_score(value: str, provider: HitCountProvider, m: int = 5, letters: int = 4,
                rng=None) -> float:
    """``1 - sum(noised hits) / (m * hits)``; ``-inf`` when the value itself has no hits."""
    rng = _as_rng(rng)
    text = str(value)
    n_hits = provider(text)
    variants = [perturb(text, letters, rng) for _ in range(m)]
    if n_hits == 0:
        return -math.inf
    noised = sum(provider(v) for v in variants)
    return 1.0 - noised / (m * n_hits)


def trust_scores(values: Sequence[Literal], provider, m=5, letters=4, rng=None) -> list[float]:
    rng = _as_rng(rng)
    return [trust_score(str(v), provider, m, letters, rng) for v in values]


def choose_trust(values: Sequence[Literal], provider, m: int = 5, letters: int = 4, rng=None) -> int:
    if not values:
        raise ValueError("no candidate values")
    scores = trust_scores(values, provider, m, letters, rng)
    if all(s == -math.inf for s in scores):
        return choose_naive(values)
    return _argmax(scores)


def select_random(values, rng=None):
    return values[choose_random(values, rng)]


def select_naive(values):
    return values[choose_naive(values)]


def select_naive_plus(values, metric=jaro_winkler):
    return values[choose_naive_plus(values, metric)]


def select_bayes(values_with_trust):
    return values_with_trust[choose_bayes(values_with_trust)][0]


def select_trust(values, provider, m=5, letters=4, rng=None):
    return values[choose_trust(values, provider, m, letters, rng)]


@dataclass(frozen=True)
class MergeStrategy:
    kind: str = "naive"
    similarity_metric: Callable[[str, str], float] = jaro_winkler
    hit_provider: HitCountProvider | None = None
    noise_edits: int = 5
    noise_letters: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown merge strategy {self.kind!r}; expected one of {KINDS}")
        if self.kind == "trust" and self.hit_provider is None:
            raise ValueError("the trust strategy needs a hit_provider")
        if self.noise_edits < 1 or self.noise_letters < 1:
            raise ValueError("noise_edits and noise_letters must be >= 1")

    def choose(self, values: Sequence[Literal], trusts: Sequence[float] | None = None,
               rng=None) -> tuple[int, float | None]:
        """Index of the representative value and the score it won with."""
        if self.kind == "random":
            return choose_random(values, rng), None
        if self.kind == "naive":
            i = choose_naive(values)
            return i, float(sum(_key(v) == _key(values[i]) for v in values))
        if self.kind == "naive_plus":
            scores = naive_plus_scores(values, self.similarity_metric)
            i = _argmax(scores)
            return i, scores[i]
        if self.kind == "bayes":
            trusts = [1.0] * len(values) if trusts is None else list(trusts)
            vt = list(zip(values, trusts))
            i = choose_bayes(vt)
            return i, bayes_scores(vt)[_key(values[i])]
        scores = trust_scores(values, self.hit_provider, self.noise_edits, self.noise_letters, rng)
        if all(s == -math.inf for s in scores):
            return choose_naive(values), None
        i = _argmax(scores)
        return i, scores[i]


def inject_noise(values: Sequence[Literal], noise_fraction: float, seed=None,
                 letters: int = 4) -> tuple[list[str], list[bool]]:
    """Perturb ``ceil(fraction * n)`` randomly chosen values; flags mark them."""
    if not 0.0 <= noise_fraction <= 1.0:
        raise ValueError(f"noise_fraction must lie in [0, 1], got {noise_fraction}")
    rng = _as_rng(seed)
    n = len(values)
    k = min(n, math.ceil(noise_fraction * n - 1e-9))
    chosen = set(rng.sample(range(n), k))
    out = [perturb(str(v), letters, rng) if i in chosen else str(v) for i, v in enumerate(values)]
    return out, [i in chosen for i in range(n)]


@dataclass(frozen=True)
class MergeDecision:
    cluster_id: str
    attribute: str
    chosen_value: Literal
    strategy: str
    score: float | None
    source: str


@dataclass
class MergeResult:
    chunks: list[KnowledgeChunk]
    decisions: list[MergeDecision] = field(default_factory=list)


def _merged_id(members: Sequence[str]) -> str:
    return min(members)


def merge_clusters(clusters: Iterable[Iterable[str]], store: Mapping[str, KnowledgeChunk],
                   strategy: MergeStrategy | None = None, trust_model: TrustModel | None = None,
                   seed=0) -> MergeResult:
    """One merged chunk per cluster, keeping the provenance of every winner.

    Single-member clusters are passed through untouched apart from neighbor
    links, which are redirected to the merged chunks.
    """
    strategy = strategy or MergeStrategy()
    rng = _as_rng(seed)
    groups = [sorted(set(g)) for g in clusters]
    groups.sort(key=lambda g: g[0])
    owner = {m: _merged_id(g) for g in groups for m in g}
    missing = set(store) - set(owner)
    if missing:
        raise ValueError(f"clusters do not cover chunks {sorted(missing)[:3]}")

    out, decisions = [], []
    for g in groups:
        cid = _merged_id(g)
        members = [store[m] for m in g]
        neighbors = {owner[n] for c in members for n in c.neighbors} - {cid}
        if len(members) == 1:
            c = members[0]
            out.append(KnowledgeChunk(c.chunk_id, c.pairs, frozenset(neighbors), c.entity_name))
            continue
        by_attr: dict[str, list[tuple[KnowledgeChunk, Pair]]] = {}
        for c in members:
            for p in c.pairs:
                by_attr.setdefault(p.attribute, []).append((c, p))
        pairs = []
        for attr, cands in by_attr.items():
            values = [p.value for _, p in cands]
            trusts = None
            if trust_model is not None:
                trusts = [trust_model.pair_trust(c, p) for c, p in cands]
            i, score = strategy.choose(values, trusts, rng)
            winner = cands[i][1]
            pairs.append(winner)
            decisions.append(MergeDecision(cid, attr, winner.value, strategy.kind, score,
                                           winner.source))
        name = next((c.entity_name for c in members if c.entity_name), "")
        out.append(KnowledgeChunk(cid, tuple(pairs), frozenset(neighbors), name))
    return MergeResult(out, decisions)


def write_merge_report(decisions: Iterable[MergeDecision], path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write("cluster_id\tattribute\tchosen_value\tstrategy\tscore\n")
        for d in decisions:
            score = "" if d.score is None else repr(float(d.score))
            value = str(d.chosen_value).replace("\t", "\\t").replace("\n", "\\n")
            fh.write(f"{d.cluster_id}\t{d.attribute}\t{value}\t{d.strategy}\t{score}\n")


class RedundancyEliminator(TransformerMixin, BaseEstimator):
    """Merge chunks that share a cluster label into one chunk each.

    ``fit`` records the cluster labels (one per chunk, e.g. the ``labels_`` of
    a fitted resolver); ``transform`` returns the merged chunks and keeps the
    per-attribute decisions in ``report_``.
    """

    def __init__(self, strategy="naive", noise_edits=5, noise_letters=4, hit_provider=None,
                 trust_model=None, similarity_metric=jaro_winkler, random_state=0):
        self.strategy = strategy
        self.noise_edits = noise_edits
        self.noise_letters = noise_letters
        self.hit_provider = hit_provider
        self.trust_model = trust_model
        self.similarity_metric = similarity_metric
        self.random_state = random_state

    def _strategy(self) -> MergeStrategy:
        return MergeStrategy(self.strategy, self.similarity_metric, self.hit_provider,
                             self.noise_edits, self.noise_letters)

    def fit(self, X, y=None):
        chunks = check_chunks(X)
        self.strategy_ = self._strategy()
        self.labels_ = list(range(len(chunks))) if y is None else list(y)
        if len(self.labels_) != len(chunks):
            raise ValueError(f"got {len(self.labels_)} labels for {len(chunks)} chunks")
        return self

    def transform(self, X, y=None):
        chunks = check_chunks(X)
        labels = self.labels_ if y is None else list(y)
        if len(labels) != len(chunks):
            raise ValueError(f"got {len(labels)} labels for {len(chunks)} chunks")
        groups: dict = {}
        for c, lab in zip(chunks, labels):
            groups.setdefault(lab, []).append(c.chunk_id)
        result = merge_clusters(groups.values(), {c.chunk_id: c for c in chunks},
                                self.strategy_, self.trust_model, self.random_state)
        self.report_ = result.decisions
        return result.chunks
