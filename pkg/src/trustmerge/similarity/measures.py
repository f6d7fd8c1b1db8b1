"""Cluster similarity: attribute, relational, semantic and their weighted mean."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ..model import KnowledgeChunk
from ..resolution.clusters import ClusterSet
from ..trust import TrustModel
from . import semantic
from .strings import STRING_METRICS, CorpusStats, get_metric

Metric = Callable[[str, str], float]


def align(x: float) -> float:
    """Stretch a relational score towards 1: f(x) = 1 - (1 - x)^10."""
    return 1.0 - (1.0 - x) ** 10


@dataclass(frozen=True)
class SimilarityConfig:
    """Which measure to use for which attribute, and how to weigh the three parts.

    Unless ``delta_a``/``delta_r`` are given explicitly they are derived from
    ``alpha`` as ``alpha`` and ``1 - alpha``.
    """

    metrics: Mapping[str, str] = field(default_factory=dict)
    default_metric: str | None = "jarowinkler"
    semantic_metrics: Mapping[str, str] = field(default_factory=dict)
    alpha: float = 0.85
    delta_a: float | None = None
    delta_r: float | None = None
    delta_s: float = 4.0
    theta_s: float = 0.95
    align_relational: bool = True
    synonyms: Mapping[str, frozenset] = field(default_factory=dict)
    number_tolerance: float = 0.0
    product_k: int = 2
    restaurant_threshold: float = 0.95

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.theta_s <= 1.0:
            raise ValueError(f"theta_s must lie in [0, 1], got {self.theta_s}")
        da, dr, ds = self.weights
        if min(da, dr, ds) < 0:
            raise ValueError("similarity weights must be non-negative")
        if da + dr + ds <= 0:
            raise ValueError("at least one similarity weight must be positive")
        for attr, name in self.metrics.items():
            if name not in STRING_METRICS:
                raise ValueError(f"unknown string metric {name!r} for attribute {attr!r}")
        if self.default_metric is not None and self.default_metric not in STRING_METRICS:
            raise ValueError(f"unknown default metric {self.default_metric!r}")
        for attr, name in self.semantic_metrics.items():
            if name not in semantic.SEMANTIC_METRICS:
                raise ValueError(f"unknown semantic metric {name!r} for attribute {attr!r}")

    @property
    def weights(self) -> tuple[float, float, float]:
        da = self.alpha if self.delta_a is None else self.delta_a
        dr = 1.0 - self.alpha if self.delta_r is None else self.delta_r
        ds = self.delta_s if self.semantic_metrics else 0.0
        return float(da), float(dr), float(ds)

    def metric_name(self, attribute: str) -> str | None:
        return self.metrics.get(attribute, self.default_metric)


class AttributeMetrics:
    """Configured metric per attribute, with TF-IDF statistics bound to a corpus."""

    def __init__(self, cfg: SimilarityConfig, chunks: Iterable[KnowledgeChunk] = ()):
        self.cfg = cfg
        chunks = list(chunks)
        needs_stats = {
            a for a in {p.attribute for c in chunks for p in c.pairs}
            if cfg.metric_name(a) in ("tfidf", "softtfidf")
        }
        self.stats = {
            a: CorpusStats.from_texts(v for c in chunks for v in c.values(a))
            for a in sorted(needs_stats)
        }
        self._cache: dict[str, Metric | None] = {}

    def __call__(self, attribute: str) -> Metric | None:
        if attribute not in self._cache:
            name = self.cfg.metric_name(attribute)
            self._cache[attribute] = (
                None if name is None else get_metric(name, self.stats.get(attribute)))
        return self._cache[attribute]


def _value_trust(trust_model, chunk, pair) -> float:
    return 1.0 if trust_model is None else trust_model.pair_trust(chunk, pair)


def attr_terms(ki: KnowledgeChunk, kj: KnowledgeChunk, metrics: AttributeMetrics,
               trust_model: TrustModel | None = None) -> tuple[float, int]:
    """Sum and count of trust-weighted attribute scores for one chunk pair."""
    total = []
    attrs_j = set(kj.attributes)
    for a in ki.attributes:
        if a not in attrs_j:
            continue
        metric = metrics(a)
        if metric is None:
            continue
        best = 0.0
        for pi in ki.pairs_for(a):
            ti = _value_trust(trust_model, ki, pi)
            for pj in kj.pairs_for(a):
                t = min(ti, _value_trust(trust_model, kj, pj))
                if t <= best:
                    continue
                best = max(best, t * metric(str(pi.value), str(pj.value)))
        total.append(best)
    return math.fsum(total), len(total)


def _as_chunks(c) -> list[KnowledgeChunk]:
    return [c] if isinstance(c, KnowledgeChunk) else list(c)


def sim_attr(c_i, c_j, cfg: SimilarityConfig, trust_model: TrustModel | None = None,
             metrics: AttributeMetrics | None = None) -> float:
    """Mean trust-weighted attribute similarity over chunk pairs and shared attributes."""
    ci, cj = _as_chunks(c_i), _as_chunks(c_j)
    if not ci or not cj:
        raise ValueError("clusters must be non-empty")
    metrics = metrics or AttributeMetrics(cfg, ci + cj)
    sums, count = [], 0
    for ki in ci:
        for kj in cj:
            s, n = attr_terms(ki, kj, metrics, trust_model)
            sums.append(s)
            count += n
    return math.fsum(sums) / count if count else 0.0


@dataclass
class AssumptionTally:
    matched_trust: float = 0.0
    total: int = 0
    undefined: int = 0

    def add(self, outcome: float | None, trust: float = 1.0) -> None:
        self.total += 1
        if outcome is None:
            self.undefined += 1
        elif outcome >= semantic.MATCH:
            self.matched_trust += trust

    def __iadd__(self, other: "AssumptionTally") -> "AssumptionTally":
        self.matched_trust += other.matched_trust
        self.total += other.total
        self.undefined += other.undefined
        return self

    @property
    def value(self) -> float | None:
        defined = self.total - self.undefined
        if defined <= 0:
            return None
        return self.matched_trust / defined


def _semantic_outcome(name: str, attr: str, vi, vj, cfg: SimilarityConfig):
    if name == "name":
        return semantic.name_metric(vi, vj)
    if name == "number":
        return semantic.number_metric(vi, vj, cfg.number_tolerance)
    if name == "product":
        return semantic.product_metric(vi, vj, cfg.product_k)
    if name == "title":
        return semantic.title_metric(vi, vj, cfg.synonyms)
    raise ValueError(name)


def semantic_tally(ki: KnowledgeChunk, kj: KnowledgeChunk, cfg: SimilarityConfig,
                   trust_model: TrustModel | None = None) -> AssumptionTally:
    """One assumption per configured attribute for a pair of chunks."""
    tally = AssumptionTally()
    for attr, name in cfg.semantic_metrics.items():
        pis, pjs = ki.pairs_for(attr), kj.pairs_for(attr)
        if not pis or not pjs:
            tally.add(None)
            continue
        if name == "restaurant":
            outcome = semantic.restaurant_metric([ki], [kj], cfg.restaurant_threshold,
                                                 name_attr=attr)
            trust = max(_value_trust(trust_model, ki, p) * _value_trust(trust_model, kj, q)
                        for p in pis for q in pjs)
            tally.add(outcome, trust)
            continue
        best_outcome, best_trust = None, 0.0
        for p in pis:
            for q in pjs:
                out = _semantic_outcome(name, attr, p.value, q.value, cfg)
                if out is None:
                    continue
                t = _value_trust(trust_model, ki, p) * _value_trust(trust_model, kj, q)
                if best_outcome is None or (out, t) > (best_outcome, best_trust):
                    best_outcome, best_trust = out, t
        tally.add(best_outcome, best_trust)
    return tally


def sim_sem(c_i, c_j, cfg: SimilarityConfig, trust_model: TrustModel | None = None) -> float | None:
    """Trusted fraction of matching assumptions; ``None`` when none is defined."""
    tally = AssumptionTally()
    for ki in _as_chunks(c_i):
        for kj in _as_chunks(c_j):
            tally += semantic_tally(ki, kj, cfg, trust_model)
    return tally.value


def neighborhood(cid: int, clusters: ClusterSet, store: Mapping[str, KnowledgeChunk]) -> set[int]:
    """Clusters holding a neighbor of any member of ``cid``."""
    out = set()
    for m in clusters.members(cid):
        for n in store[m].neighbors:
            out.add(clusters.cluster_of(n))
    out.discard(cid)
    return out


def best_link_trust(cid: int, other: int, clusters: ClusterSet,
                    store: Mapping[str, KnowledgeChunk], trust_model: TrustModel | None) -> float:
    best = 0.0
    for m in sorted(clusters.members(cid)):
        for n in sorted(store[m].neighbors):
            if clusters.cluster_of(n) != other:
                continue
            t = 1.0 if trust_model is None else trust_model.link_trust(store[m], store[n])
            best = max(best, t)
    return best


def sim_rel(ci: int, cj: int, clusters: ClusterSet, store: Mapping[str, KnowledgeChunk],
            trust_model: TrustModel | None = None, align_result: bool = True) -> float:
    """Trust-weighted Jaccard coefficient of the two cluster neighborhoods."""
    ni = neighborhood(ci, clusters, store)
    nj = neighborhood(cj, clusters, store)
    if not ni or not nj:
        return 0.0
    common = ni & nj
    if not common:
        return 0.0
    num = math.fsum(
        min(best_link_trust(ci, cn, clusters, store, trust_model),
            best_link_trust(cj, cn, clusters, store, trust_model))
        for cn in sorted(common)
    )
    raw = num / len(ni | nj)
    return align(raw) if align_result else raw


def combine(weights: tuple[float, float, float], attr: float | None, rel: float | None,
            sem: float | None) -> float:
    """Weighted mean of the defined components."""
    parts = [(w, v) for w, v in zip(weights, (attr, rel, sem)) if w > 0 and v is not None]
    if not parts:
        return 0.0
    if len(parts) == 1:
        return parts[0][1]
    return math.fsum(w * v for w, v in parts) / math.fsum(w for w, _ in parts)


def sim_joint(ci: int, cj: int, cfg: SimilarityConfig, clusters: ClusterSet,
              store: Mapping[str, KnowledgeChunk], trust_model: TrustModel | None = None,
              metrics: AttributeMetrics | None = None) -> float:
    da, dr, ds = cfg.weights
    chunks_i = [store[m] for m in sorted(clusters.members(ci))]
    chunks_j = [store[m] for m in sorted(clusters.members(cj))]
    a = sim_attr(chunks_i, chunks_j, cfg, trust_model, metrics) if da > 0 else None
    r = (sim_rel(ci, cj, clusters, store, trust_model, cfg.align_relational)
         if dr > 0 else None)
    s = sim_sem(chunks_i, chunks_j, cfg, trust_model) if ds > 0 else None
    return combine((da, dr, ds), a, r, s)
