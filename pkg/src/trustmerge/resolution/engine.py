"""Collective entity resolution by greedy agglomerative clustering."""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, ClusterMixin

from .._validation import check_chunks, check_unit_interval
from ..model import KnowledgeChunk
from ..similarity.measures import (AssumptionTally, AttributeMetrics, SimilarityConfig, align,
                                   attr_terms, combine, neighborhood, semantic_tally, sim_rel)
from ..trust import TrustModel
from .blocking import BlockingConfig, block, candidate_index
from .clusters import ClusterSet

log = logging.getLogger(__name__)

BOOTSTRAP = "bootstrap"
CLUSTERING = "clustering"


class SimilarityQueue:
    """Max-priority queue of cluster pairs with lazy invalidation.

    Entries are never removed in place.  Retiring a cluster id or re-scoring
    a pair leaves the old heap entries behind as tombstones that ``pop``
    skips, which is observationally the same as removing them.  Ties pop the
    smaller unordered id pair first.
    """

    def __init__(self):
        self._heap: list[tuple[float, int, int, int]] = []
        self._version: dict[tuple[int, int], int] = {}
        self._retired: set[int] = set()

    @staticmethod
    def _key(ci: int, cj: int) -> tuple[int, int]:
        return (ci, cj) if ci < cj else (cj, ci)

    def push(self, score: float, ci: int, cj: int) -> None:
        """Insert or replace the entry for the pair."""
        key = self._key(ci, cj)
        v = self._version.get(key, 0) + 1
        self._version[key] = v
        heapq.heappush(self._heap, (-score, key[0], key[1], v))

    def discard(self, ci: int, cj: int) -> None:
        key = self._key(ci, cj)
        if key in self._version:
            self._version[key] += 1

    def retire(self, cluster_ids: Iterable[int]) -> None:
        self._retired.update(cluster_ids)

    def _valid(self, entry) -> bool:
        _, a, b, v = entry
        return (a not in self._retired and b not in self._retired
                and self._version.get((a, b)) == v)

    def pop(self) -> tuple[float, int, int] | None:
        while self._heap:
            entry = heapq.heappop(self._heap)
            if self._valid(entry):
                del self._version[(entry[1], entry[2])]
                return (-entry[0], entry[1], entry[2])
        return None

    def peek(self) -> tuple[float, int, int] | None:
        while self._heap and not self._valid(self._heap[0]):
            heapq.heappop(self._heap)
        if not self._heap:
            return None
        s, a, b, _ = self._heap[0]
        return (-s, a, b)

    def entries(self) -> list[tuple[float, int, int]]:
        """Live entries in pop order."""
        return [(-s, a, b) for s, a, b, v in sorted(self._heap) if self._valid((s, a, b, v))]

    def __len__(self) -> int:
        return len(self.entries())


def stale_entry_sweep(queue: SimilarityQueue, retired_ids: Iterable[int]) -> SimilarityQueue:
    queue.retire(retired_ids)
    return queue


class PairScorer:
    """Scores cluster pairs, caching everything that depends on chunk pairs only."""

    def __init__(self, store: Mapping[str, KnowledgeChunk], clusters: ClusterSet,
                 cfg: SimilarityConfig, trust_model: TrustModel | None = None,
                 metrics: AttributeMetrics | None = None, neighbor_threshold: float = 0.9):
        self.store = store
        self.clusters = clusters
        self.cfg = cfg
        self.trust_model = trust_model
        self.metrics = metrics or AttributeMetrics(cfg, store.values())
        self.neighbor_threshold = neighbor_threshold
        self._attr: dict[tuple[str, str], tuple[float, int]] = {}
        self._sem: dict[tuple[str, str], AssumptionTally] = {}

    def _terms(self, a: str, b: str) -> tuple[float, int]:
        key = (a, b) if a <= b else (b, a)
        hit = self._attr.get(key)
        if hit is None:
            hit = attr_terms(self.store[key[0]], self.store[key[1]], self.metrics,
                             self.trust_model)
            self._attr[key] = hit
        return hit

    def chunk_attr(self, a: str, b: str) -> float:
        s, n = self._terms(a, b)
        return s / n if n else 0.0

    def _tally(self, a: str, b: str) -> AssumptionTally:
        key = (a, b) if a <= b else (b, a)
        hit = self._sem.get(key)
        if hit is None:
            hit = semantic_tally(self.store[key[0]], self.store[key[1]], self.cfg,
                                 self.trust_model)
            self._sem[key] = hit
        return hit

    def _member_pairs(self, ci: int, cj: int):
        mi = sorted(self.clusters.members(ci))
        mj = sorted(self.clusters.members(cj))
        for a in mi:
            for b in mj:
                yield a, b

    def attribute(self, ci: int, cj: int) -> float:
        sums, count = [], 0
        for a, b in self._member_pairs(ci, cj):
            s, n = self._terms(a, b)
            sums.append(s)
            count += n
        return math.fsum(sums) / count if count else 0.0

    def semantic(self, ci: int, cj: int) -> float | None:
        tally = AssumptionTally()
        for a, b in self._member_pairs(ci, cj):
            tally += self._tally(a, b)
        return tally.value

    def relational(self, ci: int, cj: int) -> float:
        return sim_rel(ci, cj, self.clusters, self.store, self.trust_model,
                       self.cfg.align_relational)

    def _outer_neighbors(self, ci: int, exclude: frozenset[str]) -> list[str]:
        out = set()
        for m in self.clusters.members(ci):
            out.update(self.store[m].neighbors)
        return sorted(out - exclude)

    def neighbor_attribute(self, ci: int, cj: int) -> float | None:
        """Share of neighbor chunks with an attribute-similar counterpart.

        Used while bootstrapping, when cluster neighborhoods carry no
        resolved structure yet.  ``None`` when neither side has neighbors.
        The share is aligned like the relational similarity it stands in for.
        """
        both = self.clusters.members(ci) | self.clusters.members(cj)
        ni = self._outer_neighbors(ci, both)
        nj = self._outer_neighbors(cj, both)
        if not ni and not nj:
            return None
        if not ni or not nj:
            return 0.0
        used: set[str] = set()
        matched = 0
        for a in ni:
            for b in nj:
                if b in used:
                    continue
                if a == b or self.chunk_attr(a, b) >= self.neighbor_threshold:
                    used.add(b)
                    matched += 1
                    break
        share = matched / min(len(ni), len(nj))
        return align(share) if self.cfg.align_relational else share

    def score(self, ci: int, cj: int, stage: str = CLUSTERING) -> float:
        if cj < ci:
            ci, cj = cj, ci
        da, dr, ds = self.cfg.weights
        a = self.attribute(ci, cj) if da > 0 else None
        if dr > 0:
            r = self.neighbor_attribute(ci, cj) if stage == BOOTSTRAP else self.relational(ci, cj)
        else:
            r = None
        s = self.semantic(ci, cj) if ds > 0 else None
        return combine((da, dr, ds), a, r, s)


def cluster_candidates(cid: int, clusters: ClusterSet, cand: Mapping[str, set[str]]) -> set[int]:
    out = set()
    for m in clusters.members(cid):
        for other in cand.get(m, ()):
            out.add(clusters.cluster_of(other))
    out.discard(cid)
    return out


def _all_candidate_pairs(clusters: ClusterSet, cand) -> list[tuple[int, int]]:
    pairs = set()
    for cid in clusters.clusters:
        for other in cluster_candidates(cid, clusters, cand):
            pairs.add((cid, other) if cid < other else (other, cid))
    return sorted(pairs)


def bootstrap(store: Mapping[str, KnowledgeChunk], blocks: Iterable[Iterable[str]],
              cfg: SimilarityConfig, trust_model: TrustModel | None = None,
              scorer: PairScorer | None = None, clusters: ClusterSet | None = None) -> ClusterSet:
    """Seed clusters with one pass of the most confident pairwise merges.

    Pairs within blocks are scored once as singletons and visited in
    descending order; a pair is merged when the clusters currently holding
    its chunks still score at least ``theta_s``.
    """
    clusters = clusters or ClusterSet.singletons(store)
    scorer = scorer or PairScorer(store, clusters, cfg, trust_model)
    scorer.clusters = clusters
    cand = candidate_index(blocks)
    scored = []
    for a, b in sorted({(a, b) if a < b else (b, a) for a in cand for b in cand[a]}):
        ca, cb = clusters.cluster_of(a), clusters.cluster_of(b)
        s = scorer.score(ca, cb, BOOTSTRAP)
        if s >= cfg.theta_s:
            scored.append((-s, a, b))
    scored.sort()
    for neg, a, b in scored:
        ca, cb = clusters.cluster_of(a), clusters.cluster_of(b)
        if ca == cb:
            continue
        if len(clusters.members(ca)) > 1 or len(clusters.members(cb)) > 1:
            if scorer.score(ca, cb, BOOTSTRAP) < cfg.theta_s:
                continue
        clusters.merge(ca, cb)
    return clusters


@dataclass
class ResolutionResult:
    clusters: ClusterSet
    merges: int = 0
    iterations: int = 0
    merge_scores: list[float] = field(default_factory=list)


def resolve(store: Mapping[str, KnowledgeChunk], clusters: ClusterSet,
            candidates: Mapping[str, set[str]], cfg: SimilarityConfig,
            trust_model: TrustModel | None = None, refresh: str = "neighbors",
            scorer: PairScorer | None = None) -> ResolutionResult:
    """Merge the most similar clusters until no pair reaches ``theta_s``.

    After every merge the merged cluster is scored against its candidates.
    With ``refresh="neighbors"`` only pairs touching a neighbor of the merged
    cluster are re-scored, since those are the only pairs whose relational
    similarity can change; ``refresh="full"`` re-scores every live pair.
    """
    if refresh not in ("neighbors", "full"):
        raise ValueError(f"refresh must be 'neighbors' or 'full', got {refresh!r}")
    scorer = scorer or PairScorer(store, clusters, cfg, trust_model)
    scorer.clusters = clusters
    theta = cfg.theta_s
    queue = SimilarityQueue()
    for ci, cj in _all_candidate_pairs(clusters, candidates):
        s = scorer.score(ci, cj)
        if s >= theta:
            queue.push(s, ci, cj)

    result = ResolutionResult(clusters)
    while True:
        top = queue.pop()
        if top is None:
            break
        result.iterations += 1
        s, ci, cj = top
        if s < theta:
            break
        new = clusters.merge(ci, cj)
        result.merges += 1
        result.merge_scores.append(s)
        stale_entry_sweep(queue, (ci, cj))
        for ck in sorted(cluster_candidates(new, clusters, candidates)):
            s2 = scorer.score(new, ck)
            if s2 >= theta:
                queue.push(s2, new, ck)
        if refresh == "neighbors":
            touched = set()
            for cn in sorted(neighborhood(new, clusters, store)):
                for ck in sorted(cluster_candidates(cn, clusters, candidates)):
                    if ck == new:
                        continue
                    touched.add((cn, ck) if cn < ck else (ck, cn))
        else:
            touched = {p for p in _all_candidate_pairs(clusters, candidates) if new not in p}
        for a, b in sorted(touched):
            s2 = scorer.score(a, b)
            if s2 >= theta:
                queue.push(s2, a, b)
            else:
                queue.discard(a, b)
    return result


def _blocking_config(blocking) -> BlockingConfig:
    if blocking is None:
        return BlockingConfig()
    if isinstance(blocking, BlockingConfig):
        return blocking
    return BlockingConfig(**dict(blocking))


class CollectiveEntityResolver(ClusterMixin, BaseEstimator):
    """Trust-aware collective entity resolution over knowledge chunks.

    Parameters
    ----------
    alpha : float
        Attribute weight; the relational weight is ``1 - alpha`` unless
        ``delta_a``/``delta_r`` are given.
    theta_s : float
        Merge threshold on the joint similarity.
    delta_s : float
        Weight of the semantic similarity (ignored without ``semantic_metrics``).
    metrics : dict, optional
        Attribute -> string metric name.  Other attributes use ``default_metric``.
    semantic_metrics : dict, optional
        Attribute -> semantic metric name.
    blocking : BlockingConfig or dict, optional
    refresh : {"neighbors", "full"}
        Which pairs are re-scored after a merge.
    stage : {"full", "bootstrap"}
        Stop after bootstrapping when ``"bootstrap"``.
    trust_model : TrustModel, optional

    Attributes
    ----------
    labels_ : list of int
        Cluster label per input chunk, numbered by first appearance.
    clusters_ : ClusterSet
    bootstrap_clusters_ : ClusterSet
    n_merges_ : int
        Merges performed after bootstrapping.
    """

    def __init__(self, alpha=0.85, theta_s=0.95, delta_s=4.0, delta_a=None, delta_r=None,
                 metrics=None, default_metric="jarowinkler", semantic_metrics=None,
                 blocking=None, refresh="neighbors", stage="full", align_relational=True,
                 neighbor_threshold=0.9, trust_model=None, synonyms=None):
        self.alpha = alpha
        self.theta_s = theta_s
        self.delta_s = delta_s
        self.delta_a = delta_a
        self.delta_r = delta_r
        self.metrics = metrics
        self.default_metric = default_metric
        self.semantic_metrics = semantic_metrics
        self.blocking = blocking
        self.refresh = refresh
        self.stage = stage
        self.align_relational = align_relational
        self.neighbor_threshold = neighbor_threshold
        self.trust_model = trust_model
        self.synonyms = synonyms

    def similarity_config(self) -> SimilarityConfig:
        return SimilarityConfig(
            metrics=dict(self.metrics or {}),
            default_metric=self.default_metric,
            semantic_metrics=dict(self.semantic_metrics or {}),
            alpha=self.alpha, delta_a=self.delta_a, delta_r=self.delta_r,
            delta_s=self.delta_s, theta_s=self.theta_s,
            align_relational=self.align_relational,
            synonyms=dict(self.synonyms or {}),
        )

    def fit(self, X: Sequence[KnowledgeChunk], y=None):
        chunks = check_chunks(X)
        check_unit_interval("theta_s", self.theta_s)
        check_unit_interval("neighbor_threshold", self.neighbor_threshold)
        if self.stage not in ("full", "bootstrap"):
            raise ValueError(f"stage must be 'full' or 'bootstrap', got {self.stage!r}")
        cfg = self.similarity_config()
        started = time.perf_counter()
        store = {c.chunk_id: c for c in chunks}
        clusters = ClusterSet.singletons(c.chunk_id for c in chunks)
        scorer = PairScorer(store, clusters, cfg, self.trust_model,
                            AttributeMetrics(cfg, chunks), self.neighbor_threshold)
        self.blocks_ = block(chunks, _blocking_config(self.blocking))
        cand = candidate_index(self.blocks_)
        bootstrap(store, self.blocks_, cfg, self.trust_model, scorer, clusters)
        self.bootstrap_clusters_ = clusters.copy()
        self.n_merges_ = 0
        self.n_iterations_ = 0
        if self.stage == "full":
            result = resolve(store, clusters, cand, cfg, self.trust_model, self.refresh, scorer)
            self.n_merges_ = result.merges
            self.n_iterations_ = result.iterations
        clusters.check(store)
        self.clusters_ = clusters
        self.chunk_ids_ = [c.chunk_id for c in chunks]
        self.labels_ = clusters.labels(self.chunk_ids_)
        self.n_bootstrap_merges_ = len(chunks) - len(self.bootstrap_clusters_)
        self.wall_time_ = time.perf_counter() - started
        log.info("resolved %d chunks into %d clusters (%d bootstrap merges, %d merges)",
                 len(chunks), len(clusters), self.n_bootstrap_merges_, self.n_merges_)
        return self

    def summary(self) -> dict:
        return {
            "chunks": len(self.chunk_ids_),
            "clusters": len(self.clusters_),
            "bootstrap_merges": self.n_bootstrap_merges_,
            "merges": self.n_merges_,
            "iterations": self.n_iterations_,
            "wall_time_s": round(self.wall_time_, 3),
        }
