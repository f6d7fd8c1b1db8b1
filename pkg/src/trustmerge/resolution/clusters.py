from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from ..model import KnowledgeChunk, Pair


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    members: frozenset[str]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a cluster needs at least one member chunk")

    def chunks(self, store: Mapping[str, KnowledgeChunk]) -> list[KnowledgeChunk]:
        return [store[m] for m in sorted(self.members)]

    def merged_view(self, store: Mapping[str, KnowledgeChunk]) -> tuple[Pair, ...]:
        """Concatenation of all member pairs."""
        return tuple(p for c in self.chunks(store) for p in c.pairs)


class ClusterSet:
    """A partition of the chunk store into clusters with integer ids.

    Merging retires both input ids and allocates a fresh one, so ids are never
    reused within a run.
    """

    def __init__(self, groups: Iterable[Iterable[str]] = ()):
        self.clusters: dict[int, frozenset[str]] = {}
        self.chunk_index: dict[str, int] = {}
        self._next = 0
        for g in groups:
            self._add(frozenset(g))

    def _add(self, members: frozenset[str]) -> int:
        if not members:
            raise ValueError("empty cluster")
        cid = self._next
        self._next += 1
        for m in members:
            if m in self.chunk_index:
                raise ValueError(f"chunk {m!r} assigned to two clusters")
            self.chunk_index[m] = cid
        self.clusters[cid] = members
        return cid

    @classmethod
    def singletons(cls, chunk_ids: Iterable[str]) -> "ClusterSet":
        return cls([cid] for cid in chunk_ids)

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self) -> Iterator[Cluster]:
        for cid in sorted(self.clusters):
            yield Cluster(cid, self.clusters[cid])

    def __contains__(self, cid) -> bool:
        return cid in self.clusters

    def members(self, cid: int) -> frozenset[str]:
        return self.clusters[cid]

    def cluster(self, cid: int) -> Cluster:
        return Cluster(cid, self.clusters[cid])

    def cluster_of(self, chunk_id: str) -> int:
        return self.chunk_index[chunk_id]

    def merge(self, a: int, b: int) -> int:
        if a == b:
            raise ValueError("cannot merge a cluster with itself")
        ma, mb = self.clusters.pop(a), self.clusters.pop(b)
        merged = ma | mb
        cid = self._next
        self._next += 1
        self.clusters[cid] = merged
        for m in merged:
            self.chunk_index[m] = cid
        return cid

    def copy(self) -> "ClusterSet":
        out = ClusterSet()
        out.clusters = dict(self.clusters)
        out.chunk_index = dict(self.chunk_index)
        out._next = self._next
        return out

    def partition(self) -> list[frozenset[str]]:
        """Clusters as member sets, in a canonical order."""
        return sorted(self.clusters.values(), key=lambda s: min(s))

    def labels(self, chunk_ids: Sequence[str]) -> list[int]:
        """Dense labels numbered by first appearance in ``chunk_ids``."""
        relabel: dict[int, int] = {}
        out = []
        for c in chunk_ids:
            cid = self.chunk_index[c]
            out.append(relabel.setdefault(cid, len(relabel)))
        return out

    def check(self, chunk_ids: Iterable[str] | None = None) -> None:
        seen: set[str] = set()
        for cid, mem in self.clusters.items():
            if not mem:
                raise AssertionError(f"cluster {cid} is empty")
            if seen & mem:
                raise AssertionError("clusters overlap")
            seen |= mem
            for m in mem:
                if self.chunk_index.get(m) != cid:
                    raise AssertionError(f"chunk index out of date for {m!r}")
        if chunk_ids is not None and seen != set(chunk_ids):
            raise AssertionError("clusters do not cover the chunk store")
