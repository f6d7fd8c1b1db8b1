"""Input checks shared by the estimators."""

from __future__ import annotations

from typing import Iterable, Sequence

from .model import KnowledgeChunk


def check_chunks(X, *, allow_empty: bool = True, require_symmetric: bool = False) -> list[KnowledgeChunk]:
    """Validate a chunk collection and return it as a list.

    Ids must be unique.  Neighbor links pointing outside the collection are
    rejected because every similarity computation resolves them in the store.
    """
    if isinstance(X, (str, bytes)) or not isinstance(X, Iterable):
        raise TypeError(f"expected an iterable of KnowledgeChunk, got {type(X).__name__}")
    chunks = list(X)
    if not chunks and not allow_empty:
        raise ValueError("at least one knowledge chunk is required")
    ids: set[str] = set()
    for c in chunks:
        if not isinstance(c, KnowledgeChunk):
            raise TypeError(f"expected KnowledgeChunk, got {type(c).__name__}")
        if c.chunk_id in ids:
            raise ValueError(f"duplicate chunk id {c.chunk_id!r}")
        ids.add(c.chunk_id)
    by_id = {c.chunk_id: c for c in chunks}
    for c in chunks:
        unknown = c.neighbors - ids
        if unknown:
            raise ValueError(f"chunk {c.chunk_id!r} links to unknown chunks {sorted(unknown)[:3]}")
        if require_symmetric:
            for n in c.neighbors:
                if c.chunk_id not in by_id[n].neighbors:
                    raise ValueError(f"link {c.chunk_id!r} -> {n!r} is not symmetric")
    return chunks


def check_unit_interval(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise TypeError(f"{name} must be a number, got {value!r}") from None
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return v


def check_partition(groups: Iterable[Iterable[str]], chunk_ids: Sequence[str] | None = None) -> list[frozenset[str]]:
    out, seen = [], set()
    for g in groups:
        g = frozenset(g)
        if not g:
            raise ValueError("partition contains an empty group")
        if g & seen:
            raise ValueError(f"groups overlap on {sorted(g & seen)[:3]}")
        seen |= g
        out.append(g)
    if chunk_ids is not None and seen != set(chunk_ids):
        missing = set(chunk_ids) - seen
        extra = seen - set(chunk_ids)
        raise ValueError(f"partition does not cover the chunks (missing {sorted(missing)[:3]}, "
                         f"unknown {sorted(extra)[:3]})")
    return out
