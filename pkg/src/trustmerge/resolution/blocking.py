"""Candidate generation: only chunks sharing a block are ever compared."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from ..model import KnowledgeChunk
from ..similarity.strings import jaro_winkler, ngram_overlap, strip_diacritics, tokenize

STRATEGIES = ("standard", "similarity", "ngram", "none")


@dataclass(frozen=True)
class BlockingConfig:
    """How candidate blocks are formed.

    ``standard`` keys chunks on token prefixes, ``similarity`` compares each
    chunk to block representatives using per-attribute thresholds (a chunk
    joins when any attribute clears its threshold), ``ngram`` pairs chunks
    sharing at least ``ngram_min_matches`` character n-grams and ``none``
    puts everything in one block.
    """

    strategy: str = "standard"
    attributes: Sequence[str] | None = None
    similarity_thresholds: Mapping[str, float] = field(default_factory=dict)
    ngram_n: int = 6
    ngram_min_matches: int = 4
    prefix_length: int = 4
    min_token_length: int = 2
    max_block_size: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown blocking strategy {self.strategy!r}; expected {STRATEGIES}")
        for a, t in self.similarity_thresholds.items():
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"blocking threshold for {a!r} must lie in [0, 1]")
        if self.ngram_n < 1 or self.ngram_min_matches < 1:
            raise ValueError("n-gram blocking parameters must be >= 1")
        if self.strategy == "similarity" and not self.similarity_thresholds:
            raise ValueError("similarity blocking needs at least one attribute threshold")


def _texts(chunk: KnowledgeChunk, attributes) -> list[str]:
    attrs = chunk.attributes if attributes is None else attributes
    return [str(v) for a in attrs for v in chunk.values(a)]


def _standard(chunks, cfg):
    keyed: dict[str, list[str]] = defaultdict(list)
    for c in chunks:
        keys = set()
        for text in _texts(c, cfg.attributes):
            for tok in tokenize(text):
                if len(tok) >= cfg.min_token_length:
                    keys.add(tok[: cfg.prefix_length])
        for k in sorted(keys):
            keyed[k].append(c.chunk_id)
    return [frozenset(ids) for _, ids in sorted(keyed.items()) if len(ids) > 1]


def _similarity(chunks, cfg):
    blocks: list[tuple[KnowledgeChunk, list[str]]] = []
    for c in chunks:
        joined = False
        for rep, ids in blocks:
            if _close(c, rep, cfg.similarity_thresholds):
                ids.append(c.chunk_id)
                joined = True
        if not joined:
            blocks.append((c, [c.chunk_id]))
    return [frozenset(ids) for _, ids in blocks if len(ids) > 1]


def _close(a: KnowledgeChunk, b: KnowledgeChunk, thresholds) -> bool:
    for attr, t in thresholds.items():
        for x in a.values(attr):
            for y in b.values(attr):
                if jaro_winkler(str(x).lower(), str(y).lower()) >= t:
                    return True
    return False


def _ngram_text(chunk, attributes) -> str:
    return " ".join(strip_diacritics(t).lower() for t in _texts(chunk, attributes))


def _ngram(chunks, cfg):
    n = cfg.ngram_n
    texts = {c.chunk_id: _ngram_text(c, cfg.attributes) for c in chunks}
    index: dict[str, set[str]] = defaultdict(set)
    for cid, text in texts.items():
        for i in range(len(text) - n + 1):
            index[text[i:i + n]].add(cid)
    candidates: set[tuple[str, str]] = set()
    for ids in index.values():
        if len(ids) > 1:
            candidates.update(combinations(sorted(ids), 2))
    out = []
    for a, b in sorted(candidates):
        if ngram_overlap(texts[a], texts[b], n) >= cfg.ngram_min_matches:
            out.append(frozenset((a, b)))
    return out


def block(chunks: Iterable[KnowledgeChunk], cfg: BlockingConfig | None = None) -> list[frozenset[str]]:
    """Group chunks into (possibly overlapping) candidate blocks."""
    cfg = cfg or BlockingConfig()
    chunks = list(chunks)
    if cfg.strategy == "none":
        blocks = [frozenset(c.chunk_id for c in chunks)] if len(chunks) > 1 else []
    elif cfg.strategy == "standard":
        blocks = _standard(chunks, cfg)
    elif cfg.strategy == "similarity":
        blocks = _similarity(chunks, cfg)
    else:
        blocks = _ngram(chunks, cfg)
    if cfg.max_block_size is not None:
        blocks = [b for b in blocks if len(b) <= cfg.max_block_size]
    return blocks


def candidate_pairs(blocks: Iterable[Iterable[str]]) -> set[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    for b in blocks:
        pairs.update(combinations(sorted(b), 2))
    return pairs


def candidate_index(blocks: Iterable[Iterable[str]]) -> dict[str, set[str]]:
    """Chunk id -> the chunk ids it shares a block with."""
    index: dict[str, set[str]] = defaultdict(set)
    for a, b in candidate_pairs(blocks):
        index[a].add(b)
        index[b].add(a)
    return dict(index)
