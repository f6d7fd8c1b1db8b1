"""Attribute resolution: align attribute names across sources before matching."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_chunks
from .model import AxiomKind, KnowledgeChunk, Literal, Ontology, Pair, is_numeric
from .similarity.strings import jaro_winkler, tokenize

EXACT = "exact"
SIMILARITY = "similarity"
SIMILARITY_PLUS = "similarity+"
DOMAIN = "domain"
ONTOLOGY = "ontology"
MATCHERS = (EXACT, SIMILARITY, SIMILARITY_PLUS, DOMAIN, ONTOLOGY)
DEFAULT_LADDER = (EXACT, SIMILARITY, SIMILARITY_PLUS, DOMAIN)

LINK_RELATIONS = ("sameAs", "seeAlso")
SUBCLASS_RELATIONS = ("subClassOf", "subPropertyOf")


@dataclass(frozen=True)
class MappingPair:
    attr_a: str
    attr_b: str
    matcher: str
    score: float


@dataclass(frozen=True)
class AttributeMapping:
    """Injective alignment of attributes of source A with attributes of source B."""

    pairs: tuple[MappingPair, ...] = ()
    unmatched_a: tuple[str, ...] = ()
    unmatched_b: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        a = [p.attr_a for p in self.pairs]
        b = [p.attr_b for p in self.pairs]
        if len(set(a)) != len(a) or len(set(b)) != len(b):
            raise ValueError("attribute mapping is not injective")

    @property
    def unmatched(self) -> tuple[str, ...]:
        return tuple(self.unmatched_a) + tuple(self.unmatched_b)

    def b_to_a(self) -> dict[str, str]:
        return {p.attr_b: p.attr_a for p in self.pairs}

    def matcher_for(self, attr_b: str) -> str | None:
        for p in self.pairs:
            if p.attr_b == attr_b:
                return p.matcher
        return None


def _mapping(pairs, attrs_a, attrs_b) -> AttributeMapping:
    used_a = {p.attr_a for p in pairs}
    used_b = {p.attr_b for p in pairs}
    return AttributeMapping(
        tuple(pairs),
        tuple(a for a in attrs_a if a not in used_a),
        tuple(b for b in attrs_b if b not in used_b),
    )


def _greedy(scored: Iterable[tuple[float, str, str]], matcher: str,
            descending: bool = True) -> list[MappingPair]:
    """Best-first injective matching; ties are broken by name."""
    order = sorted(scored, key=lambda t: ((-t[0] if descending else t[0]), t[1], t[2]))
    used_a, used_b, out = set(), set(), []
    for score, a, b in order:
        if a in used_a or b in used_b:
            continue
        used_a.add(a)
        used_b.add(b)
        out.append(MappingPair(a, b, matcher, score))
    return out


def _dedupe(attrs: Iterable[str]) -> list[str]:
    return list(dict.fromkeys(attrs))


def exact_match(attrs_a: Sequence[str], attrs_b: Sequence[str]) -> AttributeMapping:
    attrs_a, attrs_b = _dedupe(attrs_a), _dedupe(attrs_b)
    scored = [(1.0, a, b) for a in attrs_a for b in attrs_b if a.casefold() == b.casefold()]
    return _mapping(_greedy(scored, EXACT), attrs_a, attrs_b)


def similarity_match(attrs_a: Sequence[str], attrs_b: Sequence[str],
                     metric: Callable[[str, str], float] = jaro_winkler,
                     threshold: float = 0.95, matcher: str = SIMILARITY) -> AttributeMapping:
    attrs_a, attrs_b = _dedupe(attrs_a), _dedupe(attrs_b)
    scored = []
    for a in attrs_a:
        for b in attrs_b:
            s = metric(a.casefold(), b.casefold())
            if s >= threshold:
                scored.append((s, a, b))
    return _mapping(_greedy(scored, matcher), attrs_a, attrs_b)


def normalize_word(word: str) -> str:
    w = word.casefold().strip()
    if len(w) > 3 and w.endswith("s") and not w.endswith("ss"):
        w = w[:-1]
    return w


class Synonyms:
    """Groups of interchangeable words; two words are synonyms when they share a group."""

    def __init__(self, groups: Iterable[Iterable[str]] = ()):
        self.groups: list[frozenset[str]] = []
        self._index: dict[str, set[int]] = defaultdict(set)
        for g in groups:
            g = frozenset(normalize_word(w) for w in g if w.strip())
            if len(g) < 2:
                continue
            self._index_group(g)

    def _index_group(self, g: frozenset[str]) -> None:
        gid = len(self.groups)
        self.groups.append(g)
        for w in g:
            self._index[w].add(gid)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]] | None) -> "Synonyms":
        if isinstance(mapping, Synonyms):
            return mapping
        return cls([{k, *v} for k, v in (mapping or {}).items()])

    def __bool__(self) -> bool:
        return bool(self.groups)

    def same(self, a: str, b: str) -> bool:
        na, nb = normalize_word(a), normalize_word(b)
        if na == nb:
            # plain name similarity decides these, so an empty dictionary changes nothing
            return False
        return bool(self._index.get(na, set()) & self._index.get(nb, set()))


def load_synonyms(path) -> Synonyms:
    """Read ``word: syn1, syn2, ...`` lines; blank lines and ``#`` comments are skipped."""
    groups = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, sep, rest = line.partition(":")
            if not sep or not word.strip():
                raise ValueError(f"{path}:{lineno}: expected 'word: syn1, syn2, ...'")
            groups.append([word.strip(), *(s.strip() for s in rest.split(",") if s.strip())])
    return Synonyms(groups)


def similarity_match_plus(attrs_a: Sequence[str], attrs_b: Sequence[str], synonyms=None,
                          metric: Callable[[str, str], float] = jaro_winkler,
                          threshold: float = 0.95) -> AttributeMapping:
    """Synonym pairs first, then name similarity on whatever is left."""
    attrs_a, attrs_b = _dedupe(attrs_a), _dedupe(attrs_b)
    syn = Synonyms.from_mapping(synonyms)
    pre = _greedy([(1.0, a, b) for a in attrs_a for b in attrs_b if syn.same(a, b)],
                  SIMILARITY_PLUS)
    left_a = [a for a in attrs_a if a not in {p.attr_a for p in pre}]
    left_b = [b for b in attrs_b if b not in {p.attr_b for p in pre}]
    rest = similarity_match(left_a, left_b, metric, threshold, SIMILARITY_PLUS)
    return _mapping(pre + list(rest.pairs), attrs_a, attrs_b)


@dataclass(frozen=True)
class DomainProfile:
    attribute: str
    avg_token_count: float
    numeric_fraction: float
    avg_length: float
    distinct_ratio: float

    def __post_init__(self):
        for name in ("numeric_fraction", "distinct_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def from_values(cls, attribute: str, values: Sequence[Literal]) -> "DomainProfile":
        if not values:
            raise ValueError(f"cannot profile attribute {attribute!r} without values")
        texts = [str(v) for v in values]
        n = len(texts)
        return cls(
            attribute,
            sum(len(tokenize(t)) for t in texts) / n,
            sum(1 for v in values if is_numeric(v)) / n,
            sum(len(t) for t in texts) / n,
            len(set(texts)) / n,
        )

    def vector(self) -> tuple[float, float, float, float]:
        return (self.avg_token_count, self.numeric_fraction, self.avg_length, self.distinct_ratio)


def profile_chunks(chunks: Iterable[KnowledgeChunk]) -> dict[str, DomainProfile]:
    values: dict[str, list[Literal]] = {}
    for c in chunks:
        for p in c.pairs:
            values.setdefault(p.attribute, []).append(p.value)
    return {a: DomainProfile.from_values(a, v) for a, v in values.items()}


def domain_distances(profiles_a: Sequence[DomainProfile],
                     profiles_b: Sequence[DomainProfile]) -> dict[tuple[str, str], float]:
    """Euclidean distances of profile vectors, each feature scaled by its maximum."""
    allp = list(profiles_a) + list(profiles_b)
    if not allp:
        return {}
    scale = [max(p.vector()[i] for p in allp) or 1.0 for i in range(4)]

    def norm(p):
        return [x / s for x, s in zip(p.vector(), scale)]

    return {(pa.attribute, pb.attribute): math.dist(norm(pa), norm(pb))
            for pa in profiles_a for pb in profiles_b}


def domain_match(profiles_a: Sequence[DomainProfile], profiles_b: Sequence[DomainProfile],
                 max_distance: float = 0.9) -> AttributeMapping:
    """Pair attributes whose values look alike, closest profiles first."""
    dist = domain_distances(profiles_a, profiles_b)
    scored = [(d, a, b) for (a, b), d in dist.items() if d <= max_distance]
    chosen = _greedy(scored, DOMAIN, descending=False)
    pairs = [MappingPair(p.attr_a, p.attr_b, DOMAIN, 1.0 - p.score) for p in chosen]
    return _mapping(pairs, [p.attribute for p in profiles_a], [p.attribute for p in profiles_b])


def _ancestors(ont: Ontology, entity: str) -> set[str]:
    parents: dict[str, set[str]] = defaultdict(set)
    for ax in ont.axioms:
        if ax.kind is AxiomKind.RELATION and ax.relation in SUBCLASS_RELATIONS:
            parents[ax.subject].add(str(ax.object))
    out, stack = set(), [entity]
    while stack:
        for p in parents.get(stack.pop(), ()):
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def ontology_match(ont_a: Ontology, ont_b: Ontology, attrs_a: Sequence[str] | None = None,
                   attrs_b: Sequence[str] | None = None, synonyms=None,
                   metric: Callable[[str, str], float] = jaro_winkler,
                   threshold: float = 0.95) -> AttributeMapping:
    """Use sameAs/seeAlso links and shared superclasses, then fall back to names.

    Axioms in either ontology count.  Attributes not linked semantically are
    handed to :func:`similarity_match_plus`.
    """
    attrs_a = _dedupe(sorted(ont_a.attributes) if attrs_a is None else attrs_a)
    attrs_b = _dedupe(sorted(ont_b.attributes) if attrs_b is None else attrs_b)
    set_a, set_b = set(attrs_a), set(attrs_b)
    scored = set()
    for ont in (ont_a, ont_b):
        for ax in ont.axioms:
            if ax.kind is not AxiomKind.RELATION or ax.relation not in LINK_RELATIONS:
                continue
            s, o = ax.subject, str(ax.object)
            if s in set_a and o in set_b:
                scored.add((1.0, s, o))
            elif o in set_a and s in set_b:
                scored.add((1.0, o, s))
    anc_a = {a: _ancestors(ont_a, a) | _ancestors(ont_b, a) for a in attrs_a}
    anc_b = {b: _ancestors(ont_a, b) | _ancestors(ont_b, b) for b in attrs_b}
    for a in attrs_a:
        for b in attrs_b:
            if anc_a[a] & anc_b[b]:
                scored.add((1.0, a, b))
    linked = _greedy(scored, ONTOLOGY)
    left_a = [a for a in attrs_a if a not in {p.attr_a for p in linked}]
    left_b = [b for b in attrs_b if b not in {p.attr_b for p in linked}]
    rest = similarity_match_plus(left_a, left_b, synonyms, metric, threshold)
    return _mapping(linked + list(rest.pairs), attrs_a, attrs_b)


@dataclass
class _Side:
    attrs: list[str]
    profiles: dict[str, DomainProfile]
    ontology: Ontology | None = None


def run_ladder(side_a: _Side, side_b: _Side, ladder: Sequence[str] = DEFAULT_LADDER,
               synonyms=None, threshold: float = 0.95, max_distance: float = 0.9,
               metric=jaro_winkler) -> AttributeMapping:
    """Apply matchers in order; an attribute matched by an earlier rung is final."""
    for rung in ladder:
        if rung not in MATCHERS:
            raise ValueError(f"unknown matcher {rung!r}; expected one of {MATCHERS}")
    left_a, left_b = list(side_a.attrs), list(side_b.attrs)
    found: list[MappingPair] = []
    for rung in ladder:
        if not left_a or not left_b:
            break
        if rung == EXACT:
            m = exact_match(left_a, left_b)
        elif rung == SIMILARITY:
            m = similarity_match(left_a, left_b, metric, threshold)
        elif rung == SIMILARITY_PLUS:
            m = similarity_match_plus(left_a, left_b, synonyms, metric, threshold)
        elif rung == DOMAIN:
            m = domain_match([side_a.profiles[a] for a in left_a if a in side_a.profiles],
                             [side_b.profiles[b] for b in left_b if b in side_b.profiles],
                             max_distance)
        else:
            if side_a.ontology is None or side_b.ontology is None:
                continue
            m = ontology_match(side_a.ontology, side_b.ontology, left_a, left_b, synonyms,
                               metric, threshold)
        for p in m.pairs:
            for q in found:
                if q.attr_a == p.attr_a or q.attr_b == p.attr_b:
                    raise AssertionError(f"matcher {rung!r} contradicts {q.matcher!r}: {p} vs {q}")
        found.extend(m.pairs)
        left_a = [a for a in left_a if a not in {p.attr_a for p in m.pairs}]
        left_b = [b for b in left_b if b not in {p.attr_b for p in m.pairs}]
    return _mapping(found, side_a.attrs, side_b.attrs)


def _by_source(chunks: Sequence[KnowledgeChunk]) -> dict[str, list[KnowledgeChunk]]:
    out: dict[str, list[KnowledgeChunk]] = {}
    for c in chunks:
        for s in sorted(c.sources):
            out.setdefault(s, []).append(c)
    return out


def _side(chunks: Sequence[KnowledgeChunk], source: str, ontology=None) -> _Side:
    values: dict[str, list[Literal]] = {}
    for c in chunks:
        for p in c.pairs:
            if p.source == source:
                values.setdefault(p.attribute, []).append(p.value)
    profiles = {a: DomainProfile.from_values(a, v) for a, v in values.items()}
    return _Side(list(values), profiles, ontology)


def rewrite_chunk(chunk: KnowledgeChunk, renames: Mapping[tuple[str, str], str]) -> KnowledgeChunk:
    pairs = tuple(Pair(renames.get((p.source, p.attribute), p.attribute), p.value, p.source)
                  for p in chunk.pairs)
    return KnowledgeChunk(chunk.chunk_id, pairs, chunk.neighbors, chunk.entity_name)


def resolve_attributes(chunks: Sequence[KnowledgeChunk], ladder: Sequence[str] = DEFAULT_LADDER,
                       canonical_source: str | None = None, synonyms=None,
                       threshold: float = 0.95, max_distance: float = 0.9,
                       ontologies: Mapping[str, Ontology] | None = None,
                       ) -> tuple[dict[str, AttributeMapping], list[KnowledgeChunk]]:
    """Map every source's attributes onto the canonical source's names.

    The canonical source defaults to the first source seen.  Attributes that
    stay unmatched are renamed ``<source>:<attribute>`` so they never pair up
    with another source by accident.
    """
    chunks = list(chunks)
    groups = _by_source(chunks)
    if not groups:
        return {}, chunks
    sources = list(groups)
    canonical = canonical_source or sources[0]
    if canonical not in groups:
        raise ValueError(f"canonical source {canonical!r} not present in the data")
    ontologies = ontologies or {}
    syn = Synonyms.from_mapping(synonyms)
    base = _side(groups[canonical], canonical, ontologies.get(canonical))
    mappings: dict[str, AttributeMapping] = {}
    renames: dict[tuple[str, str], str] = {}
    for src in sources:
        if src == canonical:
            continue
        other = _side(groups[src], src, ontologies.get(src))
        m = run_ladder(base, other, ladder, syn, threshold, max_distance)
        mappings[src] = m
        for p in m.pairs:
            renames[(src, p.attr_b)] = p.attr_a
        for b in m.unmatched_b:
            renames[(src, b)] = f"{src}:{b}"
    return mappings, [rewrite_chunk(c, renames) for c in chunks]


def write_mapping_report(mappings: Mapping[str, AttributeMapping], path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        fh.write("source\tattrA\tattrB\tmatcher\tscore\n")
        for src in sorted(mappings):
            for p in mappings[src].pairs:
                fh.write(f"{src}\t{p.attr_a}\t{p.attr_b}\t{p.matcher}\t{p.score:.6f}\n")


class AttributeResolver(TransformerMixin, BaseEstimator):
    """Learns attribute mappings between sources and rewrites chunks accordingly.

    Attributes
    ----------
    mappings_ : dict
        Source -> :class:`AttributeMapping` against ``canonical_source_``.
    renames_ : dict
        ``(source, attribute) -> canonical attribute``.
    """

    def __init__(self, ladder=DEFAULT_LADDER, canonical_source=None, synonyms=None,
                 threshold=0.95, max_distance=0.9, ontologies=None):
        self.ladder = ladder
        self.canonical_source = canonical_source
        self.synonyms = synonyms
        self.threshold = threshold
        self.max_distance = max_distance
        self.ontologies = ontologies

    def fit(self, X, y=None):
        chunks = check_chunks(X)
        groups = _by_source(chunks)
        self.sources_ = list(groups)
        self.canonical_source_ = self.canonical_source or (self.sources_[0] if self.sources_ else None)
        self.mappings_, _ = resolve_attributes(
            chunks, tuple(self.ladder), self.canonical_source_, self.synonyms, self.threshold,
            self.max_distance, self.ontologies)
        self.renames_ = {}
        for src, m in self.mappings_.items():
            for p in m.pairs:
                self.renames_[(src, p.attr_b)] = p.attr_a
            for b in m.unmatched_b:
                self.renames_[(src, b)] = f"{src}:{b}"
        return self

    def transform(self, X):
        return [rewrite_chunk(c, self.renames_) for c in check_chunks(X)]
