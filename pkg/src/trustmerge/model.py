"""Networks, ontologies and knowledge chunks.

Datasets live on two levels: a network (vertices, edges and their
attribute lists) and an ontology (classes, individuals, relations,
attributes and axioms).  Either can be inferred from the other, and both
are flattened into :class:`KnowledgeChunk` records that every matching
and merging algorithm consumes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

Literal = Union[str, int, float]

VERTEX_CLASS = "vertex"
EDGE_CLASS = "edge"
IS_OF = "isOf"
IS_IN = "isIn"
# edge-level marker written by infer_ontology_from_network for directed edges
DIRECTED_MARKER = "__directed__"


def parse_literal(text: str) -> Literal:
    """Parse ``text`` as a number when that is lossless, else keep the string."""
    s = text.strip()
    if not s:
        return text
    try:
        as_int = int(s)
    except ValueError:
        pass
    else:
        if str(as_int) == s:
            return as_int
    try:
        as_float = float(s)
    except ValueError:
        return text
    if repr(as_float) == s:
        return as_float
    return text


def is_numeric(value: Literal) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, float)):
        return True
    try:
        float(str(value).strip())
    except ValueError:
        return False
    return True


# --------------------------------------------------------------------------
# Networks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    directed: bool = False

    def __post_init__(self):
        if not self.directed and self.v < self.u:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.u, self.v)


AttrList = tuple[tuple[str, Literal], ...]


@dataclass(frozen=True)
class Network:
    """Labelled multigraph with mixed directed and undirected edges."""

    vertices: frozenset[str]
    edges: tuple[Edge, ...] = ()
    vertex_attrs: Mapping[str, AttrList] = field(default_factory=dict)
    edge_attrs: Mapping[str, AttrList] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            if e.u not in self.vertices or e.v not in self.vertices:
                raise ValueError(f"edge {e.id!r} has an endpoint outside the vertex set")
            if e.id in seen:
                raise ValueError(f"duplicate edge id {e.id!r}")
            if e.id in self.vertices:
                raise ValueError(f"edge id {e.id!r} collides with a vertex id")
            seen.add(e.id)
        for v in self.vertex_attrs:
            if v not in self.vertices:
                raise ValueError(f"attributes given for unknown vertex {v!r}")
        for eid in self.edge_attrs:
            if eid not in seen:
                raise ValueError(f"attributes given for unknown edge {eid!r}")
        # empty attribute lists are dropped so that equality is structural
        object.__setattr__(
            self, "vertex_attrs",
            {k: tuple(map(tuple, v)) for k, v in self.vertex_attrs.items() if v})
        object.__setattr__(
            self, "edge_attrs",
            {k: tuple(map(tuple, v)) for k, v in self.edge_attrs.items() if v})

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)


# --------------------------------------------------------------------------
# Ontologies
# --------------------------------------------------------------------------


class AxiomKind(str, enum.Enum):
    CLASS_MEMBERSHIP = "class-membership"
    RELATION = "relation-assertion"
    ATTRIBUTE = "attribute-assertion"


@dataclass(frozen=True)
class Axiom:
    kind: AxiomKind
    subject: str
    object: Literal
    relation: str = IS_OF

    @classmethod
    def member(cls, subject: str, class_id: str) -> "Axiom":
        return cls(AxiomKind.CLASS_MEMBERSHIP, subject, class_id, IS_OF)

    @classmethod
    def relate(cls, subject: str, relation: str, obj: str) -> "Axiom":
        return cls(AxiomKind.RELATION, subject, obj, relation)

    @classmethod
    def attribute(cls, subject: str, attribute: str, value: Literal) -> "Axiom":
        return cls(AxiomKind.ATTRIBUTE, subject, value, attribute)


@dataclass(frozen=True)
class Ontology:
    classes: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()
    relations: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()
    axioms: tuple[Axiom, ...] = ()

    def __post_init__(self):
        for name in ("classes", "individuals", "relations", "attributes"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "axioms", tuple(self.axioms))
        sets = (self.classes, self.individuals, self.relations, self.attributes)
        everything: dict[str, int] = {}
        for s in sets:
            for ent in s:
                everything[ent] = everything.get(ent, 0) + 1
        dup = sorted(e for e, n in everything.items() if n > 1)
        if dup:
            raise ValueError(f"entities present in more than one entity set: {dup}")
        for ax in self.axioms:
            if ax.subject not in everything:
                raise ValueError(f"axiom subject {ax.subject!r} is not a declared entity")
            if ax.kind is AxiomKind.CLASS_MEMBERSHIP:
                if ax.object not in self.classes:
                    raise ValueError(f"class {ax.object!r} is not declared")
            elif ax.kind is AxiomKind.RELATION:
                if not isinstance(ax.object, str) or ax.object not in everything:
                    raise ValueError(f"relation object {ax.object!r} is not a declared entity")
                if ax.relation not in self.relations:
                    raise ValueError(f"relation {ax.relation!r} is not declared")
            elif ax.kind is AxiomKind.ATTRIBUTE:
                if ax.relation not in self.attributes:
                    raise ValueError(f"attribute {ax.relation!r} is not declared")

    def is_individual_level(self, ax: Axiom) -> bool:
        if ax.kind is AxiomKind.RELATION:
            return ax.subject in self.individuals and ax.object in self.individuals
        return ax.subject in self.individuals


def infer_ontology_from_network(net: Network) -> Ontology:
    """Lift a network to the semantic level.

    Vertices and edges both become individuals; membership ``isOf`` and
    incidence ``isIn`` axioms record the graph structure, and every attribute
    value becomes an attribute assertion.  Attribute names must not
    coincide with vertex or edge ids or with the reserved names above.
    """
    reserved = ({VERTEX_CLASS, EDGE_CLASS, IS_OF, IS_IN, DIRECTED_MARKER}
                | set(net.vertices) | {e.id for e in net.edges})
    used = {a for attrs in (*net.vertex_attrs.values(), *net.edge_attrs.values()) for a, _ in attrs}
    clash = sorted(used & reserved)
    if clash:
        raise ValueError(f"attribute names {clash} collide with vertex/edge ids or reserved names")
    axioms: list[Axiom] = []
    attributes: set[str] = set()
    for v in sorted(net.vertices):
        axioms.append(Axiom.member(v, VERTEX_CLASS))
    for e in net.edges:
        axioms.append(Axiom.member(e.id, EDGE_CLASS))
    for e in net.edges:
        # tail first, so direction survives the round trip
        axioms.append(Axiom.relate(e.u, IS_IN, e.id))
        if e.v != e.u:
            axioms.append(Axiom.relate(e.v, IS_IN, e.id))
        if e.directed:
            attributes.add(DIRECTED_MARKER)
            axioms.append(Axiom.attribute(e.id, DIRECTED_MARKER, 1))
    for v in sorted(net.vertices):
        for attr, value in net.vertex_attrs.get(v, ()):
            attributes.add(attr)
            axioms.append(Axiom.attribute(v, attr, value))
    for e in net.edges:
        for attr, value in net.edge_attrs.get(e.id, ()):
            attributes.add(attr)
            axioms.append(Axiom.attribute(e.id, attr, value))
    return Ontology(
        classes=frozenset({VERTEX_CLASS, EDGE_CLASS}),
        individuals=frozenset(net.vertices) | frozenset(e.id for e in net.edges),
        relations=frozenset({IS_OF, IS_IN}),
        attributes=frozenset(attributes),
        axioms=tuple(axioms),
    )


def _is_inferred(ont: Ontology) -> bool:
    return {VERTEX_CLASS, EDGE_CLASS} <= ont.classes and IS_IN in ont.relations


def _inferred_edge_individuals(ont: Ontology) -> set[str]:
    if not _is_inferred(ont):
        return set()
    return {
        ax.subject
        for ax in ont.axioms
        if ax.kind is AxiomKind.CLASS_MEMBERSHIP and ax.object == EDGE_CLASS
        and ax.subject in ont.individuals
    }


def infer_network_from_ontology(ont: Ontology) -> Network:
    """Project an ontology onto the data level.

    Individuals become vertices and every axiom relating two individuals
    becomes an edge labelled with the relation.  Class memberships and
    attribute literals become vertex attributes.  Relations that do not
    connect two individuals (class-level statements) have no data-level
    representation and are dropped.

    Ontologies produced by :func:`infer_ontology_from_network` are
    recognised by their ``edge`` individuals and decoded exactly, so that
    lifting and projecting a network is the identity.
    """
    inferred = _is_inferred(ont)
    edge_inds = _inferred_edge_individuals(ont)
    incidences: dict[str, list[str]] = {e: [] for e in edge_inds}
    for ax in ont.axioms:
        if ax.kind is AxiomKind.RELATION and ax.relation == IS_IN and ax.object in edge_inds:
            incidences[ax.object].append(ax.subject)

    vertices = frozenset(ont.individuals - edge_inds)
    vattrs: dict[str, list[tuple[str, Literal]]] = {}
    eattrs: dict[str, list[tuple[str, Literal]]] = {}
    directed: set[str] = set()
    edges: list[Edge] = []

    for ax in ont.axioms:
        if ax.kind is AxiomKind.CLASS_MEMBERSHIP:
            if ax.subject in vertices and not (inferred and ax.object == VERTEX_CLASS):
                vattrs.setdefault(ax.subject, []).append((IS_OF, ax.object))
        elif ax.kind is AxiomKind.ATTRIBUTE:
            if ax.subject in edge_inds:
                if ax.relation == DIRECTED_MARKER:
                    directed.add(ax.subject)
                else:
                    eattrs.setdefault(ax.subject, []).append((ax.relation, ax.object))
            elif ax.subject in vertices:
                vattrs.setdefault(ax.subject, []).append((ax.relation, ax.object))

    counter = 0
    for ax in ont.axioms:
        if ax.kind is AxiomKind.CLASS_MEMBERSHIP and ax.subject in edge_inds:
            ends = incidences[ax.subject]
            if len(ends) == 1:
                u = v = ends[0]
            elif len(ends) == 2:
                u, v = ends
            else:
                raise ValueError(f"inferred edge {ax.subject!r} has {len(ends)} endpoints")
            edges.append(Edge(ax.subject, u, v, ax.subject in directed))
        elif ax.kind is AxiomKind.RELATION:
            if ax.object in edge_inds and ax.relation == IS_IN:
                continue
            if ax.subject in vertices and ax.object in vertices:
                eid = f"e{counter}"
                while eid in vertices:
                    counter += 1
                    eid = f"e{counter}"
                counter += 1
                edges.append(Edge(eid, ax.subject, ax.object, directed=True))
                eattrs[eid] = [("relation", ax.relation)]
    return Network(vertices, tuple(edges), vattrs, eattrs)


# --------------------------------------------------------------------------
# Knowledge chunks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Pair:
    attribute: str
    value: Literal
    source: str


@dataclass(frozen=True)
class KnowledgeChunk:
    """Attribute-value-provenance record for one reference to an entity."""

    chunk_id: str
    pairs: tuple[Pair, ...] = ()
    neighbors: frozenset[str] = frozenset()
    entity_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "neighbors", frozenset(self.neighbors) - {self.chunk_id})
        for p in self.pairs:
            if not p.source:
                raise ValueError(f"chunk {self.chunk_id!r}: pair {p.attribute!r} has no source")

    @property
    def attributes(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self.pairs:
            seen.setdefault(p.attribute, None)
        return list(seen)

    @property
    def sources(self) -> frozenset[str]:
        return frozenset(p.source for p in self.pairs)

    def values(self, attribute: str) -> list[Literal]:
        return [p.value for p in self.pairs if p.attribute == attribute]

    def pairs_for(self, attribute: str) -> list[Pair]:
        return [p for p in self.pairs if p.attribute == attribute]


def make_chunk(chunk_id, values: Mapping[str, Literal | Sequence[Literal]], source, neighbors=(),
               name_attribute: str | None = None) -> KnowledgeChunk:
    """Shorthand for building a chunk from ``{attribute: value(s)}``."""
    pairs = []
    for attr, val in values.items():
        vals = val if isinstance(val, (list, tuple)) else [val]
        pairs.extend(Pair(attr, v, source) for v in vals)
    name = ""
    if name_attribute and name_attribute in values:
        v = values[name_attribute]
        name = str(v[0] if isinstance(v, (list, tuple)) else v)
    return KnowledgeChunk(str(chunk_id), tuple(pairs), frozenset(map(str, neighbors)), name)


def entity_name_for(chunk: KnowledgeChunk, name_attribute: str | None) -> str:
    if name_attribute is None:
        return chunk.entity_name
    vals = chunk.values(name_attribute)
    return str(vals[0]) if vals else ""


def symmetrize(chunks: Iterable[KnowledgeChunk]) -> list[KnowledgeChunk]:
    """Close neighbor links under symmetry and drop links to unknown chunks."""
    chunks = list(chunks)
    ids = {c.chunk_id for c in chunks}
    links: dict[str, set[str]] = {c.chunk_id: set() for c in chunks}
    for c in chunks:
        for n in c.neighbors:
            if n in ids:
                links[c.chunk_id].add(n)
                links[n].add(c.chunk_id)
    return [KnowledgeChunk(c.chunk_id, c.pairs, frozenset(links[c.chunk_id]), c.entity_name)
            for c in chunks]


def chunks_from_ontology(ont: Ontology, source: str,
                         name_attribute: str | None = None) -> list[KnowledgeChunk]:
    """One chunk per individual; binary axioms between individuals become links."""
    pairs: dict[str, list[Pair]] = {i: [] for i in sorted(ont.individuals)}
    links: dict[str, set[str]] = {i: set() for i in pairs}
    for ax in ont.axioms:
        if ax.kind is AxiomKind.ATTRIBUTE and ax.subject in pairs:
            if ax.relation == DIRECTED_MARKER:
                continue
            pairs[ax.subject].append(Pair(ax.relation, ax.object, source))
        elif ax.kind is AxiomKind.RELATION:
            if ax.subject in links and ax.object in links and ax.subject != ax.object:
                links[ax.subject].add(ax.object)
                links[ax.object].add(ax.subject)
    out = []
    for ind in pairs:
        chunk = KnowledgeChunk(ind, tuple(pairs[ind]), frozenset(links[ind]))
        if name_attribute:
            chunk = KnowledgeChunk(ind, chunk.pairs, chunk.neighbors,
                                   entity_name_for(chunk, name_attribute))
        out.append(chunk)
    return out


def chunks_from_network(net: Network, source: str,
                        name_attribute: str | None = None) -> list[KnowledgeChunk]:
    """Vertices become chunks, edges become neighbor links."""
    links: dict[str, set[str]] = {v: set() for v in net.vertices}
    for e in net.edges:
        if e.u != e.v:
            links[e.u].add(e.v)
            links[e.v].add(e.u)
    out = []
    for v in sorted(net.vertices):
        pairs = tuple(Pair(a, val, source) for a, val in net.vertex_attrs.get(v, ()))
        chunk = KnowledgeChunk(v, pairs, frozenset(links[v]))
        if name_attribute:
            chunk = KnowledgeChunk(v, pairs, chunk.neighbors, entity_name_for(chunk, name_attribute))
        out.append(chunk)
    return out


LINK_RELATION = "linkedTo"


def ontology_from_chunks(chunks: Sequence[KnowledgeChunk]) -> Ontology:
    """Semantic-level view of a chunk store, with no inferred structure."""
    attributes = set()
    axioms = []
    ids = {c.chunk_id for c in chunks}
    for c in chunks:
        for p in c.pairs:
            attributes.add(p.attribute)
            axioms.append(Axiom.attribute(c.chunk_id, p.attribute, p.value))
    for c in chunks:
        for n in sorted(c.neighbors):
            if n in ids and c.chunk_id < n:
                axioms.append(Axiom.relate(c.chunk_id, LINK_RELATION, n))
    rel = frozenset({LINK_RELATION}) if any(a.kind is AxiomKind.RELATION for a in axioms) else frozenset()
    return Ontology(frozenset(), frozenset(ids), rel, frozenset(attributes), tuple(axioms))


def network_from_chunks(chunks: Sequence[KnowledgeChunk]) -> Network:
    ids = {c.chunk_id for c in chunks}
    vattrs = {c.chunk_id: tuple((p.attribute, p.value) for p in c.pairs) for c in chunks}
    edges = []
    for c in chunks:
        for n in sorted(c.neighbors):
            if n in ids and c.chunk_id < n:
                edges.append(Edge(f"{c.chunk_id}--{n}", c.chunk_id, n))
    return Network(frozenset(ids), tuple(edges), vattrs, {})


# --------------------------------------------------------------------------
# Contexts
# --------------------------------------------------------------------------


class Dimension(str, enum.Enum):
    USER = "user"
    DATA = "data"
    TRUST = "trust"


class Level(str, enum.Enum):
    ABSTRACT = "abstract"
    SEMANTIC = "semantic"
    DATA = "data"


Predicate = Callable[[KnowledgeChunk, str, Literal, str], bool]


@dataclass(frozen=True)
class Context:
    dimension: Dimension
    level: Level
    predicate: Predicate

    def __call__(self, chunk, attribute, value, source) -> bool:
        return bool(self.predicate(chunk, attribute, value, source))


@dataclass(frozen=True)
class JointContext:
    """Conjunction of contexts; levels that were not defined are simply absent."""

    parts: tuple[Context, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __call__(self, chunk, attribute, value, source) -> bool:
        return all(ctx(chunk, attribute, value, source) for ctx in self.parts)


def apply_context(ctx: JointContext, chunks: Sequence[KnowledgeChunk]) -> list[KnowledgeChunk]:
    """Filter pairs through ``ctx``; drop emptied chunks and prune dangling links."""
    kept = []
    for c in chunks:
        pairs = tuple(p for p in c.pairs if ctx(c, p.attribute, p.value, p.source))
        if pairs:
            kept.append(KnowledgeChunk(c.chunk_id, pairs, c.neighbors, c.entity_name))
    alive = {c.chunk_id for c in kept}
    return [KnowledgeChunk(c.chunk_id, c.pairs, c.neighbors & alive, c.entity_name) for c in kept]


def always(result: bool = True, dimension=Dimension.USER, level=Level.DATA) -> Context:
    return Context(Dimension(dimension), Level(level), lambda *_: result)


def source_context(exclude=(), include=None, level=Level.DATA) -> Context:
    exclude = frozenset(exclude)
    include = None if include is None else frozenset(include)

    def pred(chunk, attribute, value, source):
        if source in exclude:
            return False
        return include is None or source in include

    return Context(Dimension.DATA, Level(level), pred)


def attribute_context(keep=None, drop=(), level=Level.SEMANTIC) -> Context:
    """User context projecting the data onto a set of attributes."""
    keep = None if keep is None else frozenset(keep)
    drop = frozenset(drop)

    def pred(chunk, attribute, value, source):
        if attribute in drop:
            return False
        return keep is None or attribute in keep

    return Context(Dimension.USER, Level(level), pred)


def trust_context(model, threshold: float, level=Level.ABSTRACT) -> Context:
    """Keep only values whose trust value reaches ``threshold``."""

    def pred(chunk, attribute, value, source):
        return model.value_trust(chunk.chunk_id, source, attribute) >= threshold

    return Context(Dimension.TRUST, Level(level), pred)
