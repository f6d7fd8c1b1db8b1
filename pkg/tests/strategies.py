"""Hypothesis strategies for random networks and chunk graphs."""

from __future__ import annotations

from hypothesis import strategies as st

from trustmerge.model import Edge, KnowledgeChunk, Network, Pair, symmetrize

literals = st.one_of(
    st.integers(-1000, 1000),
    st.floats(allow_nan=False, allow_infinity=False, width=32),
    st.text(alphabet="abcxyz \t=\\.", max_size=6),
)
names = st.text(alphabet="abcdefgh", min_size=1, max_size=5)
# attribute names may not reuse the lift's reserved vocabulary
attr_names = names.filter(lambda s: s not in {"edge", "vertex"})


@st.composite
def networks(draw, max_vertices: int = 15, max_edges: int = 25):
    n = draw(st.integers(0, max_vertices))
    vertices = [f"v{i}" for i in range(n)]
    edges = []
    if n:
        for k in range(draw(st.integers(0, max_edges))):
            u = draw(st.sampled_from(vertices))
            v = draw(st.sampled_from(vertices))
            edges.append(Edge(f"e{k}", u, v, draw(st.booleans())))
    attr_pairs = st.lists(st.tuples(attr_names, literals), max_size=3).map(tuple)
    vattrs = {v: draw(attr_pairs) for v in vertices if draw(st.booleans())}
    eattrs = {e.id: draw(attr_pairs) for e in edges if draw(st.booleans())}
    return Network(frozenset(vertices), tuple(edges), vattrs, eattrs)


@st.composite
def chunk_graphs(draw, max_chunks: int = 20):
    n = draw(st.integers(1, max_chunks))
    ids = [f"k{i:02d}" for i in range(n)]
    chunks = []
    for cid in ids:
        nbrs = draw(st.sets(st.sampled_from(ids), max_size=min(n, 5)))
        src = draw(st.sampled_from(["s1", "s2", "s3"]))
        chunks.append(KnowledgeChunk(cid, (Pair("name", draw(names), src),), frozenset(nbrs)))
    return symmetrize(chunks)


@st.composite
def partitions_of(draw, ids):
    labels = [draw(st.integers(0, max(0, len(ids) // 2))) for _ in ids]
    groups: dict[int, list] = {}
    for i, lab in zip(ids, labels):
        groups.setdefault(lab, []).append(i)
    return [frozenset(g) for g in groups.values()]
