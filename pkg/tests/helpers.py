"""Deterministic fixture builders shared by the test modules."""

from __future__ import annotations

import itertools
import random

from trustmerge.model import KnowledgeChunk, Pair, make_chunk, symmetrize

SMITH_COAUTHORS = [
    ["A. Jones", "B. Novak", "C. Rossi"],
    ["D. Lindqvist", "E. Okafor", "F. Tanaka"],
    ["G. Moreau", "H. Petrov", "I. Haddad"],
    ["K. Schulz", "L. Fernandes", "M. Kowalczyk"],
]


def disambiguation_corpus(papers_per_author: int = 6, name: str = "J. Smith"):
    """Four different people sharing one name, told apart only by their coauthors.

    Every paper has the ambiguous author and two coauthors drawn from that
    person's own pool.  Returns (chunks, gold partition).
    """
    chunks, gold = [], {}
    for person, pool in enumerate(SMITH_COAUTHORS):
        combos = list(itertools.combinations(pool, 2))
        for k in range(papers_per_author):
            paper = f"p{person}_{k}"
            refs = [(f"{paper}:a0", name, f"smith{person}")]
            for j, co in enumerate(combos[k % len(combos)], 1):
                refs.append((f"{paper}:a{j}", co, co))
            ids = [r[0] for r in refs]
            for rid, nm, ent in refs:
                chunks.append(make_chunk(rid, {"name": nm}, "cs", [i for i in ids if i != rid]))
                gold.setdefault(ent, []).append(rid)
    return symmetrize(chunks), [frozenset(g) for g in gold.values()]


# ten records of four restaurants, with near-miss distractors
CLEAN_TEN = [
    ("r1", "Arnie Morton's of Chicago", "310-246-1501", "r-morton"),
    ("r2", "Arnie Mortons of Chicago", "310/246-1501", "r-morton"),
    ("r3", "Arnie Morton's Chicago", "310-246-1501", "r-morton"),
    ("r4", "Art's Delicatessen", "818-762-1221", "r-arts"),
    ("r5", "Arts Delicatessen", "818/762-1221", "r-arts"),
    ("r6", "Hotel Bel-Air", "310-472-1211", "r-belair"),
    ("r7", "Hotel Bel Air", "310/472-1211", "r-belair"),
    ("r8", "Cafe Bizou", "818-788-3536", "r-bizou"),
    ("r9", "Cafe Bizou", "818/788-3536", "r-bizou"),
    ("r10", "Cafe Blanc", "310-473-1122", "r-blanc"),
]


def clean_ten():
    chunks = [make_chunk(i, {"name": n, "phone": p}, "fodors") for i, n, p, _ in CLEAN_TEN]
    gold: dict[str, list[str]] = {}
    for i, _, _, e in CLEAN_TEN:
        gold.setdefault(e, []).append(i)
    return chunks, [frozenset(g) for g in gold.values()]


VOCAB = ["anna", "annie", "bob", "robert", "carl", "karl", "dana", "diana", "eve", "eva"]


def random_corpus(rng: random.Random, n: int, p_link: float = 0.15, attrs=("name", "city"),
                  sources=("s1", "s2")) -> list[KnowledgeChunk]:
    """Small random chunk store with a symmetric random link structure."""
    cities = ["paris", "pariss", "rome", "roma", "oslo"]
    chunks = []
    ids = [f"c{i:02d}" for i in range(n)]
    for cid in ids:
        pairs = []
        src = rng.choice(sources)
        if "name" in attrs:
            pairs.append(Pair("name", f"{rng.choice(VOCAB)} {rng.choice(VOCAB)}", src))
        if "city" in attrs and rng.random() < 0.8:
            pairs.append(Pair("city", rng.choice(cities), src))
        if rng.random() < 0.2:
            pairs.append(Pair("name", rng.choice(VOCAB), src))
        nbrs = [o for o in ids if o != cid and rng.random() < p_link]
        chunks.append(KnowledgeChunk(cid, tuple(pairs), frozenset(nbrs)))
    return symmetrize(chunks)
