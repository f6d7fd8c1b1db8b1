"""Line-based text formats for networks, ontologies, clusters and gold files.

Tokens are tab separated.  Inside a token a backslash escapes itself, tabs
(``\\t``) and newlines (``\\n``).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import Axiom, AxiomKind, Edge, Literal, Network, Ontology, parse_literal

NETWORK_HEADER = "#network"
ONTOLOGY_HEADER = "#ontology"


class FormatError(ValueError):
    def __init__(self, path, lineno: int | None, message: str):
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.lineno = lineno


def escape(text: str) -> str:
    return str(text).replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape(text: str) -> str:
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _literal_token(value: Literal) -> str:
    return escape(repr(value) if isinstance(value, float) else str(value))


def _attr_token(attr: str, value: Literal) -> str:
    if "=" in attr:
        raise ValueError(f"attribute name {attr!r} may not contain '='")
    return f"{escape(attr)}={_literal_token(value)}"


def _parse_attr(token: str, path, lineno) -> tuple[str, Literal]:
    attr, sep, value = token.partition("=")
    if not sep or not attr:
        raise FormatError(path, lineno, f"expected attr=value, got {token!r}")
    return unescape(attr), parse_literal(unescape(value))


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if line.strip():
                yield lineno, line


def _check_header(lines, header, path):
    try:
        lineno, first = next(lines)
    except StopIteration:
        raise FormatError(path, None, f"empty file, expected {header!r} header") from None
    if first.strip() != header:
        raise FormatError(path, lineno, f"expected header {header!r}, got {first!r}")


def write_network(net: Network, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(NETWORK_HEADER + "\n")
        for v in sorted(net.vertices):
            toks = ["V", escape(v)] + [_attr_token(a, x) for a, x in net.vertex_attrs.get(v, ())]
            fh.write("\t".join(toks) + "\n")
        for e in net.edges:
            toks = ["E", escape(e.id), escape(e.u), escape(e.v)]
            if e.directed:
                toks.append("directed")
            toks += [_attr_token(a, x) for a, x in net.edge_attrs.get(e.id, ())]
            fh.write("\t".join(toks) + "\n")


def read_network(path) -> Network:
    lines = _lines(path)
    _check_header(lines, NETWORK_HEADER, path)
    vertices: list[str] = []
    vattrs: dict[str, list] = {}
    edges: list[Edge] = []
    eattrs: dict[str, list] = {}
    for lineno, line in lines:
        toks = line.split("\t")
        kind = toks[0]
        if kind == "V":
            if len(toks) < 2:
                raise FormatError(path, lineno, "vertex line needs an id")
            vid = unescape(toks[1])
            if vid in vattrs:
                raise FormatError(path, lineno, f"duplicate vertex {vid!r}")
            vertices.append(vid)
            vattrs[vid] = [_parse_attr(t, path, lineno) for t in toks[2:]]
        elif kind == "E":
            if len(toks) < 4:
                raise FormatError(path, lineno, "edge line needs an id and two endpoints")
            rest = toks[4:]
            directed = bool(rest) and rest[0] == "directed"
            if directed:
                rest = rest[1:]
            eid = unescape(toks[1])
            edges.append(Edge(eid, unescape(toks[2]), unescape(toks[3]), directed))
            eattrs[eid] = [_parse_attr(t, path, lineno) for t in rest]
        else:
            raise FormatError(path, lineno, f"unknown line type {kind!r}")
    try:
        return Network(frozenset(vertices), tuple(edges),
                       {k: v for k, v in vattrs.items() if v},
                       {k: v for k, v in eattrs.items() if v})
    except ValueError as exc:
        raise FormatError(path, None, str(exc)) from exc


def write_ontology(ont: Ontology, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(ONTOLOGY_HEADER + "\n")
        for tag, ents in (("C", ont.classes), ("I", ont.individuals), ("R", ont.relations),
                          ("A", ont.attributes)):
            for ent in sorted(ents):
                fh.write(f"{tag}\t{escape(ent)}\n")
        for ax in ont.axioms:
            if ax.kind is AxiomKind.ATTRIBUTE:
                fh.write(f"X\t{escape(ax.subject)}.{_attr_token(ax.relation, ax.object)}\n")
            else:
                fh.write(f"X\t{escape(ax.subject)}\t{escape(ax.relation)}\t{escape(ax.object)}\n")


def read_ontology(path) -> Ontology:
    lines = _lines(path)
    _check_header(lines, ONTOLOGY_HEADER, path)
    decl: dict[str, set[str]] = {"C": set(), "I": set(), "R": set(), "A": set()}
    raw_axioms: list[tuple[int, list[str]]] = []
    for lineno, line in lines:
        toks = line.split("\t")
        kind = toks[0]
        if kind in decl:
            if len(toks) != 2:
                raise FormatError(path, lineno, f"{kind} line takes exactly one id")
            decl[kind].add(unescape(toks[1]))
        elif kind == "X":
            raw_axioms.append((lineno, toks[1:]))
        else:
            raise FormatError(path, lineno, f"unknown line type {kind!r}")
    subjects = sorted(set().union(*decl.values()), key=len, reverse=True)
    axioms = []
    for lineno, toks in raw_axioms:
        if len(toks) == 3:
            subj, rel, obj = (unescape(t) for t in toks)
            if rel == "isOf" and obj in decl["C"]:
                axioms.append(Axiom.member(subj, obj))
            else:
                axioms.append(Axiom.relate(subj, rel, obj))
        elif len(toks) == 1:
            left, sep, value = toks[0].partition("=")
            if not sep:
                raise FormatError(path, lineno, "attribute axiom needs <subject>.<attr>=<literal>")
            left = unescape(left)
            # subject ids may contain dots, so take the longest declared prefix
            subj = next((s for s in subjects if left.startswith(s + ".")), None)
            if subj is None:
                raise FormatError(path, lineno, f"no declared subject prefixes {left!r}")
            axioms.append(Axiom.attribute(subj, left[len(subj) + 1:],
                                          parse_literal(unescape(value))))
        else:
            raise FormatError(path, lineno, "malformed axiom line")
    try:
        return Ontology(frozenset(decl["C"]), frozenset(decl["I"]), frozenset(decl["R"]),
                        frozenset(decl["A"]), tuple(axioms))
    except ValueError as exc:
        raise FormatError(path, None, str(exc)) from exc


def write_clusters(groups: Iterable[Iterable[str]], path) -> None:
    """``cluster_id<TAB>chunk_id`` lines, clusters numbered in canonical order."""
    ordered = sorted((sorted(g) for g in groups), key=lambda g: g[0])
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for i, g in enumerate(ordered):
            for m in g:
                fh.write(f"{i}\t{escape(m)}\n")


def _read_pairs(path, what: str) -> list[tuple[int, str, str]]:
    out = []
    for lineno, line in _lines(path):
        if line.startswith("#"):
            continue
        toks = line.split("\t")
        if len(toks) != 2 or not toks[0] or not toks[1]:
            raise FormatError(path, lineno, f"expected {what}<TAB>record_id")
        out.append((lineno, unescape(toks[0]), unescape(toks[1])))
    return out


def _group(rows, path) -> list[frozenset[str]]:
    groups: dict[str, list[str]] = {}
    seen: dict[str, int] = {}
    for lineno, key, rec in rows:
        if rec in seen:
            raise FormatError(path, lineno, f"record {rec!r} already listed on line {seen[rec]}")
        seen[rec] = lineno
        groups.setdefault(key, []).append(rec)
    return [frozenset(g) for g in groups.values()]


def read_clusters(path) -> list[frozenset[str]]:
    return _group(_read_pairs(path, "cluster_id"), path)


def read_gold(path) -> list[frozenset[str]]:
    """``entity_id<TAB>record_id`` lines as a partition of record ids."""
    return _group(_read_pairs(path, "entity_id"), path)


def write_gold(groups: Sequence[Iterable[str]], path, labels: Sequence[str] | None = None) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for i, g in enumerate(groups):
            label = labels[i] if labels else f"e{i}"
            for m in sorted(g):
                fh.write(f"{escape(label)}\t{escape(m)}\n")


def write_table(rows: Sequence[Mapping], path, columns: Sequence[str] | None = None) -> None:
    """Tab-separated table with a header row."""
    columns = list(columns or (rows[0].keys() if rows else []))
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(columns) + "\n")
        for r in rows:
            fh.write("\t".join(_cell(r.get(c, "")) for c in columns) + "\n")


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return escape(v)
