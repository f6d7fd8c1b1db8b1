"""Loaders turning dataset files into knowledge chunks (plus gold partitions)."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .fileio import FormatError, read_gold, read_network, read_ontology
from .model import (KnowledgeChunk, Pair, chunks_from_network, chunks_from_ontology,
                    parse_literal)

FORMATS = ("citeseer_dat", "delimited", "network_file", "ontology_file")
CITESEER_FIELDS = ("ref_id", "paper_id", "entity_id", "name")


class DataError(ValueError):
    """A dataset file could not be loaded."""


@dataclass(frozen=True)
class DatasetDescriptor:
    """Where a dataset lives and how its records map onto chunks.

    ``relation`` links records that share a value: ``{"shared_column": "paper_id"}``
    links every pair of records with the same ``paper_id`` (co-authorship in
    citation data).  ``entity_column`` names an inline gold label; a separate
    ``truth_path`` file takes precedence.
    """

    name: str
    format: str
    path: str
    source_id: str | None = None
    column_map: Mapping[str, str] = field(default_factory=dict)
    id_column: str = "id"
    relation: Mapping[str, str] = field(default_factory=dict)
    entity_column: str | None = None
    truth_path: str | None = None
    delimiter: str | None = None
    name_attribute: str | None = None
    fields: Sequence[str] = CITESEER_FIELDS

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown dataset format {self.format!r}; expected one of {FORMATS}")
        for key in self.relation:
            if key != "shared_column":
                raise ValueError(f"unknown relation kind {key!r}; expected 'shared_column'")

    @property
    def source(self) -> str:
        return self.source_id or self.name


@dataclass
class LoadedDataset:
    descriptor: DatasetDescriptor
    chunks: list[KnowledgeChunk]
    gold: list[frozenset[str]] | None = None


def _chunk_id(source: str, record_id: str) -> str:
    return f"{source}:{record_id}"


def _build(desc: DatasetDescriptor, records: list[tuple[int, str, dict[str, str]]]):
    """records: (line number, record id, raw column values)."""
    src = desc.source
    seen: dict[str, int] = {}
    for lineno, rid, _ in records:
        if rid in seen:
            raise DataError(f"{desc.path}:{lineno}: duplicate record id {rid!r} "
                            f"(first on line {seen[rid]})")
        seen[rid] = lineno
    shared = desc.relation.get("shared_column")
    special = {desc.id_column, desc.entity_column, shared} - {None}
    links: dict[str, set[str]] = {}
    if shared:
        by_value: dict[str, list[str]] = {}
        for _, rid, row in records:
            v = (row.get(shared) or "").strip()
            if v:
                by_value.setdefault(v, []).append(_chunk_id(src, rid))
        for ids in by_value.values():
            for a in ids:
                links.setdefault(a, set()).update(i for i in ids if i != a)

    chunks, inline_gold = [], {}
    for _, rid, row in records:
        cid = _chunk_id(src, rid)
        pairs = []
        for col, raw in row.items():
            if desc.column_map:
                if col not in desc.column_map:
                    continue
                attr = desc.column_map[col]
            elif col in special:
                continue
            else:
                attr = col
            text = (raw or "").strip()
            if text:
                pairs.append(Pair(attr, parse_literal(text), src))
        name = ""
        if desc.name_attribute:
            name = next((str(p.value) for p in pairs if p.attribute == desc.name_attribute), "")
        chunks.append(KnowledgeChunk(cid, tuple(pairs), frozenset(links.get(cid, ())), name))
        if desc.entity_column:
            label = (row.get(desc.entity_column) or "").strip()
            inline_gold.setdefault(label or f"__{cid}", []).append(cid)
    gold = [frozenset(g) for g in inline_gold.values()] if desc.entity_column else None
    return chunks, gold


def _sniff_delimiter(desc: DatasetDescriptor) -> str:
    if desc.delimiter:
        return "\t" if desc.delimiter in ("tab", "\\t") else desc.delimiter
    return "\t" if Path(desc.path).suffix.lower() in (".tsv", ".tab") else ","


def load_delimited(desc: DatasetDescriptor):
    delim = _sniff_delimiter(desc)
    with open(desc.path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh, delimiter=delim)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            return [], ([] if desc.entity_column else None)
        missing = [c for c in list(desc.column_map) + [desc.id_column] if c not in header]
        for extra in (desc.entity_column, desc.relation.get("shared_column")):
            if extra and extra not in header:
                missing.append(extra)
        if missing:
            raise DataError(f"{desc.path}:1: columns {missing} not in header {header}")
        records = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{desc.path}:{lineno}: expected {len(header)} fields, "
                                f"got {len(row)}")
            values = dict(zip(header, row))
            rid = values[desc.id_column].strip()
            if not rid:
                raise DataError(f"{desc.path}:{lineno}: empty record id")
            records.append((lineno, rid, values))
    return _build(desc, records)


def _split_dat(line: str, n: int) -> list[str]:
    for sep in ("\t", "|"):
        if sep in line:
            return [t.strip() for t in line.split(sep)]
    # whitespace layout: the last field (the name) keeps its inner spaces
    return re.split(r"\s+", line.strip(), maxsplit=n - 1)


def load_citeseer_dat(desc: DatasetDescriptor):
    """One author reference per line; ``desc.fields`` names the columns.

    Fields may be separated by tabs, ``|`` or runs of whitespace.  By default
    references are linked to every other reference of the same paper and the
    ``entity_id`` column provides the gold partition.
    """
    fields = list(desc.fields)
    if "ref_id" not in fields:
        raise DataError("citeseer fields must include 'ref_id'")
    desc_eff = DatasetDescriptor(
        desc.name, desc.format, desc.path, desc.source_id,
        desc.column_map or ({"name": "name"} if "name" in fields else {}),
        "ref_id",
        desc.relation or ({"shared_column": "paper_id"} if "paper_id" in fields else {}),
        desc.entity_column or ("entity_id" if "entity_id" in fields else None),
        desc.truth_path, desc.delimiter, desc.name_attribute or "name", fields)
    records = []
    with open(desc.path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            toks = _split_dat(line, len(fields))
            if len(toks) != len(fields):
                raise DataError(f"{desc.path}:{lineno}: expected {len(fields)} fields "
                                f"{fields}, got {len(toks)}")
            values = dict(zip(fields, toks))
            if not values["ref_id"]:
                raise DataError(f"{desc.path}:{lineno}: empty reference id")
            records.append((lineno, values["ref_id"], values))
    return _build(desc_eff, records)


def _namespace_gold(groups, source: str, ids: set[str]) -> list[frozenset[str]]:
    out = []
    for g in groups:
        out.append(frozenset(r if r in ids else _chunk_id(source, r) for r in g))
    return out


def load(desc: DatasetDescriptor) -> LoadedDataset:
    """Load chunks and, when available, the gold partition.

    The gold partition must cover exactly the loaded chunks; record ids in a
    gold file may be given with or without the ``<source>:`` prefix.
    """
    path = Path(desc.path)
    if not path.is_file():
        raise DataError(f"dataset file not found: {desc.path}")
    try:
        if desc.format == "delimited":
            chunks, gold = load_delimited(desc)
        elif desc.format == "citeseer_dat":
            chunks, gold = load_citeseer_dat(desc)
        elif desc.format == "network_file":
            chunks, gold = chunks_from_network(read_network(path), desc.source,
                                               desc.name_attribute), None
        else:
            chunks, gold = chunks_from_ontology(read_ontology(path), desc.source,
                                                desc.name_attribute), None
    except (FormatError, UnicodeDecodeError, csv.Error) as exc:
        raise DataError(str(exc)) from exc
    ids = {c.chunk_id for c in chunks}
    if desc.truth_path:
        if not Path(desc.truth_path).is_file():
            raise DataError(f"gold file not found: {desc.truth_path}")
        try:
            gold = _namespace_gold(read_gold(desc.truth_path), desc.source, ids)
        except FormatError as exc:
            raise DataError(str(exc)) from exc
    if gold is not None:
        covered = set().union(*gold) if gold else set()
        if covered != ids:
            raise DataError(f"gold partition for {desc.name!r} does not match the loaded records "
                            f"({len(covered - ids)} unknown, {len(ids - covered)} missing)")
    return LoadedDataset(desc, chunks, gold)
