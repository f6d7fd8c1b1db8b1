"""End-to-end runs: load, filter, align attributes, resolve, merge, evaluate."""

from __future__ import annotations

import logging
import platform
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

from .attributes import AttributeMapping, load_synonyms, resolve_attributes, write_mapping_report
from .config import RunConfig
from .evaluation import (EvalReport, noise_experiment, pairwise_scores, sample_clusters, sweep,
                         write_reports, write_summary)
from .fileio import (read_clusters, read_gold, write_clusters, write_network, write_ontology,
                     write_table)
from .ingestion import DataError, load
from .model import KnowledgeChunk, apply_context, network_from_chunks, ontology_from_chunks
from .redundancy import CorpusHitCounter, MergeStrategy, merge_clusters, write_merge_report
from .resolution.engine import CollectiveEntityResolver
from .trust import evaluate_chunks

log = logging.getLogger(__name__)


@dataclass
class Inputs:
    chunks: list[KnowledgeChunk]
    gold: list[frozenset[str]] | None
    mappings: dict[str, AttributeMapping] = field(default_factory=dict)


def load_inputs(cfg: RunConfig, resolve_schema: bool = True) -> Inputs:
    chunks: list[KnowledgeChunk] = []
    golds: list[list[frozenset[str]] | None] = []
    seen: set[str] = set()
    for desc in cfg.datasets:
        ds = load(desc)
        for c in ds.chunks:
            if c.chunk_id in seen:
                raise DataError(f"chunk id {c.chunk_id!r} of dataset {desc.name!r} already loaded")
            seen.add(c.chunk_id)
        chunks.extend(ds.chunks)
        golds.append(ds.gold)
    if cfg.gold_path:
        gold = read_gold(cfg.gold_path)
    elif golds and all(g is not None for g in golds):
        gold = [g for gs in golds for g in gs]
    else:
        gold = None

    if cfg.contexts.parts:
        chunks = apply_context(cfg.contexts, chunks)
    if gold is not None:
        alive = {c.chunk_id for c in chunks}
        gold = [g & alive for g in gold if g & alive]
        covered = set().union(*gold) if gold else set()
        if covered != alive:
            raise DataError(f"gold partition misses {len(alive - covered)} loaded records")

    mappings: dict[str, AttributeMapping] = {}
    ar = cfg.attribute_resolution
    if resolve_schema and ar.enabled and len({s for c in chunks for s in c.sources}) > 1:
        synonyms = load_synonyms(ar.synonyms) if ar.synonyms else None
        mappings, chunks = resolve_attributes(chunks, ar.ladder, ar.canonical_source, synonyms,
                                              ar.threshold, ar.max_distance)
    return Inputs(chunks, gold, mappings)


def chunk_trust(cfg: RunConfig, chunks):
    """The configured trust model with chunk trust filled in from the consistency rules."""
    if not cfg.trust_rules:
        return cfg.trust
    return evaluate_chunks(cfg.trust, chunks, cfg.trust_rules)


def make_resolver(cfg: RunConfig, stage: str = "full") -> CollectiveEntityResolver:
    s = cfg.similarity
    synonyms = None
    if cfg.attribute_resolution.synonyms:
        syn = load_synonyms(cfg.attribute_resolution.synonyms)
        synonyms = {w: g for g in syn.groups for w in g}
    return CollectiveEntityResolver(
        alpha=s.alpha, theta_s=s.theta_s, delta_s=s.delta_s, delta_a=s.delta_a,
        delta_r=s.delta_r, metrics=s.metrics, default_metric=s.default_metric,
        semantic_metrics=s.semantic_metrics, blocking=cfg.blocking, refresh=s.refresh,
        stage=stage, align_relational=s.align_relational,
        neighbor_threshold=s.neighbor_threshold, trust_model=cfg.trust, synonyms=synonyms)


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(cfg: RunConfig, command: str, extra: dict | None = None) -> Path:
    versions = {"python": platform.python_version()}
    for pkg in ("trustmerge", "scikit-learn", "rapidfuzz", "PyYAML"):
        try:
            versions[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            versions[pkg] = None
    path = _out(cfg) / "manifest.json"
    write_summary({"command": command, "config_sha256": cfg.config_hash, "seed": cfg.seed,
                   "versions": versions, **(extra or {})}, path)
    return path


@dataclass
class MatchOutcome:
    inputs: Inputs
    resolver: CollectiveEntityResolver | None
    reports: list[EvalReport]
    summary: dict


def run_match(cfg: RunConfig, stage: str = "full") -> MatchOutcome:
    inputs = load_inputs(cfg)
    out = _out(cfg)
    if inputs.mappings:
        write_mapping_report(inputs.mappings, out / "mapping.tsv")
    if not inputs.chunks:
        log.warning("no chunks left after applying contexts; writing empty outputs")
        write_clusters([], out / "clusters.tsv")
        summary = {"chunks": 0, "clusters": 0}
        write_summary(summary, out / "summary.json")
        return MatchOutcome(inputs, None, [], summary)
    resolver = make_resolver(cfg, stage).set_params(trust_model=chunk_trust(cfg, inputs.chunks))
    resolver.fit(inputs.chunks)
    write_clusters(resolver.clusters_.partition(), out / "clusters.tsv")
    reports = []
    if inputs.gold is not None:
        reports.append(pairwise_scores(resolver.bootstrap_clusters_, inputs.gold, "bootstrap"))
        if stage == "full":
            reports.append(pairwise_scores(resolver.clusters_, inputs.gold, "clustered"))
        write_reports([r.as_row() for r in reports], out / "eval.tsv")
    summary = resolver.summary()
    write_summary(summary, out / "summary.json")
    return MatchOutcome(inputs, resolver, reports, summary)


def _provider(path: str | None, chunks, attribute: str | None = None) -> CorpusHitCounter:
    if path:
        return CorpusHitCounter.from_file(path)
    texts = [str(p.value) for c in chunks for p in c.pairs
             if attribute is None or p.attribute == attribute]
    return CorpusHitCounter(texts)


def merge_strategy(cfg: RunConfig, chunks, kind: str | None = None, corpus: str | None = None,
                   attribute: str | None = None) -> MergeStrategy:
    kind = kind or cfg.merge.strategy
    provider = None
    if kind == "trust":
        provider = _provider(corpus or cfg.merge.corpus, chunks, attribute)
    return MergeStrategy(kind, hit_provider=provider, noise_edits=cfg.merge.m,
                         noise_letters=cfg.merge.letters)


def run_merge(cfg: RunConfig, clusters_path) -> dict:
    inputs = load_inputs(cfg)
    store = {c.chunk_id: c for c in inputs.chunks}
    groups = read_clusters(clusters_path)
    listed = set().union(*groups) if groups else set()
    unknown = listed - set(store)
    if unknown:
        raise DataError(f"{clusters_path}: clusters reference unknown chunks {sorted(unknown)[:3]}")
    groups = list(groups) + [frozenset([c]) for c in store if c not in listed]
    result = merge_clusters(groups, store, merge_strategy(cfg, inputs.chunks), cfg.trust, cfg.seed)
    out = _out(cfg)
    # merged output is built from chunks only, so no inferred isOf/isIn structure survives
    write_network(network_from_chunks(result.chunks), out / "merged.network")
    write_ontology(ontology_from_chunks(result.chunks), out / "merged.ontology")
    write_merge_report(result.decisions, out / "merge_report.tsv")
    summary = {"clusters": len(groups), "merged_chunks": len(result.chunks),
               "decisions": len(result.decisions)}
    write_summary(summary, out / "merge_summary.json")
    return summary


SWEEP_COLUMNS = ("param", "value", "precision", "recall", "f_score", "true_pos", "false_pos",
                 "false_neg", "stage")


def run_eval(cfg: RunConfig, stage: str = "full") -> dict:
    inputs = load_inputs(cfg)
    out = _out(cfg)
    produced = {}
    if cfg.sweep is not None:
        if inputs.gold is None:
            raise DataError("a parameter sweep needs a gold partition")
        stages = ("bootstrap",) if stage == "bootstrap" else ("bootstrap", "clustered")
        rows = sweep(cfg.sweep.param, cfg.sweep.grid, make_resolver(cfg, stage), inputs.chunks,
                     inputs.gold, stages) if cfg.sweep.grid else []
        write_table(rows, out / "sweep.tsv", SWEEP_COLUMNS)
        produced["sweep_rows"] = len(rows)
    if cfg.noise is not None:
        n = cfg.noise
        store = {c.chunk_id: c for c in inputs.chunks}
        if inputs.gold is not None:
            groups = inputs.gold
        else:
            groups = make_resolver(cfg, stage).fit(inputs.chunks).clusters_.partition()
        values = sample_clusters(groups, store, n.attribute, n.clusters, n.min_values, cfg.seed)
        strategies = {k: merge_strategy(cfg, inputs.chunks, k, n.corpus, n.attribute)
                      for k in n.strategies}
        rows = noise_experiment(values, n.grid, strategies, n.repeats, cfg.seed,
                                cfg.merge.letters)
        write_reports(rows, out / "noise.tsv")
        produced["noise_rows"] = len(rows)
    write_summary(produced, out / "eval_summary.json")
    return produced


def run_ar_test(cfg: RunConfig) -> dict[str, AttributeMapping]:
    inputs = load_inputs(cfg, resolve_schema=False)
    ar = cfg.attribute_resolution
    synonyms = load_synonyms(ar.synonyms) if ar.synonyms else None
    mappings, _ = resolve_attributes(inputs.chunks, ar.ladder, ar.canonical_source, synonyms,
                                     ar.threshold, ar.max_distance)
    write_mapping_report(mappings, _out(cfg) / "mapping.tsv")
    return mappings
