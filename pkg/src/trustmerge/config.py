"""YAML run configuration with validation errors that name the offending field.

Every section is optional; omitted values fall back to the defaults of the
underlying components, which reproduce the reference experimental setup.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .attributes import DEFAULT_LADDER, MATCHERS
from .ingestion import FORMATS, DatasetDescriptor
from .model import (JointContext, always, attribute_context, source_context, trust_context)
from .redundancy import KINDS
from .resolution.blocking import STRATEGIES, BlockingConfig
from .similarity import semantic
from .similarity.strings import STRING_METRICS
from .trust import InconsistencyRule, TrustError, TrustModel


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.field = path


def _join(path: str, key) -> str:
    return f"{path}.{key}" if path else str(key)


def _section(raw, key: str, path: str = "") -> dict:
    val = raw.get(key)
    full = _join(path, key)
    if val is None:
        return {}
    if not isinstance(val, Mapping):
        raise ConfigError(full, f"expected a mapping, got {type(val).__name__}")
    return dict(val)


def _no_unknown(section: Mapping, allowed, path: str) -> None:
    for k in section:
        if k not in allowed:
            raise ConfigError(_join(path, k),
                              f"unknown key; expected one of {sorted(allowed)}")


def _number(section, key, path, default, lo=None, hi=None, integer=False):
    v = section.get(key, default)
    if v is None:
        return None
    full = _join(path, key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(full, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(full, f"expected an integer, got {v!r}")
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(full, f"value {v} outside [{lo}, {hi}]")
    return int(v) if integer else float(v)


def _choice(section, key, path, default, choices):
    v = section.get(key, default)
    if v not in choices:
        raise ConfigError(_join(path, key), f"expected one of {list(choices)}, got {v!r}")
    return v


def _path(section, key, path, base: Path, required=False, must_exist=True):
    v = section.get(key)
    full = _join(path, key)
    if v is None:
        if required:
            raise ConfigError(full, "required")
        return None
    if not isinstance(v, str):
        raise ConfigError(full, f"expected a path, got {v!r}")
    p = Path(v)
    if not p.is_absolute():
        p = base / p
    if must_exist and not p.exists():
        raise ConfigError(full, f"file not found: {p}")
    return str(p)


def _str_map(section, key, path, values=None) -> dict:
    v = section.get(key) or {}
    full = _join(path, key)
    if not isinstance(v, Mapping):
        raise ConfigError(full, "expected a mapping")
    out = {}
    for k, x in v.items():
        if values is not None and x not in values:
            raise ConfigError(f"{full}.{k}", f"expected one of {list(values)}, got {x!r}")
        out[str(k)] = x
    return out


@dataclass
class SimilaritySettings:
    alpha: float = 0.85
    theta_s: float = 0.95
    delta_s: float = 4.0
    delta_a: float | None = None
    delta_r: float | None = None
    metrics: dict = field(default_factory=dict)
    default_metric: str = "jarowinkler"
    semantic_metrics: dict = field(default_factory=dict)
    align_relational: bool = True
    neighbor_threshold: float = 0.9
    refresh: str = "neighbors"


@dataclass
class AttributeSettings:
    enabled: bool = True
    ladder: tuple = DEFAULT_LADDER
    synonyms: str | None = None
    canonical_source: str | None = None
    threshold: float = 0.95
    max_distance: float = 0.9


@dataclass
class MergeSettings:
    strategy: str = "naive"
    m: int = 5
    letters: int = 4
    corpus: str | None = None


@dataclass
class SweepSettings:
    param: str
    grid: list


@dataclass
class NoiseSettings:
    attribute: str = "name"
    clusters: int = 34
    min_values: int = 11
    grid: list = field(default_factory=lambda: [0.1 * i for i in range(1, 10)])
    strategies: list = field(default_factory=lambda: ["random", "naive", "naive_plus", "trust"])
    repeats: dict = field(default_factory=dict)
    corpus: str | None = None


@dataclass
class RunConfig:
    datasets: list[DatasetDescriptor]
    attribute_resolution: AttributeSettings = field(default_factory=AttributeSettings)
    similarity: SimilaritySettings = field(default_factory=SimilaritySettings)
    blocking: BlockingConfig = field(default_factory=BlockingConfig)
    trust: TrustModel = field(default_factory=TrustModel)
    trust_rules: list = field(default_factory=list)
    merge: MergeSettings = field(default_factory=MergeSettings)
    contexts: JointContext = field(default_factory=JointContext)
    sweep: SweepSettings | None = None
    noise: NoiseSettings | None = None
    gold_path: str | None = None
    output_dir: str = "out"
    seed: int = 0
    config_hash: str = ""
    raw: dict = field(default_factory=dict)


TOP_KEYS = {"datasets", "attribute_resolution", "similarity", "blocking", "trust", "merge",
            "contexts", "eval", "gold_path", "output_dir", "seed"}
DATASET_KEYS = {"name", "format", "path", "source_id", "column_map", "id_column", "relation",
                "entity_column", "truth_path", "delimiter", "name_attribute", "fields"}


def _datasets(raw, base) -> list[DatasetDescriptor]:
    items = raw.get("datasets")
    if not isinstance(items, list) or not items:
        raise ConfigError("datasets", "expected a non-empty list of dataset descriptors")
    out, names = [], set()
    for i, d in enumerate(items):
        p = f"datasets[{i}]"
        if not isinstance(d, Mapping):
            raise ConfigError(p, "expected a mapping")
        _no_unknown(d, DATASET_KEYS, p)
        name = d.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{p}.name", "required")
        if name in names:
            raise ConfigError(f"{p}.name", f"duplicate dataset name {name!r}")
        names.add(name)
        fmt = _choice(d, "format", p, d.get("format"), FORMATS)
        path = _path(d, "path", p, base, required=True)
        truth = _path(d, "truth_path", p, base)
        fields = d.get("fields")
        kwargs: dict[str, Any] = {}
        if fields is not None:
            if not isinstance(fields, list) or not all(isinstance(f, str) for f in fields):
                raise ConfigError(f"{p}.fields", "expected a list of column names")
            kwargs["fields"] = tuple(fields)
        relation = d.get("relation") or {}
        if not isinstance(relation, Mapping) or set(relation) - {"shared_column"}:
            raise ConfigError(f"{p}.relation", "expected {shared_column: <column>}")
        out.append(DatasetDescriptor(
            name=name, format=fmt, path=path, source_id=d.get("source_id"),
            column_map=_str_map(d, "column_map", p), id_column=d.get("id_column", "id"),
            relation=dict(relation), entity_column=d.get("entity_column"), truth_path=truth,
            delimiter=d.get("delimiter"), name_attribute=d.get("name_attribute"), **kwargs))
    return out


def _similarity(raw) -> SimilaritySettings:
    s = _section(raw, "similarity")
    p = "similarity"
    _no_unknown(s, set(SimilaritySettings.__dataclass_fields__), p)
    return SimilaritySettings(
        alpha=_number(s, "alpha", p, 0.85, 0, 1),
        theta_s=_number(s, "theta_s", p, 0.95, 0, 1),
        delta_s=_number(s, "delta_s", p, 4.0, 0),
        delta_a=_number(s, "delta_a", p, None, 0),
        delta_r=_number(s, "delta_r", p, None, 0),
        metrics=_str_map(s, "metrics", p, STRING_METRICS),
        default_metric=_choice(s, "default_metric", p, "jarowinkler", STRING_METRICS),
        semantic_metrics=_str_map(s, "semantic_metrics", p, semantic.SEMANTIC_METRICS),
        align_relational=bool(s.get("align_relational", True)),
        neighbor_threshold=_number(s, "neighbor_threshold", p, 0.9, 0, 1),
        refresh=_choice(s, "refresh", p, "neighbors", ("neighbors", "full")),
    )


def _blocking(raw) -> BlockingConfig:
    s = _section(raw, "blocking")
    p = "blocking"
    _no_unknown(s, set(BlockingConfig.__dataclass_fields__), p)
    _choice(s, "strategy", p, "standard", STRATEGIES)
    thresholds = s.get("similarity_thresholds") or {}
    if not isinstance(thresholds, Mapping):
        raise ConfigError(f"{p}.similarity_thresholds", "expected a mapping")
    for k in thresholds:
        _number(thresholds, k, f"{p}.similarity_thresholds", None, 0, 1)
    for k in ("ngram_n", "ngram_min_matches", "prefix_length", "min_token_length"):
        _number(s, k, p, 1, 1, integer=True)
    attrs = s.get("attributes")
    if attrs is not None and (not isinstance(attrs, list)
                              or not all(isinstance(a, str) for a in attrs)):
        raise ConfigError(f"{p}.attributes", "expected a list of attribute names")
    try:
        return BlockingConfig(**{**s, "similarity_thresholds": dict(thresholds),
                                 **({"attributes": tuple(attrs)} if attrs else {})})
    except (TypeError, ValueError) as exc:
        raise ConfigError(p, str(exc)) from exc


def _attributes(raw, base) -> AttributeSettings:
    s = _section(raw, "attribute_resolution")
    p = "attribute_resolution"
    _no_unknown(s, set(AttributeSettings.__dataclass_fields__), p)
    ladder = s.get("ladder", list(DEFAULT_LADDER))
    if not isinstance(ladder, list):
        raise ConfigError(f"{p}.ladder", "expected a list of matcher names")
    for i, m in enumerate(ladder):
        if m not in MATCHERS:
            raise ConfigError(f"{p}.ladder[{i}]", f"expected one of {list(MATCHERS)}, got {m!r}")
    return AttributeSettings(
        enabled=bool(s.get("enabled", True)), ladder=tuple(ladder),
        synonyms=_path(s, "synonyms", p, base), canonical_source=s.get("canonical_source"),
        threshold=_number(s, "threshold", p, 0.95, 0, 1),
        max_distance=_number(s, "max_distance", p, 0.9, 0))


def _trust(raw) -> tuple[TrustModel, list]:
    s = _section(raw, "trust")
    _no_unknown(s, {"sources", "attributes", "defaults", "concat", "rules"}, "trust")
    try:
        model = TrustModel.from_config(s)
    except (TrustError, TypeError, ValueError) as exc:
        raise ConfigError("trust", str(exc)) from exc
    rules = s.get("rules") or []
    if not isinstance(rules, list):
        raise ConfigError("trust.rules", "expected a list")
    parsed = []
    for i, r in enumerate(rules):
        p = f"trust.rules[{i}]"
        if not isinstance(r, Mapping) or "a" not in r or "b" not in r:
            raise ConfigError(p, "expected {a: <attr>, b: <attr>, check: ..., min_trust: ...}")
        _no_unknown(r, {"a", "b", "check", "min_trust"}, p)
        try:
            parsed.append(InconsistencyRule.from_config(r))
        except (TrustError, TypeError, ValueError) as exc:
            raise ConfigError(p, str(exc)) from exc
    return model, parsed


def _merge(raw, base) -> MergeSettings:
    s = _section(raw, "merge")
    p = "merge"
    _no_unknown(s, set(MergeSettings.__dataclass_fields__), p)
    strategy = _choice(s, "strategy", p, "naive", KINDS)
    corpus = _path(s, "corpus", p, base)
    if strategy == "trust" and corpus is None:
        raise ConfigError(f"{p}.corpus", "the trust strategy needs a reference corpus file")
    return MergeSettings(strategy, _number(s, "m", p, 5, 1, integer=True),
                         _number(s, "letters", p, 4, 1, integer=True), corpus)


def _contexts(raw, trust: TrustModel) -> JointContext:
    items = raw.get("contexts") or []
    if not isinstance(items, list):
        raise ConfigError("contexts", "expected a list")
    parts = []
    for i, c in enumerate(items):
        p = f"contexts[{i}]"
        if not isinstance(c, Mapping):
            raise ConfigError(p, "expected a mapping")
        kind = _choice(c, "type", p, None, ("always", "source", "attribute", "trust"))
        if kind == "always":
            _no_unknown(c, {"type", "value"}, p)
            parts.append(always(bool(c.get("value", True))))
        elif kind == "source":
            _no_unknown(c, {"type", "exclude", "include"}, p)
            parts.append(source_context(c.get("exclude") or (), c.get("include")))
        elif kind == "attribute":
            _no_unknown(c, {"type", "keep", "drop"}, p)
            parts.append(attribute_context(c.get("keep"), c.get("drop") or ()))
        else:
            _no_unknown(c, {"type", "threshold"}, p)
            parts.append(trust_context(trust, _number(c, "threshold", p, None, 0, 1)))
    return JointContext(tuple(parts))


def _eval(raw, base):
    s = _section(raw, "eval")
    _no_unknown(s, {"sweep", "noise"}, "eval")
    sweep = noise = None
    if s.get("sweep") is not None:
        sw = _section(s, "sweep", "eval")
        _no_unknown(sw, {"param", "grid"}, "eval.sweep")
        param = _choice(sw, "param", "eval.sweep", None, ("alpha", "theta_s", "theta_S"))
        grid = sw.get("grid")
        if not isinstance(grid, list):
            raise ConfigError("eval.sweep.grid", "expected a list of numbers")
        for i, _ in enumerate(grid):
            _number({str(i): grid[i]}, str(i), "eval.sweep.grid", None, 0, 1)
        sweep = SweepSettings("theta_s" if param == "theta_S" else param, [float(g) for g in grid])
    if s.get("noise") is not None:
        n = _section(s, "noise", "eval")
        p = "eval.noise"
        _no_unknown(n, set(NoiseSettings.__dataclass_fields__), p)
        d = NoiseSettings()
        grid = n.get("grid", d.grid)
        if not isinstance(grid, list):
            raise ConfigError(f"{p}.grid", "expected a list of noise fractions")
        strategies = n.get("strategies", d.strategies)
        if not isinstance(strategies, list):
            raise ConfigError(f"{p}.strategies", "expected a list")
        for i, st in enumerate(strategies):
            if st not in KINDS:
                raise ConfigError(f"{p}.strategies[{i}]", f"expected one of {list(KINDS)}")
        corpus = _path(n, "corpus", p, base)
        noise = NoiseSettings(
            attribute=str(n.get("attribute", d.attribute)),
            clusters=_number(n, "clusters", p, d.clusters, 1, integer=True),
            min_values=_number(n, "min_values", p, d.min_values, 1, integer=True),
            grid=[_number({"g": g}, "g", f"{p}.grid", None, 0, 1) for g in grid],
            strategies=list(strategies),
            repeats={str(k): int(v) for k, v in (n.get("repeats") or {}).items()},
            corpus=corpus)
    return sweep, noise


def parse_config(raw: Mapping, base_dir: Path | str = ".") -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError("", "configuration must be a mapping at the top level")
    _no_unknown(raw, TOP_KEYS, "")
    base = Path(base_dir)
    trust, rules = _trust(raw)
    sweep, noise = _eval(raw, base)
    out_dir = raw.get("output_dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("output_dir", "expected a path")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", f"expected an integer, got {seed!r}")
    return RunConfig(
        datasets=_datasets(raw, base),
        attribute_resolution=_attributes(raw, base),
        similarity=_similarity(raw),
        blocking=_blocking(raw),
        trust=trust,
        trust_rules=rules,
        merge=_merge(raw, base),
        contexts=_contexts(raw, trust),
        sweep=sweep,
        noise=noise,
        gold_path=_path(raw, "gold_path", "", base) if "gold_path" in raw else None,
        output_dir=str(Path(out_dir) if Path(out_dir).is_absolute() else base / out_dir),
        seed=seed,
        raw=dict(raw),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(data.decode("utf-8")) or {}
    except (yaml.YAMLError, UnicodeDecodeError) as exc:
        raise ConfigError("", f"invalid YAML in {path}: {exc}") from exc
    cfg = parse_config(raw, path.parent)
    cfg.config_hash = hashlib.sha256(data).hexdigest()
    return cfg
