"""Three-level trust: data sources, attributes per source, knowledge chunks."""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .model import KnowledgeChunk, Literal, Pair, is_numeric


class TrustError(ValueError):
    pass


def _check_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise TrustError(f"{name} must lie in [0, 1], got {value!r}")


def concat(values: Iterable[float], rule: str = "product") -> float:
    values = list(values)
    if rule == "product":
        out = 1.0
        for v in values:
            out *= v
        return out
    if rule == "min":
        return min(values) if values else 1.0
    raise TrustError(f"unknown concatenation rule {rule!r}")


@dataclass(frozen=True)
class TrustModel:
    """User-assigned source and attribute trust plus computed chunk trust.

    Missing source or attribute entries fall back to the defaults; set a
    default to ``None`` to make a missing entry an error instead.  Chunk
    trust is only ever filled in by :func:`evaluate_chunks` and is neutral
    (1.0) for chunks that were not evaluated.
    """

    source_trust: Mapping[str, float] = field(default_factory=dict)
    attribute_trust: Mapping[tuple[str, str], float] = field(default_factory=dict)
    chunk_trust: Mapping[str, float] = field(default_factory=dict)
    concat_rule: str = "product"
    default_source_trust: float | None = 1.0
    default_attribute_trust: float | None = 1.0

    def __post_init__(self):
        if self.concat_rule not in ("product", "min"):
            raise TrustError(f"unknown concatenation rule {self.concat_rule!r}")
        for k, v in self.source_trust.items():
            _check_unit(f"source trust {k!r}", v)
        for k, v in self.attribute_trust.items():
            _check_unit(f"attribute trust {k!r}", v)
        for k, v in self.chunk_trust.items():
            _check_unit(f"chunk trust {k!r}", v)
        for name in ("default_source_trust", "default_attribute_trust"):
            v = getattr(self, name)
            if v is not None:
                _check_unit(name, v)

    def source(self, source: str) -> float:
        try:
            return self.source_trust[source]
        except KeyError:
            if self.default_source_trust is None:
                raise TrustError(f"no trust assigned to source {source!r} and no default") from None
            return self.default_source_trust

    def attribute(self, source: str, attribute: str) -> float:
        try:
            return self.attribute_trust[(source, attribute)]
        except KeyError:
            if self.default_attribute_trust is None:
                raise TrustError(
                    f"no trust assigned to attribute {source}.{attribute} and no default") from None
            return self.default_attribute_trust

    def chunk(self, chunk_id: str) -> float:
        return self.chunk_trust.get(chunk_id, 1.0)

    def value_trust(self, chunk_id: str, source: str, attribute: str,
                    include_chunk: bool = True) -> float:
        parts = [self.source(source), self.attribute(source, attribute)]
        if include_chunk:
            parts.append(self.chunk(chunk_id))
        return concat(parts, self.concat_rule)

    def pair_trust(self, chunk: KnowledgeChunk, pair: Pair) -> float:
        return self.value_trust(chunk.chunk_id, pair.source, pair.attribute)

    def chunk_level_trust(self, chunk: KnowledgeChunk) -> float:
        """Trust in a chunk as a whole, used for its relational links."""
        src = max((self.source(s) for s in chunk.sources), default=1.0)
        return concat([src, self.chunk(chunk.chunk_id)], self.concat_rule)

    def link_trust(self, a: KnowledgeChunk, b: KnowledgeChunk) -> float:
        return min(self.chunk_level_trust(a), self.chunk_level_trust(b))

    @classmethod
    def from_config(cls, cfg: Mapping | None) -> "TrustModel":
        """Build from the ``trust`` block of a run config."""
        cfg = dict(cfg or {})
        attrs = {}
        for key, t in (cfg.get("attributes") or {}).items():
            src, _, attr = str(key).partition(".")
            if not attr:
                raise TrustError(f"attribute trust key {key!r} must look like <source>.<attr>")
            attrs[(src, attr)] = float(t)
        defaults = cfg.get("defaults") or {}
        return cls(
            source_trust={str(k): float(v) for k, v in (cfg.get("sources") or {}).items()},
            attribute_trust=attrs,
            concat_rule=cfg.get("concat", "product"),
            default_source_trust=_opt_float(defaults.get("source", 1.0)),
            default_attribute_trust=_opt_float(defaults.get("attribute", 1.0)),
        )


def _opt_float(v):
    return None if v is None else float(v)


def trust_value(model: TrustModel, chunk: KnowledgeChunk, attribute: str,
                value_index: int = 0) -> float:
    """Trust in the ``value_index``-th value of ``attribute`` within ``chunk``."""
    pairs = chunk.pairs_for(attribute)
    if not 0 <= value_index < len(pairs):
        raise IndexError(f"chunk {chunk.chunk_id!r} has no value #{value_index} for {attribute!r}")
    return model.pair_trust(chunk, pairs[value_index])


def _values_equal(a: Literal, b: Literal) -> bool:
    if is_numeric(a) and is_numeric(b):
        return float(a) == float(b)
    return str(a).strip().casefold() == str(b).strip().casefold()


def _numeric_consistent(a: Literal, b: Literal, tolerance: float = 0.0) -> bool:
    if not (is_numeric(a) and is_numeric(b)):
        return False
    return abs(float(a) - float(b)) <= tolerance


CHECKS: dict[str, Callable[[Literal, Literal], bool]] = {
    "equal": _values_equal,
    "numeric_consistent": _numeric_consistent,
}


@dataclass(frozen=True)
class InconsistencyRule:
    """A consistency check between two attributes of the same chunk.

    ``check`` returns True when the two values are consistent.  Instances
    whose values are trusted less than ``min_trust`` are not counted as
    inconsistencies even if the check fails.
    """

    attribute_pair: tuple[str, str]
    check: Callable[[Literal, Literal], bool] = _values_equal
    min_trust: float = 0.0

    def __post_init__(self):
        _check_unit("min_trust", self.min_trust)

    @classmethod
    def from_config(cls, spec: Mapping) -> "InconsistencyRule":
        name = spec.get("check", "equal")
        if name not in CHECKS:
            raise TrustError(f"unknown consistency check {name!r}; expected one of {sorted(CHECKS)}")
        return cls((spec["a"], spec["b"]), CHECKS[name], float(spec.get("min_trust", 0.0)))


def rule_instances(chunk: KnowledgeChunk, rule: InconsistencyRule):
    a, b = rule.attribute_pair
    if a == b:
        return list(itertools.combinations(chunk.pairs_for(a), 2))
    return list(itertools.product(chunk.pairs_for(a), chunk.pairs_for(b)))


def inconsistency_density(model: TrustModel, chunk: KnowledgeChunk,
                          rules: Iterable[InconsistencyRule]) -> float:
    """(possible - trusted failures) / possible; 1.0 when nothing can be checked."""
    possible = 0
    failures = 0
    for rule in rules:
        for pa, pb in rule_instances(chunk, rule):
            possible += 1
            # chunk trust is what is being computed, so it is left out here
            ta = model.value_trust(chunk.chunk_id, pa.source, pa.attribute, include_chunk=False)
            tb = model.value_trust(chunk.chunk_id, pb.source, pb.attribute, include_chunk=False)
            if min(ta, tb) < rule.min_trust:
                continue
            if not rule.check(pa.value, pb.value):
                failures += 1
    if possible == 0:
        return 1.0
    return (possible - failures) / possible


def evaluate_chunks(model: TrustModel, chunks: Iterable[KnowledgeChunk],
                    rules: Iterable[InconsistencyRule] = ()) -> TrustModel:
    """Return a copy of ``model`` with chunk trust set from inconsistency density."""
    rules = list(rules)
    computed = dict(model.chunk_trust)
    for c in chunks:
        computed[c.chunk_id] = inconsistency_density(model, c, rules)
    return dataclasses.replace(model, chunk_trust=computed)
