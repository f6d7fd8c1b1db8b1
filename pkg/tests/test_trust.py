import math

import pytest
from hypothesis import given, strategies as st

from trustmerge.model import make_chunk
from trustmerge.trust import (InconsistencyRule, TrustError, TrustModel, concat, evaluate_chunks,
                              inconsistency_density, trust_value)

unit = st.floats(0, 1)


@given(st.lists(unit, max_size=5))
def test_product_concat_is_bounded_by_min(values):
    p = concat(values, "product")
    assert 0.0 <= p <= concat(values, "min") + 1e-12


def test_value_trust_combines_three_levels():
    m = TrustModel({"dblp": 0.9}, {("dblp", "year"): 0.5}, {"c1": 0.8})
    assert math.isclose(m.value_trust("c1", "dblp", "year"), 0.9 * 0.5 * 0.8)
    assert math.isclose(m.value_trust("c2", "dblp", "title"), 0.9)
    mn = TrustModel({"dblp": 0.9}, {("dblp", "year"): 0.5}, {"c1": 0.8}, concat_rule="min")
    assert mn.value_trust("c1", "dblp", "year") == 0.5


def test_missing_trust_without_default_is_an_error():
    m = TrustModel(default_source_trust=None)
    with pytest.raises(TrustError, match="no trust assigned"):
        m.source("x")


def test_out_of_range_trust_is_rejected():
    with pytest.raises(TrustError):
        TrustModel({"s": 1.5})
    with pytest.raises(TrustError):
        TrustModel(concat_rule="mean")


def test_from_config():
    m = TrustModel.from_config({"sources": {"a": 0.7}, "attributes": {"a.name": 0.5},
                                "defaults": {"source": 0.4}, "concat": "min"})
    assert m.source("a") == 0.7 and m.source("zz") == 0.4
    assert m.attribute("a", "name") == 0.5
    with pytest.raises(TrustError, match="<source>.<attr>"):
        TrustModel.from_config({"attributes": {"name": 0.5}})


def test_trust_value_indexes_values():
    m = TrustModel({"s": 0.5})
    c = make_chunk("k", {"phone": ["1", "2"]}, "s")
    assert trust_value(m, c, "phone", 1) == 0.5
    with pytest.raises(IndexError):
        trust_value(m, c, "phone", 2)


def test_inconsistency_density_counts_trusted_failures():
    m = TrustModel()
    c = make_chunk("k", {"year": [1999, 2001, 1999]}, "s")
    rule = InconsistencyRule(("year", "year"))
    # pairs: (1999, 2001) bad, (1999, 1999) ok, (2001, 1999) bad
    assert math.isclose(inconsistency_density(m, c, [rule]), 1 / 3)
    low = TrustModel({"s": 0.2})
    lenient = InconsistencyRule(("year", "year"), min_trust=0.5)
    assert inconsistency_density(low, c, [lenient]) == 1.0


def test_nothing_to_check_means_full_trust():
    m = TrustModel()
    c = make_chunk("k", {"name": "x"}, "s")
    assert inconsistency_density(m, c, [InconsistencyRule(("year", "year"))]) == 1.0


def test_evaluate_chunks_fills_chunk_trust():
    m = TrustModel()
    chunks = [make_chunk("a", {"y": [1, 2]}, "s"), make_chunk("b", {"y": [1, 1]}, "s")]
    out = evaluate_chunks(m, chunks, [InconsistencyRule(("y", "y"))])
    assert out.chunk("a") == 0.0 and out.chunk("b") == 1.0
    assert m.chunk_trust == {}


def test_rule_from_config_rejects_unknown_check():
    with pytest.raises(TrustError, match="unknown consistency check"):
        InconsistencyRule.from_config({"a": "x", "b": "y", "check": "nope"})
    r = InconsistencyRule.from_config({"a": "x", "b": "y", "check": "numeric_consistent"})
    assert r.check(1, 1.0) and not r.check("a", "a")
