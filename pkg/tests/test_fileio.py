import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from trustmerge.fileio import (FormatError, escape, read_clusters, read_gold, read_network,
                               read_ontology, unescape, write_clusters, write_gold, write_network,
                               write_ontology, write_table)
from trustmerge.model import infer_ontology_from_network

from strategies import networks

TMP = settings(suppress_health_check=[HealthCheck.function_scoped_fixture])


@given(st.text())
def test_escape_round_trip(text):
    assert unescape(escape(text)) == text
    assert "\t" not in escape(text) and "\n" not in escape(text)


@TMP
@given(networks(max_vertices=8, max_edges=10))
def test_network_file_round_trip(tmp_path, net):
    path = tmp_path / "n.network"
    write_network(net, path)
    assert read_network(path) == net


@TMP
@given(networks(max_vertices=6, max_edges=8))
def test_ontology_file_round_trip(tmp_path, net):
    ont = infer_ontology_from_network(net)
    path = tmp_path / "o.ontology"
    write_ontology(ont, path)
    assert read_ontology(path) == ont


def test_network_format_errors(tmp_path):
    p = tmp_path / "bad.network"
    p.write_text("#network\nV\ta\nQ\tx\n")
    with pytest.raises(FormatError, match=r"bad\.network:3: unknown line type 'Q'") as info:
        read_network(p)
    assert info.value.lineno == 3
    p.write_text("#network\nE\te1\ta\tb\n")
    with pytest.raises(FormatError, match="not a vertex|unknown vertex|endpoint"):
        read_network(p)
    p.write_text("")
    with pytest.raises(FormatError, match="empty file"):
        read_network(p)
    p.write_text("#ontology\n")
    with pytest.raises(FormatError, match="expected header"):
        read_network(p)


def test_ontology_format_errors(tmp_path):
    p = tmp_path / "bad.ontology"
    p.write_text("#ontology\nA\tname\nX\tghost.name=1\n")
    with pytest.raises(FormatError, match=":3: no declared subject"):
        read_ontology(p)


def test_clusters_and_gold(tmp_path):
    path = tmp_path / "c.tsv"
    write_clusters([{"b", "a"}, {"c"}], path)
    assert path.read_text() == "0\ta\n0\tb\n1\tc\n"
    assert read_clusters(path) == [frozenset("ab"), frozenset("c")]
    write_gold([{"x", "y"}], tmp_path / "g.tsv", ["ent"])
    assert read_gold(tmp_path / "g.tsv") == [frozenset("xy")]
    (tmp_path / "dup.tsv").write_text("e1\tx\ne2\tx\n")
    with pytest.raises(FormatError, match=":2: record 'x' already listed on line 1"):
        read_gold(tmp_path / "dup.tsv")
    (tmp_path / "short.tsv").write_text("# comment\ne1\n")
    with pytest.raises(FormatError, match=":2:"):
        read_gold(tmp_path / "short.tsv")


def test_write_table(tmp_path):
    write_table([{"a": 1, "b": 0.5}, {"a": 2, "b": None}], tmp_path / "t.tsv")
    lines = (tmp_path / "t.tsv").read_text().splitlines()
    assert lines[0] == "a\tb" and lines[1].startswith("1\t0.5")
