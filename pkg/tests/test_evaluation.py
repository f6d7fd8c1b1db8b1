import pytest
from hypothesis import given, strategies as st

from trustmerge import CollectiveEntityResolver, make_chunk
from trustmerge.evaluation import (noise_experiment, pairwise_scores, report_from_counts,
                                   sample_clusters, sweep)
from trustmerge.redundancy import MergeStrategy
from trustmerge.resolution.clusters import ClusterSet

import oracles
from helpers import clean_ten
from strategies import partitions_of


def test_four_record_example():
    # pairs ab, ac, bc are predicted; ab and cd are gold
    rep = pairwise_scores([{"a", "b", "c"}, {"d"}], [{"a", "b"}, {"c", "d"}])
    assert (rep.true_pos, rep.false_pos, rep.false_neg) == (1, 2, 1)
    assert rep.precision == pytest.approx(1 / 3) and rep.recall == 0.5
    assert rep.f_score == pytest.approx(0.4)


def test_identity_and_all_singletons():
    gold = [{"a", "b"}, {"c"}]
    assert pairwise_scores(gold, gold).f_score == 1.0
    rep = pairwise_scores([{"a"}, {"b"}, {"c"}], gold)
    assert (rep.precision, rep.recall) == (1.0, 0.0)


def test_degenerate_conventions():
    rep = report_from_counts(0, 0, 0)
    assert (rep.precision, rep.recall) == (1.0, 1.0)
    rep = report_from_counts(0, 3, 2)
    assert rep.f_score == 0.0


def test_partitions_must_agree_on_records():
    with pytest.raises(ValueError, match="different records"):
        pairwise_scores([{"a"}], [{"b"}])
    with pytest.raises(ValueError, match="stage"):
        pairwise_scores([{"a"}], [{"a"}], stage="final")


def test_accepts_cluster_sets():
    cs = ClusterSet([["a", "b"], ["c"]])
    assert pairwise_scores(cs, [{"a", "b", "c"}]).true_pos == 1


@given(st.data(), st.integers(1, 40))
def test_pairwise_matches_enumeration(data, n):
    ids = [f"r{i}" for i in range(n)]
    pred, gold = data.draw(partitions_of(ids)), data.draw(partitions_of(ids))
    rep = pairwise_scores(pred, gold)
    assert (rep.true_pos, rep.false_pos, rep.false_neg) == oracles.pairwise_counts(pred, gold)


def test_sweep_refits_a_clone_per_value():
    chunks, gold = clean_ten()
    est = CollectiveEntityResolver(blocking={"strategy": "none"})
    rows = sweep("theta_S", [0.8, 1.0], est, chunks, gold)
    assert [(r["value"], r["stage"]) for r in rows] == [
        (0.8, "bootstrap"), (0.8, "clustered"), (1.0, "bootstrap"), (1.0, "clustered")]
    assert est.get_params()["theta_s"] == 0.95
    assert not hasattr(est, "clusters_")
    with pytest.raises(ValueError, match="no parameter"):
        sweep("gamma", [1], est, chunks, gold)


def test_sample_clusters():
    store = {f"c{i}": make_chunk(f"c{i}", {"n": f"v{i}"}, "s") for i in range(12)}
    groups = [{f"c{i}" for i in range(11)}, {"c11"}]
    vals = sample_clusters(groups, store, "n", 1, seed=3)
    assert len(vals) == 1 and len(vals[0]) == 11
    with pytest.raises(ValueError, match="only 1 clusters"):
        sample_clusters(groups, store, "n", 2)


def test_noise_experiment_rows_and_extremes():
    clusters = [["Jonathan Smith"] * 11, ["Maria Garcia"] * 11]
    strategies = {"naive": MergeStrategy("naive"), "random": MergeStrategy("random")}
    rows = noise_experiment(clusters, [0.0, 1.0], strategies, repeats={"random": 5, "naive": 3})
    by = {(r["noise"], r["strategy"]): r for r in rows}
    assert by[(0.0, "naive")]["mean_accuracy"] == 1.0
    assert by[(1.0, "random")]["mean_accuracy"] == 0.0
    assert by[(0.0, "random")]["runs"] == 5 and by[(0.0, "naive")]["runs"] == 3


def test_noise_experiment_is_seeded():
    clusters = [["alpha beta", "alpha beta", "gamma"] * 4]
    s = {"random": MergeStrategy("random")}
    assert noise_experiment(clusters, [0.5], s, seed=7) == noise_experiment(clusters, [0.5], s,
                                                                           seed=7)
