"""Pairwise precision/recall, parameter sweeps and the value-selection noise experiment."""

from __future__ import annotations

import json
import math
import random
import statistics
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

from sklearn.base import clone

from ._validation import check_partition
from .fileio import write_table
from .model import KnowledgeChunk
from .redundancy import MergeStrategy, inject_noise
from .resolution.clusters import ClusterSet

STAGES = ("bootstrap", "clustered")
_PARAM_ALIASES = {"theta_S": "theta_s", "theta": "theta_s", "α": "alpha"}


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f_score: float
    true_pos: int
    false_pos: int
    false_neg: int
    stage: str = "clustered"

    def as_row(self) -> dict:
        return asdict(self)


def _groups(partition) -> list[frozenset[str]]:
    if isinstance(partition, ClusterSet):
        return partition.partition()
    return check_partition(partition)


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def report_from_counts(tp: int, fp: int, fn: int, stage: str = "clustered") -> EvalReport:
    # no predicted pairs means no wrong ones: precision 1 by convention
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return EvalReport(p, r, f, tp, fp, fn, stage)


def pairwise_scores(predicted, gold, stage: str = "clustered") -> EvalReport:
    """Pairwise scores from the predicted/gold contingency table.

    Both partitions must cover the same records.
    """
    if stage not in STAGES:
        raise ValueError(f"stage must be one of {STAGES}, got {stage!r}")
    pred, true = _groups(predicted), _groups(gold)
    pred_label = {m: i for i, g in enumerate(pred) for m in g}
    true_label = {m: i for i, g in enumerate(true) for m in g}
    if pred_label.keys() != true_label.keys():
        diff = set(pred_label) ^ set(true_label)
        raise ValueError(f"predicted and gold partitions cover different records, "
                         f"e.g. {sorted(diff)[:3]}")
    cells = Counter((pred_label[m], true_label[m]) for m in pred_label)
    tp = sum(_pairs(n) for n in cells.values())
    pred_pairs = sum(_pairs(len(g)) for g in pred)
    gold_pairs = sum(_pairs(len(g)) for g in true)
    return report_from_counts(tp, pred_pairs - tp, gold_pairs - tp, stage)


def sweep(param: str, grid: Iterable, estimator, X: Sequence[KnowledgeChunk],
          gold, stages: Sequence[str] = STAGES) -> list[dict]:
    """Fit a fresh clone of ``estimator`` per grid value and score every stage.

    Returns one row per (value, stage) with the report fields.
    """
    name = _PARAM_ALIASES.get(param, param)
    if name not in estimator.get_params():
        raise ValueError(f"{type(estimator).__name__} has no parameter {param!r}")
    rows = []
    for value in grid:
        est = clone(estimator).set_params(**{name: value})
        est.fit(X)
        for stage in stages:
            clusters = est.bootstrap_clusters_ if stage == "bootstrap" else est.clusters_
            rep = pairwise_scores(clusters, gold, stage)
            rows.append({"param": name, "value": value, **rep.as_row()})
    return rows


def sample_clusters(groups: Sequence[Iterable[str]], store: Mapping[str, KnowledgeChunk],
                    attribute: str, n_clusters: int, min_values: int = 11,
                    seed=0) -> list[list[str]]:
    """Value lists of ``n_clusters`` random clusters holding at least ``min_values`` values."""
    eligible = []
    for g in sorted((sorted(g) for g in groups), key=lambda g: g[0]):
        values = [str(v) for m in g for v in store[m].values(attribute)]
        if len(values) >= min_values:
            eligible.append(values)
    if len(eligible) < n_clusters:
        raise ValueError(f"only {len(eligible)} clusters have at least {min_values} values of "
                         f"{attribute!r}, {n_clusters} requested")
    return random.Random(seed).sample(eligible, n_clusters)


DEFAULT_REPEATS = {"random": 100, "naive": 100, "naive_plus": 100, "bayes": 100, "trust": 10}


def noise_experiment(cluster_values: Sequence[Sequence[str]], noise_grid: Sequence[float],
                     strategies: Mapping[str, MergeStrategy],
                     repeats: Mapping[str, int] | None = None, seed=0,
                     letters: int = 4) -> list[dict]:
    """Accuracy of each selection strategy under injected noise.

    A run is correct when the chosen candidate was not perturbed.  Within a
    repeat every strategy sees the same noised clusters.
    """
    repeats = {**DEFAULT_REPEATS, **(repeats or {})}
    rows = []
    for noise in noise_grid:
        per_strategy: dict[str, list[float]] = {name: [] for name in strategies}
        n_rep = max(repeats.get(s.kind, 100) for s in strategies.values()) if strategies else 0
        for rep in range(n_rep):
            noised = [inject_noise(vals, noise, random.Random(f"{seed}|{noise}|{rep}|{i}"), letters)
                      for i, vals in enumerate(cluster_values)]
            for name, strat in strategies.items():
                if rep >= repeats.get(strat.kind, 100):
                    continue
                rng = random.Random(f"{seed}|{noise}|{rep}|{name}")
                correct = 0
                for values, flags in noised:
                    idx, _ = strat.choose(values, None, rng)
                    correct += not flags[idx]
                per_strategy[name].append(correct / len(noised) if noised else 1.0)
        for name, accs in per_strategy.items():
            rows.append({
                "noise": noise, "strategy": name, "runs": len(accs),
                "mean_accuracy": statistics.fmean(accs) if accs else math.nan,
                "std_accuracy": statistics.pstdev(accs) if len(accs) > 1 else 0.0,
            })
    return rows


def write_reports(rows: Sequence[Mapping], path) -> None:
    write_table(rows, path)


def write_summary(data: Mapping, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
