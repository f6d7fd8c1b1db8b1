import json
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from trustmerge.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_RUNTIME, main
from trustmerge.config import ConfigError, load_config, parse_config
from trustmerge.fileio import read_clusters

FIX = Path(__file__).parent / "fixtures"


def _config(tmp_path, **overrides):
    cfg = {
        "datasets": [
            {"name": "dblp", "format": "delimited", "path": str(FIX / "dblp_excerpt.csv")},
            {"name": "acm", "format": "delimited", "path": str(FIX / "acm_excerpt.csv")},
        ],
        "gold_path": str(FIX / "dblp_acm_gold.tsv"),
        "attribute_resolution": {"canonical_source": "dblp"},
        "similarity": {"theta_s": 0.9},
        "blocking": {"strategy": "none"},
        "output_dir": str(tmp_path / "out"),
        "seed": 1,
    }
    cfg.update(overrides)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


def test_parse_defaults():
    cfg = parse_config({"datasets": [{"name": "d", "format": "delimited",
                                      "path": str(FIX / "dblp_excerpt.csv")}]})
    assert cfg.similarity.alpha == 0.85 and cfg.similarity.theta_s == 0.95
    assert cfg.blocking.strategy == "standard" and cfg.merge.strategy == "naive"


@pytest.mark.parametrize("raw, field", [
    ({}, "datasets"),
    ({"datasets": [{"name": "d", "format": "delimited", "path": "nope.csv"}]}, "datasets[0].path"),
    ({"datasets": [{"name": "d", "format": "xml", "path": "x"}]}, "datasets[0].format"),
    ({"datasets": [], "bogus": 1}, "bogus"),
])
def test_config_errors_name_the_field(raw, field):
    with pytest.raises(ConfigError) as info:
        parse_config(raw)
    assert field in str(info.value)


def test_similarity_range_checked(tmp_path):
    with pytest.raises(ConfigError, match="similarity.alpha"):
        load_config(_config(tmp_path, similarity={"alpha": 3}))


def test_match_writes_clusters_and_manifest(tmp_path, capsys):
    assert main(["match", "--config", str(_config(tmp_path))]) == EXIT_OK
    out = tmp_path / "out"
    groups = read_clusters(out / "clusters.tsv")
    assert frozenset({"dblp:journals/sigmod/Mackay99", "acm:604000"}) in groups
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "match" and manifest["seed"] == 1
    assert len(manifest["config_sha256"]) == 64
    assert "rapidfuzz" in manifest["versions"]
    assert "clustered\tP=" in capsys.readouterr().out
    assert (out / "mapping.tsv").is_file() and (out / "eval.tsv").is_file()


def test_merge_after_match(tmp_path):
    cfg = str(_config(tmp_path))
    assert main(["match", "--config", cfg]) == EXIT_OK
    assert main(["merge", "--config", cfg]) == EXIT_OK
    assert (tmp_path / "out" / "merged.network").is_file()
    assert (tmp_path / "out" / "merge_report.tsv").is_file()


def test_merge_without_clusters_is_a_data_error(tmp_path):
    assert main(["merge", "--config", str(_config(tmp_path))]) == EXIT_DATA


def test_ar_test_prints_mapping(tmp_path, capsys):
    assert main(["ar-test", "--config", str(_config(tmp_path))]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "acm\ttitle\ttitle\texact\t1.0000" in lines


def test_always_false_context_writes_empty_outputs(tmp_path):
    cfg = _config(tmp_path, contexts=[{"type": "always", "value": False}])
    assert main(["match", "--config", str(cfg)]) == EXIT_OK
    assert (tmp_path / "out" / "clusters.tsv").read_text() == ""


def test_eval_sweep(tmp_path):
    cfg = _config(tmp_path, eval={"sweep": {"param": "theta_S", "grid": [0.9, 1.0]}})
    assert main(["eval", "--config", str(cfg), "--out", str(tmp_path / "ev")]) == EXIT_OK
    rows = (tmp_path / "ev" / "sweep.tsv").read_text().splitlines()
    assert len(rows) == 1 + 4


def test_exit_codes(tmp_path, capsys):
    assert main(["match", "--config", str(tmp_path / "absent.yaml")]) == EXIT_CONFIG
    bad = tmp_path / "bad.csv"
    bad.write_text("id,name\n1,a\n1,b\n")
    cfg = _config(tmp_path, datasets=[{"name": "b", "format": "delimited", "path": str(bad)}],
                  gold_path=None)
    assert main(["match", "--config", str(cfg)]) == EXIT_DATA
    assert "bad.csv:3" in capsys.readouterr().err
    gold = tmp_path / "g.tsv"
    gold.write_text("e\tghost\n")
    cfg = _config(tmp_path, gold_path=str(gold))
    assert main(["match", "--config", str(cfg)]) == EXIT_DATA


def test_runtime_failures_exit_4(tmp_path, monkeypatch):
    from trustmerge import pipeline

    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(pipeline, "run_match", boom)
    assert main(["match", "--config", str(_config(tmp_path))]) == EXIT_RUNTIME


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "trustmerge", "match", "--config",
                          str(tmp_path / "none.yaml")], capture_output=True, text=True)
    assert res.returncode == EXIT_CONFIG
    assert "config error" in res.stderr
