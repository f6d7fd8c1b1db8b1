"""``trustmerge`` command line: match, merge, eval and ar-test subcommands.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .fileio import FormatError
from .ingestion import DataError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4

log = logging.getLogger("trustmerge")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trustmerge",
                                description="Trust-aware matching and merging of knowledge chunks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="YAML run configuration")
        sp.add_argument("--seed", type=int, default=None, help="override the configured seed")
        sp.add_argument("--out", default=None, help="override the configured output directory")
        sp.add_argument("--stage", choices=("bootstrap", "full"), default="full",
                        help="stop after bootstrapping or run the full clustering")
        return sp

    common(sub.add_parser("match", help="resolve entities and write clusters"))
    m = common(sub.add_parser("merge", help="merge resolved clusters into single chunks"))
    m.add_argument("--clusters", default=None,
                   help="cluster file from 'match' (default: <out>/clusters.tsv)")
    common(sub.add_parser("eval", help="run the configured sweep and noise experiment"))
    common(sub.add_parser("ar-test", help="report the attribute mapping between datasets"))
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["output_dir"] = args.out
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _run(args) -> int:
    from . import pipeline

    cfg = _apply_overrides(load_config(args.config), args)
    extra = {"stage": args.stage, "config_path": str(Path(args.config).resolve())}
    if args.command == "match":
        outcome = pipeline.run_match(cfg, args.stage)
        for r in outcome.reports:
            print(f"{r.stage}\tP={r.precision:.4f}\tR={r.recall:.4f}\tF={r.f_score:.4f}")
        print(f"clusters: {outcome.summary.get('clusters', 0)} -> {cfg.output_dir}")
        if not outcome.inputs.chunks:
            print("warning: no chunks survived the configured contexts", file=sys.stderr)
    elif args.command == "merge":
        clusters = args.clusters or str(Path(cfg.output_dir) / "clusters.tsv")
        if not Path(clusters).is_file():
            raise DataError(f"cluster file not found: {clusters}")
        summary = pipeline.run_merge(cfg, clusters)
        extra["clusters_path"] = clusters
        print(f"merged {summary['clusters']} clusters -> {cfg.output_dir}")
    elif args.command == "eval":
        produced = pipeline.run_eval(cfg, args.stage)
        print(" ".join(f"{k}={v}" for k, v in produced.items()) or "nothing to evaluate")
    else:
        mappings = pipeline.run_ar_test(cfg)
        for src, m in sorted(mappings.items()):
            for p in m.pairs:
                print(f"{src}\t{p.attr_a}\t{p.attr_b}\t{p.matcher}\t{p.score:.4f}")
            for b in m.unmatched_b:
                print(f"{src}\t-\t{b}\tunmatched\t")
    pipeline.write_manifest(cfg, args.command, extra)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.debug("runtime failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
