"""Command line interface.

Subcommands mirror the pipeline stages (each runs the pipeline up to its
artifact, reusing anything already cached in the run directory) plus the
standalone sweep / bench / cluster / evaluate commands.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import evaluate_network, louvain
from .config import UsageError, load_config
from .corpus import CorpusError
from .networks import read_graphml
from .pipeline import (
    StageError,
    run_bench_command,
    run_pipeline,
    run_sweep_command,
    write_partition_csv,
)
from .providers import ProviderError

_STAGE_COMMANDS = {
    "pipeline": "figures",
    "segment": "segment",
    "embed": "embed",
    "match": "match",
    "similarity": "similarity",
    "network": "network",
    "cluster": "cluster",
    "evaluate": "evaluate",
    "ensemble": "ensemble",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage problems, not argparse's 2
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file")
    p.add_argument("--corpus", dest="corpus_path", type=Path, help="corpus JSONL file")
    p.add_argument("--output", dest="output_dir", type=Path, help="run directory")
    p.add_argument("--provider", help="embedding provider: toy:<dim>,<seed> | file:<path> | http:<url>")
    p.add_argument("--lexicon", dest="lexicon_path", type=Path, help="sentiment lexicon (TSV)")
    p.add_argument("--junk-patterns", dest="junk_patterns_path", type=Path)
    p.add_argument("--abbreviations", dest="abbreviations_path", type=Path)
    p.add_argument("--tau1", type=float, help="semantic match threshold")
    p.add_argument("--tau2", type=float, help="sentiment difference threshold")
    p.add_argument("--metric", choices=["edit", "overlap"], help="article similarity metric")
    p.add_argument("--min-weight", dest="min_weight", type=float, help="drop edges at or below this weight")
    p.add_argument("--normalize-domain", dest="normalize_domain", action="store_true", default=None,
                   help="rescale domain-network weights by the max entry (display only)")
    p.add_argument("--resolution", type=float, help="louvain resolution")
    p.add_argument("--seed", type=int, help="seed recorded for clustering and layouts")
    p.add_argument("--figures", dest="figures", action="store_true", default=None,
                   help="render figures (default)")
    p.add_argument("--no-figures", dest="figures", action="store_false", default=None,
                   help="skip figure rendering")


def build_parser() -> _Parser:
    parser = _Parser(prog="stylegraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("pipeline", "run every stage and write the manifest"),
        ("segment", "clean the corpus and split it into sentences"),
        ("embed", "compute sentiments and embeddings for all sentences"),
        ("match", "build per-event sentence symbol tables"),
        ("similarity", "compute article similarity matrices"),
        ("network", "build article and domain networks"),
        ("cluster", "cluster networks (pipeline, or --network files)"),
        ("evaluate", "evaluate clusters against bias labels"),
        ("ensemble", "consensus-cluster domains across events"),
        ("sweep", "threshold sensitivity sweep over the (tau1, tau2) grid"),
        ("bench", "run the text-alteration comparison suite"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name in ("cluster", "evaluate"):
            p.add_argument("--network", action="append", type=Path, default=None,
                           help="graphml file (repeatable); skips the pipeline")
            p.add_argument("--out", type=Path, help="output path for standalone --network mode")
        if name == "sweep":
            p.add_argument("--grid-tau1", dest="tau1_grid",
                           type=lambda v: tuple(float(s) for s in v.split(",")))
            p.add_argument("--grid-tau2", dest="tau2_grid",
                           type=lambda v: tuple(float(s) for s in v.split(",")))
        if name == "bench":
            p.add_argument("--suite", dest="suite_path", type=Path, help="alteration suite JSONL")
    return parser


def _config_from_args(args: argparse.Namespace):
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "network", "out") and v is not None
    }
    return load_config(args.config, overrides)


def _cmd_cluster_files(args, cfg) -> int:
    for path in args.network:
        net = read_graphml(path)
        part = louvain(net, resolution=cfg.resolution, seed=cfg.seed)
        out = args.out or path.with_suffix(".partition.csv")
        write_partition_csv(out, part)
        print(f"{path}: {part.cluster_count()} clusters over {net.n} nodes -> {out}")
    return 0


def _cmd_evaluate_files(args, cfg) -> int:
    for path in args.network:
        net = read_graphml(path)
        report, _ = evaluate_network(
            net, cfg.scale(), event_id=path.stem, level="network",
            resolution=cfg.resolution, seed=cfg.seed,
        )
        print(json.dumps({
            "event_id": report.event_id,
            "level": report.level,
            "ari": report.ari,
            "label_modularity": report.label_modularity,
            "cluster_count": report.cluster_count,
            "node_count": report.node_count,
            "excluded_count": report.excluded_count,
        }, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
        if args.command in ("cluster", "evaluate") and getattr(args, "network", None):
            if args.command == "cluster":
                return _cmd_cluster_files(args, cfg)
            return _cmd_evaluate_files(args, cfg)
        if args.command == "sweep":
            written = run_sweep_command(cfg)
            for path in written:
                print(path)
            return 0
        if args.command == "bench":
            written = run_bench_command(cfg)
            for path in written:
                print(path)
            return 0
        run_dir = run_pipeline(cfg, until=_STAGE_COMMANDS[args.command])
        print(run_dir)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if isinstance(exc.__cause__, ProviderError) else 2
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 3
    except (CorpusError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
