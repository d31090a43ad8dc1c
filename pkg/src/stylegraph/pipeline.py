"""End-to-end pipeline over a run directory, with resumable stages.

Stage outputs land under <output_dir>/<event_id>/ plus a few run-level
files; every stage is cached by a content hash of its inputs and the
relevant config subset (stamps.json), so deleting an artifact and
rerunning regenerates only what is missing.  A pipeline run finishes by
writing manifest.json with the config hash, provider name, and a sha256
digest of every declared output.

On a stage failure the stage's outputs are moved under
<output_dir>/partial/ and a StageError naming the stage is raised.
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import json
import os
import shutil
from pathlib import Path

import numpy as np

from . import plots
from .analysis import (
    EvaluationReport,
    Partition,
    adjusted_rand_index,
    ensemble_clusters,
    evaluate_partition,
    louvain,
)
from .article_sim import ArticleString, SimilarityMatrix, article_matrix, encode_article
from .bench import load_alteration_suite, run_suite, write_report
from .config import RunConfig, UsageError, make_provider
from .corpus import (
    Article,
    SentenceRecord,
    clean_and_segment,
    load_corpus,
    load_patterns,
    load_wordlist,
)
from .matching import MatchParams, ScoredSentence, SymbolTable, build_symbol_table
from .networks import (
    build_article_network,
    export_network,
    induce_domain_network,
    membership_matrix,
    normalize_weights,
    read_graphml,
)
from .providers import (
    FileEmbeddingProvider,
    SentimentScorer,
    load_lexicon,
    text_sha256,
    write_vector_file,
)
from .sweep import run_sweep

STAGE_ORDER = (
    "corpus",
    "segment",
    "sentiment",
    "embed",
    "match",
    "similarity",
    "network",
    "cluster",
    "evaluate",
    "ensemble",
    "report",
    "figures",
)


class StageError(RuntimeError):
    """A pipeline stage failed; .stage names it, __cause__ holds why."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write_jsonl(path: Path, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def write_partition_csv(path: Path, partition: Partition) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "cluster"])
        for node in sorted(partition.assignment):
            writer.writerow([node, partition.assignment[node]])


def read_partition_csv(path: Path) -> Partition:
    assignment = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            assignment[row["node_id"]] = int(row["cluster"])
    return Partition(assignment)


def _report_record(report: EvaluationReport) -> dict:
    return {
        "event_id": report.event_id,
        "level": report.level,
        "ari": report.ari,
        "label_modularity": report.label_modularity,
        "cluster_count": report.cluster_count,
        "node_count": report.node_count,
        "excluded_count": report.excluded_count,
    }


@contextlib.contextmanager
def _run_lock(run_dir: Path):
    lock = run_dir / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RuntimeError(
            f"run directory {run_dir} is locked by another invocation "
            f"(remove {lock} if that run is dead)"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


class PipelineRun:
    """One pipeline invocation over a run directory."""

    def __init__(self, cfg: RunConfig):
        if cfg.corpus_path is None:
            raise UsageError("corpus path not configured (use --corpus or [corpus] path)")
        self.cfg = cfg
        self.run_dir = Path(cfg.output_dir)
        self.scale = cfg.scale()
        self.params = MatchParams(tau1=cfg.tau1, tau2=cfg.tau2)
        self.events: dict[str, list[Article]] = {}
        self.declared: list[Path] = []
        self._stamps_path = self.run_dir / "stamps.json"
        self._stamps: dict[str, str] = {}

    # -- cache plumbing ------------------------------------------------------

    def _load_stamps(self) -> None:
        if self._stamps_path.exists():
            self._stamps = json.loads(self._stamps_path.read_text(encoding="utf-8"))

    def _save_stamps(self) -> None:
        self._stamps_path.write_text(
            json.dumps(self._stamps, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    def _stage(
        self,
        name: str,
        key_parts: dict,
        inputs: list[Path],
        outputs: list[Path],
        build,
    ) -> None:
        """Run `build` unless all outputs exist under an unchanged stamp."""
        self.declared.extend(outputs)
        try:
            digests = [_sha256_file(p) for p in inputs]
            key = hashlib.sha256(
                _canonical({"stage": name, "config": key_parts, "inputs": digests}).encode()
            ).hexdigest()
            if self._stamps.get(name) == key and all(p.exists() for p in outputs):
                return
            for out in outputs:
                out.parent.mkdir(parents=True, exist_ok=True)
            build()
            missing = [str(p) for p in outputs if not p.exists()]
            if missing:
                raise RuntimeError(f"stage did not produce {missing}")
            self._stamps[name] = key
            self._save_stamps()
        except Exception as exc:
            self._stash_partial(outputs)
            raise StageError(name, exc) from exc

    def _stash_partial(self, outputs: list[Path]) -> None:
        partial = self.run_dir / "partial"
        for out in outputs:
            if out.exists():
                dest = partial / out.relative_to(self.run_dir)
                dest.parent.mkdir(parents=True, exist_ok=True)
                if dest.exists():
                    dest.unlink()
                shutil.move(str(out), str(dest))

    # -- paths ---------------------------------------------------------------

    def event_dir(self, event_id: str) -> Path:
        return self.run_dir / event_id

    def _event_paths(self, name: str) -> list[Path]:
        return [self.event_dir(e) / name for e in sorted(self.events)]

    @property
    def vectors_path(self) -> Path:
        return self.run_dir / "vectors.jsonl"

    # -- stages ---------------------------------------------------------------

    def load_events(self) -> None:
        try:
            self.events = load_corpus(self.cfg.corpus_path, self.scale)
        except Exception as exc:
            raise StageError("corpus", exc) from exc

    def stage_segment(self) -> None:
        cfg = self.cfg
        outputs = self._event_paths("sentences.jsonl")

        def build() -> None:
            junk = load_patterns(cfg.junk_patterns_path)
            abbr = load_wordlist(cfg.abbreviations_path)
            for event_id, articles in sorted(self.events.items()):
                records = []
                for art in articles:
                    for sent in clean_and_segment(art, junk, abbr):
                        records.append(
                            {"article_id": sent.article_id, "index": sent.index, "text": sent.text}
                        )
                _write_jsonl(self.event_dir(event_id) / "sentences.jsonl", records)

        self._stage(
            "segment",
            {"bias_levels": list(cfg.bias_levels)},
            [Path(cfg.corpus_path), Path(cfg.junk_patterns_path), Path(cfg.abbreviations_path)],
            outputs,
            build,
        )

    def _sentences(self, event_id: str) -> list[SentenceRecord]:
        return [
            SentenceRecord(article_id=r["article_id"], index=r["index"], text=r["text"])
            for r in _read_jsonl(self.event_dir(event_id) / "sentences.jsonl")
        ]

    def stage_sentiment(self) -> None:
        cfg = self.cfg
        inputs = self._event_paths("sentences.jsonl") + [Path(cfg.lexicon_path)]
        outputs = self._event_paths("scored.jsonl")

        def build() -> None:
            scorer = SentimentScorer(load_lexicon(cfg.lexicon_path))
            for event_id in sorted(self.events):
                records = [
                    {
                        "article_id": s.article_id,
                        "index": s.index,
                        "text": s.text,
                        "sentiment": scorer.score(s.text),
                    }
                    for s in self._sentences(event_id)
                ]
                _write_jsonl(self.event_dir(event_id) / "scored.jsonl", records)

        self._stage("sentiment", {}, inputs, outputs, build)

    def _provider_cache_spec(self) -> str:
        # env URL override changes http vectors, so resolve it into the key
        spec = self.cfg.provider
        if spec.startswith("http"):
            spec = f"http:{os.environ.get('STYLEGRAPH_EMBED_URL', spec.partition(':')[2])}"
        return spec

    def stage_embed(self) -> None:
        inputs = self._event_paths("sentences.jsonl")
        outputs = [self.vectors_path]

        def build() -> None:
            provider = make_provider(self.cfg)
            texts: dict[str, str] = {}
            for event_id in sorted(self.events):
                for s in self._sentences(event_id):
                    texts[text_sha256(s.text)] = s.text
            ordered = [texts[h] for h in sorted(texts)]
            vectors = provider.embed_batch(ordered)
            write_vector_file(
                self.vectors_path, provider.dim, provider.name, zip(ordered, vectors)
            )

        self._stage("embed", {"provider": self._provider_cache_spec()}, inputs, outputs, build)

    def _scored_sentences(self, event_id: str, vectors: FileEmbeddingProvider) -> list[ScoredSentence]:
        out = []
        for rec in _read_jsonl(self.event_dir(event_id) / "scored.jsonl"):
            record = SentenceRecord(article_id=rec["article_id"], index=rec["index"], text=rec["text"])
            emb = vectors.embed_batch([rec["text"]])[0]
            out.append(ScoredSentence(record=record, embedding=emb, sentiment=rec["sentiment"]))
        return out

    def stage_match(self) -> None:
        inputs = self._event_paths("scored.jsonl") + [self.vectors_path]
        outputs = self._event_paths("symbols.jsonl")

        def build() -> None:
            vectors = FileEmbeddingProvider(self.vectors_path)
            for event_id in sorted(self.events):
                sentences = self._scored_sentences(event_id, vectors)
                table = build_symbol_table(sentences, self.params)
                table.dump(self.event_dir(event_id) / "symbols.jsonl")

        self._stage(
            "match",
            {"tau1": self.cfg.tau1, "tau2": self.cfg.tau2},
            inputs,
            outputs,
            build,
        )

    def _symbol_table(self, event_id: str) -> SymbolTable:
        table = SymbolTable()
        for rec in _read_jsonl(self.event_dir(event_id) / "symbols.jsonl"):
            sym = rec["symbol_id"]
            table.glyph_of[sym] = chr(rec["glyph"])
            keys = [(a, i) for a, i in rec["sentence_keys"]]
            table.classes[sym] = keys
            for key in keys:
                table.symbol_of[key] = sym
        return table

    def stage_similarity(self) -> None:
        inputs = self._event_paths("sentences.jsonl") + self._event_paths("symbols.jsonl")
        outputs = self._event_paths("article_matrix.csv")

        def build() -> None:
            for event_id in sorted(self.events):
                table = self._symbol_table(event_id)
                by_article: dict[str, list[SentenceRecord]] = {}
                for s in self._sentences(event_id):
                    by_article.setdefault(s.article_id, []).append(s)
                # articles with zero surviving sentences still get (empty) nodes
                for art in self.events[event_id]:
                    by_article.setdefault(art.id, [])
                encodings = []
                for aid in sorted(by_article):
                    if by_article[aid]:
                        encodings.append(encode_article(by_article[aid], table))
                    else:
                        encodings.append(ArticleString(article_id=aid, symbols=(), glyph_string=""))
                matrix = article_matrix(encodings, metric=self.cfg.metric)
                matrix.to_csv(self.event_dir(event_id) / "article_matrix.csv")

        self._stage("similarity", {"metric": self.cfg.metric}, inputs, outputs, build)

    def _matrix(self, event_id: str) -> SimilarityMatrix:
        path = self.event_dir(event_id) / "article_matrix.csv"
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        ids = rows[0][1:]
        values = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
        return SimilarityMatrix(node_ids=ids, values=values)

    def stage_network(self) -> None:
        cfg = self.cfg
        inputs = self._event_paths("article_matrix.csv") + [Path(cfg.corpus_path)]
        names = [
            "article_net.graphml",
            "article_net_edges.csv",
            "article_net_nodes.csv",
            "domain_net.graphml",
            "domain_net_edges.csv",
            "domain_net_nodes.csv",
        ]
        outputs = [p for n in names for p in self._event_paths(n)]

        def build() -> None:
            for event_id in sorted(self.events):
                articles = self.events[event_id]
                matrix = self._matrix(event_id)
                art_net = build_article_network(matrix, articles, min_weight=cfg.min_weight)
                membership = membership_matrix(articles, art_net.node_ids)
                dom_net = induce_domain_network(art_net, membership, articles)
                if cfg.normalize_domain:
                    dom_net = normalize_weights(dom_net)
                d = self.event_dir(event_id)
                export_network(art_net, d / "article_net.graphml", "graphml")
                export_network(art_net, d / "article_net_edges.csv", "edge_csv")
                export_network(dom_net, d / "domain_net.graphml", "graphml")
                export_network(dom_net, d / "domain_net_edges.csv", "edge_csv")

        self._stage(
            "network",
            {"min_weight": cfg.min_weight, "normalize_domain": cfg.normalize_domain},
            inputs,
            outputs,
            build,
        )

    def stage_cluster(self) -> None:
        cfg = self.cfg
        inputs = self._event_paths("article_net.graphml") + self._event_paths("domain_net.graphml")
        outputs = self._event_paths("article_partition.csv") + self._event_paths(
            "domain_partition.csv"
        )

        def build() -> None:
            for event_id in sorted(self.events):
                d = self.event_dir(event_id)
                for level in ("article", "domain"):
                    net = read_graphml(d / f"{level}_net.graphml")
                    part = louvain(net, resolution=cfg.resolution, seed=cfg.seed)
                    write_partition_csv(d / f"{level}_partition.csv", part)

        self._stage(
            "cluster", {"resolution": cfg.resolution, "seed": cfg.seed}, inputs, outputs, build
        )

    def stage_evaluate(self) -> None:
        cfg = self.cfg
        inputs = (
            self._event_paths("article_net.graphml")
            + self._event_paths("domain_net.graphml")
            + self._event_paths("article_partition.csv")
            + self._event_paths("domain_partition.csv")
        )
        outputs = self._event_paths("report.jsonl")

        def build() -> None:
            for event_id in sorted(self.events):
                d = self.event_dir(event_id)
                records = []
                for level in ("article", "domain"):
                    net = read_graphml(d / f"{level}_net.graphml")
                    part = read_partition_csv(d / f"{level}_partition.csv")
                    report = evaluate_partition(net, part, self.scale, event_id, level)
                    records.append(_report_record(report))
                _write_jsonl(d / "report.jsonl", records)

        self._stage(
            "evaluate",
            {"bias_levels": list(cfg.bias_levels)},
            inputs,
            outputs,
            build,
        )

    def stage_ensemble(self) -> None:
        if len(self.events) < 2:
            return  # consensus needs at least two events
        cfg = self.cfg
        inputs = self._event_paths("domain_partition.csv") + self._event_paths(
            "domain_net.graphml"
        )
        outputs = [self.run_dir / "ensemble_partition.csv", self.run_dir / "ensemble_report.json"]

        def build() -> None:
            per_event = []
            all_domains: set[str] = set()
            domain_labels: dict[str, str] = {}
            for event_id in sorted(self.events):
                d = self.event_dir(event_id)
                per_event.append((event_id, read_partition_csv(d / "domain_partition.csv")))
                net = read_graphml(d / "domain_net.graphml")
                all_domains.update(net.node_ids)
                for nid in net.node_ids:
                    label = net.attributes.get(nid, {}).get("bias_label")
                    if label:
                        domain_labels[nid] = label
            ensemble = ensemble_clusters(
                per_event, all_domains, resolution=cfg.resolution, seed=cfg.seed
            )
            write_partition_csv(self.run_dir / "ensemble_partition.csv", ensemble)
            labeled = {d: self.scale.index(lbl) for d, lbl in domain_labels.items()}
            if labeled:
                ari = adjusted_rand_index(
                    ensemble.restrict(sorted(labeled)), Partition(labeled)
                )
            else:
                ari = 0.0
            record = {
                "event_id": "ensemble",
                "level": "domain",
                "ari": ari,
                "label_modularity": None,
                "cluster_count": ensemble.cluster_count(),
                "node_count": len(all_domains),
                "excluded_count": len(all_domains) - len(labeled),
            }
            (self.run_dir / "ensemble_report.json").write_text(
                json.dumps(record, sort_keys=True) + "\n", encoding="utf-8"
            )

        self._stage(
            "ensemble", {"resolution": cfg.resolution, "seed": cfg.seed}, inputs, outputs, build
        )

    def stage_report(self) -> None:
        inputs = list(self._event_paths("report.jsonl"))
        ensemble_report = self.run_dir / "ensemble_report.json"
        if ensemble_report.exists():
            inputs.append(ensemble_report)
        outputs = [self.run_dir / "report.jsonl"]

        def build() -> None:
            records = []
            for event_id in sorted(self.events):
                records.extend(_read_jsonl(self.event_dir(event_id) / "report.jsonl"))
            if ensemble_report.exists():
                records.append(json.loads(ensemble_report.read_text(encoding="utf-8")))
            _write_jsonl(self.run_dir / "report.jsonl", records)

        self._stage("report", {}, inputs, outputs, build)

    def stage_figures(self) -> None:
        if not self.cfg.figures:
            return
        inputs = self._event_paths("article_net.graphml") + self._event_paths("domain_net.graphml")
        figures = self.run_dir / "figures"
        outputs = []
        for event_id in sorted(self.events):
            outputs.append(figures / f"{event_id}_article_net.png")
            outputs.append(figures / f"{event_id}_domain_net.png")

        def build() -> None:
            for event_id in sorted(self.events):
                d = self.event_dir(event_id)
                for level in ("article", "domain"):
                    net = read_graphml(d / f"{level}_net.graphml")
                    plots.render_network(
                        net,
                        figures / f"{event_id}_{level}_net.png",
                        seed=self.cfg.seed,
                        title=f"{event_id} ({level} level)",
                    )

        self._stage("figures", {"seed": self.cfg.seed}, inputs, outputs, build)

    # -- orchestration ---------------------------------------------------------

    def config_hash(self) -> str:
        cfg = self.cfg
        payload = {
            "bias_levels": list(cfg.bias_levels),
            "corpus": _sha256_file(Path(cfg.corpus_path)),
            "junk_patterns": _sha256_file(Path(cfg.junk_patterns_path)),
            "abbreviations": _sha256_file(Path(cfg.abbreviations_path)),
            "lexicon": _sha256_file(Path(cfg.lexicon_path)),
            "provider": self._provider_cache_spec(),
            "tau1": cfg.tau1,
            "tau2": cfg.tau2,
            "metric": cfg.metric,
            "min_weight": cfg.min_weight,
            "normalize_domain": cfg.normalize_domain,
            "resolution": cfg.resolution,
            "seed": cfg.seed,
            "figures": cfg.figures,
        }
        return hashlib.sha256(_canonical(payload).encode()).hexdigest()

    def write_manifest(self) -> Path:
        vectors_header = {}
        if self.vectors_path.exists():
            with self.vectors_path.open(encoding="utf-8") as fh:
                vectors_header = json.loads(fh.readline())
        files = {
            str(p.relative_to(self.run_dir)): _sha256_file(p)
            for p in sorted(set(self.declared))
            if p.exists()
        }
        manifest = {
            "config_hash": self.config_hash(),
            "provider": vectors_header.get("provider", self.cfg.provider),
            "files": files,
        }
        path = self.run_dir / "manifest.json"
        path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path

    def run(self, until: str = "figures") -> Path:
        """Run stages through `until` (a STAGE_ORDER name); returns run dir."""
        if until not in STAGE_ORDER:
            raise ValueError(f"unknown stage {until!r}")
        stop = STAGE_ORDER.index(until)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        with _run_lock(self.run_dir):
            self._load_stamps()
            self.load_events()
            steps = [
                ("segment", self.stage_segment),
                ("sentiment", self.stage_sentiment),
                ("embed", self.stage_embed),
                ("match", self.stage_match),
                ("similarity", self.stage_similarity),
                ("network", self.stage_network),
                ("cluster", self.stage_cluster),
                ("evaluate", self.stage_evaluate),
                ("ensemble", self.stage_ensemble),
                ("report", self.stage_report),
                ("figures", self.stage_figures),
            ]
            for name, step in steps:
                if STAGE_ORDER.index(name) > stop:
                    break
                try:
                    step()
                except (StageError, UsageError):
                    raise
                except Exception as exc:  # stage preamble failures outside _stage
                    raise StageError(name, exc) from exc
            if stop == STAGE_ORDER.index("figures"):
                self.write_manifest()
        return self.run_dir


def run_pipeline(cfg: RunConfig, until: str = "figures") -> Path:
    return PipelineRun(cfg).run(until=until)


# -- non-pipeline commands used by the CLI -----------------------------------


def run_sweep_command(cfg: RunConfig) -> list[Path]:
    """Sweep surfaces (and heatmaps) from cached scored+embedded sentences."""
    run = PipelineRun(cfg)
    run.run(until="embed")
    vectors = FileEmbeddingProvider(run.vectors_path)
    event_sentences = {
        event_id: run._scored_sentences(event_id, vectors) for event_id in sorted(run.events)
    }
    surface1, surface2 = run_sweep(event_sentences, cfg.grid(), metric=cfg.metric)
    out1 = run.run_dir / "sweep_tau1.csv"
    out2 = run.run_dir / "sweep_tau2.csv"
    surface1.to_csv(out1)
    surface2.to_csv(out2)
    written = [out1, out2]
    if cfg.figures:
        figures = run.run_dir / "figures"
        figures.mkdir(parents=True, exist_ok=True)
        for surface, name in ((surface1, "sweep_tau1.png"), (surface2, "sweep_tau2.png")):
            plots.render_surface(surface, figures / name)
            written.append(figures / name)
    return written


def run_bench_command(cfg: RunConfig) -> list[Path]:
    """Comparison suite -> CSV report (and heatmap figure)."""
    cases = load_alteration_suite(cfg.suite_path)
    provider = make_provider(cfg)
    scorer = SentimentScorer(load_lexicon(cfg.lexicon_path))
    stopwords = set(load_wordlist(cfg.stopwords_path))
    pronouns = set(load_wordlist(cfg.pronouns_path))
    rows = run_suite(cases, provider, scorer, stopwords, pronouns)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = out_dir / "bench_report.csv"
    write_report(rows, report)
    written = [report]
    if cfg.figures:
        figures = out_dir / "figures"
        figures.mkdir(parents=True, exist_ok=True)
        plots.render_bench(rows, figures / "bench_report.png")
        written.append(figures / "bench_report.png")
    return written
