"""Run configuration: INI-style config file, CLI overrides, defaults.

Precedence is flag > config file > default.  The provider is selected by
a spec string: ``toy:<dim>,<seed>``, ``file:<path>`` or ``http:<url>``;
the environment variable STYLEGRAPH_EMBED_URL overrides the URL of an
http provider.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .corpus import DEFAULT_BIAS_LEVELS, BiasScale
from .providers import (
    EmbeddingProvider,
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    ToyEmbeddingProvider,
)
from .sweep import DEFAULT_GRID, SweepGrid

ENV_EMBED_URL = "STYLEGRAPH_EMBED_URL"


class UsageError(ValueError):
    """Bad command line or config values."""


def data_path(name: str) -> Path:
    """Path of a bundled default data file."""
    return Path(str(resources.files("stylegraph.data") / name))


@dataclass
class RunConfig:
    corpus_path: Path | None = None
    provider: str = "toy:64,0"
    lexicon_path: Path = field(default_factory=lambda: data_path("lexicon.tsv"))
    junk_patterns_path: Path = field(default_factory=lambda: data_path("junk_patterns.txt"))
    abbreviations_path: Path = field(default_factory=lambda: data_path("abbreviations.txt"))
    stopwords_path: Path = field(default_factory=lambda: data_path("stopwords.txt"))
    pronouns_path: Path = field(default_factory=lambda: data_path("pronouns.txt"))
    suite_path: Path = field(default_factory=lambda: data_path("alterations.jsonl"))
    bias_levels: tuple[str, ...] = DEFAULT_BIAS_LEVELS
    tau1: float = 0.7
    tau2: float = 0.1
    metric: str = "edit"
    min_weight: float = 0.0
    normalize_domain: bool = False  # display normalization of D by its max entry
    resolution: float = 1.0
    seed: int = 0
    tau1_grid: tuple[float, ...] = DEFAULT_GRID
    tau2_grid: tuple[float, ...] = DEFAULT_GRID
    output_dir: Path = Path("runs/latest")
    figures: bool = True
    http_timeout: float = 30.0

    def scale(self) -> BiasScale:
        return BiasScale(levels=self.bias_levels)

    def grid(self) -> SweepGrid:
        return SweepGrid(tau1_values=self.tau1_grid, tau2_values=self.tau2_grid)


_CONFIG_KEYS = {
    # (section, key) -> (attribute, parser)
    ("corpus", "path"): ("corpus_path", Path),
    ("corpus", "junk_patterns"): ("junk_patterns_path", Path),
    ("corpus", "abbreviations"): ("abbreviations_path", Path),
    ("corpus", "bias_levels"): ("bias_levels", lambda v: tuple(s.strip() for s in v.split(","))),
    ("provider", "spec"): ("provider", str),
    ("provider", "lexicon"): ("lexicon_path", Path),
    ("provider", "http_timeout"): ("http_timeout", float),
    ("matching", "tau1"): ("tau1", float),
    ("matching", "tau2"): ("tau2", float),
    ("network", "metric"): ("metric", str),
    ("network", "min_weight"): ("min_weight", float),
    ("network", "normalize_domain"): (
        "normalize_domain",
        lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
    ),
    ("analysis", "resolution"): ("resolution", float),
    ("analysis", "seed"): ("seed", int),
    ("sweep", "tau1_grid"): ("tau1_grid", lambda v: tuple(float(s) for s in v.split(","))),
    ("sweep", "tau2_grid"): ("tau2_grid", lambda v: tuple(float(s) for s in v.split(","))),
    ("output", "dir"): ("output_dir", Path),
    ("output", "figures"): ("figures", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
    ("bench", "suite"): ("suite_path", Path),
    ("bench", "stopwords"): ("stopwords_path", Path),
    ("bench", "pronouns"): ("pronouns_path", Path),
}


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional INI file plus override values.

    Overrides use RunConfig attribute names; None values are ignored.
    """
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(str(path))
        if not read:
            raise UsageError(f"config file not found: {path}")
        for (section, key), (attr, parse) in _CONFIG_KEYS.items():
            if parser.has_option(section, key):
                try:
                    setattr(cfg, attr, parse(parser.get(section, key)))
                except (TypeError, ValueError) as exc:
                    raise UsageError(f"bad config value {section}.{key}: {exc}") from exc
        known = {s for s, _ in _CONFIG_KEYS}
        for section in parser.sections():
            if section not in known:
                raise UsageError(f"unknown config section [{section}]")
    valid = {f.name for f in fields(RunConfig)}
    for key, value in (overrides or {}).items():
        if key not in valid:
            raise UsageError(f"unknown config override {key!r}")
        if value is not None:
            setattr(cfg, key, value)
    if cfg.metric not in ("edit", "overlap"):
        raise UsageError(f"metric must be 'edit' or 'overlap', got {cfg.metric!r}")
    if cfg.provider.partition(":")[0] not in ("toy", "file", "http"):
        raise UsageError(f"unknown provider spec {cfg.provider!r} (expected toy:/file:/http:)")
    return cfg


def make_provider(cfg: RunConfig) -> EmbeddingProvider:
    """Instantiate the embedding provider named by cfg.provider."""
    spec = cfg.provider
    kind, _, rest = spec.partition(":")
    if kind == "toy":
        try:
            dim_s, _, seed_s = rest.partition(",")
            return ToyEmbeddingProvider(dim=int(dim_s or 64), seed=int(seed_s or 0))
        except ValueError as exc:
            raise UsageError(f"bad toy provider spec {spec!r}: {exc}") from exc
    if kind == "file":
        if not rest:
            raise UsageError("file provider needs a path: file:<path>")
        return FileEmbeddingProvider(rest)
    if kind == "http":
        url = os.environ.get(ENV_EMBED_URL, rest)
        if not url:
            raise UsageError("http provider needs a url: http:<url>")
        if url.startswith("//"):  # "http://host" parses as kind="http", rest="//host"
            url = "http:" + url
        elif not url.startswith(("http://", "https://")):
            url = "http://" + url
        return HttpEmbeddingProvider(url, timeout=cfg.http_timeout)
    raise UsageError(f"unknown provider spec {spec!r} (expected toy:/file:/http:)")
