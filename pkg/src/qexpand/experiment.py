"""Experiment configuration and the batch runner behind ``qexpand run``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus import RunEntry, RunFile, Topic, read_qrels, read_topics
from .evaluation import EvalReport, evaluate
from .expand import DEFAULTS, METHODS, ExpansionConfig, expand
from .index import InvertedIndex, load
from .retrieval import search
from .wordnet import GlossLexicon, load_lexicon, load_tsv_lexicon, load_wordnet

DEFAULT_DEPTH = 1000

# which ExpansionConfig fields each method exposes in a config file
_METHOD_KEYS = {
    "pwnet": ("D", "T", "beta"),
    "nownet": ("D", "T", "beta"),
    "fnpw": ("D", "T", "beta"),
    "kld": ("D", "T", "beta"),
    "rm3": ("D", "T", "mu", "lambda"),
    "kldlca": ("D", "T", "beta"),
    "klwnet": ("alpha",),
}
_FIELD = {"lambda": "lam"}
_TOP_KEYS = ("corpus", "index", "topics", "qrels", "wordnet", "wordnet_format", "method", "k", "threads", "rel_mode", "tag")


class ConfigError(ValueError):
    pass


def minicorpus_path(name: str) -> Path:
    return Path(str(resources.files("qexpand").joinpath("data/minicorpus", name)))


@dataclass
class ExperimentConfig:
    corpus: List[str] = field(default_factory=list)
    index: str = ""
    topics: str = ""
    qrels: str = ""
    wordnet: str = ""
    wordnet_format: str = "auto"
    method: str = "pwnet"
    k: int = DEFAULT_DEPTH
    threads: int = 1
    rel_mode: str = "dice"
    tag: str = ""
    methods: Dict[str, ExpansionConfig] = field(default_factory=lambda: dict(DEFAULTS))

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.k < 1 or self.threads < 1:
            raise ConfigError("k and threads must be >= 1")
        if self.rel_mode not in ("dice", "jaccard"):
            raise ConfigError(f"rel_mode must be dice or jaccard, not {self.rel_mode!r}")
        if self.wordnet_format not in ("auto", "dir", "tsv"):
            raise ConfigError("wordnet_format must be auto, dir or tsv")

    def expansion_configs(self) -> Dict[str, ExpansionConfig]:
        return {m: replace(c, mode=self.rel_mode) for m, c in self.methods.items()}

    def set(self, key: str, value: str) -> None:
        """Apply one ``key=value`` override with the key's type."""
        key = key.strip()
        value = value.strip()
        if key in _TOP_KEYS:
            if key == "corpus":
                self.corpus = [p for p in value.split(",") if p]
            elif key in ("k", "threads"):
                setattr(self, key, _int(key, value))
            else:
                setattr(self, key, value)
            return
        method, dot, param = key.partition(".")
        if not dot or method not in _METHOD_KEYS or param not in _METHOD_KEYS[method]:
            raise ConfigError(f"unknown config key {key!r}")
        attr = _FIELD.get(param, param)
        typed = _int(key, value) if attr in ("D", "T") else _float(key, value)
        try:
            self.methods[method] = replace(self.methods[method], **{attr: typed})
        except ValueError as e:
            raise ConfigError(f"{key}: {e}") from None

    def to_text(self) -> str:
        lines = [
            f"corpus={','.join(self.corpus)}",
            f"index={self.index}",
            f"topics={self.topics}",
            f"qrels={self.qrels}",
            f"wordnet={self.wordnet}",
            f"wordnet_format={self.wordnet_format}",
            f"method={self.method}",
            f"k={self.k}",
            f"threads={self.threads}",
            f"rel_mode={self.rel_mode}",
            f"tag={self.tag}",
        ]
        for method, keys in _METHOD_KEYS.items():
            cfg = self.methods[method]
            for key in keys:
                lines.append(f"{method}.{key}={_fmt(getattr(cfg, _FIELD.get(key, key)))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ConfigError(f"config line {lineno}: expected key=value")
            cfg.set(key, value)
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text("utf-8"))


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def open_lexicon(path: str, fmt: str = "auto") -> GlossLexicon:
    if fmt == "dir":
        return load_wordnet(path)
    if fmt == "tsv":
        return load_tsv_lexicon(path)
    return load_lexicon(path)


def run_topics(
    index: InvertedIndex,
    topics: Sequence[Topic],
    method: str,
    lex: Optional[GlossLexicon] = None,
    configs: Optional[Dict[str, ExpansionConfig]] = None,
    k: int = DEFAULT_DEPTH,
    threads: int = 1,
) -> RunFile:
    """Expand and search every topic. Topics run concurrently when
    ``threads > 1``; results are collected in topic order, so the run is
    identical for any thread count."""

    def one(topic: Topic) -> Tuple[int, List[RunEntry]]:
        q = expand(method, index, topic, lex, configs)
        ranking = search(index, q.to_query(), k)
        return topic.id, [RunEntry(d, i, s) for i, (d, s) in enumerate(ranking, 1)]

    ordered = sorted(topics, key=lambda t: t.id)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, ordered))
    else:
        results = [one(t) for t in ordered]
    return dict(results)


def run_experiment(
    cfg: ExperimentConfig,
    index: Optional[InvertedIndex] = None,
    lex: Optional[GlossLexicon] = None,
) -> Tuple[RunFile, Optional[EvalReport]]:
    """Expand, retrieve and (when qrels are configured) evaluate."""
    cfg.validate()
    index = index if index is not None else load(cfg.index)
    topics = read_topics(cfg.topics)
    if lex is None and cfg.wordnet:
        lex = open_lexicon(cfg.wordnet, cfg.wordnet_format)
    run = run_topics(index, topics, cfg.method, lex, cfg.expansion_configs(), cfg.k, cfg.threads)
    report = evaluate(run, read_qrels(cfg.qrels)) if cfg.qrels else None
    return run, report


def minicorpus_config(**overrides) -> ExperimentConfig:
    """Config pointing at the bundled mini-corpus (index path left empty)."""
    cfg = ExperimentConfig(
        corpus=[str(minicorpus_path("docs.trec.gz"))],
        topics=str(minicorpus_path("topics.txt")),
        qrels=str(minicorpus_path("qrels.txt")),
        wordnet=str(minicorpus_path("glosses.tsv")),
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg
