"""Tokenization, stopword removal and Porter stemming.

The same analyzer is used for documents, queries and WordNet glosses so that
all three live in one term space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from nltk.stem.porter import PorterStemmer

_TOKEN_RE = re.compile(r"[^\W_]+")
_MAX_DIGIT_RUN = 12

_stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def read_stopwords(lines: Iterable[str]) -> frozenset:
    """Parse a stopword file body: one word per line, ``#`` starts a comment line."""
    words = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


def load_stopwords(path: Optional[Path] = None) -> frozenset:
    if path is None:
        text = resources.files("qexpand").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return read_stopwords(text.splitlines())


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset:
    return load_stopwords()


@dataclass(frozen=True)
class AnalyzerConfig:
    stopwords: frozenset = field(default_factory=default_stopwords)
    stemming: bool = True

    @classmethod
    def from_file(cls, path: Path, stemming: bool = True) -> "AnalyzerConfig":
        return cls(load_stopwords(path), stemming)


def tokenize(text: str) -> List[str]:
    """Lowercased alphanumeric runs; very long pure-digit runs are dropped."""
    out = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if tok.isdigit() and len(tok) > _MAX_DIGIT_RUN:
            continue
        out.append(tok)
    return out


@lru_cache(maxsize=500_000)
def stem(word: str) -> str:
    return _stemmer.stem(word)


def analyze_pairs(text: str, cfg: AnalyzerConfig) -> List[Tuple[str, str]]:
    """(surface word, term) pairs in text order, stopwords removed."""
    stop = cfg.stopwords
    pairs = []
    for tok in tokenize(text):
        if tok in stop:
            continue
        pairs.append((tok, stem(tok) if cfg.stemming else tok))
    return pairs


def analyze(text: str, cfg: AnalyzerConfig) -> List[str]:
    return [term for _, term in analyze_pairs(text, cfg)]


def surface_words(text: str, cfg: AnalyzerConfig) -> List[str]:
    """Stopword-filtered surface forms, unstemmed, in order."""
    return [tok for tok, _ in analyze_pairs(text, cfg)]
