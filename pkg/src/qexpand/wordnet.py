"""Gloss lexicon loading and gloss-overlap relatedness.

A lexicon maps lowercase lemmas (multiword lemmas joined with ``_``) to the
glosses of every synset the lemma belongs to. Relatedness between two
lexical units is the overlap of their analyzed gloss word sets.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Union

from .textproc import AnalyzerConfig, analyze

POS_FILES = ("noun", "verb", "adj", "adv")
REL_MODES = ("dice", "jaccard")


class LexiconParseError(ValueError):
    pass


class GlossLexicon:
    def __init__(self, entries: Optional[Dict[str, List[str]]] = None):
        self.entries: Dict[str, List[str]] = entries or {}
        self._cache: Dict[tuple, FrozenSet[str]] = {}
        self._lock = threading.Lock()

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def glosses(self, lemma: str) -> List[str]:
        return self.entries.get(lemma, [])

    def add(self, lemma: str, gloss: str) -> None:
        self.entries.setdefault(lemma, []).append(gloss)


@dataclass(frozen=True)
class QueryUnit:
    kind: str  # "phrase" or "word"
    text: str
    lemma: str


def _read_data_file(path: Path) -> Dict[int, str]:
    """Byte offset -> gloss. Offsets are checked against their position."""
    glosses: Dict[int, str] = {}
    pos = 0
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            start = pos
            pos += len(raw)
            if raw.startswith(b"  "):
                continue  # license header
            line = raw.decode("utf-8", errors="replace").rstrip("\r\n")
            if not line.strip():
                continue
            head, sep, gloss = line.partition(" | ")
            fields = head.split()
            try:
                offset = int(fields[0])
            except (IndexError, ValueError):
                raise LexiconParseError(f"{path}:{lineno}: missing synset offset") from None
            if offset != start:
                raise LexiconParseError(f"{path}:{lineno}: synset offset {offset} does not match byte position {start}")
            glosses[offset] = gloss.strip() if sep else ""
    return glosses


def _read_index_file(path: Path, data: Dict[int, str], entries: Dict[str, List[str]]) -> None:
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.startswith("  ") or not line.strip():
                continue
            fields = line.split()
            try:
                lemma = fields[0].lower()
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                offsets = [int(x) for x in fields[4 + p_cnt + 2:]]
            except (IndexError, ValueError):
                raise LexiconParseError(f"{path}:{lineno}: malformed index line") from None
            if len(offsets) != synset_cnt:
                raise LexiconParseError(f"{path}:{lineno}: expected {synset_cnt} synset offsets, found {len(offsets)}")
            for off in offsets:
                if off not in data:
                    raise LexiconParseError(f"{path}:{lineno}: synset offset {off} not found in data file")
                entries.setdefault(lemma, []).append(data[off])


def load_wordnet(directory: Union[str, Path]) -> GlossLexicon:
    """Read WordNet 3.x ``index.*``/``data.*`` files for all four parts of speech."""
    directory = Path(directory)
    entries: Dict[str, List[str]] = {}
    for pos in POS_FILES:
        data_path, index_path = directory / f"data.{pos}", directory / f"index.{pos}"
        for p in (data_path, index_path):
            if not p.is_file():
                raise LexiconParseError(f"{p}: missing WordNet database file")
        _read_index_file(index_path, _read_data_file(data_path), entries)
    return GlossLexicon(entries)


def parse_tsv_lexicon(lines: Iterable[str], name: str = "<tsv>") -> GlossLexicon:
    lex = GlossLexicon()
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        lemma, sep, gloss = line.partition("\t")
        if not sep:
            raise LexiconParseError(f"{name}:{lineno}: expected lemma<TAB>gloss")
        lex.add(lemma.strip().lower(), gloss.strip())
    return lex


def load_tsv_lexicon(path: Union[str, Path]) -> GlossLexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_tsv_lexicon(fh, str(path))


def load_lexicon(path: Union[str, Path]) -> GlossLexicon:
    """A WordNet database directory or a TSV file, chosen by path type."""
    path = Path(path)
    return load_wordnet(path) if path.is_dir() else load_tsv_lexicon(path)


def detect_units(words: Sequence[str], lex: GlossLexicon) -> List[QueryUnit]:
    """Greedy left-to-right pairing of consecutive words found as lexicon phrases."""
    units = []
    i = 0
    while i < len(words):
        if i + 1 < len(words):
            key = f"{words[i]}_{words[i + 1]}"
            if key in lex:
                units.append(QueryUnit("phrase", f"{words[i]} {words[i + 1]}", key))
                i += 2
                continue
        units.append(QueryUnit("word", words[i], words[i]))
        i += 1
    return units


def gloss_set(lex: GlossLexicon, lemma: Optional[str], analyzer: AnalyzerConfig) -> FrozenSet[str]:
    """Analyzed vocabulary of all glosses of ``lemma``; empty if absent."""
    if lemma is None or lemma not in lex.entries:
        return frozenset()
    key = (lemma, analyzer)
    cached = lex._cache.get(key)
    if cached is not None:
        return cached
    words = set()
    for g in lex.entries[lemma]:
        words.update(analyze(g, analyzer))
    result = frozenset(words)
    with lex._lock:
        lex._cache[key] = result
    return result


def rel(a: FrozenSet[str], b: FrozenSet[str], mode: str = "dice") -> float:
    """Set-overlap relatedness: Dice ``2|A∩B|/(|A|+|B|)`` or Jaccard ``|A∩B|/|A∪B|``."""
    ca, cb = len(a), len(b)
    if ca + cb == 0:
        return 0.0
    both = len(a & b)
    if mode == "dice":
        return 2.0 * both / (ca + cb)
    if mode == "jaccard":
        return both / (ca + cb - both)
    raise ValueError(f"unknown relatedness mode {mode!r}; expected one of {REL_MODES}")
