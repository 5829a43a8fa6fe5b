"""Readers and writers for TREC collections, topics, qrels and run files."""

from __future__ import annotations

import gzip
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Dict, Iterator, List, NamedTuple, Union

Source = Union[BinaryIO, bytes, str]


class ParseError(ValueError):
    """Raised for malformed collection, topic, qrels or run data."""


@dataclass(frozen=True)
class Document:
    docno: str
    text: str


@dataclass(frozen=True)
class Topic:
    id: int
    title: str


class RunEntry(NamedTuple):
    docno: str
    rank: int
    score: float


# topic id -> docno -> grade
QrelSet = Dict[int, Dict[str, int]]
# topic id -> entries in rank order
RunFile = Dict[int, List[RunEntry]]


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        data = source.encode("utf-8")
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return data


def _decode(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


_DOC_OPEN = re.compile(rb"<DOC>", re.IGNORECASE)
_DOC_CLOSE = re.compile(rb"</DOC>", re.IGNORECASE)
_DOCNO = re.compile(rb"<DOCNO>(.*?)</DOCNO>", re.IGNORECASE | re.DOTALL)
_TAG = re.compile(r"<[^>]*>")
_WS = re.compile(r"\s+")
_ENTITIES = (("&lt;", "<"), ("&gt;", ">"), ("&amp;", "&"))


def _clean(text: str) -> str:
    text = _TAG.sub(" ", text)
    for ent, ch in _ENTITIES:
        text = text.replace(ent, ch)
    return _WS.sub(" ", text).strip()


def iter_trec_docs(source: Source) -> Iterator[Document]:
    data = _read_bytes(source)
    pos = 0
    while True:
        m = _DOC_OPEN.search(data, pos)
        if m is None:
            return
        start = m.start()
        end = _DOC_CLOSE.search(data, m.end())
        nxt = _DOC_OPEN.search(data, m.end())
        if end is None or (nxt is not None and nxt.start() < end.start()):
            raise ParseError(f"unclosed <DOC> block at byte offset {start}")
        body = data[m.end():end.start()]
        no = _DOCNO.search(body)
        if no is None:
            raise ParseError(f"<DOC> block at byte offset {start} has no <DOCNO>")
        docno = _decode(no.group(1)).strip()
        if not docno:
            raise ParseError(f"empty <DOCNO> in block at byte offset {start}")
        text = _decode(body[:no.start()] + b" " + body[no.end():])
        yield Document(docno, _clean(text))
        pos = end.end()


def parse_trec_docs(source: Source) -> List[Document]:
    """Parse ``<DOC>`` blocks. Everything except the DOCNO element becomes text."""
    return list(iter_trec_docs(source))


def read_trec_docs(path: Union[str, Path]) -> List[Document]:
    """Read a document file, or every regular file under a directory (sorted)."""
    path = Path(path)
    if path.is_dir():
        docs: List[Document] = []
        for p in sorted(q for q in path.rglob("*") if q.is_file()):
            with open(p, "rb") as fh:
                docs.extend(iter_trec_docs(fh))
        return docs
    with open(path, "rb") as fh:
        return parse_trec_docs(fh)


_TOP = re.compile(r"<top>(.*?)</top>", re.IGNORECASE | re.DOTALL)
_NUM = re.compile(r"<num>\s*(?:Number\s*:)?\s*(\S+?)\s*(?:</num>|<|$)", re.IGNORECASE)
_TITLE = re.compile(r"<title>(.*?)(?=<|$)", re.IGNORECASE | re.DOTALL)
_TITLE_PREFIX = re.compile(r"^\s*Topic\s*:\s*", re.IGNORECASE)


def parse_topics(source: Source) -> List[Topic]:
    """Extract number and title of every ``<top>`` block; desc/narr are ignored."""
    text = _decode(_read_bytes(source))
    topics = []
    for i, m in enumerate(_TOP.finditer(text), 1):
        block = m.group(1)
        num = _NUM.search(block)
        if num is None:
            raise ParseError(f"topic block {i}: missing <num>")
        digits = re.sub(r"\D", "", num.group(1))
        if not digits:
            raise ParseError(f"topic block {i}: non-numeric <num> {num.group(1)!r}")
        title = _TITLE.search(block)
        title_text = _WS.sub(" ", _TITLE_PREFIX.sub("", title.group(1))).strip() if title else ""
        if not title_text:
            raise ParseError(f"topic {digits}: missing or empty <title>")
        topics.append(Topic(int(digits), title_text))
    return topics


def read_topics(path: Union[str, Path]) -> List[Topic]:
    with open(path, "rb") as fh:
        return parse_topics(fh)


def parse_qrels(source: Source) -> QrelSet:
    qrels: QrelSet = {}
    for lineno, line in enumerate(_decode(_read_bytes(source)).splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 4:
            raise ParseError(f"qrels line {lineno}: expected 4 columns, got {len(parts)}")
        topic, _, docno, grade = parts
        try:
            tid, g = int(topic), int(grade)
        except ValueError:
            raise ParseError(f"qrels line {lineno}: non-integer topic or grade") from None
        if g < 0:
            # some qrels use -1 for unjudged/ignored; treat as non-relevant
            g = 0
        qrels.setdefault(tid, {})[docno] = g
    return qrels


def read_qrels(path: Union[str, Path]) -> QrelSet:
    with open(path, "rb") as fh:
        return parse_qrels(fh)


def validate_run(run: RunFile) -> None:
    for topic, entries in run.items():
        for i, e in enumerate(entries):
            if e.rank != i + 1:
                raise ParseError(f"topic {topic}: rank {e.rank} at position {i + 1} (ranks must be 1..k)")
            if i and e.score > entries[i - 1].score:
                raise ParseError(f"topic {topic}: score increases at rank {e.rank}")


def write_run(run: RunFile, tag: str) -> bytes:
    """Six-column TREC run lines, topics ascending."""
    validate_run(run)
    buf = io.StringIO()
    for topic in sorted(run):
        for e in run[topic]:
            buf.write(f"{topic} Q0 {e.docno} {e.rank} {e.score:.6f} {tag}\n")
    return buf.getvalue().encode("utf-8")


def parse_run(source: Source) -> RunFile:
    run: RunFile = {}
    for lineno, line in enumerate(_decode(_read_bytes(source)).splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 6:
            raise ParseError(f"run line {lineno}: expected 6 columns, got {len(parts)}")
        try:
            entry = RunEntry(parts[2], int(parts[3]), float(parts[4]))
            topic = int(parts[0])
        except ValueError:
            raise ParseError(f"run line {lineno}: bad number") from None
        run.setdefault(topic, []).append(entry)
    for entries in run.values():
        entries.sort(key=lambda e: e.rank)
    return run


def read_run(path: Union[str, Path]) -> RunFile:
    with open(path, "rb") as fh:
        return parse_run(fh)
