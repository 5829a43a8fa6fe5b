"""In-memory inverted index with collection statistics and a versioned file format.

The on-disk layout is documented in ``docs/index-format.md``.
"""

from __future__ import annotations

import struct
import zlib
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .corpus import Document
from .textproc import AnalyzerConfig, analyze_pairs

MAGIC = b"QXIDX\x00\x00\x00"
TRAILER = b"QXEND\x00\x00\x00"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIQQQ")
_SECTION = struct.Struct("<Q")
_CRC = struct.Struct("<I")


class IndexBuildError(ValueError):
    pass


class IndexFormatError(ValueError):
    """Unreadable, truncated or version-mismatched index file."""


@dataclass(frozen=True)
class CollectionStats:
    N: int
    total_tokens: int

    @property
    def avg_doc_length(self) -> float:
        return self.total_tokens / self.N if self.N else 0.0


class InvertedIndex:
    """Immutable postings plus the per-term and per-document statistics.

    Terms are stored in lexicographic order, so term ids double as a
    deterministic tie-break key. Postings for term ``i`` occupy
    ``post_docs[ptr[i]:ptr[i+1]]`` sorted by document ordinal.
    """

    def __init__(
        self,
        docnos: Sequence[str],
        doc_lengths: np.ndarray,
        terms: Sequence[str],
        ptr: np.ndarray,
        post_docs: np.ndarray,
        post_tfs: np.ndarray,
        surfaces: Sequence[str],
        analyzer: AnalyzerConfig,
    ):
        self.docnos = list(docnos)
        self.doc_lengths = np.asarray(doc_lengths, dtype=np.int64)
        self.terms = list(terms)
        self.ptr = np.asarray(ptr, dtype=np.int64)
        self.post_docs = np.asarray(post_docs, dtype=np.int64)
        self.post_tfs = np.asarray(post_tfs, dtype=np.int64)
        self.analyzer = analyzer
        self.term_ids = {t: i for i, t in enumerate(self.terms)}
        self.doc_ids = {d: i for i, d in enumerate(self.docnos)}
        self.stem_surface = dict(zip(self.terms, surfaces))
        self.dfs = np.diff(self.ptr)
        self.cfs = np.add.reduceat(self.post_tfs, self.ptr[:-1]) if len(self.terms) else np.zeros(0, np.int64)
        self.N = len(self.docnos)
        self.total_tokens = int(self.doc_lengths.sum())
        self.avg_doc_length = self.total_tokens / self.N if self.N else 0.0
        order = sorted(range(self.N), key=self.docnos.__getitem__)
        self.docno_rank = np.empty(self.N, dtype=np.int64)
        self.docno_rank[order] = np.arange(self.N)
        self._forward = None

    @property
    def stats(self) -> CollectionStats:
        return CollectionStats(self.N, self.total_tokens)

    @property
    def vocabulary_size(self) -> int:
        return len(self.terms)

    def df(self, term: str) -> int:
        tid = self.term_ids.get(term)
        return 0 if tid is None else int(self.dfs[tid])

    def cf(self, term: str) -> int:
        tid = self.term_ids.get(term)
        return 0 if tid is None else int(self.cfs[tid])

    def posting_arrays(self, tid: int) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self.ptr[tid], self.ptr[tid + 1]
        return self.post_docs[lo:hi], self.post_tfs[lo:hi]

    def postings(self, term: str) -> List[Tuple[str, int]]:
        tid = self.term_ids.get(term)
        if tid is None:
            return []
        docs, tfs = self.posting_arrays(tid)
        return [(self.docnos[d], int(tf)) for d, tf in zip(docs, tfs)]

    def doc_terms(self, ordinal: int) -> Tuple[np.ndarray, np.ndarray]:
        """Term ids (ascending) and term frequencies of one document."""
        fptr, fterms, ftfs = self._forward_index()
        lo, hi = fptr[ordinal], fptr[ordinal + 1]
        return fterms[lo:hi], ftfs[lo:hi]

    def _forward_index(self):
        if self._forward is None:
            tids = np.repeat(np.arange(len(self.terms), dtype=np.int64), self.dfs)
            order = np.argsort(self.post_docs, kind="stable")
            counts = np.bincount(self.post_docs, minlength=self.N)
            fptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
            self._forward = (fptr, tids[order], self.post_tfs[order])
        return self._forward

    def save(self, path: Union[str, Path]) -> None:
        save(self, path)


# -- building ---------------------------------------------------------------


@dataclass
class _Partial:
    docnos: List[str] = field(default_factory=list)
    lengths: List[int] = field(default_factory=list)
    postings: Dict[str, Tuple[List[int], List[int]]] = field(default_factory=dict)
    surfaces: Dict[str, Counter] = field(default_factory=dict)


def _build_partial(docs: Sequence[Document], cfg: AnalyzerConfig) -> _Partial:
    part = _Partial()
    postings: Dict[str, Tuple[List[int], List[int]]] = {}
    surfaces: Dict[str, Counter] = defaultdict(Counter)
    for ordinal, doc in enumerate(docs):
        pairs = analyze_pairs(doc.text, cfg)
        tf = Counter()
        for surface, term in pairs:
            tf[term] += 1
            surfaces[term][surface] += 1
        for term, n in tf.items():
            entry = postings.get(term)
            if entry is None:
                entry = postings[term] = ([], [])
            entry[0].append(ordinal)
            entry[1].append(n)
        part.docnos.append(doc.docno)
        part.lengths.append(len(pairs))
    part.postings = postings
    part.surfaces = dict(surfaces)
    return part


def _merge(parts: Sequence[_Partial], cfg: AnalyzerConfig) -> InvertedIndex:
    docnos: List[str] = []
    lengths: List[int] = []
    merged: Dict[str, Tuple[List[int], List[int]]] = defaultdict(lambda: ([], []))
    surfaces: Dict[str, Counter] = defaultdict(Counter)
    for part in parts:
        base = len(docnos)
        for term, (docs, tfs) in part.postings.items():
            entry = merged[term]
            entry[0].extend(d + base for d in docs)
            entry[1].extend(tfs)
        for term, counts in part.surfaces.items():
            surfaces[term].update(counts)
        docnos.extend(part.docnos)
        lengths.extend(part.lengths)

    seen = set()
    for d in docnos:
        if d in seen:
            raise IndexBuildError(f"duplicate docno {d!r}")
        seen.add(d)

    terms = sorted(merged)
    ptr = np.zeros(len(terms) + 1, dtype=np.int64)
    all_docs, all_tfs, surf = [], [], []
    for i, term in enumerate(terms):
        docs, tfs = merged[term]
        ptr[i + 1] = ptr[i] + len(docs)
        all_docs.extend(docs)
        all_tfs.extend(tfs)
        counts = surfaces[term]
        # most frequent surface form; ties go to the lexicographically smallest
        surf.append(min(counts, key=lambda s: (-counts[s], s)))
    return InvertedIndex(
        docnos,
        np.array(lengths, dtype=np.int64),
        terms,
        ptr,
        np.array(all_docs, dtype=np.int64),
        np.array(all_tfs, dtype=np.int64),
        surf,
        cfg,
    )


def build_index(
    docs: Iterable[Document],
    cfg: Optional[AnalyzerConfig] = None,
    workers: int = 1,
    chunk_size: int = 2000,
) -> InvertedIndex:
    """Index ``docs`` in input order. With ``workers > 1`` the collection is split
    into contiguous partitions analyzed in separate processes and merged in order,
    which yields the same index as a serial build."""
    cfg = cfg or AnalyzerConfig()
    docs = list(docs)
    if workers <= 1 or len(docs) <= chunk_size:
        return _merge([_build_partial(docs, cfg)], cfg)
    chunks = [docs[i:i + chunk_size] for i in range(0, len(docs), chunk_size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_build_partial, chunks, [cfg] * len(chunks)))
    return _merge(parts, cfg)


# -- persistence ------------------------------------------------------------


def _pack_strings(strings: Sequence[str]) -> bytes:
    return "\n".join(strings).encode("utf-8")


def _unpack_strings(raw: bytes, count: int) -> List[str]:
    if count == 0:
        return []
    out = raw.decode("utf-8").split("\n")
    if len(out) != count:
        raise IndexFormatError(f"string table holds {len(out)} entries, header says {count}")
    return out


def save(index: InvertedIndex, path: Union[str, Path]) -> None:
    gaps = index.post_docs.copy()
    if len(gaps):
        gaps[1:] -= index.post_docs[:-1]
        starts = index.ptr[:-1]
        gaps[starts] = index.post_docs[starts]
    sections = [
        _pack_strings(sorted(index.analyzer.stopwords)),
        _pack_strings(index.docnos),
        _pack_strings(index.terms),
        _pack_strings([index.stem_surface[t] for t in index.terms]),
        index.doc_lengths.astype("<u4").tobytes(),
        index.dfs.astype("<u4").tobytes(),
        gaps.astype("<u4").tobytes(),
        index.post_tfs.astype("<u4").tobytes(),
    ]
    flags = 1 if index.analyzer.stemming else 0
    body = bytearray(_HEADER.pack(MAGIC, FORMAT_VERSION, flags, index.N, len(index.terms), len(index.analyzer.stopwords)))
    for sec in sections:
        body += _SECTION.pack(len(sec))
        body += sec
    body += _CRC.pack(zlib.crc32(body))
    body += TRAILER
    Path(path).write_bytes(bytes(body))


def load(path: Union[str, Path]) -> InvertedIndex:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size or data[:8] != MAGIC:
        raise IndexFormatError(f"{path}: not an index file (expected format version {FORMAT_VERSION})")
    magic, version, flags, n_docs, n_terms, n_stop = _HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"{path}: index format version {version}, expected version {FORMAT_VERSION}")
    if len(data) < _HEADER.size + _CRC.size + len(TRAILER) or data[-len(TRAILER):] != TRAILER:
        raise IndexFormatError(f"{path}: truncated index file (expected format version {FORMAT_VERSION})")
    crc_at = len(data) - len(TRAILER) - _CRC.size
    (crc,) = _CRC.unpack_from(data, crc_at)
    if zlib.crc32(data[:crc_at]) != crc:
        raise IndexFormatError(f"{path}: checksum mismatch, file is corrupt or truncated")

    pos = _HEADER.size
    sections = []
    for _ in range(8):
        if pos + _SECTION.size > crc_at:
            raise IndexFormatError(f"{path}: truncated section table")
        (n,) = _SECTION.unpack_from(data, pos)
        pos += _SECTION.size
        if pos + n > crc_at:
            raise IndexFormatError(f"{path}: truncated section")
        sections.append(data[pos:pos + n])
        pos += n

    stop = _unpack_strings(sections[0], n_stop)
    docnos = _unpack_strings(sections[1], n_docs)
    terms = _unpack_strings(sections[2], n_terms)
    surfaces = _unpack_strings(sections[3], n_terms)
    lengths = np.frombuffer(sections[4], dtype="<u4").astype(np.int64)
    dfs = np.frombuffer(sections[5], dtype="<u4").astype(np.int64)
    gaps = np.frombuffer(sections[6], dtype="<u4").astype(np.int64)
    tfs = np.frombuffer(sections[7], dtype="<u4").astype(np.int64)
    if len(lengths) != n_docs or len(dfs) != n_terms or len(gaps) != len(tfs) or int(dfs.sum()) != len(gaps):
        raise IndexFormatError(f"{path}: section sizes disagree with header")

    ptr = np.concatenate([[0], np.cumsum(dfs)]).astype(np.int64)
    docs = np.cumsum(gaps)
    if len(docs):
        # each term's first gap is absolute: remove the running sum carried over
        seg_base = np.concatenate([[0], docs[ptr[1:-1] - 1]])
        docs = docs - np.repeat(seg_base, dfs) if len(dfs) else docs
    cfg = AnalyzerConfig(frozenset(stop), bool(flags & 1))
    return InvertedIndex(docnos, lengths, terms, ptr, docs, tfs, surfaces, cfg)
