"""DFR IFB2 scoring and weighted-query top-k search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .index import InvertedIndex

# Terrier's default for the second (length) normalization
IFB2_C = 1.0
# Final scores keep this many significant digits, so that sums equal in exact
# arithmetic but not in floating point tie, and the docno tie-break decides.
SCORE_DIGITS = 12


@dataclass(frozen=True)
class WeightedQuery:
    topic_id: int
    terms: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        if any(w < 0 for _, w in self.terms):
            raise ValueError("query term weights must be non-negative")


@dataclass(frozen=True)
class Ranking:
    docnos: Tuple[str, ...]
    scores: Tuple[float, ...]

    def __len__(self):
        return len(self.docnos)

    def __iter__(self):
        return iter(zip(self.docnos, self.scores))


def ifb2_weight(tf, doc_len, qtw, N, N_t, F, avg_dl, c: float = IFB2_C):
    """IFB2 contribution of one query term to one document.

    tfn = tf * log2(1 + c * avg_dl / doc_len)
    w   = qtw * (F + 1) / (N_t * (tfn + 1)) * tfn * log2((N + 1) / (F + 0.5))

    Works elementwise on numpy arrays for ``tf`` and ``doc_len``.
    """
    if np.any(np.asarray(tf) < 1):
        raise ValueError("ifb2_weight needs tf >= 1; skip terms absent from the document")
    tfn = tf * np.log2(1.0 + c * avg_dl / doc_len)
    return qtw * ((F + 1.0) / (N_t * (tfn + 1.0))) * tfn * np.log2((N + 1.0) / (F + 0.5))


def quantize(scores: np.ndarray, digits: int = SCORE_DIGITS) -> np.ndarray:
    """Round each score to ``digits`` significant digits."""
    scores = np.asarray(scores, dtype=np.float64)
    mag = np.abs(scores)
    exp = np.floor(np.log10(np.where(mag > 0, mag, 1.0)))
    scale = 10.0 ** (digits - 1 - exp)
    return np.round(scores * scale) / scale


def score_documents(index: InvertedIndex, query: WeightedQuery) -> Tuple[np.ndarray, np.ndarray]:
    """Ordinals of matching documents and their accumulated IFB2 scores."""
    scores = np.zeros(index.N, dtype=np.float64)
    matched = np.zeros(index.N, dtype=bool)
    for term, qtw in query.terms:
        tid = index.term_ids.get(term)
        if tid is None or qtw <= 0:
            continue
        docs, tfs = index.posting_arrays(tid)
        w = ifb2_weight(
            tfs.astype(np.float64),
            index.doc_lengths[docs].astype(np.float64),
            qtw,
            index.N,
            float(index.dfs[tid]),
            float(index.cfs[tid]),
            index.avg_doc_length,
        )
        scores[docs] += w
        matched[docs] = True
    hits = np.flatnonzero(matched)
    return hits, quantize(scores[hits])


def search(index: InvertedIndex, query: WeightedQuery, k: int) -> Ranking:
    """Top-``k`` documents by summed IFB2 score, ties by docno ascending.

    A query with no indexed terms yields an empty ranking.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    hits, scores = score_documents(index, query)
    if len(hits) == 0:
        return Ranking((), ())
    order = np.lexsort((index.docno_rank[hits], -scores))[:k]
    return Ranking(
        tuple(index.docnos[d] for d in hits[order]),
        tuple(float(s) for s in scores[order]),
    )


def query_from_terms(topic_id: int, terms: Sequence[str]) -> WeightedQuery:
    """Unit-weight query over the distinct terms, first-occurrence order."""
    seen: List[str] = []
    for t in terms:
        if t not in seen:
            seen.append(t)
    return WeightedQuery(topic_id, tuple((t, 1.0) for t in seen))
