"""Pseudo-relevance-feedback query expansion.

Every method follows the same outline: retrieve the top ``D`` documents for
the unexpanded title query, score each distinct term of those documents,
keep the ``T`` best, and assemble a weighted query from the normalized
expansion scores plus the (multiplied) original query terms.

Methods
-------
pwnet   gloss overlap with the query units x Robertson idf x document goodness
nownet  pwnet without the gloss-overlap factor
fnpw    gloss overlap alone
kld     Kullback-Leibler divergence contribution, PRD vs collection
rm3     relevance model interpolated with the query MLE
kldlca  KLD pool re-ranked by local context analysis, KLD weights kept
klwnet  convex mix of pwnet and kldlca expansion scores
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .corpus import Topic
from .index import InvertedIndex
from .retrieval import WeightedQuery, search
from .textproc import analyze, analyze_pairs, stem
from .wordnet import GlossLexicon, QueryUnit, detect_units, gloss_set, rel

IDF_FLOOR = 0.0001
LCA_DELTA = 0.1
# Sim(d,Q)/max Sim is rounded to this many decimals so that rescaling all
# retrieval scores cannot perturb the last bits of expansion weights.
SIM_DECIMALS = 12

METHODS = ("baseline", "pwnet", "nownet", "fnpw", "kld", "rm3", "kldlca", "klwnet")


@dataclass(frozen=True)
class ExpansionConfig:
    D: int = 10
    T: int = 60
    beta: float = 2.0
    alpha: float = 0.3
    mode: str = "dice"
    mu: float = 2500.0
    lam: float = 0.5

    def __post_init__(self):
        if self.D < 1 or self.T < 1:
            raise ValueError("D and T must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.lam <= 1.0:
            raise ValueError("alpha and lambda must lie in [0, 1]")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")


DEFAULTS: Dict[str, ExpansionConfig] = {
    "baseline": ExpansionConfig(beta=1.0),
    "pwnet": ExpansionConfig(D=10, T=60, beta=2.0),
    "nownet": ExpansionConfig(D=10, T=60, beta=2.0),
    "fnpw": ExpansionConfig(D=10, T=60, beta=2.0),
    "kld": ExpansionConfig(D=10, T=40, beta=1.0),
    "rm3": ExpansionConfig(D=50, T=50, beta=1.0, mu=2500.0, lam=0.5),
    "kldlca": ExpansionConfig(D=50, T=40, beta=1.0),
    "klwnet": ExpansionConfig(alpha=0.3, beta=1.0),
}


@dataclass(frozen=True)
class PseudoRelevantDocs:
    topic_id: int
    docs: Tuple[Tuple[str, float], ...]
    ordinals: Tuple[int, ...]

    @property
    def max_sim(self) -> float:
        return self.docs[0][1] if self.docs else 0.0

    def __len__(self) -> int:
        return len(self.docs)

    def scaled(self, factor: float) -> "PseudoRelevantDocs":
        return replace(self, docs=tuple((d, s * factor) for d, s in self.docs))


@dataclass(frozen=True)
class ScoredCandidate:
    term: str
    per_unit: Tuple[float, ...]
    score: float
    method: str


@dataclass
class ExpandedQuery:
    """Final weighted query.

    ``expansion`` holds the normalized expansion scores of the selected
    terms and ``original`` the normalized original-term scores, kept for
    inspection and for the combination method.
    """

    topic_id: int
    method: str
    weights: Dict[str, float]
    expansion: Dict[str, float] = field(default_factory=dict)
    original: Dict[str, float] = field(default_factory=dict)

    def ranked(self) -> List[Tuple[str, float]]:
        return sorted(self.weights.items(), key=lambda kv: (-kv[1], kv[0]))

    def to_query(self) -> WeightedQuery:
        return WeightedQuery(self.topic_id, tuple(self.ranked()))


# -- small formulas -----------------------------------------------------------


def robertson_idf(N: int, N_t: int) -> float:
    """``max(0.0001, log10((N - N_t + 0.5) / (N_t + 0.5)))``."""
    return max(IDF_FLOOR, math.log10((N - N_t + 0.5) / (N_t + 0.5)))


def original_scores(terms: Sequence[str]) -> Dict[str, float]:
    """``(1 + ln tf(t,Q)) / (1 + max ln tf(t',Q))`` per distinct query term."""
    if not terms:
        return {}
    tf = Counter(terms)
    top = 1.0 + math.log(max(tf.values()))
    return {t: (1.0 + math.log(n)) / top for t, n in tf.items()}


def summand(s: float) -> float:
    return s / (1.0 + s)


def select_top(scores: Mapping[str, float], T: int) -> Dict[str, float]:
    """The ``T`` best positive-scoring terms, normalized by the best score of all
    candidates. Ties go to the lexicographically smaller term."""
    positive = [(t, s) for t, s in scores.items() if s > 0]
    if not positive:
        return {}
    top = max(s for _, s in positive)
    positive.sort(key=lambda kv: (-kv[1], kv[0]))
    return {t: s / top for t, s in positive[:T]}


def assemble_query(
    orig_terms: Sequence[str],
    expansion: Mapping[str, float],
    beta: float,
    topic_id: int = 0,
    method: str = "",
) -> ExpandedQuery:
    """``score(t) = score_exp(t) + beta * score_orig(t)``.

    ``expansion`` must already be normalized (see :func:`select_top`).
    """
    orig = original_scores(orig_terms)
    weights: Dict[str, float] = {}
    for t, w in orig.items():
        weights[t] = expansion.get(t, 0.0) + beta * w
    for t, w in expansion.items():
        if t not in weights:
            weights[t] = w
    weights = {t: w for t, w in weights.items() if w > 0}
    return ExpandedQuery(topic_id, method, weights, dict(expansion), orig)


def combine_scores(first: Mapping[str, float], second: Mapping[str, float], alpha: float) -> Dict[str, float]:
    """``alpha * first + (1 - alpha) * second`` over the union; a missing score counts as 0."""
    terms = sorted(set(first) | set(second))
    return {t: alpha * first.get(t, 0.0) + (1.0 - alpha) * second.get(t, 0.0) for t in terms}


# -- query and PRD ------------------------------------------------------------


def query_terms(index: InvertedIndex, topic: Topic) -> List[str]:
    return analyze(topic.title, index.analyzer)


def query_words(index: InvertedIndex, topic: Topic) -> List[str]:
    return [w for w, _ in analyze_pairs(topic.title, index.analyzer)]


def baseline_query(index: InvertedIndex, topic: Topic) -> ExpandedQuery:
    return assemble_query(query_terms(index, topic), {}, 1.0, topic.id, "baseline")


def retrieve_prd(index: InvertedIndex, topic: Topic, D: int) -> PseudoRelevantDocs:
    """Top ``D`` documents of the unexpanded query, with their scores."""
    ranking = search(index, baseline_query(index, topic).to_query(), D)
    docs = tuple(zip(ranking.docnos, ranking.scores))
    return PseudoRelevantDocs(topic.id, docs, tuple(index.doc_ids[d] for d in ranking.docnos))


def _prd_arrays(index: InvertedIndex, prd: PseudoRelevantDocs):
    """Concatenated (term id, tf, normalized sim) triples over the PRD docs."""
    tids, tfs, sims = [], [], []
    top = prd.max_sim
    for ordinal, (_, sim) in zip(prd.ordinals, prd.docs):
        t, f = index.doc_terms(ordinal)
        tids.append(t)
        tfs.append(f)
        sims.append(np.full(len(t), round(sim / top, SIM_DECIMALS)))
    return np.concatenate(tids), np.concatenate(tfs), np.concatenate(sims)


def prd_term_stats(index: InvertedIndex, prd: PseudoRelevantDocs) -> Dict[str, Tuple[int, float]]:
    """Candidate term -> (tf summed over PRD, sum of Sim(d,Q)/max Sim over PRD docs containing it)."""
    if not len(prd):
        return {}
    tids, tfs, sims = _prd_arrays(index, prd)
    uniq, inv = np.unique(tids, return_inverse=True)
    tf_sum = np.bincount(inv, weights=tfs)
    docsim = np.bincount(inv, weights=sims)
    return {index.terms[t]: (int(n), float(s)) for t, n, s in zip(uniq, tf_sum, docsim)}


def _tf_matrix(index: InvertedIndex, prd: PseudoRelevantDocs, tids: Sequence[int]) -> np.ndarray:
    """tf of each requested term (rows) in each PRD document (columns)."""
    want = np.asarray(tids, dtype=np.int64)
    out = np.zeros((len(want), len(prd)), dtype=np.float64)
    for j, ordinal in enumerate(prd.ordinals):
        t, f = index.doc_terms(ordinal)
        pos = np.searchsorted(t, want)
        pos = np.minimum(pos, len(t) - 1) if len(t) else pos
        if len(t):
            hit = t[pos] == want
            out[hit, j] = f[pos[hit]]
    return out


# -- gloss-based scoring -------------------------------------------------------


def unit_gloss_sets(index: InvertedIndex, units: Sequence[QueryUnit], lex: GlossLexicon):
    sets = []
    for u in units:
        lemma = u.lemma
        if u.kind == "word" and lemma not in lex:
            # plural or inflected query word: fall back to the corpus's usual form of its stem
            lemma = index.stem_surface.get(stem(u.lemma), lemma)
        sets.append(gloss_set(lex, lemma, index.analyzer))
    return sets


def term_gloss_set(index: InvertedIndex, term: str, lex: GlossLexicon):
    return gloss_set(lex, index.stem_surface.get(term), index.analyzer)


def pwnet_score(
    term: str,
    unit_sets: Sequence[frozenset],
    docsim: float,
    index: InvertedIndex,
    lex: GlossLexicon,
    mode: str = "dice",
) -> ScoredCandidate:
    """``S(t) = sum_i s/(1+s)`` with ``s = Rel(t,q_i) * idf_t * docsim(t)``.

    ``docsim`` is the sum of ``Sim(d,Q)/max Sim`` over the PRD documents
    that contain ``term`` (see :func:`prd_term_stats`).
    """
    idf = robertson_idf(index.N, index.df(term))
    tset = term_gloss_set(index, term, lex)
    per_unit = tuple(rel(tset, qs, mode) * idf * docsim for qs in unit_sets)
    return ScoredCandidate(term, per_unit, sum(summand(s) for s in per_unit), "pwnet")


def pwnet_candidates(index, topic, lex, prd, mode="dice") -> List[ScoredCandidate]:
    units = detect_units(query_words(index, topic), lex)
    unit_sets = unit_gloss_sets(index, units, lex)
    stats = prd_term_stats(index, prd)
    return [pwnet_score(t, unit_sets, ds, index, lex, mode) for t, (_, ds) in stats.items()]


def nownet_candidates(index, topic, prd, lex=None) -> List[ScoredCandidate]:
    words = query_words(index, topic)
    n_units = len(detect_units(words, lex)) if lex is not None else len(words)
    out = []
    for t, (_, ds) in prd_term_stats(index, prd).items():
        s = robertson_idf(index.N, index.df(t)) * ds
        out.append(ScoredCandidate(t, (s,) * n_units, n_units * summand(s), "nownet"))
    return out


def fnpw_candidates(index, topic, lex, prd, mode="dice") -> List[ScoredCandidate]:
    units = detect_units(query_words(index, topic), lex)
    unit_sets = unit_gloss_sets(index, units, lex)
    out = []
    for t in prd_term_stats(index, prd):
        tset = term_gloss_set(index, t, lex)
        per_unit = tuple(rel(tset, qs, mode) for qs in unit_sets)
        out.append(ScoredCandidate(t, per_unit, sum(per_unit), "fnpw"))
    return out


# -- distribution and association scoring --------------------------------------


def kld_scores(index: InvertedIndex, prd: PseudoRelevantDocs) -> Dict[str, float]:
    """``p_R * log2(p_R / p_C)`` for every term of the PRD."""
    stats = prd_term_stats(index, prd)
    prd_tokens = sum(int(index.doc_lengths[o]) for o in prd.ordinals)
    out = {}
    for t, (tf, _) in stats.items():
        p_r = tf / prd_tokens
        p_c = index.cf(t) / index.total_tokens
        out[t] = p_r * math.log2(p_r / p_c)
    return out


def _lca_idf(N: int, n: int) -> float:
    return min(1.0, math.log10(N / n) / 5.0)


def lca_beliefs(
    index: InvertedIndex, q_terms: Sequence[str], prd: PseudoRelevantDocs, candidates: Sequence[str]
) -> Dict[str, float]:
    """Local context analysis belief of each candidate:

    ``Bel(Q,t) = prod_i (delta + log10(co(t,q_i) + 1) * idf_t / log10(n)) ** idf_{q_i}``
    with ``co = sum_d tf(t,d) tf(q_i,d)`` over the ``n`` PRD documents and
    ``idf_x = min(1, log10(N/N_x)/5)``.
    """
    qs = [q for q in dict.fromkeys(q_terms) if q in index.term_ids]
    cand = list(candidates)
    if not len(prd) or not cand:
        return {t: 1.0 for t in cand}
    q_tf = _tf_matrix(index, prd, [index.term_ids[q] for q in qs])
    c_tf = _tf_matrix(index, prd, [index.term_ids[t] for t in cand])
    co = c_tf @ q_tf.T  # candidates x query terms
    log_n = math.log10(max(len(prd), 2))
    q_idf = [_lca_idf(index.N, index.df(q)) for q in qs]
    out = {}
    for i, t in enumerate(cand):
        idf_t = _lca_idf(index.N, index.df(t))
        bel = 1.0
        for j, qi in enumerate(q_idf):
            bel *= (LCA_DELTA + math.log10(co[i, j] + 1.0) * idf_t / log_n) ** qi
        out[t] = bel
    return out


def lca_belief(index: InvertedIndex, topic: Topic, prd: PseudoRelevantDocs, candidate: str) -> float:
    return lca_beliefs(index, query_terms(index, topic), prd, [candidate])[candidate]


def relevance_model(index: InvertedIndex, q_terms: Sequence[str], prd: PseudoRelevantDocs, mu: float) -> np.ndarray:
    """RM1 ``p(t|R)`` over the whole vocabulary (indexed by term id); sums to 1.

    ``p(t|R) ∝ sum_d p(t|d) p(Q|d)`` with Dirichlet-smoothed document models.
    """
    p_c = index.cfs / index.total_tokens
    qs = [index.term_ids[q] for q in q_terms if q in index.term_ids]
    q_tf = _tf_matrix(index, prd, qs)
    lens = index.doc_lengths[list(prd.ordinals)].astype(np.float64)
    log_pq = np.zeros(len(prd))
    for row, tid in zip(q_tf, qs):
        log_pq += np.log((row + mu * p_c[tid]) / (lens + mu))
    w = np.exp(log_pq - log_pq.max())
    model = p_c * float(np.sum(w * mu / (lens + mu)))
    for j, ordinal in enumerate(prd.ordinals):
        t, f = index.doc_terms(ordinal)
        model[t] += w[j] * f / (lens[j] + mu)
    return model / w.sum()


# -- method drivers -------------------------------------------------------------


def _passthrough(index, topic, method) -> ExpandedQuery:
    q = baseline_query(index, topic)
    q.method = method
    return q


def _feedback(index, topic, cfg, method, prd, score_fn) -> ExpandedQuery:
    if prd is None:
        prd = retrieve_prd(index, topic, cfg.D)
    if not len(prd):
        return _passthrough(index, topic, method)
    selected = select_top(score_fn(prd), cfg.T)
    if not selected:
        return _passthrough(index, topic, method)
    return assemble_query(query_terms(index, topic), selected, cfg.beta, topic.id, method)


def _cfg(method, cfg):
    return cfg if cfg is not None else DEFAULTS[method]


def pwnet_expand(index, topic, lex, cfg=None, prd=None) -> ExpandedQuery:
    cfg = _cfg("pwnet", cfg)
    return _feedback(
        index, topic, cfg, "pwnet", prd,
        lambda p: {c.term: c.score for c in pwnet_candidates(index, topic, lex, p, cfg.mode)},
    )


def nownet_expand(index, topic, cfg=None, prd=None, lex=None) -> ExpandedQuery:
    cfg = _cfg("nownet", cfg)
    return _feedback(
        index, topic, cfg, "nownet", prd,
        lambda p: {c.term: c.score for c in nownet_candidates(index, topic, p, lex)},
    )


def fnpw_expand(index, topic, lex, cfg=None, prd=None) -> ExpandedQuery:
    cfg = _cfg("fnpw", cfg)
    return _feedback(
        index, topic, cfg, "fnpw", prd,
        lambda p: {c.term: c.score for c in fnpw_candidates(index, topic, lex, p, cfg.mode)},
    )


def kld_expand(index, topic, cfg=None, prd=None) -> ExpandedQuery:
    cfg = _cfg("kld", cfg)
    return _feedback(index, topic, cfg, "kld", prd, lambda p: kld_scores(index, p))


BeliefFn = Callable[[InvertedIndex, Sequence[str], PseudoRelevantDocs, Sequence[str]], Dict[str, float]]


def kldlca_expand(index, topic, cfg=None, prd=None, belief: BeliefFn = lca_beliefs) -> ExpandedQuery:
    """KLD picks a pool of ``2T`` terms; the pool is re-ranked by ``belief``
    (LCA by default) and the top ``T`` keep their KLD weights."""
    cfg = _cfg("kldlca", cfg)
    if prd is None:
        prd = retrieve_prd(index, topic, cfg.D)
    if not len(prd):
        return _passthrough(index, topic, "kldlca")
    pool = select_top(kld_scores(index, prd), 2 * cfg.T)
    if not pool:
        return _passthrough(index, topic, "kldlca")
    q = query_terms(index, topic)
    bel = belief(index, q, prd, list(pool))
    reranked = sorted(pool, key=lambda t: (-bel[t], -pool[t], t))
    selected = {t: pool[t] for t in reranked[: cfg.T]}
    return assemble_query(q, selected, cfg.beta, topic.id, "kldlca")


def rm3_expand(index, topic, cfg=None, prd=None) -> ExpandedQuery:
    """``p'(t) = lam * p_mle(t|Q) + (1 - lam) * p(t|R)`` over the top-``T`` RM1
    terms and the query terms, normalized by the largest ``p'``."""
    cfg = _cfg("rm3", cfg)
    if prd is None:
        prd = retrieve_prd(index, topic, cfg.D)
    q = [t for t in query_terms(index, topic) if t in index.term_ids]
    if not len(prd) or not q:
        return _passthrough(index, topic, "rm3")
    model = relevance_model(index, q, prd, cfg.mu)
    order = np.lexsort((np.arange(len(model)), -model))[: cfg.T]
    top = {index.terms[i]: float(model[i]) for i in order}
    mle = {t: n / len(q) for t, n in Counter(q).items()}
    mixed = {}
    for t in list(top) + [t for t in mle if t not in top]:
        p_rel = top[t] if t in top else float(model[index.term_ids[t]])
        mixed[t] = cfg.lam * mle.get(t, 0.0) + (1.0 - cfg.lam) * p_rel
    best = max(mixed.values())
    weights = {t: w / best for t, w in mixed.items() if w > 0}
    expansion = {t: w for t, w in weights.items() if t not in mle}
    return ExpandedQuery(topic.id, "rm3", weights, expansion, original_scores(q))


def klwnet_expand(
    index, topic, lex, cfg=None, pwnet_cfg=None, kldlca_cfg=None
) -> ExpandedQuery:
    """Union of the pwnet and kldlca expansion terms, weighted by
    ``alpha * pwnet + (1 - alpha) * kldlca``. Each constituent runs its own
    retrieval at its own depth. Original query terms keep their plain
    normalized weight."""
    cfg = _cfg("klwnet", cfg)
    pw = pwnet_expand(index, topic, lex, pwnet_cfg)
    kl = kldlca_expand(index, topic, kldlca_cfg)
    orig = original_scores(query_terms(index, topic))
    mixed = combine_scores(pw.expansion, kl.expansion, cfg.alpha)
    weights = dict(orig)
    expansion = {}
    for t, w in mixed.items():
        if t not in orig and w > 0:
            weights[t] = w
            expansion[t] = w
    return ExpandedQuery(topic.id, "klwnet", weights, expansion, orig)


def expand(method: str, index: InvertedIndex, topic: Topic, lex: Optional[GlossLexicon] = None,
           configs: Optional[Mapping[str, ExpansionConfig]] = None) -> ExpandedQuery:
    """Dispatch by method name; ``configs`` overrides per-method defaults."""
    configs = {**DEFAULTS, **(configs or {})}
    needs_lex = method in ("pwnet", "fnpw", "klwnet")
    if needs_lex and lex is None:
        raise ValueError(f"method {method!r} needs a gloss lexicon")
    if method == "baseline":
        return baseline_query(index, topic)
    if method == "pwnet":
        return pwnet_expand(index, topic, lex, configs["pwnet"])
    if method == "nownet":
        return nownet_expand(index, topic, configs["nownet"], lex=lex)
    if method == "fnpw":
        return fnpw_expand(index, topic, lex, configs["fnpw"])
    if method == "kld":
        return kld_expand(index, topic, configs["kld"])
    if method == "rm3":
        return rm3_expand(index, topic, configs["rm3"])
    if method == "kldlca":
        return kldlca_expand(index, topic, configs["kldlca"])
    if method == "klwnet":
        return klwnet_expand(index, topic, lex, configs["klwnet"], configs["pwnet"], configs["kldlca"])
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def format_expanded(queries: Sequence[ExpandedQuery]) -> str:
    """``topic<TAB>term<TAB>weight`` lines, weight descending then term."""
    lines = []
    for q in sorted(queries, key=lambda q: q.topic_id):
        for t, w in q.ranked():
            lines.append(f"{q.topic_id}\t{t}\t{w:.6f}")
    return "\n".join(lines) + ("\n" if lines else "")
