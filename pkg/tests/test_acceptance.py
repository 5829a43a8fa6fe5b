"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL/SKIP line; the lines are printed together in
the terminal summary (see conftest.py). The last criterion needs licensed
TREC data and runs only when these variables are set:

  QEXPAND_TREC_DOCS    document files or directories, separated by os.pathsep
  QEXPAND_TREC_TOPICS  topic file
  QEXPAND_TREC_QRELS   qrels file
  QEXPAND_WORDNET      WordNet dict/ directory or lemma<TAB>gloss file
  QEXPAND_WORKERS      optional, index build processes (default 4)
"""

import os
import random
import time

import pytest
from scipy import stats

from qexpand.corpus import read_qrels, read_topics, read_trec_docs, write_run
from qexpand.evaluation import aggregate, average_precision, evaluate, format_comparison, paired_t, precision_at, relevant_retrieved
from qexpand.expand import (
    DEFAULTS,
    METHODS,
    assemble_query,
    combine_scores,
    kld_expand,
    kld_scores,
    kldlca_expand,
    klwnet_expand,
    pwnet_candidates,
    pwnet_expand,
    query_terms,
    query_words,
    retrieve_prd,
    robertson_idf,
    select_top,
)
from qexpand.experiment import minicorpus_path, open_lexicon, run_topics
from qexpand.index import build_index
from qexpand.retrieval import WeightedQuery, ifb2_weight, search
from qexpand.wordnet import detect_units, rel

RESULTS = []


@pytest.fixture
def record(request):
    """Record the outcome of the calling criterion test."""
    label = request.node.function.__doc__.strip().splitlines()[0]
    state = {"detail": ""}
    yield state
    RESULTS.append((label, state.get("status", "FAIL"), state["detail"]))


def passed(state, detail=""):
    state["status"] = "PASS"
    state["detail"] = detail


def test_c01_weight_arithmetic(record, mini_index, mini_topics, mini_lex):
    """C1 weight arithmetic (0.4806, 2.94, original weight 1.00)"""
    mixed = combine_scores({}, {"t": 0.6865}, DEFAULTS["klwnet"].alpha)["t"]
    assert abs(mixed - 0.4806) <= 1e-4
    final = assemble_query(["polygami"], {"polygami": 0.94}, 2.0).weights["polygami"]
    assert abs(final - 2.94) <= 1e-4
    topic = next(t for t in mini_topics if t.id == 316)
    q = klwnet_expand(mini_index, topic, mini_lex)
    assert q.original and all(q.weights[t] == 1.0 for t in q.original)
    passed(record, f"mix={mixed:.5f} final={final:.5f} klwnet orig={sorted(set(q.weights[t] for t in q.original))}")


def test_c02_overlap_algebra(record):
    """C2 overlap algebra on 1000 random gloss-set pairs"""
    rng = random.Random(1000)
    worst = 0.0
    vocab = [f"w{i}" for i in range(60)]
    for _ in range(1000):
        a = frozenset(rng.sample(vocab, rng.randint(1, 30)))
        b = frozenset(rng.sample(vocab, rng.randint(1, 30)))
        j, d = rel(a, b, "jaccard"), rel(a, b, "dice")
        worst = max(worst, abs(d - 2 * j / (1 + j)))
    assert worst <= 1e-12
    a, b = frozenset({"x", "y"}), frozenset({"z"})
    assert rel(a, b, "dice") == rel(a, b, "jaccard") == 0.0
    assert rel(a, a, "dice") == rel(a, a, "jaccard") == 1.0
    passed(record, f"max |dice - 2J/(1+J)| = {worst:.1e}")


def test_c03_idf_clamp(record):
    """C3 idf clamp and hand value"""
    assert all(robertson_idf(1000, n) == 0.0001 for n in range(500, 1001))
    v = robertson_idf(1000, 10)
    assert abs(v - 1.9746) <= 1e-4
    passed(record, f"idf(1000,10)={v:.5f}")


def test_c04_bounded_scores(record, mini_index, mini_topics, mini_lex):
    """C4 0 <= S(t) < #units for every candidate; top weight exactly 1"""
    n = 0
    for topic in mini_topics:
        prd = retrieve_prd(mini_index, topic, DEFAULTS["pwnet"].D)
        units = len(detect_units(query_words(mini_index, topic), mini_lex))
        for c in pwnet_candidates(mini_index, topic, mini_lex, prd):
            assert 0.0 <= c.score < units
            n += 1
        q = pwnet_expand(mini_index, topic, mini_lex, prd=prd)
        assert max(q.expansion.values()) == 1.0
    passed(record, f"{n} candidates over {len(mini_topics)} topics")


def test_c05_scale_invariance(record, mini_index, mini_topics, mini_lex):
    """C5 PRD scores x7.3 leave P-WNET queries bit-identical"""
    for topic in mini_topics:
        prd = retrieve_prd(mini_index, topic, DEFAULTS["pwnet"].D)
        a = pwnet_expand(mini_index, topic, mini_lex, prd=prd)
        b = pwnet_expand(mini_index, topic, mini_lex, prd=prd.scaled(7.3))
        assert a.weights == b.weights
    passed(record, f"{len(mini_topics)} topics identical")


def _brute(ranking, relevant):
    flags = [d in relevant for d in ranking]
    ap = sum(sum(flags[: i + 1]) / (i + 1) for i, f in enumerate(flags) if f) / len(relevant)
    return ap, sum(flags[:10]) / 10.0, sum(flags)


def test_c06_metric_oracle(record):
    """C6 AP/P@10/rel_ret vs brute force on 100 instances; {0.1,0.4} aggregate"""
    rng = random.Random(6)
    worst = 0.0
    for _ in range(100):
        docs = [f"d{i}" for i in range(rng.randint(1, 50))]
        ranking = rng.sample(docs, rng.randint(0, len(docs)))
        relevant = set(rng.sample(docs, rng.randint(1, len(docs))))
        ap, p10, rr = _brute(ranking, relevant)
        worst = max(worst, abs(average_precision(ranking, relevant) - ap), abs(precision_at(ranking, relevant) - p10))
        assert relevant_retrieved(ranking, relevant) == rr
    assert worst <= 1e-9
    m, gm = aggregate([0.1, 0.4])
    assert abs(m - 0.25) <= 1e-9 and abs(gm - 0.2) <= 1e-9
    passed(record, f"max error {worst:.1e}; MAP={m:.4f} GM_MAP={gm:.4f}")


def test_c07_t_test(record):
    """C7 paired t-test {1,2,3} and a = b"""
    t, p = paired_t([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    assert abs(t - 3.4641) <= 1e-3 and abs(p - 0.0742) <= 5e-4
    assert abs(p - stats.ttest_rel([1, 2, 3], [0, 0, 0]).pvalue) <= 1e-8
    assert paired_t([0.2, 0.3], [0.2, 0.3]) == (0.0, 1.0)
    passed(record, f"t={t:.4f} p={p:.4f}")


def test_c08_ifb2(record, mini_index, mini_topics):
    """C8 IFB2 hand case and query-weight scaling"""
    w = float(ifb2_weight(1, 80.0, 1.0, 100, 10, 10, 80.0))
    assert abs(w - 1.7963) <= 1e-3
    for topic in mini_topics:
        terms = tuple((t, 1.0 + 0.37 * i) for i, t in enumerate(dict.fromkeys(query_terms(mini_index, topic))))
        for factor in (0.01, 3.0, 7.3, 1000.0):
            scaled = tuple((t, x * factor) for t, x in terms)
            a = search(mini_index, WeightedQuery(topic.id, terms), 1000)
            b = search(mini_index, WeightedQuery(topic.id, scaled), 1000)
            assert a.docnos == b.docnos
    passed(record, f"w={w:.5f}; rankings unchanged at 4 scale factors")


def test_c09_kldlca_contract(record, mini_index, mini_topics):
    """C9 KLDLCA selects from the KLD 2T pool with KLD weights"""
    cfg = DEFAULTS["kldlca"]
    for topic in mini_topics:
        prd = retrieve_prd(mini_index, topic, cfg.D)
        pool = select_top(kld_scores(mini_index, prd), 2 * cfg.T)
        q = kldlca_expand(mini_index, topic, prd=prd)
        assert set(q.expansion) <= set(pool)
        assert all(q.expansion[t] == pool[t] for t in q.expansion)

        def kld_order(index, qt, p, cands):
            return {t: pool[t] for t in cands}

        same = kldlca_expand(mini_index, topic, prd=prd, belief=kld_order)
        assert same.weights == kld_expand(mini_index, topic, cfg, prd=prd).weights
    passed(record, f"{len(mini_topics)} topics")


def test_c10_determinism_and_speed(record):
    """C10 1 vs 8 threads byte-identical; full pipeline < 60 s"""
    t0 = time.perf_counter()
    index = build_index(read_trec_docs(minicorpus_path("docs.trec.gz")))
    topics = read_topics(minicorpus_path("topics.txt"))
    qrels = read_qrels(minicorpus_path("qrels.txt"))
    lex = open_lexicon(str(minicorpus_path("glosses.tsv")))
    maps = {}
    for method in METHODS:
        one = write_run(run_topics(index, topics, method, lex, threads=1), method)
        run8 = run_topics(index, topics, method, lex, threads=8)
        assert write_run(run8, method) == one, method
        maps[method] = evaluate(run8, qrels).map
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    passed(record, f"{elapsed:.1f}s; " + " ".join(f"{m}={v:.3f}" for m, v in maps.items()))


def _env_paths():
    keys = ("QEXPAND_TREC_DOCS", "QEXPAND_TREC_TOPICS", "QEXPAND_TREC_QRELS", "QEXPAND_WORDNET")
    values = {k: os.environ.get(k) for k in keys}
    missing = [k for k, v in values.items() if not v]
    return values, missing


def test_c11_full_data(record):
    """C11 full-data harness: MAP(pwnet) > MAP(baseline)"""
    env, missing = _env_paths()
    if missing:
        record["status"] = "SKIP"
        record["detail"] = "set " + ", ".join(missing) + " to run on licensed TREC data"
        pytest.skip("full-data harness needs " + ", ".join(missing))
    base, pw = full_data_harness(env, int(os.environ.get("QEXPAND_WORKERS", "4")))
    assert pw.map > base.map
    passed(record, f"MAP {base.map:.4f} -> {pw.map:.4f}")


def full_data_harness(env, workers=1):
    """Baseline and P-WNET reports for user-supplied data; prints the comparison table."""
    docs = []
    for part in env["QEXPAND_TREC_DOCS"].split(os.pathsep):
        docs.extend(read_trec_docs(part))
    index = build_index(docs, workers=workers)
    topics = read_topics(env["QEXPAND_TREC_TOPICS"])
    qrels = read_qrels(env["QEXPAND_TREC_QRELS"])
    lex = open_lexicon(env["QEXPAND_WORDNET"])
    threads = os.cpu_count() or 1
    base_run = run_topics(index, topics, "baseline", lex, threads=threads)
    base = evaluate(base_run, qrels)
    pw = evaluate(run_topics(index, topics, "pwnet", lex, threads=threads), qrels, base_run)
    print()
    print(format_comparison(base, pw, "no-feedback", "P-WNET"))
    return base, pw


def test_harness_runs_on_minicorpus(capsys):
    env = {
        "QEXPAND_TREC_DOCS": str(minicorpus_path("docs.trec.gz")),
        "QEXPAND_TREC_TOPICS": str(minicorpus_path("topics.txt")),
        "QEXPAND_TREC_QRELS": str(minicorpus_path("qrels.txt")),
        "QEXPAND_WORDNET": str(minicorpus_path("glosses.tsv")),
    }
    base, pw = full_data_harness(env, workers=2)
    assert pw.map > base.map
    assert "P-WNET" in capsys.readouterr().out
