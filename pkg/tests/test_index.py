import re
import struct
from collections import Counter, defaultdict

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from nltk.stem.porter import PorterStemmer

from qexpand.corpus import Document
from qexpand.index import FORMAT_VERSION, IndexBuildError, IndexFormatError, build_index, load
from qexpand.textproc import default_stopwords

_porter = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def count_oracle(docs):
    """Independent word counter: per-doc term counts."""
    sw = default_stopwords()
    per_doc = []
    for d in docs:
        words = [w for w in re.findall(r"[a-z0-9]+", d.text.lower()) if not (w.isdigit() and len(w) > 12)]
        per_doc.append(Counter(_porter.stem(w) for w in words if w not in sw))
    return per_doc


def accessors(index):
    return (
        index.N,
        index.total_tokens,
        list(index.docnos),
        index.doc_lengths.tolist(),
        list(index.terms),
        index.dfs.tolist(),
        index.cfs.tolist(),
        [index.postings(t) for t in index.terms],
        dict(index.stem_surface),
    )


class TestBuild:
    def test_tiny(self):
        idx = build_index([Document("d1", "alpha"), Document("d2", "beta"), Document("d3", "alpha")])
        assert idx.N == 3
        assert idx.df("alpha") == 2 and idx.cf("alpha") == 2

    def test_empty(self):
        idx = build_index([])
        assert idx.N == 0 and idx.vocabulary_size == 0 and idx.total_tokens == 0

    def test_duplicate_docno(self):
        with pytest.raises(IndexBuildError, match="d1"):
            build_index([Document("d1", "x"), Document("d1", "y")])

    def test_postings(self):
        idx = build_index([Document("a", "zebra"), Document("b", "zebra zebra zebra okapi")])
        assert idx.postings("zebra") == [("a", 1), ("b", 3)]
        assert idx.postings("okapi") == [("b", 1)]
        assert idx.postings("unseen") == []

    def test_stem_surface_most_frequent(self):
        idx = build_index([Document("a", "running runs running"), Document("b", "run")])
        # "running" -> "run", "runs" -> "run", "run" -> "run"
        assert idx.stem_surface["run"] == "running"

    def test_minicorpus_matches_counter(self, mini_docs, mini_index):
        per_doc = count_oracle(mini_docs)
        assert mini_index.N == len(mini_docs) == 500
        assert mini_index.doc_lengths.tolist() == [sum(c.values()) for c in per_doc]
        df, cf = Counter(), Counter()
        for c in per_doc:
            df.update(c.keys())
            cf.update(c)
        assert sorted(mini_index.terms) == sorted(df)
        for t in df:
            assert mini_index.df(t) == df[t], t
            assert mini_index.cf(t) == cf[t], t
        # grep-style spot checks of postings
        for t in ("lyme", "polygami", "oil"):
            expect = [(d.docno, c[t]) for d, c in zip(mini_docs, per_doc) if c[t]]
            assert mini_index.postings(t) == expect

    def test_invariants(self, mini_index):
        assert np.all(mini_index.dfs >= 1)
        assert np.all(mini_index.dfs <= mini_index.N)
        assert np.all(mini_index.dfs <= mini_index.cfs)
        assert int(mini_index.cfs.sum()) == mini_index.total_tokens == int(mini_index.doc_lengths.sum())
        assert mini_index.avg_doc_length == mini_index.total_tokens / mini_index.N
        for tid in range(0, mini_index.vocabulary_size, 37):
            docs, _ = mini_index.posting_arrays(tid)
            assert np.all(np.diff(docs) > 0)

    def test_parallel_equals_serial(self, mini_docs, mini_index):
        par = build_index(mini_docs, workers=4, chunk_size=60)
        assert accessors(par) == accessors(mini_index)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.lists(st.sampled_from(["ant", "bee", "cat", "dogs", "dog", "eel", "the"]), max_size=8), max_size=12),
           st.integers(1, 5))
    def test_partition_merge_property(self, texts, chunk):
        docs = [Document(f"d{i}", " ".join(ws)) for i, ws in enumerate(texts)]
        serial = build_index(docs)
        merged = build_index(docs, workers=1, chunk_size=chunk)
        assert accessors(serial) == accessors(merged)


class TestPersistence:
    def test_round_trip(self, tmp_path, mini_index):
        path = tmp_path / "mini.idx"
        mini_index.save(path)
        loaded = load(path)
        assert accessors(loaded) == accessors(mini_index)
        assert loaded.analyzer == mini_index.analyzer

    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "e.idx"
        build_index([]).save(path)
        assert load(path).N == 0

    def test_truncated(self, tmp_path, mini_index):
        path = tmp_path / "t.idx"
        mini_index.save(path)
        data = path.read_bytes()
        for cut in (4, 40, len(data) // 2, len(data) - 3):
            path.write_bytes(data[:cut])
            with pytest.raises(IndexFormatError):
                load(path)

    def test_corrupted_payload(self, tmp_path, mini_index):
        path = tmp_path / "c.idx"
        mini_index.save(path)
        data = bytearray(path.read_bytes())
        data[len(data) // 2] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(IndexFormatError):
            load(path)

    def test_version_mismatch_names_expected(self, tmp_path, mini_index):
        path = tmp_path / "v.idx"
        mini_index.save(path)
        data = bytearray(path.read_bytes())
        struct.pack_into("<I", data, 8, FORMAT_VERSION + 1)
        path.write_bytes(bytes(data))
        with pytest.raises(IndexFormatError, match=f"expected version {FORMAT_VERSION}"):
            load(path)

    def test_not_an_index(self, tmp_path):
        path = tmp_path / "x.idx"
        path.write_bytes(b"hello world, this is not an index at all" * 3)
        with pytest.raises(IndexFormatError):
            load(path)

    def test_forward_index_consistent(self, mini_index):
        rebuilt = defaultdict(dict)
        for tid, t in enumerate(mini_index.terms):
            docs, tfs = mini_index.posting_arrays(tid)
            for d, f in zip(docs.tolist(), tfs.tolist()):
                rebuilt[d][tid] = f
        for ordinal in (0, 17, 250, 499):
            tids, tfs = mini_index.doc_terms(ordinal)
            assert dict(zip(tids.tolist(), tfs.tolist())) == rebuilt[ordinal]
