import pytest

from qexpand.corpus import read_qrels, read_topics, read_trec_docs
from qexpand.experiment import minicorpus_path
from qexpand.index import build_index
from qexpand.wordnet import load_tsv_lexicon


@pytest.fixture(scope="session")
def mini_docs():
    return read_trec_docs(minicorpus_path("docs.trec.gz"))


@pytest.fixture(scope="session")
def mini_index(mini_docs):
    return build_index(mini_docs)


@pytest.fixture(scope="session")
def mini_topics():
    return read_topics(minicorpus_path("topics.txt"))


@pytest.fixture(scope="session")
def mini_qrels():
    return read_qrels(minicorpus_path("qrels.txt"))


@pytest.fixture(scope="session")
def mini_lex():
    return load_tsv_lexicon(minicorpus_path("glosses.tsv"))


def write_wordnet(directory, synsets, pos_of=None):
    """Write a WordNet-format database.

    ``synsets`` maps an id to (lemmas, gloss); ``pos_of`` maps an id to a
    part of speech (default noun). Offsets are real byte positions.
    """
    pos_of = pos_of or {}
    header = "  1 This is a test database, not the real thing.\n  2 \n"
    for pos in ("noun", "verb", "adj", "adv"):
        ids = [i for i in synsets if pos_of.get(i, "noun") == pos]
        data = header.encode()
        offsets = {}
        for sid in ids:
            lemmas, gloss = synsets[sid]
            off = len(data)
            offsets[sid] = off
            words = " ".join(f"{lm} 0" for lm in lemmas)
            line = f"{off:08d} 03 {pos[0]} {len(lemmas):02x} {words} 000 | {gloss}  \n"
            data += line.encode()
        (directory / f"data.{pos}").write_bytes(data)
        by_lemma = {}
        for sid in ids:
            for lm in synsets[sid][0]:
                by_lemma.setdefault(lm.lower(), []).append(offsets[sid])
        lines = [header]
        for lm in sorted(by_lemma):
            offs = by_lemma[lm]
            lines.append(f"{lm} {pos[0]} {len(offs)} 1 @ {len(offs)} 0 " + " ".join(f"{o:08d}" for o in offs) + "  \n")
        (directory / f"index.{pos}").write_text("".join(lines))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(RESULTS, key=lambda r: int(r[0].split()[0][1:])):
        terminalreporter.write_line(f"{status:<4}  {label}" + (f"  [{detail}]" if detail else ""))
