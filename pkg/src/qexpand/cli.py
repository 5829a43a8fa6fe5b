"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import __version__
from .corpus import read_qrels, read_run, read_topics, read_trec_docs, RunEntry, write_run
from .evaluation import evaluate, format_comparison, format_report
from .expand import METHODS, expand, format_expanded
from .experiment import ConfigError, ExperimentConfig, minicorpus_config, open_lexicon, run_experiment
from .index import build_index, load
from .retrieval import search
from .textproc import AnalyzerConfig

log = logging.getLogger("qexpand")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
# ParseError, IndexFormatError, LexiconParseError and ConfigError are all ValueErrors
DATA_ERRORS = (ValueError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value experiment file; flags override it")
    p.add_argument("--index")
    p.add_argument("--topics")
    p.add_argument("--qrels")
    p.add_argument("--wordnet", help="WordNet dict/ directory or lemma<TAB>gloss file")
    p.add_argument("--wordnet-format", choices=("auto", "dir", "tsv"))
    p.add_argument("--method", help=f"one of {', '.join(METHODS)}")
    p.add_argument("--k", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--rel-mode", choices=("dice", "jaccard"))
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key, e.g. pwnet.T=40 (repeatable)")


def _config_from(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if getattr(args, "config", None) else ExperimentConfig()
    for flag, key in (("index", "index"), ("topics", "topics"), ("qrels", "qrels"), ("wordnet", "wordnet"),
                      ("wordnet_format", "wordnet_format"), ("method", "method"), ("rel_mode", "rel_mode")):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, key, value)
    for flag in ("k", "threads"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, flag, value)
    try:
        for item in args.set:
            key, eq, value = item.partition("=")
            if not eq:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            cfg.set(key, value)
        cfg.validate()
    except ConfigError as e:
        raise UsageError(str(e)) from None
    return cfg


def _require(cfg: ExperimentConfig, *names: str) -> None:
    missing = [n for n in names if not getattr(cfg, n)]
    if missing:
        raise UsageError("missing required setting(s): " + ", ".join("--" + n for n in missing))


def _write(path: Optional[str], data: bytes) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def cmd_index(args) -> int:
    analyzer = AnalyzerConfig.from_file(args.stopwords, not args.no_stem) if args.stopwords \
        else AnalyzerConfig(stemming=not args.no_stem)
    docs = []
    for path in args.corpus:
        docs.extend(read_trec_docs(path))
    t0 = time.perf_counter()
    index = build_index(docs, analyzer, workers=args.workers)
    index.save(args.out)
    log.info("indexed %d documents, %d terms in %.1fs", index.N, index.vocabulary_size, time.perf_counter() - t0)
    return EXIT_OK


def cmd_search(args) -> int:
    index = load(args.index)
    run = {}
    for topic in read_topics(args.topics):
        q = expand("baseline", index, topic)
        ranking = search(index, q.to_query(), args.k)
        run[topic.id] = [RunEntry(d, i, s) for i, (d, s) in enumerate(ranking, 1)]
    _write(args.out, write_run(run, args.tag))
    return EXIT_OK


def cmd_expand(args) -> int:
    cfg = _config_from(args)
    _require(cfg, "index", "topics")
    index = load(cfg.index)
    lex = open_lexicon(cfg.wordnet, cfg.wordnet_format) if cfg.wordnet else None
    if cfg.method in ("pwnet", "fnpw", "klwnet") and lex is None:
        raise UsageError(f"method {cfg.method} needs --wordnet")
    configs = cfg.expansion_configs()
    queries = [expand(cfg.method, index, t, lex, configs) for t in read_topics(cfg.topics)]
    _write(args.out, format_expanded(queries).encode("utf-8"))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config_from(args)
    _require(cfg, "index", "topics")
    if cfg.method in ("pwnet", "fnpw", "klwnet") and not cfg.wordnet:
        raise UsageError(f"method {cfg.method} needs --wordnet")
    run, report = run_experiment(cfg)
    _write(args.out, write_run(run, cfg.tag or cfg.method))
    if report is not None:
        if args.baseline_run:
            report = evaluate(run, read_qrels(cfg.qrels), read_run(args.baseline_run))
        sys.stderr.write(format_report(report, cfg.method)) if args.out in (None, "-") \
            else sys.stdout.write(format_report(report, cfg.method))
    return EXIT_OK


def cmd_eval(args) -> int:
    qrels = read_qrels(args.qrels)
    baseline = read_run(args.baseline_run) if args.baseline_run else None
    report = evaluate(read_run(args.run), qrels, baseline)
    sys.stdout.write(format_report(report, Path(args.run).name))
    return EXIT_OK


def cmd_compare(args) -> int:
    qrels = read_qrels(args.qrels)
    a = evaluate(read_run(args.run_a), qrels)
    b = evaluate(read_run(args.run_b), qrels)
    sys.stdout.write(format_comparison(a, b, Path(args.run_a).name, Path(args.run_b).name))
    return EXIT_OK


def cmd_config(args) -> int:
    sys.stdout.write(_config_from(args).to_text())
    return EXIT_OK


def cmd_demo(args) -> int:
    """Index the bundled mini-corpus and report every method against the baseline."""
    cfg = minicorpus_config(threads=args.threads)
    index = build_index(read_trec_docs(cfg.corpus[0]))
    lex = open_lexicon(cfg.wordnet)
    qrels = read_qrels(cfg.qrels)
    base_run, _ = run_experiment(minicorpus_config(method="baseline"), index, lex)
    print(f"{'method':<10}{'MAP':>8}{'GM_MAP':>8}{'P@10':>8}{'rel_ret':>9}{'>base%':>8}{'p':>9}")
    for method in METHODS:
        cfg.method = method
        run, _ = run_experiment(cfg, index, lex)
        r = evaluate(run, qrels, base_run)
        c = r.vs_baseline
        print(f"{method:<10}{r.map:>8.4f}{r.gm_map:>8.4f}{r.p10:>8.3f}{r.rel_ret:>9d}{c.pct_improved:>8.1f}{c.p:>9.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qexpand", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="build an index file from TREC document files")
    p.add_argument("--corpus", nargs="+", required=True, help="TREC files or directories (gzip ok)")
    p.add_argument("--out", required=True)
    p.add_argument("--stopwords", help="stopword file replacing the bundled list")
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run unexpanded title queries")
    p.add_argument("--index", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--out", default="-")
    p.add_argument("--tag", default="baseline")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("expand", help="write expanded queries as topic<TAB>term<TAB>weight")
    _add_run_options(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("run", help="expand, search and evaluate one method")
    _add_run_options(p)
    p.add_argument("--out", default="-")
    p.add_argument("--baseline-run", help="run file to test against")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="evaluate a run file")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--baseline-run")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="side-by-side metrics of two runs")
    p.add_argument("--run-a", required=True)
    p.add_argument("--run-b", required=True)
    p.add_argument("--qrels", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("config", help="print the effective configuration")
    _add_run_options(p)
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("demo", help="all methods on the bundled mini-corpus")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"qexpand: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as e:
        print(f"qexpand: {e}", file=sys.stderr)
        return EXIT_DATA
    except (AssertionError, ArithmeticError) as e:
        print(f"qexpand: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
