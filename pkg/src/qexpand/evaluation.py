"""TREC-style effectiveness measures and paired significance testing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .corpus import QrelSet, RunFile

log = logging.getLogger(__name__)

GM_FLOOR = 1e-5
IMPROVEMENT_THRESHOLD = 0.05


@dataclass(frozen=True)
class TopicResult:
    ap: float
    p10: float
    rel_ret: int
    num_rel: int


@dataclass
class Comparison:
    pct_improved: float
    t: float
    p: float

    @property
    def significant(self) -> bool:
        return self.p < 0.05 and self.t > 0


@dataclass
class EvalReport:
    per_topic: Dict[int, TopicResult]
    map: float
    gm_map: float
    p10: float
    rel_ret: int
    num_rel: int
    vs_baseline: Optional[Comparison] = None

    @property
    def aps(self) -> Dict[int, float]:
        return {t: r.ap for t, r in self.per_topic.items()}


def _docnos(ranking) -> list:
    return [e if isinstance(e, str) else e[0] for e in ranking]


def average_precision(ranking, relevant) -> float:
    """Mean over all relevant documents of the precision at their rank;
    relevant documents that are never retrieved contribute 0."""
    relevant = set(relevant)
    if not relevant:
        raise ValueError("average precision is undefined without relevant documents")
    hits = 0
    total = 0.0
    for rank, d in enumerate(_docnos(ranking), 1):
        if d in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def precision_at(ranking, relevant, k: int = 10) -> float:
    relevant = set(relevant)
    return sum(1 for d in _docnos(ranking)[:k] if d in relevant) / k


def relevant_retrieved(ranking, relevant) -> int:
    relevant = set(relevant)
    return sum(1 for d in _docnos(ranking) if d in relevant)


def relevant_docs(qrels: QrelSet, topic: int) -> set:
    return {d for d, g in qrels.get(topic, {}).items() if g > 0}


def mean_ap(aps: Sequence[float]) -> float:
    return sum(aps) / len(aps)


def geometric_map(aps: Sequence[float], floor: float = GM_FLOOR) -> float:
    return math.exp(sum(math.log(max(a, floor)) for a in aps) / len(aps))


def aggregate(aps: Sequence[float]) -> Tuple[float, float]:
    """(MAP, GM_MAP) of per-topic average precisions."""
    if not aps:
        raise ValueError("no scored topics")
    return mean_ap(aps), geometric_map(aps)


def evaluate(run: RunFile, qrels: QrelSet, baseline: Optional[RunFile] = None) -> EvalReport:
    """Score every qrels topic that has a relevant document.

    A topic missing from the run scores zero; topics without relevant
    documents are skipped with a warning.
    """
    per_topic: Dict[int, TopicResult] = {}
    for topic in sorted(qrels):
        rel = relevant_docs(qrels, topic)
        if not rel:
            log.warning("topic %d has no relevant documents; excluded", topic)
            continue
        ranking = run.get(topic, [])
        per_topic[topic] = TopicResult(
            average_precision(ranking, rel),
            precision_at(ranking, rel, 10),
            relevant_retrieved(ranking, rel),
            len(rel),
        )
    if not per_topic:
        raise ValueError("no topic with relevant documents to evaluate")
    values = list(per_topic.values())
    m, gm = aggregate([r.ap for r in values])
    report = EvalReport(
        per_topic,
        m,
        gm,
        sum(r.p10 for r in values) / len(values),
        sum(r.rel_ret for r in values),
        sum(r.num_rel for r in values),
    )
    if baseline is not None:
        base = evaluate(baseline, qrels)
        report.vs_baseline = compare_aps(base.aps, report.aps)
    return report


def _check_topics(a: Mapping[int, float], b: Mapping[int, float]) -> None:
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise ValueError(f"topic sets differ: only in first {only_a}, only in second {only_b}")


def pct_improved(baseline: Mapping[int, float], method: Mapping[int, float], threshold: float = IMPROVEMENT_THRESHOLD) -> float:
    """Percentage of topics where the method's AP beats the baseline's by more than ``threshold``."""
    _check_topics(baseline, method)
    wins = sum(1 for t in baseline if method[t] > baseline[t] * (1.0 + threshold))
    return 100.0 * wins / len(baseline)


# -- Student's t -----------------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = tiny if abs(d) < tiny else d
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    front = math.exp(lbeta + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_tailed_p(t: float, df: int) -> float:
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def paired_t(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """Two-tailed paired t-test on ``a - b``. Identical samples give ``(0, 1)``."""
    if len(a) != len(b):
        raise ValueError("paired samples differ in length")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    d = [x - y for x, y in zip(a, b)]
    mean = sum(d) / n
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / math.sqrt(var / n)
    return t, t_two_tailed_p(t, n - 1)


def compare_aps(baseline: Mapping[int, float], method: Mapping[int, float]) -> Comparison:
    _check_topics(baseline, method)
    topics = sorted(baseline)
    if len(topics) < 2:
        t, p = 0.0, 1.0
    else:
        t, p = paired_t([method[q] for q in topics], [baseline[q] for q in topics])
    return Comparison(pct_improved(baseline, method), t, p)


# -- reporting --------------------------------------------------------------------


def _delta(value: float, base: float) -> str:
    if base == 0:
        return "(   n/a)"
    return f"({100.0 * (value - base) / base:+6.1f})"


def format_report(report: EvalReport, name: str = "run") -> str:
    mark = "B" if report.vs_baseline is not None and report.vs_baseline.significant else ""
    lines = [
        f"{'Measure':<16}{name:>14}",
        f"{'MAP':<16}{report.map:>13.4f}{mark:1}",
        f"{'GM_MAP':<16}{report.gm_map:>14.4f}",
        f"{'P@10':<16}{report.p10:>14.4f}",
        f"{'#rel_ret':<16}{report.rel_ret:>14d}",
    ]
    if report.vs_baseline is not None:
        c = report.vs_baseline
        lines.append(f"{'> baseline on':<16}{c.pct_improved:>13.1f}%")
        lines.append(f"{'t / p':<16}{c.t:>8.3f} {c.p:.4f}")
    lines.append(f"{'topics':<16}{len(report.per_topic):>14d}")
    return "\n".join(lines) + "\n"


def format_comparison(a: EvalReport, b: EvalReport, name_a: str = "A", name_b: str = "B") -> str:
    """Side-by-side table; deltas of B relative to A in percent."""
    cmp = compare_aps(a.aps, b.aps)
    sig = "*" if cmp.p < 0.05 else ""
    rows = [
        ("MAP", a.map, b.map, ".4f"),
        ("GM_MAP", a.gm_map, b.gm_map, ".4f"),
        ("P@10", a.p10, b.p10, ".4f"),
        ("#rel_ret", a.rel_ret, b.rel_ret, "d"),
    ]
    lines = [f"{'Measure':<12}{name_a:>12}{name_b:>12}  delta%"]
    for label, va, vb, fmt in rows:
        extra = sig if label == "MAP" else ""
        lines.append(f"{label:<12}{format(va, fmt):>12}{format(vb, fmt) + extra:>12}  {_delta(vb, va)}")
    lines.append(f"{'> base on':<12}{'':>12}{cmp.pct_improved:>11.1f}%")
    lines.append(f"{'paired t':<12}{cmp.t:>12.4f}{'p=' + format(cmp.p, '.4f'):>12}")
    return "\n".join(lines) + "\n"
