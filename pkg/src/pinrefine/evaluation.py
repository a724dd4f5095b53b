"""Evaluation of rankings against the essential-protein gold standard.

Covers top-k hit counts, cumulative (jackknife-style) hit curves, the six
confusion-matrix metrics at a cutoff, and the precision-recall curve with
its area computed by the average-precision step rule (order-only, no
interpolation).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .centrality import Ranking

logger = logging.getLogger(__name__)

DEFAULT_TOPK = (100, 200, 300, 400, 500, 600)


@dataclass(frozen=True)
class ConfusionMetrics:
    tp: int
    fp: int
    tn: int
    fn: int
    sn: float
    sp: float
    ppv: float
    npv: float
    fm: float
    acc: float
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class EvalReport:
    method: str
    topk_counts: dict[int, int]
    jackknife: tuple[int, ...]
    metrics: ConfusionMetrics
    prauc: float
    p: int
    gold_missing: int


def _gold_in_universe(r: Ranking, gold: set[str] | frozenset[str]) -> set[str]:
    universe = {pid for pid, _ in r.entries}
    return universe & set(gold)


def topk_counts(r: Ranking, gold: set[str] | frozenset[str], ks: list[int] | tuple[int, ...]) -> dict[int, int]:
    """Number of gold proteins among the top k, for each requested k."""
    n = len(r)
    hits = _cumulative_hits(r, gold)
    counts = {}
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"cutoff {k} outside valid range 1..{n}")
        counts[k] = hits[k - 1]
    return counts


def _cumulative_hits(r: Ranking, gold) -> list[int]:
    gold = set(gold)
    hits = []
    running = 0
    for pid, _ in r.entries:
        if pid in gold:
            running += 1
        hits.append(running)
    return hits


def jackknife_curve(r: Ranking, gold: set[str] | frozenset[str], p: int | None = None) -> tuple[int, ...]:
    """Cumulative gold hits among the top i proteins, for i = 1..p.

    Defaults p to the number of gold proteins present in the ranking.
    """
    if p is None:
        p = len(_gold_in_universe(r, gold))
    if p > len(r):
        raise ValueError(f"curve length {p} exceeds ranking size {len(r)}")
    return tuple(_cumulative_hits(r, gold)[:p])


def classification_metrics(r: Ranking, gold: set[str] | frozenset[str], k: int) -> ConfusionMetrics:
    """Treat the top k as predicted essential and score the split six ways."""
    n = len(r)
    if not 0 <= k <= n:
        raise ValueError(f"cutoff {k} outside valid range 0..{n}")
    present = _gold_in_universe(r, gold)
    p = len(present)
    tp = sum(1 for pid in r.top(k) if pid in present)
    fp = k - tp
    fn = p - tp
    tn = n - k - fn

    degenerate: list[str] = []

    def ratio(name: str, num: int, den: int) -> float:
        if den == 0:
            degenerate.append(name)
            return 0.0
        return num / den

    sn = ratio("sn", tp, tp + fn)
    sp = ratio("sp", tn, fp + tn)
    ppv = ratio("ppv", tp, tp + fp)
    npv = ratio("npv", tn, tn + fn)
    if sn + ppv > 0:
        fm = 2.0 * sn * ppv / (sn + ppv)
    else:
        degenerate.append("fm")
        fm = 0.0
    acc = ratio("acc", tp + tn, n)
    if degenerate:
        logger.warning("metrics at cutoff %d: %s defined as 0 (zero denominator)", k, ",".join(degenerate))
    return ConfusionMetrics(tp, fp, tn, fn, sn, sp, ppv, npv, fm, acc, tuple(degenerate))


def pr_curve_and_auc(
    r: Ranking, gold: set[str] | frozenset[str]
) -> tuple[tuple[tuple[float, float], ...], float]:
    """Precision-recall points at every cutoff plus the step-rule area.

    The area equals average precision: sum over cutoffs of
    (recall step) * precision, which depends only on the ranking order.
    """
    present = _gold_in_universe(r, gold)
    p = len(present)
    if p == 0:
        raise ValueError("recall is undefined: no gold protein appears in the ranking")
    points = []
    auc = 0.0
    prev_recall = 0.0
    hits = 0
    for k, (pid, _) in enumerate(r.entries, start=1):
        if pid in present:
            hits += 1
        recall = hits / p
        precision = hits / k
        auc += (recall - prev_recall) * precision
        prev_recall = recall
        points.append((recall, precision))
    return tuple(points), auc


def make_report(
    r: Ranking,
    gold: set[str] | frozenset[str],
    ks: tuple[int, ...] = DEFAULT_TOPK,
) -> EvalReport:
    """Full evaluation of one ranking: counts, curve, and cutoff-P metrics.

    Requested k values beyond the ranking size are dropped with a warning;
    the confusion metrics use cutoff k = P (gold proteins in the universe).
    """
    usable = tuple(k for k in ks if k <= len(r))
    if len(usable) < len(ks):
        dropped = [k for k in ks if k > len(r)]
        logger.warning("dropping top-k cutoffs beyond ranking size %d: %s", len(r), dropped)
    p = len(_gold_in_universe(r, gold))
    _, prauc = pr_curve_and_auc(r, gold)
    return EvalReport(
        method=r.method,
        topk_counts=topk_counts(r, gold, usable) if usable else {},
        jackknife=jackknife_curve(r, gold, p),
        metrics=classification_metrics(r, gold, p),
        prauc=prauc,
        p=p,
        gold_missing=len(set(gold)) - p,
    )
