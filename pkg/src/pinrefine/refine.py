"""Construction of the expression-filtered and localization-filtered network tiers.

The static tier is the parsed interaction graph as-is. The second tier keeps
an edge only when both endpoints are active at a shared time point, and the
third keeps an edge only when both endpoints share a subcellular compartment.
Both filters preserve the node set, so the tiers differ only in their edges.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

from .graph import Graph, build_graph
from .ingest import EdgeList, ExpressionTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActivityProfile:
    """Activity threshold and per-time-point activity flags for one protein."""

    threshold: float
    active: tuple[bool, ...]

    def any_active(self) -> bool:
        return any(self.active)


def activity_threshold(values: tuple[float, ...] | list[float]) -> tuple[float, tuple[bool, ...]]:
    """Threshold (mean + population standard deviation) and activity flags.

    A time point is active only when its value strictly exceeds the
    threshold, so a constant vector is never active.
    """
    t = len(values)
    if t < 1:
        raise ValueError("activity threshold requires at least one value")
    mean = sum(values) / t
    variance = sum((v - mean) ** 2 for v in values) / t
    tau = mean + math.sqrt(variance)
    return tau, tuple(v > tau for v in values)


def activity_profiles(expr: ExpressionTable) -> dict[str, ActivityProfile]:
    profiles = {}
    for pid, vector in expr.values.items():
        tau, active = activity_threshold(vector)
        profiles[pid] = ActivityProfile(tau, active)
    return profiles


def _filtered(g: Graph, keep: Callable[[int, int], bool]) -> Graph:
    pairs = [(g.ids[i], g.ids[j]) for i, j in g.edges() if keep(i, j)]
    return build_graph(EdgeList(tuple(pairs)), universe=g.ids)


def build_dpin(s: Graph, expr: ExpressionTable, t: int | None = None) -> Graph:
    """Filter the static tier down to edges with co-active endpoints.

    An edge survives only if some time point activates both endpoints.
    Edges with an endpoint missing from the expression table are removed:
    the filter demands positive evidence of co-activity.
    """
    if t is not None and expr.t != t:
        raise ValueError(f"expression table has {expr.t} time points, expected {t}")
    masks: dict[int, int] = {}
    for pid, vector in expr.values.items():
        i = s.index.get(pid)
        if i is None:
            continue
        tau, active = activity_threshold(vector)
        mask = 0
        for k, flag in enumerate(active):
            if flag:
                mask |= 1 << k
        masks[i] = mask

    removed_missing = 0
    removed_inactive = 0

    def keep(i: int, j: int) -> bool:
        nonlocal removed_missing, removed_inactive
        mi = masks.get(i)
        mj = masks.get(j)
        if mi is None or mj is None:
            removed_missing += 1
            return False
        if mi & mj:
            return True
        removed_inactive += 1
        return False

    d = _filtered(s, keep)
    logger.info(
        "co-activity filter: kept %d of %d edges (%d missing expression, %d never co-active)",
        d.m, s.m, removed_missing, removed_inactive,
    )
    return d


def build_rdpin(d: Graph, localization: dict[str, frozenset[str]]) -> Graph:
    """Filter the co-activity tier down to edges with co-located endpoints.

    An edge survives only if the endpoints' compartment sets intersect;
    endpoints absent from the localization map fail the test.
    """
    compartments = {d.index[pid]: s for pid, s in localization.items() if pid in d.index}

    removed_missing = 0
    removed_disjoint = 0

    def keep(i: int, j: int) -> bool:
        nonlocal removed_missing, removed_disjoint
        ci = compartments.get(i)
        cj = compartments.get(j)
        if ci is None or cj is None:
            removed_missing += 1
            return False
        if ci & cj:
            return True
        removed_disjoint += 1
        return False

    rd = _filtered(d, keep)
    logger.info(
        "co-localization filter: kept %d of %d edges (%d missing annotation, %d disjoint compartments)",
        rd.m, d.m, removed_missing, removed_disjoint,
    )
    return rd
