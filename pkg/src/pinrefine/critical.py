"""Module criticality scoring and construction of the module-filtered tier.

Each module of the clustered graph is scored three ways: Pearson correlation
of its membership indicator with the protein homology scores, the fraction
of its proteins annotated to the nucleus, and its internal-minus-boundary
edge balance per node. Threshold tests on those scores pick the critical
modules, and only edges between critical-module proteins survive into the
final tier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .community import Partition
from .graph import Graph, build_graph
from .ingest import NUCLEUS, EdgeList


@dataclass(frozen=True)
class ModuleScore:
    module: int
    corr: float
    nsl: float
    tf: float
    n_nodes: int
    internal_edges: int
    boundary_edges: int
    essential_count: int = 0  # diagnostic only, never used for selection


@dataclass(frozen=True)
class CriticalSelection:
    th1: float
    th2: float
    th3: float
    conservatism: frozenset[int]
    subcellular: frozenset[int]
    topology: frozenset[int]
    critical: frozenset[int]


def _pearson(x: list[float], y: list[float]) -> float:
    """Pearson correlation; 0 by convention when either vector is constant."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


def module_indicator_corr(p: Partition, module: int, homology: dict[str, float]) -> float:
    """Correlation between the module's 0/1 indicator and the homology scores.

    Both vectors span every clustered node; proteins missing from the
    homology map score 0.
    """
    p.check_module(module)
    x = [1.0 if c == module else 0.0 for c in p.membership]
    y = [homology.get(pid, 0.0) for pid in p.ids]
    return _pearson(x, y)


def module_nsl(
    p: Partition,
    module: int,
    localization: dict[str, frozenset[str]],
    compartment: str = NUCLEUS,
) -> float:
    """Fraction of the module's proteins annotated to ``compartment``.

    Each protein counts 0 or 1, so the score lies in [0, 1].
    """
    members = p.members(module)
    if not members:
        raise ValueError(f"module {module} is empty")
    hits = sum(1 for pid in members if compartment in localization.get(pid, frozenset()))
    return hits / len(members)


def module_tf(g: Graph, p: Partition, module: int) -> float:
    """(internal edges - boundary edges) / module size; may be negative."""
    if p.ids != g.ids:
        raise ValueError("partition does not cover this graph's node set")
    p.check_module(module)
    size = 0
    internal_twice = 0
    boundary = 0
    for i, c in enumerate(p.membership):
        if c != module:
            continue
        size += 1
        for j in g.adj[i]:
            if p.membership[j] == module:
                internal_twice += 1
            else:
                boundary += 1
    if size == 0:
        raise ValueError(f"module {module} is empty")
    return (internal_twice // 2 - boundary) / size


def score_modules(
    g: Graph,
    p: Partition,
    homology: dict[str, float],
    localization: dict[str, frozenset[str]],
    essential: set[str] | frozenset[str] = frozenset(),
    compartment: str = NUCLEUS,
) -> list[ModuleScore]:
    """Score every module of the clustered graph in one pass over the edges."""
    if p.ids != g.ids:
        raise ValueError("partition does not cover this graph's node set")
    k = p.n_modules
    internal = [0] * k
    boundary = [0] * k
    for i, j in g.edges():
        ci, cj = p.membership[i], p.membership[j]
        if ci == cj:
            internal[ci] += 1
        else:
            boundary[ci] += 1
            boundary[cj] += 1
    sizes = p.sizes()
    scores = []
    for c in range(k):
        members = p.members(c)
        nucleus_hits = sum(1 for pid in members if compartment in localization.get(pid, frozenset()))
        scores.append(
            ModuleScore(
                module=c,
                corr=module_indicator_corr(p, c, homology),
                nsl=nucleus_hits / sizes[c],
                tf=(internal[c] - boundary[c]) / sizes[c],
                n_nodes=sizes[c],
                internal_edges=internal[c],
                boundary_edges=boundary[c],
                essential_count=sum(1 for pid in members if pid in essential),
            )
        )
    return scores


def select_critical(
    scores: list[ModuleScore], th1: float, th2: float, th3: float
) -> CriticalSelection:
    """Pick critical modules: high-correlation ones, plus high-nucleus ones
    not already flagged as topologically weak (tf <= th3)."""
    conservatism = frozenset(s.module for s in scores if s.corr >= th1)
    subcellular = frozenset(s.module for s in scores if s.nsl >= th2)
    topology = frozenset(s.module for s in scores if s.tf <= th3)
    critical = conservatism | (subcellular - topology)
    return CriticalSelection(th1, th2, th3, conservatism, subcellular, topology, critical)


def build_cmpin(rd: Graph, p: Partition, sel: CriticalSelection) -> Graph:
    """Keep only edges whose both endpoints belong to critical modules.

    Nodes outside the clustered subgraph belong to no module and always
    fail; the node set is preserved.
    """
    module_of = {pid: c for pid, c in zip(p.ids, p.membership)}
    critical = sel.critical
    pairs = []
    for a, b in rd.edge_id_pairs():
        ca = module_of.get(a)
        cb = module_of.get(b)
        if ca in critical and cb in critical:
            pairs.append((a, b))
    return build_graph(EdgeList(tuple(sorted(pairs))), universe=rd.ids)
