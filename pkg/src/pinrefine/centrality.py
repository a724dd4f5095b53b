"""The ten node-centrality measures and their deterministic rankings.

Neighborhood measures (DC, LAC, NC, DMNC, LID) read at most the 2-hop ball
around each node; path measures (CC, BC, TP) run per-source BFS, exact
shortest-path counting for BC; walk measures (PR, LR) are power iterations.
Rankings sort by descending score with ties broken by ascending protein id,
so equal inputs always produce byte-identical output.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from multiprocessing import get_context

import numpy as np

from .graph import Graph, count_common_neighbors

LOCAL_METHODS = ("DC", "LAC", "NC", "DMNC", "LID")
PATH_METHODS = ("CC", "BC", "TP")
WALK_METHODS = ("PR", "LR")
ALL_METHODS = ("DC", "LAC", "NC", "DMNC", "TP", "LID", "CC", "BC", "PR", "LR")

# sources per work unit; fixed so results do not depend on the worker count
_CHUNK = 512


class ConvergenceError(RuntimeError):
    """A power iteration failed to converge within its iteration cap."""

    def __init__(self, method: str, iterations: int):
        super().__init__(f"{method} did not converge within {iterations} iterations")
        self.method = method


@dataclass(frozen=True)
class CentralityParams:
    dmnc_exponent: float = 1.7
    tp_sigma: float = 1.0
    damping: float = 0.85
    tolerance: float = 1e-10
    max_iter: int = 1000


DEFAULT_PARAMS = CentralityParams()


@dataclass(frozen=True)
class Ranking:
    """Nodes ordered by descending score, ties broken by ascending id."""

    method: str
    entries: tuple[tuple[str, float], ...]

    def ids(self) -> list[str]:
        return [pid for pid, _ in self.entries]

    def top(self, k: int) -> list[str]:
        return [pid for pid, _ in self.entries[:k]]

    def __len__(self) -> int:
        return len(self.entries)

    def to_tsv(self) -> str:
        return "".join(
            f"{rank}\t{pid}\t{score:.6g}\n"
            for rank, (pid, score) in enumerate(self.entries, start=1)
        )


def rank_from_scores(g: Graph, method: str, scores: list[float] | np.ndarray) -> Ranking:
    if len(scores) != g.n:
        raise ValueError("score vector length does not match node count")
    if not all(math.isfinite(float(s)) for s in scores):
        raise ValueError(f"{method} produced a non-finite score")
    order = sorted(range(g.n), key=lambda i: (-scores[i], g.ids[i]))
    return Ranking(method, tuple((g.ids[i], float(scores[i])) for i in order))


# -- neighborhood measures ---------------------------------------------------

def _degree_scores(g: Graph) -> list[float]:
    return [float(g.degree(i)) for i in range(g.n)]


def _lac_scores(g: Graph) -> list[float]:
    scores = []
    for i in range(g.n):
        row = g.adj[i]
        if not row:
            scores.append(0.0)
            continue
        induced = sum(count_common_neighbors(row, g.adj[j]) for j in row)
        scores.append(induced / len(row))
    return scores


def _nc_scores(g: Graph) -> list[float]:
    scores = []
    for i in range(g.n):
        row = g.adj[i]
        total = 0.0
        for j in row:
            low = min(len(row), g.degree(j)) - 1
            if low > 0:
                total += count_common_neighbors(row, g.adj[j]) / low
        scores.append(total)
    return scores


def _lid_scores(g: Graph) -> list[float]:
    scores = []
    for i in range(g.n):
        row = g.adj[i]
        if not row:
            scores.append(0.0)
            continue
        among = sum(count_common_neighbors(row, g.adj[j]) for j in row) // 2
        scores.append((among + len(row)) / len(row))
    return scores


def _dmnc_scores(g: Graph, exponent: float) -> list[float]:
    scores = []
    for i in range(g.n):
        row = g.adj[i]
        if not row:
            scores.append(0.0)
            continue
        local = {j: idx for idx, j in enumerate(row)}
        nbr_adj: list[list[int]] = [[] for _ in row]
        for idx, j in enumerate(row):
            for u in g.adj[j]:
                pos = local.get(u)
                if pos is not None and pos > idx:
                    nbr_adj[idx].append(pos)
                    nbr_adj[pos].append(idx)
        # components of the induced neighborhood, largest first; row order is
        # ascending node index so the scan tie-breaks on smallest member
        seen = [False] * len(row)
        best_size = 0
        best_edges = 0
        for start in range(len(row)):
            if seen[start]:
                continue
            seen[start] = True
            comp = [start]
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for v in nbr_adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        comp.append(v)
                        queue.append(v)
            edges = sum(len(nbr_adj[u]) for u in comp) // 2
            if len(comp) > best_size:
                best_size = len(comp)
                best_edges = edges
        scores.append(best_edges / best_size ** exponent)
    return scores


# -- path measures -----------------------------------------------------------

def _bfs_distances(g: Graph, source: int, limit: int | None = None) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if limit is not None and du >= limit:
            continue
        for v in g.adj[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def _cc_chunk(g: Graph, sources: list[int]) -> list[tuple[int, float]]:
    n = g.n
    out = []
    for s in sources:
        dist = _bfs_distances(g, s)
        reach = len(dist)
        if reach < 2 or n < 2:
            out.append((s, 0.0))
            continue
        total = sum(dist.values())
        frac = (reach - 1) / (n - 1)
        out.append((s, (reach - 1) / total * frac))
    return out


def _tp_chunk(g: Graph, sigma: float, limit: int, sources: list[int]) -> list[tuple[int, float]]:
    kernel = [0.0] + [math.exp(-((d / sigma) ** 2)) for d in range(1, limit + 1)]
    out = []
    for s in sources:
        dist = _bfs_distances(g, s, limit=limit)
        out.append((s, sum(kernel[d] for v, d in dist.items() if v != s)))
    return out


def _bc_chunk(g: Graph, sources: list[int]) -> list[float]:
    """Shortest-path dependency accumulation over a block of sources."""
    n = g.n
    totals = [0.0] * n
    for s in sources:
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            stack.append(u)
            for v in g.adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for u in preds[w]:
                delta[u] += sigma[u] * coeff
            if w != s:
                totals[w] += delta[w]
    return totals


def _chunked(n: int) -> list[list[int]]:
    return [list(range(start, min(start + _CHUNK, n))) for start in range(0, n, _CHUNK)]


def _map_chunks(fn, chunks: list[list[int]], workers: int) -> list:
    if workers <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork")) as pool:
        return list(pool.map(fn, chunks))


def _bc_scores(g: Graph, workers: int) -> list[float]:
    chunks = _chunked(g.n)
    partials = _map_chunks(partial(_bc_chunk, g), chunks, workers)
    totals = [0.0] * g.n
    for part in partials:  # fixed chunk order keeps float sums reproducible
        for i, value in enumerate(part):
            totals[i] += value
    return [t / 2.0 for t in totals]  # each unordered pair was counted twice


def _cc_scores(g: Graph, workers: int) -> list[float]:
    scores = [0.0] * g.n
    for part in _map_chunks(partial(_cc_chunk, g), _chunked(g.n), workers):
        for i, value in part:
            scores[i] = value
    return scores


def _tp_scores(g: Graph, sigma: float, workers: int) -> list[float]:
    if sigma <= 0:
        raise ValueError(f"TP kernel width must be positive, got {sigma}")
    limit = math.ceil(3.0 * sigma / math.sqrt(2.0))
    scores = [0.0] * g.n
    fn = partial(_tp_chunk, g, sigma, limit)
    for part in _map_chunks(fn, _chunked(g.n), workers):
        for i, value in part:
            scores[i] = value
    return scores


# -- walk measures -----------------------------------------------------------

def _arc_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    src = np.empty(2 * g.m, dtype=np.int64)
    dst = np.empty(2 * g.m, dtype=np.int64)
    pos = 0
    for i, j in g.edges():
        src[pos], dst[pos] = i, j
        src[pos + 1], dst[pos + 1] = j, i
        pos += 2
    return src, dst


def _pr_scores(g: Graph, params: CentralityParams) -> np.ndarray:
    n = g.n
    if n == 0:
        return np.zeros(0)
    src, dst = _arc_arrays(g)
    deg = np.array([g.degree(i) for i in range(n)], dtype=np.float64)
    dangling = deg == 0
    safe_deg = np.where(dangling, 1.0, deg)
    d = params.damping
    x = np.full(n, 1.0 / n)
    for _ in range(params.max_iter):
        share = x / safe_deg
        spread = np.bincount(dst, weights=share[src], minlength=n)
        x_new = d * (spread + x[dangling].sum() / n) + (1.0 - d) / n
        if np.abs(x_new - x).sum() < params.tolerance:
            return x_new
        x = x_new
    raise ConvergenceError("PR", params.max_iter)


def _lr_scores(g: Graph, params: CentralityParams) -> np.ndarray:
    n = g.n
    if n == 0:
        return np.zeros(0)
    ground = n
    src, dst = _arc_arrays(g)
    ground_arcs_src = np.concatenate([np.arange(n), np.full(n, ground)])
    ground_arcs_dst = np.concatenate([np.full(n, ground), np.arange(n)])
    src = np.concatenate([src, ground_arcs_src])
    dst = np.concatenate([dst, ground_arcs_dst])
    deg = np.array([g.degree(i) + 1 for i in range(n)] + [n], dtype=np.float64)
    s = np.ones(n + 1)
    s[ground] = 0.0
    for _ in range(params.max_iter):
        share = s / deg
        s_new = np.bincount(dst, weights=share[src], minlength=n + 1)
        if np.abs(s_new - s).sum() < params.tolerance:
            return s_new[:n] + s_new[ground] / n
        s = s_new
    raise ConvergenceError("LR", params.max_iter)


# -- public surface ----------------------------------------------------------

def compute_local(g: Graph, method: str, params: CentralityParams = DEFAULT_PARAMS) -> Ranking:
    if method == "DC":
        return rank_from_scores(g, method, _degree_scores(g))
    if method == "LAC":
        return rank_from_scores(g, method, _lac_scores(g))
    if method == "NC":
        return rank_from_scores(g, method, _nc_scores(g))
    if method == "DMNC":
        return rank_from_scores(g, method, _dmnc_scores(g, params.dmnc_exponent))
    if method == "LID":
        return rank_from_scores(g, method, _lid_scores(g))
    raise ValueError(f"unknown neighborhood method {method!r}")


def compute_path(
    g: Graph, method: str, params: CentralityParams = DEFAULT_PARAMS, workers: int = 1
) -> Ranking:
    if method == "CC":
        return rank_from_scores(g, method, _cc_scores(g, workers))
    if method == "BC":
        return rank_from_scores(g, method, _bc_scores(g, workers))
    if method == "TP":
        return rank_from_scores(g, method, _tp_scores(g, params.tp_sigma, workers))
    raise ValueError(f"unknown path method {method!r}")


def compute_walk(g: Graph, method: str, params: CentralityParams = DEFAULT_PARAMS) -> Ranking:
    if method == "PR":
        return rank_from_scores(g, method, _pr_scores(g, params))
    if method == "LR":
        return rank_from_scores(g, method, _lr_scores(g, params))
    raise ValueError(f"unknown walk method {method!r}")


def compute(
    g: Graph, method: str, params: CentralityParams = DEFAULT_PARAMS, workers: int = 1
) -> Ranking:
    """Compute any of the ten methods by name."""
    if method in LOCAL_METHODS:
        return compute_local(g, method, params)
    if method in PATH_METHODS:
        return compute_path(g, method, params, workers)
    if method in WALK_METHODS:
        return compute_walk(g, method, params)
    raise ValueError(f"unknown centrality method {method!r}; expected one of {ALL_METHODS}")
