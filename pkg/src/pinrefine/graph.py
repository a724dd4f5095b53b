"""Immutable undirected simple graph with component analysis and topology stats."""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .ingest import EdgeList


class Graph:
    """Undirected simple graph over protein ids with dense integer indexing.

    Node index order is the sorted order of the ids, neighbor lists are
    sorted index tuples, and the structure is never mutated after
    construction, so every derived computation is deterministic.
    """

    def __init__(self, ids: tuple[str, ...], adj: tuple[tuple[int, ...], ...], m: int):
        self.ids = ids
        self.index = {pid: i for i, pid in enumerate(ids)}
        self.adj = adj
        self.m = m

    @property
    def n(self) -> int:
        return len(self.ids)

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adj[i]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.adj[i]
        k = bisect_left(row, j)
        return k < len(row) and row[k] == j

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as an index pair (i, j) with i < j."""
        for i, row in enumerate(self.adj):
            for j in row:
                if j > i:
                    yield i, j

    def edge_id_pairs(self) -> Iterator[tuple[str, str]]:
        for i, j in self.edges():
            yield self.ids[i], self.ids[j]

    def to_edge_list(self) -> EdgeList:
        return EdgeList(tuple(sorted(self.edge_id_pairs())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.ids == other.ids and self.adj == other.adj

    def __hash__(self):  # adjacency tuples are hashable but equality is enough
        return hash((self.ids, self.m))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GraphStats:
    edge_count: int
    avg_degree: float
    avg_clustering: float
    density: float


def build_graph(edges: EdgeList, universe: Iterable[str] | None = None) -> Graph:
    """Build a Graph from a normalized EdgeList plus optional isolated nodes."""
    nodes = edges.node_set()
    if universe is not None:
        nodes.update(universe)
    ids = tuple(sorted(nodes))
    index = {pid: i for i, pid in enumerate(ids)}
    adj_lists: list[list[int]] = [[] for _ in ids]
    for a, b in edges:
        i, j = index[a], index[b]
        adj_lists[i].append(j)
        adj_lists[j].append(i)
    adj = tuple(tuple(sorted(row)) for row in adj_lists)
    return Graph(ids, adj, len(edges))


def connected_components(g: Graph) -> list[set[str]]:
    """Disjoint node-id sets covering V, ordered by (size desc, smallest id asc)."""
    seen = [False] * g.n
    components: list[tuple[int, int, set[str]]] = []  # (-size, min_index, members)
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        members = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    members.add(v)
                    queue.append(v)
        # start is the smallest index in the component because scan order is ascending
        components.append((-len(members), start, {g.ids[i] for i in members}))
    components.sort(key=lambda item: (item[0], item[1]))
    return [members for _, _, members in components]


def maximal_component_edges(g: Graph) -> EdgeList:
    """Edges whose both endpoints lie in the largest connected component."""
    if g.n == 0:
        raise ValueError("empty graph has no maximal component")
    component = connected_components(g)[0]
    keep = {g.index[pid] for pid in component}
    pairs = [(g.ids[i], g.ids[j]) for i, j in g.edges() if i in keep and j in keep]
    return EdgeList(tuple(sorted(pairs)))


def count_common_neighbors(row_u: tuple[int, ...], row_v: tuple[int, ...]) -> int:
    """Size of the intersection of two sorted neighbor tuples."""
    i = j = count = 0
    nu, nv = len(row_u), len(row_v)
    while i < nu and j < nv:
        a, b = row_u[i], row_v[j]
        if a == b:
            count += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return count


def local_clustering(g: Graph, i: int) -> float:
    """Local clustering coefficient; nodes of degree < 2 score 0."""
    deg = g.degree(i)
    if deg < 2:
        return 0.0
    row = g.adj[i]
    # each edge between neighbors is seen from both endpoints
    links = sum(count_common_neighbors(row, g.adj[j]) for j in row) // 2
    return 2.0 * links / (deg * (deg - 1))


def graph_stats(g: Graph) -> GraphStats:
    """Edge count, average degree, average clustering coefficient, density."""
    n = g.n
    if n == 0:
        return GraphStats(0, 0.0, 0.0, 0.0)
    avg_degree = 2.0 * g.m / n
    density = 2.0 * g.m / (n * (n - 1)) if n >= 2 else 0.0
    avg_clustering = sum(local_clustering(g, i) for i in range(n)) / n
    return GraphStats(g.m, avg_degree, avg_clustering, density)
