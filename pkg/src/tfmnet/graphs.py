"""A small undirected simple graph with deterministic node order."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Iterator


class Graph:
    """Adjacency graph. No self-loops, no parallel edges, no weights.

    Both node and neighbour iteration follow insertion order (adjacency is
    stored in dicts, never sets), so float accumulations downstream hit the
    same summation order in every process regardless of hash randomisation.
    """

    def __init__(self, nodes: Iterable[Hashable] = (), edges: Iterable[tuple] = ()):
        self._adj: dict[Hashable, dict[Hashable, None]] = {}
        for n in nodes:
            self.add_node(n)
        for u, v in edges:
            self.add_edge(u, v)

    def add_node(self, n: Hashable) -> None:
        if n not in self._adj:
            self._adj[n] = {}

    def add_edge(self, u: Hashable, v: Hashable) -> None:
        if u == v:
            raise ValueError(f"self-loop rejected: {u!r}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u][v] = None
        self._adj[v][u] = None

    def has_edge(self, u: Hashable, v: Hashable) -> bool:
        return u in self._adj and v in self._adj[u]

    def nodes(self) -> list:
        return list(self._adj)

    def edges(self) -> list[tuple]:
        seen = set()
        out = []
        for u in self._adj:
            for v in self._adj[u]:
                if (v, u) not in seen:
                    seen.add((u, v))
                    out.append((u, v))
        return out

    def neighbors(self, n: Hashable):
        """Live keys view over ``n``'s neighbours, in insertion order.

        Supports the usual set algebra (``&``, ``-``) against real sets.
        """
        return self._adj[n].keys()

    def degree(self, n: Hashable) -> int:
        return len(self._adj[n])

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def __contains__(self, n: Hashable) -> bool:
        return n in self._adj

    def __iter__(self) -> Iterator:
        return iter(self._adj)

    def subgraph(self, keep: Iterable[Hashable]) -> "Graph":
        keep_set = set(keep)
        g = Graph()
        for n in self._adj:
            if n in keep_set:
                g.add_node(n)
        for n in g.nodes():
            for m in self._adj[n]:
                if m in keep_set and not g.has_edge(n, m):
                    g.add_edge(n, m)
        return g

    def bfs_distances(self, source: Hashable) -> dict[Hashable, int]:
        dist = {source: 0}
        q = deque([source])
        while q:
            u = q.popleft()
            for v in self._adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        return dist

    def connected_components(self) -> list[list]:
        """Components as node lists, each in insertion order, largest first
        (ties by first node's insertion position)."""
        order = {n: i for i, n in enumerate(self._adj)}
        seen: set = set()
        comps: list[list] = []
        for n in self._adj:
            if n in seen:
                continue
            comp = sorted(self.bfs_distances(n), key=order.__getitem__)
            seen.update(comp)
            comps.append(comp)
        comps.sort(key=lambda c: (-len(c), order[c[0]]))
        return comps

    def relabel(self, mapping: dict) -> "Graph":
        g = Graph()
        for n in self._adj:
            g.add_node(mapping[n])
        for u, v in self.edges():
            g.add_edge(mapping[u], mapping[v])
        return g
