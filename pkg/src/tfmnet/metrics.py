"""Graph-theoretic features of an undirected simple graph.

All definitions are the unweighted ones: local clustering with degree<2
nodes contributing 0, shortest-path statistics restricted to the largest
component, reachable-normalized closeness, raw pair-sum betweenness,
partition modularity, global/local efficiency, k-core degeneracy, exact
maximum clique, and degree assortativity over edge endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Hashable, Iterable

from .errors import DegenerateGraph, EmptyGraph, InvalidPartition
from .graphs import Graph

import numpy as np


@dataclass
class MetricVector:
    """The per-network feature row, in export column order."""

    n_nodes: int
    n_edges: int
    n_components: int
    largest_component_size: int
    largest_component_ratio: float
    max_degree: int
    mean_degree: float
    density: float
    mean_clustering: float
    mean_shortest_path: float
    diameter: int
    mean_closeness: float
    max_closeness: float
    mean_betweenness: float
    max_betweenness: float
    degree_assortativity: float
    modularity: float
    global_efficiency: float
    local_efficiency: float
    core_number: int
    core_size: int
    max_clique_size: int
    degree_assortativity_defined: bool = True

    @classmethod
    def feature_keys(cls) -> list[str]:
        """The 22 metric column keys (diagnostic flags excluded)."""
        return [f.name for f in fields(cls) if f.name != "degree_assortativity_defined"]

    def as_dict(self) -> dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _require_nonempty(g: Graph) -> None:
    if g.n_nodes == 0:
        raise EmptyGraph("metric requested on an empty graph")


def mean_clustering(g: Graph) -> float:
    """Average local clustering coefficient over all nodes."""
    _require_nonempty(g)
    total = 0.0
    for n in g:
        nbrs = list(g.neighbors(n))
        k = len(nbrs)
        if k < 2:
            continue
        links = 0
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                if g.has_edge(nbrs[a], nbrs[b]):
                    links += 1
        total += 2.0 * links / (k * (k - 1))
    return total / g.n_nodes


def shortest_path_stats(g: Graph) -> tuple[float, int]:
    """(mean shortest path, diameter) over the largest connected component."""
    _require_nonempty(g)
    comp = g.connected_components()[0]
    if len(comp) < 2:
        raise DegenerateGraph("largest component has fewer than 2 nodes")
    comp_set = set(comp)
    total = 0
    count = 0
    diameter = 0
    for i, n in enumerate(comp):
        dist = g.bfs_distances(n)
        for m, d in dist.items():
            if m in comp_set and m != n:
                total += d
                count += 1
                if d > diameter:
                    diameter = d
    # every unordered pair was seen twice
    return total / count, diameter


def closeness_centrality(g: Graph, reachable_normalized: bool = True) -> dict[Hashable, float]:
    """Closeness per node: reachable count over distance sum.

    With reachable_normalized (the default), values are scaled by
    M/(n-1) so disconnected graphs stay comparable; isolated nodes get 0.
    """
    _require_nonempty(g)
    n = g.n_nodes
    out: dict[Hashable, float] = {}
    for node in g:
        dist = g.bfs_distances(node)
        m = len(dist) - 1
        if m == 0:
            out[node] = 0.0
            continue
        sigma = sum(dist.values())
        c = m / sigma
        if reachable_normalized and n > 1:
            c *= m / (n - 1)
        out[node] = c
    return out


def closeness_stats(g: Graph) -> tuple[float, float]:
    c = closeness_centrality(g)
    values = list(c.values())
    return sum(values) / len(values), max(values)


def betweenness_centrality(g: Graph, normalized: bool = False) -> dict[Hashable, float]:
    """Raw pair-sum betweenness via Brandes accumulation.

    For each node i, the sum over unordered pairs {j, k} (both distinct
    from i) of the fraction of j-k shortest paths through i. Pass
    normalized=True to divide by (n-1)(n-2)/2.
    """
    _require_nonempty(g)
    bc = {v: 0.0 for v in g}
    for s in g:
        stack: list = []
        pred: dict[Hashable, list] = {v: [] for v in g}
        sigma = {v: 0.0 for v in g}
        dist = {v: -1 for v in g}
        sigma[s] = 1.0
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    pred[w].append(v)
        delta = {v: 0.0 for v in g}
        while stack:
            w = stack.pop()
            for v in pred[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    for v in bc:
        bc[v] /= 2.0  # each unordered pair was counted from both endpoints
    if normalized:
        n = g.n_nodes
        scale = (n - 1) * (n - 2) / 2.0
        if scale > 0:
            for v in bc:
                bc[v] /= scale
    return bc


def betweenness_stats(g: Graph) -> tuple[float, float]:
    b = betweenness_centrality(g)
    values = list(b.values())
    return sum(values) / len(values), max(values)


def modularity(g: Graph, partition: Iterable[Iterable[Hashable]]) -> float:
    """Newman modularity Q of a disjoint full-cover partition."""
    _require_nonempty(g)
    m = g.n_edges
    if m < 1:
        raise DegenerateGraph("modularity needs at least one edge")
    comms = [set(c) for c in partition]
    seen: set = set()
    for c in comms:
        if c & seen:
            raise InvalidPartition("communities overlap")
        seen |= c
    if seen != set(g.nodes()):
        raise InvalidPartition("partition does not cover the node set")
    q = 0.0
    two_m = 2.0 * m
    for c in comms:
        internal = 0
        degree_sum = 0
        for u in c:
            degree_sum += g.degree(u)
            for v in g.neighbors(u):
                if v in c:
                    internal += 1
        # internal counted each inside edge twice
        q += internal / two_m - (degree_sum / two_m) ** 2
    return q


def detect_communities(g: Graph, seed: int = 0, method: str = "greedy") -> list[set]:
    """Seeded modularity-maximizing partition.

    "greedy" runs agglomerative merging over the full dendrogram and
    returns the best partition seen (the single-community state is on the
    path, so the result never scores below 0). "louvain" runs local moving
    with aggregation, falling back to one community if it scores below 0.
    """
    _require_nonempty(g)
    if g.n_edges == 0:
        return [set(g.nodes())]
    if method == "greedy":
        return _greedy_partition(g, seed)
    if method == "louvain":
        part = _louvain_partition(g, seed)
        if modularity(g, part) < 0.0:
            return [set(g.nodes())]
        return part
    raise ValueError(f"unknown community method {method!r}")


def _greedy_partition(g: Graph, seed: int) -> list[set]:
    nodes = list(g.nodes())
    rng = np.random.default_rng(seed)
    order = list(rng.permutation(len(nodes)))
    comm_of = {nodes[idx]: ci for ci, idx in enumerate(order)}
    members: dict[int, set] = {ci: {nodes[idx]} for ci, idx in enumerate(order)}
    m = g.n_edges
    degsum = {ci: sum(g.degree(n) for n in members[ci]) for ci in members}
    between: dict[int, dict[int, int]] = {ci: {} for ci in members}
    for u, v in g.edges():
        cu, cv = comm_of[u], comm_of[v]
        between[cu][cv] = between[cu].get(cv, 0) + 1
        between[cv][cu] = between[cv].get(cu, 0) + 1

    def snapshot_q() -> float:
        q = 0.0
        for ci, mem in members.items():
            internal = sum(
                1 for u in mem for v in g.neighbors(u) if comm_of[v] == ci
            )
            q += internal / (2.0 * m) - (degsum[ci] / (2.0 * m)) ** 2
        return q

    best_q = snapshot_q()
    best = [set(c) for c in members.values()]
    while len(members) > 1:
        best_gain = None
        best_pair = None
        for ci in sorted(members):
            for cj in sorted(between[ci]):
                if cj <= ci:
                    continue
                gain = between[ci][cj] / m - 2.0 * (degsum[ci] / (2.0 * m)) * (degsum[cj] / (2.0 * m))
                if best_gain is None or gain > best_gain + 1e-15:
                    best_gain = gain
                    best_pair = (ci, cj)
        if best_pair is None:
            # only disconnected communities remain; merge the two smallest ids
            ids = sorted(members)
            best_pair = (ids[0], ids[1])
            best_gain = -2.0 * (degsum[ids[0]] / (2.0 * m)) * (degsum[ids[1]] / (2.0 * m))
        ci, cj = best_pair
        members[ci] |= members.pop(cj)
        for node in members[ci]:
            comm_of[node] = ci
        degsum[ci] += degsum.pop(cj)
        links_j = between.pop(cj)
        between[ci].pop(cj, None)
        for ck, cnt in links_j.items():
            if ck == ci:
                continue
            between[ck].pop(cj, None)
            between[ci][ck] = between[ci].get(ck, 0) + cnt
            between[ck][ci] = between[ck].get(ci, 0) + cnt
        q_now = snapshot_q()
        if q_now > best_q + 1e-15:
            best_q = q_now
            best = [set(c) for c in members.values()]
    return best


def _louvain_partition(g: Graph, seed: int) -> list[set]:
    rng = np.random.default_rng(seed)
    # work on an integer multigraph that aggregates as communities collapse
    nodes = list(g.nodes())
    index = {n: i for i, n in enumerate(nodes)}
    adj: dict[int, dict[int, float]] = {i: {} for i in range(len(nodes))}
    for u, v in g.edges():
        iu, iv = index[u], index[v]
        adj[iu][iv] = adj[iu].get(iv, 0.0) + 1.0
        adj[iv][iu] = adj[iv].get(iu, 0.0) + 1.0
    self_loops = {i: 0.0 for i in adj}
    groups: dict[int, set] = {i: {nodes[i]} for i in adj}
    m = g.n_edges

    while True:
        comm = {i: i for i in adj}
        strength = {i: sum(adj[i].values()) + 2.0 * self_loops[i] for i in adj}
        comm_strength = dict(strength)
        moved_any = False
        improved = True
        while improved:
            improved = False
            order = [int(i) for i in rng.permutation(sorted(adj))]
            for i in order:
                ci = comm[i]
                comm_strength[ci] -= strength[i]
                links: dict[int, float] = {}
                for j, w in adj[i].items():
                    links[comm[j]] = links.get(comm[j], 0.0) + w
                best_c, best_gain = ci, 0.0
                for c in sorted(links):
                    gain = links.get(c, 0.0) / m - comm_strength[c] * strength[i] / (2.0 * m * m)
                    base = links.get(ci, 0.0) / m - comm_strength[ci] * strength[i] / (2.0 * m * m)
                    if gain - base > best_gain + 1e-12:
                        best_gain = gain - base
                        best_c = c
                comm[i] = best_c
                comm_strength[best_c] += strength[i]
                if best_c != ci:
                    improved = True
                    moved_any = True
        if not moved_any:
            return sorted((set(s) for s in groups.values()), key=lambda s: sorted(map(str, s)))
        # aggregate communities into super-nodes
        relabel: dict[int, int] = {}
        for i in sorted(adj):
            relabel.setdefault(comm[i], len(relabel))
        new_adj: dict[int, dict[int, float]] = {c: {} for c in range(len(relabel))}
        new_loops = {c: 0.0 for c in range(len(relabel))}
        new_groups: dict[int, set] = {c: set() for c in range(len(relabel))}
        for i in adj:
            ci = relabel[comm[i]]
            new_groups[ci] |= groups[i]
            new_loops[ci] += self_loops[i]
            for j, w in adj[i].items():
                cj = relabel[comm[j]]
                if ci == cj:
                    new_loops[ci] += w / 2.0
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        if len(new_adj) == len(adj):
            return sorted((set(s) for s in groups.values()), key=lambda s: sorted(map(str, s)))
        adj, self_loops, groups = new_adj, new_loops, new_groups


def efficiencies(g: Graph) -> tuple[float, float]:
    """(global efficiency, mean local efficiency)."""
    _require_nonempty(g)
    e_glob = _global_efficiency(g)
    total_local = 0.0
    for n in g:
        nbrs = list(g.neighbors(n))
        if len(nbrs) < 2:
            continue
        total_local += _global_efficiency(g.subgraph(nbrs))
    return e_glob, total_local / g.n_nodes


def _global_efficiency(g: Graph) -> float:
    n = g.n_nodes
    if n < 2:
        return 0.0
    inv_sum = 0.0
    for node in g:
        for other, d in g.bfs_distances(node).items():
            if other != node:
                inv_sum += 1.0 / d
    return inv_sum / (n * (n - 1))


def core_decomposition(g: Graph) -> tuple[int, int]:
    """(degeneracy, size of the maximum k-core) by iterative min-degree peeling."""
    _require_nonempty(g)
    degrees = {n: g.degree(n) for n in g}
    order = {n: i for i, n in enumerate(g)}
    remaining = set(g.nodes())
    core: dict[Hashable, int] = {}
    k = 0
    while remaining:
        node = min(remaining, key=lambda n: (degrees[n], order[n]))
        k = max(k, degrees[node])
        core[node] = k
        remaining.remove(node)
        for nb in g.neighbors(node):
            if nb in remaining:
                degrees[nb] -= 1
    core_number = max(core.values())
    core_size = sum(1 for v in core.values() if v == core_number)
    return core_number, core_size


def max_clique_size(g: Graph) -> int:
    """Exact maximum clique via Bron-Kerbosch with pivoting."""
    _require_nonempty(g)
    best = 1
    adj = {n: g.neighbors(n) for n in g}

    def expand(r_size: int, p: set, x: set) -> None:
        nonlocal best
        if not p and not x:
            best = max(best, r_size)
            return
        if r_size + len(p) <= best:
            return
        pivot = max(p | x, key=lambda n: len(adj[n] & p))
        for v in list(p - adj[pivot]):
            expand(r_size + 1, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(0, set(g.nodes()), set())
    return best


def degree_assortativity(g: Graph) -> tuple[float, bool]:
    """Pearson correlation of endpoint degrees over edges.

    Returns (0.0, False) when the endpoint degree variance is zero
    (regular graphs and stars of one edge).
    """
    _require_nonempty(g)
    edges = g.edges()
    if not edges:
        raise DegenerateGraph("assortativity needs at least one edge")
    xs = []
    ys = []
    for u, v in edges:
        du, dv = g.degree(u), g.degree(v)
        xs.extend((du, dv))
        ys.extend((dv, du))
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    sx = x.std()
    sy = y.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0, False
    r = float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))
    return r, True


def compute_metrics(g: Graph, seed: int = 0, community_method: str = "greedy") -> MetricVector:
    """Evaluate the full metric vector for one network."""
    _require_nonempty(g)
    comps = g.connected_components()
    n = g.n_nodes
    m = g.n_edges
    degrees = [g.degree(v) for v in g]
    density = 2.0 * m / (n * (n - 1)) if n > 1 else 0.0
    mean_path, diameter = shortest_path_stats(g)
    mean_close, max_close = closeness_stats(g)
    mean_btw, max_btw = betweenness_stats(g)
    assort, assort_defined = degree_assortativity(g)
    partition = detect_communities(g, seed=seed, method=community_method)
    q = modularity(g, partition)
    e_glob, e_loc = efficiencies(g)
    core_k, core_n = core_decomposition(g)
    return MetricVector(
        n_nodes=n,
        n_edges=m,
        n_components=len(comps),
        largest_component_size=len(comps[0]),
        largest_component_ratio=len(comps[0]) / n,
        max_degree=max(degrees),
        mean_degree=sum(degrees) / n,
        density=density,
        mean_clustering=mean_clustering(g),
        mean_shortest_path=mean_path,
        diameter=diameter,
        mean_closeness=mean_close,
        max_closeness=max_close,
        mean_betweenness=mean_btw,
        max_betweenness=max_btw,
        degree_assortativity=assort,
        modularity=q,
        global_efficiency=e_glob,
        local_efficiency=e_loc,
        core_number=core_k,
        core_size=core_n,
        max_clique_size=max_clique_size(g),
        degree_assortativity_defined=assort_defined,
    )
