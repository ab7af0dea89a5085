"""Exact minimum-weight perfect matching on small weighted graphs.

The solver reduces minimum-weight perfect matching to maximum-weight
maximum-cardinality matching (replace each weight ``w`` by
``1 + max_weight - w``) and runs the integer blossom kernel from
:mod:`kagomez4._blossom`.  A brute-force oracle over all ``(n-1)!!``
perfect matchings is provided for cross-checking on tiny graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._blossom import solve_max_weight_matching


@dataclass
class WeightedGraph:
    """Undirected graph with non-negative integer edge weights.

    Nodes are ``0 .. n_nodes - 1``; edges are stored per unordered pair.
    """

    n_nodes: int
    weights: dict = field(default_factory=dict)

    def add_edge(self, u: int, v: int, weight: int) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
            raise ValueError("node id out of range")
        w = int(weight)
        if w < 0:
            raise ValueError("weights must be non-negative")
        self.weights[(min(u, v), max(u, v))] = w

    def weight(self, u: int, v: int) -> int:
        return self.weights[(min(u, v), max(u, v))]

    @classmethod
    def complete(cls, matrix) -> "WeightedGraph":
        """Build a complete graph from a symmetric weight matrix."""
        mat = np.asarray(matrix)
        n = mat.shape[0]
        g = cls(n)
        for u in range(n):
            for v in range(u + 1, n):
                g.add_edge(u, v, int(mat[u, v]))
        return g


def mwpm(g: WeightedGraph) -> set:
    """Exact minimum-weight perfect matching as a set of ``(u, v)`` pairs.

    Raises ``ValueError`` for an odd node count or when no perfect
    matching exists on the given edge set.
    """
    n = g.n_nodes
    if n % 2 != 0:
        raise ValueError("perfect matching requires an even node count")
    if n == 0:
        return set()

    items = sorted(g.weights.items())
    m = len(items)
    e_u = np.empty(m, dtype=np.int64)
    e_v = np.empty(m, dtype=np.int64)
    e_w = np.empty(m, dtype=np.int64)
    maxw = 0
    for k, ((u, v), w) in enumerate(items):
        e_u[k] = u
        e_v[k] = v
        if w > maxw:
            maxw = w
    # Min-weight -> max-weight reduction; the +1 offset makes every edge
    # strictly profitable so maximum weight implies maximum cardinality.
    for k, ((u, v), w) in enumerate(items):
        e_w[k] = 1 + maxw - w

    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        deg[e_u[k] + 1] += 1
        deg[e_v[k] + 1] += 1
    adj_start = np.cumsum(deg)
    adj_other = np.empty(2 * m, dtype=np.int64)
    adj_eid = np.empty(2 * m, dtype=np.int64)
    fill = adj_start[:-1].copy()
    eid = np.full((n, n), -1, dtype=np.int64)
    for k in range(m):
        u, v = e_u[k], e_v[k]
        adj_other[fill[u]] = v
        adj_eid[fill[u]] = k
        fill[u] += 1
        adj_other[fill[v]] = u
        adj_eid[fill[v]] = k
        fill[v] += 1
        eid[u, v] = k
        eid[v, u] = k

    mate = solve_max_weight_matching(
        n, e_u, e_v, e_w, adj_start, adj_other, adj_eid, eid, True
    )
    pairs = set()
    for v in range(n):
        if mate[v] == -1:
            raise ValueError("graph admits no perfect matching")
        if v < mate[v]:
            pairs.add((v, int(mate[v])))
    return pairs


def mwpm_complete(matrix) -> list:
    """Fast-path matching on a complete graph given as a weight matrix.

    Equivalent to ``mwpm(WeightedGraph.complete(matrix))`` but skips the
    per-edge dict; returns the pair list sorted by first node.
    """
    mat = np.ascontiguousarray(matrix, dtype=np.int64)
    n = mat.shape[0]
    if n % 2 != 0:
        raise ValueError("perfect matching requires an even node count")
    if n == 0:
        return []
    if np.any(mat < 0):
        raise ValueError("weights must be non-negative")
    m = n * (n - 1) // 2
    iu, iv = np.triu_indices(n, k=1)
    e_u = iu.astype(np.int64)
    e_v = iv.astype(np.int64)
    w = mat[iu, iv]
    e_w = 1 + int(w.max(initial=0)) - w
    # CSR over the complete graph: each vertex has degree n-1.
    adj_start = np.arange(0, n * n, n - 1, dtype=np.int64)[: n + 1]
    eid = np.full((n, n), -1, dtype=np.int64)
    eid[iu, iv] = np.arange(m)
    eid[iv, iu] = eid[iu, iv]
    others = np.arange(n, dtype=np.int64)
    adj_other = np.empty(n * (n - 1), dtype=np.int64)
    adj_eid = np.empty(n * (n - 1), dtype=np.int64)
    for u in range(n):
        row = np.concatenate((others[:u], others[u + 1 :]))
        adj_other[adj_start[u] : adj_start[u + 1]] = row
        adj_eid[adj_start[u] : adj_start[u + 1]] = eid[u, row]
    mate = solve_max_weight_matching(
        n, e_u, e_v, e_w, adj_start, adj_other, adj_eid, eid, True
    )
    return [(v, int(mate[v])) for v in range(n) if v < mate[v]]


def brute_force_mwpm(g: WeightedGraph) -> set:
    """Exhaustive minimum-weight perfect matching for up to 12 nodes.

    Ties are broken by lexicographic order of the sorted pair list.
    """
    n = g.n_nodes
    if n > 12:
        raise ValueError("brute-force oracle is limited to 12 nodes")
    if n % 2 != 0:
        raise ValueError("perfect matching requires an even node count")

    best_cost = None
    best_pairs = None
    pairs: list = []

    def recurse(free: list, cost: int) -> None:
        nonlocal best_cost, best_pairs
        if not free:
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_pairs = list(pairs)
            return
        u = free[0]
        for idx in range(1, len(free)):
            v = free[idx]
            key = (u, v)
            if key not in g.weights:
                continue
            pairs.append(key)
            recurse(free[1:idx] + free[idx + 1 :], cost + g.weights[key])
            pairs.pop()

    recurse(list(range(n)), 0)
    if best_pairs is None:
        raise ValueError("graph admits no perfect matching")
    return set(best_pairs)


def all_perfect_matchings(n: int):
    """Yield every perfect matching of the complete graph on ``n`` nodes."""
    if n % 2 != 0:
        raise ValueError("perfect matching requires an even node count")

    def recurse(free: tuple):
        if not free:
            yield ()
            return
        u = free[0]
        for idx in range(1, len(free)):
            v = free[idx]
            rest = free[1:idx] + free[idx + 1 :]
            for tail in recurse(rest):
                yield ((u, v),) + tail

    yield from recurse(tuple(range(n)))
