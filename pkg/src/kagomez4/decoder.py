"""Syndrome extraction and two-round matching decoder.

Charges live on the working generators; a plaquette with charge ``g``
has measured eigenvalue ``omega**g``.  Decoding first pairs all
odd-charge anyons by exact minimum-weight matching on the move-count
metric, fuses each pair by transporting one charge to its partner, then
pairs the surviving charge-2 anyons in a second matching round.  The
returned correction always annihilates the syndrome it was given; the
logical verdict is read from the symplectic form of the residual word
against each tracked logical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .kagome import KagomeCode, all_pairs_distances, build_move_graph
from .matching import mwpm_complete
from .noise import ErrorFrame, frame_charges

__all__ = [
    "DistanceTable",
    "SyndromeConfig",
    "decode",
    "distance_table",
    "extract_syndrome",
    "logical_verdict",
    "observable_failures",
]


@dataclass
class SyndromeConfig:
    """Charges of every working generator, split by parity.

    ``odd`` lists the generator indices holding charge 1 or 3 and
    ``even`` those with charge 2; charge-0 plaquettes are silent.
    """

    charges: np.ndarray
    names: list

    def __post_init__(self):
        if int((self.charges % 2).sum()) % 2:
            raise ValueError("odd-charge anyon population must be even")

    @property
    def odd(self) -> np.ndarray:
        return np.flatnonzero(self.charges % 2 == 1)

    @property
    def even(self) -> np.ndarray:
        return np.flatnonzero(self.charges == 2)

    def is_trivial(self) -> bool:
        return not self.charges.any()


def extract_syndrome(code: KagomeCode, frame: ErrorFrame) -> SyndromeConfig:
    """Charge of every working generator under ``frame``."""
    from .noise import charge_context

    return SyndromeConfig(
        frame_charges(code, frame), charge_context(code).names
    )


class DistanceTable:
    """All-pairs move counts and witness paths on the move graph.

    Distances count elementary two-plaquette charge hops; with defects
    the merged pentagon generators connect the hexagon and triangle
    sectors, so paths through them record the type conversion
    implicitly.  Witness paths are read from per-source breadth-first
    parent trees.
    """

    def __init__(self, code: KagomeCode):
        self.code = code
        self.graph = build_move_graph(code)
        self.dist = all_pairs_distances(self.graph)
        n = len(self.graph.node_names)
        self.adj = [[] for _ in range(n)]
        for eid, (site, kind, u, v, cu, cv) in enumerate(self.graph.edges):
            self.adj[u].append((v, eid))
            self.adj[v].append((u, eid))
        self.parent = np.full((n, n), -1, dtype=np.int32)
        self.parent_edge = np.full((n, n), -1, dtype=np.int32)
        for src in range(n):
            seen = self.parent[src]
            dq = deque([src])
            seen[src] = src
            while dq:
                x = dq.popleft()
                for y, eid in self.adj[x]:
                    if seen[y] < 0:
                        seen[y] = x
                        self.parent_edge[src][y] = eid
                        dq.append(y)
        self.component = np.full(n, -1, dtype=np.int32)
        label = 0
        for src in range(n):
            if self.component[src] < 0:
                self.component[self.dist[src] >= 0] = label
                label += 1

    def path(self, u: int, v: int) -> list:
        """Edge ids of a shortest move sequence from ``u`` to ``v``."""
        if self.dist[u, v] < 0:
            raise ValueError("anyons lie in disconnected sectors")
        edges = []
        node = v
        while node != u:
            eid = int(self.parent_edge[u][node])
            edges.append(eid)
            node = int(self.parent[u][node])
        return edges[::-1]


def distance_table(code: KagomeCode) -> DistanceTable:
    table = getattr(code, "_decoder_table", None)
    if table is None:
        table = DistanceTable(code)
        code._decoder_table = table
    return table


def build_distance_table(code: KagomeCode, syndrome=None) -> DistanceTable:
    """Spec spelling of :func:`distance_table` (syndrome-independent)."""
    return distance_table(code)


def _transport(table: DistanceTable, correction, charges, u: int, v: int):
    """Push all of node ``u``'s charge to ``v`` along a witness path."""
    g = int(charges[u])
    node = u
    for eid in table.path(u, v):
        site, kind, a, b, ca, cb = table.graph.edges[eid]
        if a != node:
            a, b, ca, cb = b, a, cb, ca
        # ca is odd, so s*ca = -g is solvable for any g (1**-1 = 1,
        # 3**-1 = 3 mod 4); for charge-2 transport s comes out even.
        s = (-g * ca) % 4
        if kind == "Z":
            correction.apply(site, s, 0)
        else:
            correction.apply(site, 0, s)
        charges[node] = (charges[node] + s * ca) % 4
        charges[b] = (charges[b] + s * cb) % 4
        node = b
        g = (s * cb) % 4


def _match_round(table: DistanceTable, correction, charges, nodes):
    """Pair ``nodes`` with exact matching per connected component."""
    nodes = np.asarray(nodes)
    for comp in np.unique(table.component[nodes]):
        group = nodes[table.component[nodes] == comp]
        if len(group) % 2:
            raise ValueError(
                "odd anyon population in one sector - conservation bug"
            )
        if len(group) == 0:
            continue
        if len(group) == 2:
            pairs = [(0, 1)]
        else:
            weights = table.dist[np.ix_(group, group)].astype(np.int64)
            pairs = mwpm_complete(weights)
        for i, j in pairs:
            _transport(table, correction, charges, int(group[i]), int(group[j]))


def decode(code: KagomeCode, syndrome: SyndromeConfig) -> ErrorFrame:
    """Correction frame annihilating ``syndrome`` (post-verified)."""
    table = distance_table(code)
    charges = syndrome.charges.copy()
    correction = ErrorFrame.identity(code.n_sites)
    if syndrome.is_trivial():
        return correction
    _match_round(table, correction, charges, syndrome.odd)
    if (charges % 2).any():
        raise AssertionError("round one left odd charges behind")
    remaining = np.flatnonzero(charges == 2)
    _match_round(table, correction, charges, remaining)
    if charges.any():
        raise AssertionError("decoding failed to annihilate the syndrome")
    return correction


def logical_verdict(code: KagomeCode, frame: ErrorFrame, correction) -> dict:
    """Per-logical pass/fail for the residual ``frame * correction``.

    ``True`` means the logical survived (the residual commutes with
    it); raises if the residual still carries syndrome.
    """
    residual = frame.compose(correction)
    if frame_charges(code, residual).any():
        raise ValueError("residual syndrome is not empty")
    z = residual.z.astype(np.int64)
    x = residual.x.astype(np.int64)
    verdict = {}
    for name, logical in code.logicals.items():
        lz = np.asarray(logical.z_exps, dtype=np.int64)
        lx = np.asarray(logical.x_exps, dtype=np.int64)
        verdict[name] = int((z @ lx - x @ lz) % 4) == 0
    return verdict


def observable_failures(code: KagomeCode, frame: ErrorFrame, correction) -> dict:
    """Per-observable logical-error flags for the residual.

    ``True`` under key ``N`` means the residual implements a logical
    operation of type ``N`` (detected as anticommutation with the
    conjugate partner of ``N``), i.e. an ``N``-type logical error
    occurred.
    """
    verdict = logical_verdict(code, frame, correction)
    failures = {}
    for name in code.logicals:
        mate = ("Z" if name.startswith("X") else "X") + name[1:]
        failures[name] = not verdict[mate]
    return failures
