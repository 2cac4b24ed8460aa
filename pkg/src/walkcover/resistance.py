"""Exact effective-resistance engine.

Resistances come from a dense direct solve of the grounded weighted
Laplacian: instances are desk scale, so exactness beats iteration.  Parallel
edges accumulate conductance; loops contribute nothing (they never carry
current between distinct vertices).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSplit, SameVertex
from .netmodel import Network, build_network

__all__ = ["SplitSpec", "effective_resistance", "split_resistances", "via_probability"]


def _laplacian(net: Network) -> np.ndarray:
    n = net.vertex_count
    lap = np.zeros((n, n))
    for e in net.edges:
        if e.is_loop:
            continue
        g = 1.0 / e.length
        lap[e.u, e.u] += g
        lap[e.v, e.v] += g
        lap[e.u, e.v] -= g
        lap[e.v, e.u] -= g
    return lap


def effective_resistance(net: Network, x: int, y: int) -> float:
    """Voltage at ``x`` when unit current enters ``x`` and leaves grounded ``y``."""
    net.check_vertex(x)
    net.check_vertex(y)
    if x == y:
        raise SameVertex(f"effective resistance needs two distinct vertices, got {x}")
    lap = _laplacian(net)
    keep = [i for i in range(net.vertex_count) if i != y]
    rhs = np.zeros(len(keep))
    pos = keep.index(x)
    rhs[pos] = 1.0
    sol = np.linalg.solve(lap[np.ix_(keep, keep)], rhs)
    return float(sol[pos])


def _span(net: Network, edge_ids: frozenset[int]) -> set[int]:
    verts: set[int] = set()
    for eid in edge_ids:
        e = net.edges[eid]
        verts.add(e.u)
        verts.add(e.v)
    return verts


def _connects(net: Network, edge_ids: frozenset[int], x: int, y: int) -> bool:
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        root = a
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(a, a) != root:
            parent[a], a = root, parent[a]
        return root

    touched: set[int] = set()
    for eid in edge_ids:
        e = net.edges[eid]
        touched.add(e.u)
        touched.add(e.v)
        ra, rb = find(e.u), find(e.v)
        if ra != rb:
            parent[ra] = rb
    return x in touched and y in touched and find(x) == find(y)


@dataclass(frozen=True)
class SplitSpec:
    """A two-terminal split: edge subset A against its complement B.

    The subnetworks spanned by A and B may share exactly the terminals
    ``{x, y}``, and each side must connect x to y on its own.  Validation is
    eager; every downstream formula refuses an invalid split rather than
    silently misapplying itself.
    """

    network: Network
    a_edges: frozenset[int]
    x: int
    y: int

    def __post_init__(self):
        net = self.network
        net.check_vertex(self.x)
        net.check_vertex(self.y)
        object.__setattr__(self, "a_edges", frozenset(self.a_edges))
        if self.x == self.y:
            raise InvalidSplit("terminals must be distinct")
        all_ids = set(range(len(net.edges)))
        if not self.a_edges:
            raise InvalidSplit("side A has no edges")
        if not self.a_edges <= all_ids:
            raise InvalidSplit(f"unknown edge ids {sorted(self.a_edges - all_ids)}")
        if self.a_edges == all_ids:
            raise InvalidSplit("side B has no edges")
        b = frozenset(all_ids - self.a_edges)
        shared = _span(net, self.a_edges) & _span(net, b)
        if shared != {self.x, self.y}:
            raise InvalidSplit(
                f"sides share vertices {sorted(shared)}, expected exactly "
                f"{sorted((self.x, self.y))}"
            )
        if not _connects(net, self.a_edges, self.x, self.y):
            raise InvalidSplit("side A does not connect the terminals")
        if not _connects(net, b, self.x, self.y):
            raise InvalidSplit("side B does not connect the terminals")

    @property
    def b_edges(self) -> frozenset[int]:
        return frozenset(range(len(self.network.edges))) - self.a_edges

    def side_network(self, edge_ids: frozenset[int]) -> tuple[Network, int, int]:
        """Standalone network for one side plus the remapped terminals."""
        verts = sorted(_span(self.network, edge_ids))
        remap = {v: i for i, v in enumerate(verts)}
        edges = [
            (remap[self.network.edges[eid].u], remap[self.network.edges[eid].v],
             self.network.edges[eid].length)
            for eid in sorted(edge_ids)
        ]
        return build_network(len(verts), edges), remap[self.x], remap[self.y]


def split_resistances(spec: SplitSpec) -> tuple[float, float]:
    """Terminal-to-terminal resistance of each standalone side, (R_A, R_B)."""
    net_a, xa, ya = spec.side_network(spec.a_edges)
    net_b, xb, yb = spec.side_network(spec.b_edges)
    return (
        effective_resistance(net_a, xa, ya),
        effective_resistance(net_b, xb, yb),
    )


def via_probability(spec: SplitSpec) -> float:
    """Chance the first terminal-to-terminal passage arrives through side A.

    Equals ``C_A / (C_A + C_B)`` for the side conductances, which is the same
    as the full-network resistance divided by R_A.
    """
    r_a, r_b = split_resistances(spec)
    return r_b / (r_a + r_b)
