"""Deterministic builders for named test networks and seeded random networks.

Every generator is also reachable from the CLI ``gen`` command through the
compact spec syntax parsed by :func:`from_spec`, for example ``path:1,1,1``,
``loop:2``, ``tree:6``, or ``random:n=5,m=8,seed=4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    InfeasibleParameters,
    InvalidDepth,
    NonPositiveLength,
    TooSmall,
)
from .netmodel import Network, build_network

__all__ = [
    "GeneratorSpec",
    "path",
    "loop",
    "parallel_pair",
    "triangle",
    "star",
    "binary_tree",
    "lollipop",
    "random_network",
    "from_spec",
]


def path(edge_lengths: Sequence[float]) -> Network:
    """Path on ``len(edge_lengths) + 1`` vertices with the given lengths."""
    if not edge_lengths:
        raise NonPositiveLength("a path needs at least one edge")
    return build_network(
        len(edge_lengths) + 1,
        [(i, i + 1, float(l)) for i, l in enumerate(edge_lengths)],
    )


def loop(length: float) -> Network:
    """One vertex carrying a single loop of the given length."""
    return build_network(1, [(0, 0, float(length))])


def parallel_pair() -> Network:
    """Two vertices joined by parallel edges of lengths 1 and 2 (m = 3)."""
    return build_network(2, [(0, 1, 1.0), (0, 1, 2.0)])


def triangle() -> Network:
    """Unit triangle on vertices 0, 1, 2."""
    return build_network(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])


def star(arms: int) -> Network:
    """Center vertex 0 with ``arms`` unit edges to leaves 1..arms."""
    if arms < 1:
        raise TooSmall("a star needs at least one arm")
    return build_network(arms + 1, [(0, i + 1, 1.0) for i in range(arms)])


def binary_tree(depth: int) -> Network:
    """Complete binary tree; level-k edges have length ``4**-k``.

    Heap layout: children of vertex i are 2i+1 and 2i+2; the edges into
    level-1 vertices (the root's children) count as level 1.  Total length is
    ``1 - 2**-depth``.
    """
    if depth < 1:
        raise InvalidDepth(f"depth must be >= 1, got {depth}")
    edges = []
    for level in range(1, depth + 1):
        length = 4.0 ** (-level)
        for child in range(2**level - 1, 2 ** (level + 1) - 1):
            edges.append(((child - 1) // 2, child, length))
    return build_network(2 ** (depth + 1) - 1, edges)


def lollipop(n: int) -> Network:
    """Unit-length clique on ``ceil(2n/3)`` vertices joined to a path on the rest."""
    if n < 4:
        raise TooSmall(f"lollipop needs n >= 4, got {n}")
    c = -(-2 * n // 3)
    edges = [(i, j, 1.0) for i in range(c) for j in range(i + 1, c)]
    for v in range(c, n):
        edges.append((v - 1, v, 1.0))
    return build_network(n, edges)


def random_network(
    n: int,
    target_edges: int,
    length_range: tuple[float, float],
    allow_loops: bool = False,
    allow_parallel: bool = False,
    seed: int = 0,
) -> Network:
    """Seeded connected random network: spanning tree first, extras after."""
    lo, hi = float(length_range[0]), float(length_range[1])
    if not (0 < lo <= hi):
        raise NonPositiveLength(f"bad length range [{lo}, {hi}]")
    if n < 1:
        raise InfeasibleParameters("need at least one vertex")
    if target_edges < n - 1:
        raise InfeasibleParameters(
            f"{target_edges} edges cannot connect {n} vertices"
        )
    simple_cap = n * (n - 1) // 2
    if not allow_parallel and not allow_loops and target_edges > simple_cap:
        raise InfeasibleParameters(
            f"{target_edges} edges exceed the simple-graph capacity {simple_cap}"
        )
    if n == 1 and not allow_loops and target_edges > 0:
        raise InfeasibleParameters("a single vertex can only carry loops")

    rng = np.random.default_rng(seed)

    def draw_length() -> float:
        return float(rng.uniform(lo, hi)) if hi > lo else lo

    pairs: list[tuple[int, int]] = []
    used: set[tuple[int, int]] = set()
    order = list(rng.permutation(n))
    for i in range(1, n):
        u = order[int(rng.integers(0, i))]
        v = order[i]
        pairs.append((u, v))
        used.add((min(u, v), max(u, v)))
    while len(pairs) < target_edges:
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v and not allow_loops:
            continue
        key = (min(u, v), max(u, v))
        if not allow_parallel and u != v and key in used:
            continue
        pairs.append((u, v))
        used.add(key)
    return build_network(n, [(u, v, draw_length()) for u, v in pairs])


@dataclass(frozen=True)
class GeneratorSpec:
    """Parsed compact generator spec: a kind plus its parameters."""

    kind: str
    args: tuple[str, ...] = ()
    options: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        args: list[str] = []
        options: dict = {}
        if rest:
            for part in rest.split(","):
                part = part.strip()
                if "=" in part:
                    key, _, val = part.partition("=")
                    options[key.strip()] = val.strip()
                else:
                    args.append(part)
        return cls(kind, tuple(args), options)

    def build(self) -> Network:
        try:
            return self._build()
        except (ValueError, IndexError, KeyError) as exc:
            raise InfeasibleParameters(
                f"bad generator spec {self.kind!r}: {exc}"
            ) from exc

    def _build(self) -> Network:
        kind = self.kind
        if kind == "path":
            return path([float(a) for a in self.args])
        if kind == "loop":
            return loop(float(self.args[0]))
        if kind == "parallel_pair":
            return parallel_pair()
        if kind == "triangle":
            return triangle()
        if kind == "star":
            return star(int(self.args[0]))
        if kind in ("tree", "binary_tree"):
            return binary_tree(int(self.args[0]))
        if kind == "lollipop":
            return lollipop(int(self.args[0]))
        if kind == "random":
            opts = self.options
            return random_network(
                n=int(opts["n"]),
                target_edges=int(opts["m"]),
                length_range=(
                    float(opts.get("lmin", 1.0)),
                    float(opts.get("lmax", opts.get("lmin", 1.0))),
                ),
                allow_loops=opts.get("loops", "0") == "1",
                allow_parallel=opts.get("parallel", "0") == "1",
                seed=int(opts.get("seed", 0)),
            )
        raise InfeasibleParameters(f"unknown generator kind {kind!r}")


def from_spec(text: str) -> Network:
    """Build a network from a compact spec string such as ``path:1,2``."""
    return GeneratorSpec.parse(text).build()
