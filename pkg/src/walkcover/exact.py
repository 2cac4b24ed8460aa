"""Exact expected stop times by absorbing-chain linear solve.

For small instances the expected stop time of a walk under any of the
coverage or passage rules is the solution of one linear system over states
``(position, rule progress)``.  Progress is a phase for passage rules and a
coverage bitmask for cover rules, so the state count grows exponentially in
the edge count; a hard cap keeps the dense solve honest.

This is the runtime source for equality targets that have no closed form
(for example cover-and-return means on named small networks).
"""

from __future__ import annotations

from typing import Hashable

import numpy as np

from .errors import StateSpaceTooLarge
from .netmodel import Network
from .walker import (
    ArcCoverReturn,
    Commute,
    DirectedCoverReturn,
    EdgeCoverReturn,
    FirstPassage,
    TimingModel,
    VertexCover,
    build_tables,
)

__all__ = ["exact_stop_time", "MAX_STATES"]

MAX_STATES = 4000


def _rule_machine(rule, net: Network):
    """Return (initial_payload, transition, absorbing-after-arrival)."""
    if isinstance(rule, FirstPassage):
        return 0, (lambda p, e, d, v: 0), (lambda v, p: v == rule.target)
    if isinstance(rule, Commute):
        def trans(p, e, d, v):
            return 1 if (p == 0 and v == rule.y) else p
        return 0, trans, (lambda v, p: p == 1 and v == rule.x)
    if isinstance(rule, EdgeCoverReturn):
        full = (1 << len(net.edges)) - 1
        return (
            0,
            (lambda p, e, d, v: p | (1 << e)),
            (lambda v, p: p == full and v == rule.root),
        )
    if isinstance(rule, ArcCoverReturn):
        full = (1 << (2 * len(net.edges))) - 1
        return (
            0,
            (lambda p, e, d, v: p | (1 << (2 * e + d))),
            (lambda v, p: p == full and v == rule.root),
        )
    if isinstance(rule, DirectedCoverReturn):
        full = (1 << len(net.edges)) - 1
        dirs = rule.orientation.directions
        return (
            0,
            (lambda p, e, d, v: p | (1 << e) if d == dirs[e] else p),
            (lambda v, p: p == full and v == rule.root),
        )
    if isinstance(rule, VertexCover):
        full = (1 << net.vertex_count) - 1
        def absorbing(v, p):
            return p == full and ((not rule.with_return) or v == rule.root)
        return 0, (lambda p, e, d, v: p | (1 << v)), absorbing
    raise TypeError(f"no exact solver for rule type {type(rule).__name__}")


def exact_stop_time(
    net: Network,
    start: int,
    rule,
    model: TimingModel = TimingModel.L_SQUARED,
    max_states: int = MAX_STATES,
) -> float:
    """Expected stop time of ``rule`` from ``start``, solved exactly.

    Supports the passage and cover rules (not refined commutes, which have
    closed forms, and not epoch sequences).  Raises
    :class:`StateSpaceTooLarge` when the reachable state count exceeds
    ``max_states``.
    """
    net.check_vertex(start)
    anchor = rule.anchor()
    if anchor is not None and anchor != start:
        raise ValueError(f"rule {rule.label()} is anchored at {anchor}, not {start}")
    payload0, transition, absorbing = _rule_machine(rule, net)
    if isinstance(rule, VertexCover):
        payload0 = 1 << start
    if isinstance(rule, FirstPassage) and start == rule.target:
        return 0.0
    start_state = (start, payload0)
    if absorbing(start, payload0) and not isinstance(rule, (FirstPassage, Commute)):
        return 0.0

    tables = build_tables(net, model)
    index: dict[tuple[int, Hashable], int] = {start_state: 0}
    order = [start_state]
    frontier = [start_state]
    while frontier:
        nxt: list[tuple[int, Hashable]] = []
        for v, p in frontier:
            row = tables[v]
            if row is None:
                raise StateSpaceTooLarge(f"vertex {v} has no outgoing arcs")
            for e, d, head, _ in row[1]:
                p2 = transition(p, e, d, head)
                if absorbing(head, p2):
                    continue
                s2 = (head, p2)
                if s2 not in index:
                    if len(index) >= max_states:
                        raise StateSpaceTooLarge(
                            f"more than {max_states} reachable states"
                        )
                    index[s2] = len(order)
                    order.append(s2)
                    nxt.append(s2)
        frontier = nxt

    n = len(order)
    mat = np.eye(n)
    rhs = np.zeros(n)
    for s, (v, p) in enumerate(order):
        cum, meta = tables[v]
        prev = 0.0
        for k, (e, d, head, charge) in enumerate(meta):
            prob = cum[k] - prev
            prev = cum[k]
            rhs[s] += prob * charge
            p2 = transition(p, e, d, head)
            if not absorbing(head, p2):
                mat[s, index[(head, p2)]] -= prob
    sol = np.linalg.solve(mat, rhs)
    return float(sol[0])
