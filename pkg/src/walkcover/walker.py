"""Jump-chain random-walk simulator with pluggable stopping rules.

The walk samples the next arc at each vertex with probability proportional
to the reciprocal edge length, then charges elapsed time under one of two
timing models:

* ``L_SQUARED`` charges exactly ``length**2`` per traversal.
* ``BROWNIAN_MEAN`` charges the conditional mean time a Brownian particle
  needs to leave the current vertex through the sampled edge.  Charging the
  conditional mean instead of sampling a traversal-time distribution leaves
  every expectation of a jump-chain stopping time unchanged, because whether
  the walk has stopped is decided by the arc sequence alone.

Stopping rules are small frozen dataclasses; each knows how to build a
per-trial tracker that consumes one ``(edge, direction, arrival)`` event per
step and says when to stop.  Rules defined elsewhere (the epoch sequences in
:mod:`walkcover.tours`) plug in through the same ``make_tracker`` hook.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import StepBudgetExceeded, VertexOutOfRange
from .netmodel import Arc, Network, Orientation
from .resistance import SplitSpec

__all__ = [
    "TimingModel",
    "WalkEvent",
    "WalkOutcome",
    "FirstPassage",
    "Commute",
    "RefinedCommute",
    "EdgeCoverReturn",
    "ArcCoverReturn",
    "DirectedCoverReturn",
    "VertexCover",
    "StoppingRule",
    "DEFAULT_STEP_BUDGET",
    "build_tables",
    "step",
    "run",
    "commute_trips",
]

DEFAULT_STEP_BUDGET = 10**9

REFINED_KINDS = ("either", "forward", "backward", "both")


class TimingModel(Enum):
    L_SQUARED = "l2"
    BROWNIAN_MEAN = "brownian"


@dataclass(frozen=True)
class WalkEvent:
    """One step: the arc taken, where it landed, and cumulative elapsed time."""

    step_index: int
    arc: Arc
    arrival_vertex: int
    elapsed: float


@dataclass(frozen=True)
class WalkOutcome:
    """Result of one simulated trial."""

    stop_time: float
    step_count: int
    auxiliary: dict | None = None
    events: tuple[WalkEvent, ...] | None = None


# ---------------------------------------------------------------------------
# Stopping rules.  Each tracker exposes:
#   start(v)            -> bool   (True if the rule is satisfied before any step)
#   update(e, d, v, t)  -> bool   (True to stop after this arrival)
#   result()            -> dict | None
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FirstPassage:
    target: int

    def anchor(self) -> int | None:
        return None

    def label(self) -> str:
        return f"first_passage(target={self.target})"

    def make_tracker(self, net: Network):
        return _FirstPassageTracker(self.target)


class _FirstPassageTracker:
    def __init__(self, target: int):
        self.target = target
        self.arrival = None

    def start(self, v: int) -> bool:
        return v == self.target

    def update(self, e: int, d: int, v: int, t: float) -> bool:
        if v == self.target:
            self.arrival = (e, d)
            return True
        return False

    def result(self):
        return {"arrival_arc": self.arrival}


@dataclass(frozen=True)
class Commute:
    """Go from x to y and back to x; one elementary commute."""

    x: int
    y: int

    def anchor(self) -> int | None:
        return self.x

    def label(self) -> str:
        return f"commute(x={self.x};y={self.y})"

    def make_tracker(self, net: Network):
        if self.x == self.y:
            raise VertexOutOfRange("commute endpoints must differ")
        return _CommuteTracker(self.x, self.y)


class _CommuteTracker:
    def __init__(self, x: int, y: int):
        self.x = x
        self.y = y
        self.outbound = True
        self.fwd = None
        self.bwd = None

    def start(self, v: int) -> bool:
        return False

    def update(self, e: int, d: int, v: int, t: float) -> bool:
        if self.outbound:
            if v == self.y:
                self.fwd = (e, d)
                self.outbound = False
        elif v == self.x:
            self.bwd = (e, d)
            return True
        return False

    def result(self):
        return {"commutes": [(self.fwd, self.bwd)], "commute_count": 1}


@dataclass(frozen=True)
class RefinedCommute:
    """Stop at the first commute whose trips touch side A in the given way.

    ``kind`` is one of ``either`` / ``forward`` / ``backward`` / ``both``.  A
    trip counts as through A when its arriving arc (into y on the way out,
    into x on the way back) belongs to A; the two sides share only the
    terminals, so any passage entering through A must finish on an A arc.
    The ``both`` kind keeps its two flags across commutes: it stops at the
    first commute completion by which some forward trip and some backward
    trip have each gone through A.
    """

    kind: str
    spec: SplitSpec

    def anchor(self) -> int | None:
        return self.spec.x

    def label(self) -> str:
        return f"refined({self.kind};x={self.spec.x};y={self.spec.y})"

    def make_tracker(self, net: Network):
        if self.kind not in REFINED_KINDS:
            raise ValueError(f"unknown refined-commute kind {self.kind!r}")
        if self.spec.network != net:
            raise ValueError("split spec belongs to a different network")
        return _RefinedTracker(self.kind, self.spec.x, self.spec.y, self.spec.a_edges)


class _RefinedTracker:
    def __init__(self, kind: str, x: int, y: int, a_edges: frozenset[int]):
        self.kind = kind
        self.x = x
        self.y = y
        self.a = a_edges
        self.outbound = True
        self.fwd = None
        self.commutes: list[tuple[tuple[int, int], tuple[int, int]]] = []
        self.seen_f = False
        self.seen_b = False

    def start(self, v: int) -> bool:
        return False

    def update(self, e: int, d: int, v: int, t: float) -> bool:
        if self.outbound:
            if v == self.y:
                self.fwd = (e, d)
                self.outbound = False
            return False
        if v != self.x:
            return False
        fwd = self.fwd
        self.commutes.append((fwd, (e, d)))
        f = fwd[0] in self.a
        b = e in self.a
        self.seen_f |= f
        self.seen_b |= b
        self.outbound = True
        kind = self.kind
        if kind == "forward":
            return f
        if kind == "backward":
            return b
        if kind == "either":
            return f or b
        return self.seen_f and self.seen_b

    def result(self):
        return {"commutes": self.commutes, "commute_count": len(self.commutes)}


@dataclass(frozen=True)
class EdgeCoverReturn:
    """Every edge traversed at least once (either way) and the walk back at root."""

    root: int

    def anchor(self) -> int | None:
        return self.root

    def label(self) -> str:
        return f"cover(edge;root={self.root})"

    def make_tracker(self, net: Network):
        return _MaskTracker(self.root, (1 << len(net.edges)) - 1, _edge_bit, None)


@dataclass(frozen=True)
class ArcCoverReturn:
    """Every edge traversed in both directions and the walk back at root."""

    root: int

    def anchor(self) -> int | None:
        return self.root

    def label(self) -> str:
        return f"cover(arc;root={self.root})"

    def make_tracker(self, net: Network):
        return _MaskTracker(self.root, (1 << (2 * len(net.edges))) - 1, _arc_bit, None)


@dataclass(frozen=True)
class DirectedCoverReturn:
    """Every edge traversed in its pre-assigned direction and the walk back at root."""

    root: int
    orientation: Orientation

    def anchor(self) -> int | None:
        return self.root

    def label(self) -> str:
        return f"cover(directed;root={self.root})"

    def make_tracker(self, net: Network):
        if len(self.orientation.directions) != len(net.edges):
            raise ValueError("orientation does not match the network's edge count")
        return _MaskTracker(
            self.root, (1 << len(net.edges)) - 1, _edge_bit, self.orientation.directions
        )


def _edge_bit(e: int, d: int) -> int:
    return 1 << e


def _arc_bit(e: int, d: int) -> int:
    return 1 << (2 * e + d)


class _MaskTracker:
    """Coverage bitmask plus a return-to-root condition."""

    def __init__(self, root, full, bit, required_dirs):
        self.root = root
        self.full = full
        self.mask = 0
        self.bit = bit
        self.required = required_dirs

    def start(self, v: int) -> bool:
        return self.mask == self.full and v == self.root

    def update(self, e: int, d: int, v: int, t: float) -> bool:
        if self.required is None:
            self.mask |= self.bit(e, d)
        elif d == self.required[e]:
            self.mask |= 1 << e
        return self.mask == self.full and v == self.root

    def result(self):
        return None


@dataclass(frozen=True)
class VertexCover:
    """Every vertex visited; optionally also return to root afterwards."""

    root: int
    with_return: bool = False

    def anchor(self) -> int | None:
        return self.root

    def label(self) -> str:
        return f"vcover(root={self.root};return={str(self.with_return).lower()})"

    def make_tracker(self, net: Network):
        return _VertexTracker(self.root, net.vertex_count, self.with_return)


class _VertexTracker:
    def __init__(self, root: int, n: int, with_return: bool):
        self.root = root
        self.full = (1 << n) - 1
        self.mask = 0
        self.with_return = with_return

    def start(self, v: int) -> bool:
        self.mask |= 1 << v
        if self.mask != self.full:
            return False
        return (not self.with_return) or v == self.root

    def update(self, e: int, d: int, v: int, t: float) -> bool:
        self.mask |= 1 << v
        if self.mask != self.full:
            return False
        return (not self.with_return) or v == self.root

    def result(self):
        return None


# Any object with anchor()/label()/make_tracker(); the concrete rule set also
# includes the epoch sequences defined in walkcover.tours.
StoppingRule = (
    FirstPassage
    | Commute
    | RefinedCommute
    | EdgeCoverReturn
    | ArcCoverReturn
    | DirectedCoverReturn
    | VertexCover
)


# ---------------------------------------------------------------------------
# Sampling tables and the simulation loop
# ---------------------------------------------------------------------------


def build_tables(net: Network, model: TimingModel):
    """Per-vertex cumulative sampling rows: ``(cum, [(edge, dir, head, charge)])``.

    Build once per (network, model) and reuse across trials; construction is
    linear in the arc count but dwarfs a single trial if repeated per trial.
    """
    from .closedform import mean_predeparture_time

    rows = []
    for v in range(net.vertex_count):
        adj = net.adjacency[v]
        if not adj:
            rows.append(None)
            continue
        c = net.conductances[v]
        if model is TimingModel.BROWNIAN_MEAN:
            pre = mean_predeparture_time(net, v)
        cum: list[float] = []
        meta: list[tuple[int, int, int, float]] = []
        acc = 0.0
        for eid, d, head in adj:
            length = net.edges[eid].length
            acc += (1.0 / length) / c
            if model is TimingModel.BROWNIAN_MEAN:
                charge = length * length / 3.0 + pre
            else:
                charge = length * length
            cum.append(acc)
            meta.append((eid, d, head, charge))
        cum[-1] = 1.0  # guard the last slot against rounding
        rows.append((cum, meta))
    return rows


def step(
    net: Network,
    at: int,
    model: TimingModel,
    rng: np.random.Generator,
    tables=None,
) -> tuple[Arc, int, float]:
    """Sample a single step out of ``at``; deterministic given the rng state."""
    net.check_vertex(at)
    if tables is None:
        tables = build_tables(net, model)
    row = tables[at]
    if row is None:
        raise VertexOutOfRange(f"vertex {at} has no incident arcs")
    cum, meta = row
    k = bisect_right(cum, rng.random())
    e, d, head, charge = meta[k]
    return Arc(e, d), head, charge


def run(
    net: Network,
    start: int,
    rule,
    model: TimingModel = TimingModel.L_SQUARED,
    rng: np.random.Generator | None = None,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
    tables=None,
    record: bool = False,
) -> WalkOutcome:
    """Simulate one trial from ``start`` until ``rule`` fires.

    Raises :class:`StepBudgetExceeded` beyond ``step_budget`` jump steps; the
    budget exists to surface misconfigured rules, never to truncate silently.
    With ``record=True`` the full event trajectory is kept on the outcome.
    """
    net.check_vertex(start)
    anchor = rule.anchor()
    if anchor is not None and anchor != start:
        raise ValueError(f"rule {rule.label()} is anchored at {anchor}, not {start}")
    if rng is None:
        rng = np.random.default_rng()
    tracker = rule.make_tracker(net)
    if tables is None:
        tables = build_tables(net, model)

    events: list[WalkEvent] | None = [] if record else None
    if tracker.start(start):
        return WalkOutcome(0.0, 0, tracker.result(), tuple(events) if record else None)

    row = tables[start]
    if row is None:
        raise VertexOutOfRange(f"vertex {start} has no incident arcs")
    cum, meta = row
    rand = rng.random
    update = tracker.update
    bisect = bisect_right
    t = 0.0
    steps = 0
    buf: list[float] = []
    pos = 0
    nbuf = 0
    block = 64
    while True:
        if pos == nbuf:
            buf = rand(block).tolist()
            nbuf = block
            pos = 0
            if block < 8192:
                block *= 4
        u = buf[pos]
        pos += 1
        k = bisect(cum, u)
        e, d, head, charge = meta[k]
        t += charge
        steps += 1
        if events is not None:
            events.append(WalkEvent(steps - 1, Arc(e, d), head, t))
        if update(e, d, head, t):
            return WalkOutcome(t, steps, tracker.result(), tuple(events) if record else None)
        if steps >= step_budget:
            raise StepBudgetExceeded(
                f"no stop within {step_budget} steps for {rule.label()}"
            )
        row = tables[head]
        cum, meta = row


def commute_trips(
    outcomes: Iterable[WalkOutcome], a_edges: frozenset[int] | Sequence[int]
) -> list[tuple[bool, bool]]:
    """Per-commute (forward through A, backward through A) flags.

    Works on outcomes of :class:`Commute` and :class:`RefinedCommute` runs,
    whose auxiliary payload records each commute's arriving arcs.
    """
    a = frozenset(a_edges)
    flags: list[tuple[bool, bool]] = []
    for out in outcomes:
        aux = out.auxiliary or {}
        for fwd, bwd in aux.get("commutes", []):
            flags.append((fwd[0] in a, bwd[0] in a))
    return flags
