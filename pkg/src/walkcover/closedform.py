"""Closed-form expectations for commute, refined-commute, cover, and step times.

Everything here is exact arithmetic over quantities from the resistance
engine; nothing is estimated.  Times are in squared-length units: traversing
an edge of length L costs L^2 in the deterministic timing model, and the
Brownian-mean model matches it vertex by vertex in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    EdgeNotIncident,
    MissingArcCost,
    NonPositiveLength,
    SameVertex,
)
from .netmodel import Arc, Network, vertex_conductance
from .resistance import SplitSpec, effective_resistance, split_resistances

__all__ = [
    "RefinedCommuteValues",
    "commute_time",
    "weighted_cost_commute",
    "refined_commutes",
    "cover_bounds",
    "mean_step_time",
    "mean_predeparture_time",
    "brownian_traversal_mean",
    "half_excursion_mean",
]


@dataclass(frozen=True)
class RefinedCommuteValues:
    """Expected times and trial counts for the four refined commute flavours.

    ``t_either``/``t_forward``/``t_backward``/``t_both`` are the expected
    times until the first commute whose trips touch side A in the requested
    way.  ``p_a`` is the per-trip probability of passing through A, ``q`` the
    chance a first A-touching commute used only one direction, and the ``y_*``
    values the expected commute counts; each time equals
    ``2 * m * R_xy * y`` for its count.
    """

    t_either: float
    t_forward: float
    t_backward: float
    t_both: float
    p_a: float
    q: float
    y_i: float
    y_ii: float
    y_iii: float


def commute_time(net: Network, x: int, y: int) -> float:
    """Expected x -> y -> x time: twice total length times resistance."""
    if x == y:
        raise SameVertex("commute endpoints must differ")
    return 2.0 * net.total_length * effective_resistance(net, x, y)


def weighted_cost_commute(
    net: Network, cost: Mapping[Arc, float], x: int, y: int
) -> float:
    """Expected accumulated arc cost over one commute.

    The per-commute expectation is ``F * R_xy`` where F sums
    ``cost(arc) / length(edge)`` over all arcs.  With cost = squared length
    this reduces to :func:`commute_time`; with cost = length it counts the
    expected number of steps.
    """
    if x == y:
        raise SameVertex("commute endpoints must differ")
    total = 0.0
    for arc in net.arcs():
        try:
            f = cost[arc]
        except KeyError:
            raise MissingArcCost(f"no cost for arc {arc}") from None
        if f < 0:
            raise MissingArcCost(f"negative cost {f} for arc {arc}")
        total += f / net.edges[arc.edge].length
    return total * effective_resistance(net, x, y)


def refined_commutes(spec: SplitSpec) -> RefinedCommuteValues:
    """Evaluate every refined-commute closed form on a validated split."""
    m = spec.network.total_length
    r_a, r_b = split_resistances(spec)
    p_a = r_b / (r_a + r_b)
    y_ii = 1.0 / p_a
    y_i = 1.0 / (p_a * (2.0 - p_a))
    q = 2.0 * (1.0 - p_a) / (2.0 - p_a)
    y_iii = y_i + q * y_ii
    base = 2.0 * m * r_a
    denom = 2.0 * r_a + r_b
    return RefinedCommuteValues(
        t_either=base * (r_a + r_b) / denom,
        t_forward=base,
        t_backward=base,
        t_both=base * (3.0 * r_a + r_b) / denom,
        p_a=p_a,
        q=q,
        y_i=y_i,
        y_ii=y_ii,
        y_iii=y_iii,
    )


def cover_bounds(net: Network) -> tuple[float, float]:
    """Upper bounds on cover-and-return time: ``(2 m^2, 3 m^2)``.

    The first bounds edge cover (and directed-arc cover for any fixed
    orientation), the second bounds two-direction arc cover.
    """
    m = net.total_length
    return 2.0 * m * m, 3.0 * m * m


def mean_step_time(net: Network, x: int) -> float:
    """Expected time of one step out of ``x``: incident lengths over C_x.

    Loop lengths count twice, matching the arc enumeration used for C_x.
    """
    net.check_vertex(x)
    c = vertex_conductance(net, x)
    total = math.fsum(net.edges[eid].length for eid, _, _ in net.adjacency[x])
    return total / c


def mean_predeparture_time(net: Network, x: int) -> float:
    """Expected time a Brownian particle spends at ``x`` before its last departure."""
    return (2.0 / 3.0) * mean_step_time(net, x)


def brownian_traversal_mean(net: Network, x: int, edge_id: int) -> float:
    """Expected Brownian time to leave ``x`` through a given incident edge.

    Conditional on that edge being traversed first, the mean is the
    length-squared-over-three half-excursion term plus the predeparture time
    at ``x``.  Averaged over the jump-chain law this reproduces
    :func:`mean_step_time` exactly.
    """
    net.check_vertex(x)
    if not (0 <= edge_id < len(net.edges)):
        raise EdgeNotIncident(f"no edge {edge_id}")
    e = net.edges[edge_id]
    if x not in (e.u, e.v):
        raise EdgeNotIncident(f"edge {edge_id} is not incident to vertex {x}")
    return e.length * e.length / 3.0 + mean_predeparture_time(net, x)


def half_excursion_mean(length: float) -> float:
    """Mean time between the last visit to 0 and the first visit to ``length``."""
    if not (length > 0 and math.isfinite(length)):
        raise NonPositiveLength(f"length must be positive, got {length}")
    return length * length / 3.0
