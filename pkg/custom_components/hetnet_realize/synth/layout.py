"""Lane, departure and arrival planning for the 2D arcs of one half-plane"""
from dataclasses import dataclass
import itertools
import logging
from typing import Any

from ..book_embed import HALVES
from ..book_embed import EdgePlacement
from ..common.config import RealizationConfig
from .arcs import Arc
from .arcs import build_arc2d

_LOGGER = logging.getLogger(__name__)

ARRIVAL_FRACTIONS = (0.25, 0.5, 0.75, 1.0)
SEARCH_BUDGET = 20000

Cost = tuple[int, int, int, int, int]
ZERO_COST: Cost = (0, 0, 0, 0, 0)


@dataclass(frozen=True)
class ArcRequest:
    """A connection to draw on a page half, with the departure slope of its source"""

    edge: tuple[int, int]
    placement: EdgePlacement
    slope: float
    doubled: bool = False


@dataclass
class _Plan:
    request: ArcRequest
    index: int
    rise: float = 0.0
    departure: float = 0.0
    offset: float = 0.0
    lane: int = 0

    def arrival(self, rho: list[float]) -> float:
        return rho[self.request.edge[1]] + self.offset

    def interval(self, rho: list[float]) -> tuple[float, float]:
        ends = (self.departure, self.arrival(rho))
        return min(ends), max(ends)


def _interleave(a: tuple[float, float], b: tuple[float, float]) -> bool:
    return a[0] < b[0] < a[1] < b[1] or b[0] < a[0] < b[1] < a[1]


def _nested(inner: tuple[float, float], outer: tuple[float, float]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _assign_rises(plans: list[_Plan], rho: list[float], half: int, cfg: RealizationConfig) -> None:
    by_source: dict[int, list[_Plan]] = {}
    for plan in plans:
        by_source.setdefault(plan.request.edge[0], []).append(plan)
    for source, group in by_source.items():
        first = group[0].request.slope * half
        drift = 1.0 if first >= 0 else -1.0

        def span(plan: _Plan) -> float:
            return abs(rho[plan.request.edge[1]] - rho[source])

        opposite = [p for p in group if (rho[p.request.edge[1]] - rho[source]) * drift < 0]
        same = [p for p in group if p not in opposite]
        ordered = sorted(opposite, key=span) + sorted(same, key=span, reverse=True)
        slope = max(abs(group[0].request.slope), 1e-9)
        # Departure verticals of one node should clear each other by a tube diameter
        step = max(3 * cfg.kappa, 2.2 * cfg.tube_radius / slope)
        if len(ordered) > 1:
            step = min(step, (0.8 * cfg.lane_base - 3 * cfg.kappa) / (len(ordered) - 1))
        for rank, plan in enumerate(ordered):
            plan.rise = 3 * cfg.kappa + rank * step
            plan.departure = rho[source] + plan.request.slope * half * plan.rise


def _crossing_compatible(
    narrow: _Plan, wide: _Plan, rho: list[float], half: int
) -> bool:
    """
    The wider arc runs on the higher lane, so it meets the narrower one where
    one of its verticals passes the narrower arc's horizontal run.
    """
    lo, hi = narrow.interval(rho)
    climbing = lo < wide.departure < hi
    w_wide = half if climbing else -half
    w_narrow = 1 if narrow.arrival(rho) > narrow.departure else -1
    return w_wide == w_narrow


def _pair_cost(first: _Plan, second: _Plan, rho: list[float], half: int) -> Cost:
    a, b = first.interval(rho), second.interval(rho)
    if not _interleave(a, b):
        return ZERO_COST
    if first.request.placement.page == second.request.placement.page:
        return (1, 0, 0, 0, 0)
    narrow, wide = sorted((first, second), key=lambda p: _width(p, rho))
    incompatible = 0 if _crossing_compatible(narrow, wide, rho, half) else 1
    return (0, 0, incompatible, 1, 0)


def _width(plan: _Plan, rho: list[float]) -> tuple[float, int]:
    lo, hi = plan.interval(rho)
    return hi - lo, plan.index


def _add(a: Cost, b: Cost) -> Cost:
    return tuple(x + y for x, y in zip(a, b))


def _choose_offsets(
    plans: list[_Plan], rho: list[float], half: int, cfg: RealizationConfig
) -> None:
    """
    Branch and bound over the arrival offsets of one half. Cost, compared
    lexicographically: interleavings on a shared page, arrivals too close to
    another vertical, incompatible crossings, crossings, then preference for
    small offsets on the side the arc comes from.
    """
    departures = [p.departure for p in plans]
    gap = 2 * cfg.tube_radius - 1e-9
    order = sorted(plans, key=lambda p: abs(rho[p.request.edge[1]] - p.departure))
    candidates = {}
    for plan in plans:
        side = 1.0 if plan.departure >= rho[plan.request.edge[1]] else -1.0
        candidates[plan.index] = [
            sign * side * frac * cfg.eps for frac in ARRIVAL_FRACTIONS for sign in (1.0, -1.0)
        ]
    best: dict[str, Any] = {"cost": None, "offsets": None}
    budget = [SEARCH_BUDGET]
    assigned: list[_Plan] = []

    def step_cost(plan: _Plan, rank: int) -> Cost:
        arrival = plan.arrival(rho)
        ends = departures + [p.arrival(rho) for p in assigned]
        close = sum(abs(arrival - e) < gap for e in ends)
        cost = (0, close, 0, 0, rank)
        for other in assigned:
            cost = _add(cost, _pair_cost(plan, other, rho, half))
        return cost

    def search(depth: int, cost: Cost) -> None:
        if best["cost"] is not None and cost >= best["cost"]:
            return
        if depth == len(order):
            best["cost"] = cost
            best["offsets"] = {p.index: p.offset for p in plans}
            return
        if budget[0] <= 0:
            return
        budget[0] -= 1
        plan = order[depth]
        options = []
        for rank, offset in enumerate(candidates[plan.index]):
            plan.offset = offset
            options.append((step_cost(plan, rank), rank, offset))
        options.sort()
        assigned.append(plan)
        for step, _, offset in options:
            plan.offset = offset
            search(depth + 1, _add(cost, step))
        assigned.pop()

    search(0, ZERO_COST)
    for plan in plans:
        plan.offset = best["offsets"][plan.index]
    if budget[0] <= 0:
        _LOGGER.debug("Arrival search budget exhausted; keeping best layout %s", best["cost"])
    else:
        _LOGGER.debug("Arrival layout cost %s", best["cost"])


def _assign_lanes(plans: list[_Plan], rho: list[float]) -> None:
    intervals = [p.interval(rho) for p in plans]
    order = sorted(range(len(plans)), key=lambda i: (intervals[i][1] - intervals[i][0], i))
    for pos, i in enumerate(order):
        below = [
            plans[j].lane
            for j in order[:pos]
            if _nested(intervals[j], intervals[i]) or _interleave(intervals[j], intervals[i])
        ]
        plans[i].lane = 1 + max(below) if below else 0


def plan_arcs(
    requests: list[ArcRequest], rho: list[float], cfg: RealizationConfig
) -> list[Arc]:
    """
    Draw every request. All pages of a half are planned together, as they are
    overlaid in the shared page-B plane; arcs nest into lanes by span, and
    departures from one node climb to distinct heights.
    """
    arcs = []
    for half in HALVES:
        plans = [
            _Plan(r, i) for i, r in enumerate(q for q in requests if q.placement.half == half)
        ]
        if not plans:
            continue
        _assign_rises(plans, rho, half, cfg)
        _choose_offsets(plans, rho, half, cfg)
        _assign_lanes(plans, rho)
        crossing = sum(
            _interleave(a.interval(rho), b.interval(rho))
            for a, b in itertools.combinations(plans, 2)
        )
        _LOGGER.debug(
            "Half %+d: %d arcs, %d lanes, %d interleaving pairs",
            half, len(plans), 1 + max(p.lane for p in plans), crossing,
        )
        for plan in plans:
            request = plan.request
            arcs.append(
                build_arc2d(
                    request.edge,
                    request.placement,
                    plan.lane,
                    cfg,
                    rho,
                    slope=request.slope,
                    rise=plan.rise,
                    offset=plan.offset,
                    doubled=request.doubled,
                )
            )
    return arcs
