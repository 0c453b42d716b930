"""Overlay crossings between 2D arcs of different pages and their repair"""
from dataclasses import dataclass
import logging

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.integrate import trapezoid
from scipy.spatial import cKDTree

from ..common.config import RealizationConfig
from ..common.exceptions import SynthesisException
from .arcs import Arc
from .arcs import rounded_polyline
from .arcs import resample
from .bump import bump

_LOGGER = logging.getLogger(__name__)

MAX_ROUNDS = 12
MIN_SPEED_RATIO = 0.05


@dataclass(frozen=True)
class Crossing:
    """Centerline intersection of arcs[first] and arcs[second]"""

    first: int
    second: int
    point: tuple[float, float]
    index_first: int
    index_second: int
    w: float
    w_tilde: float

    @property
    def compatible(self) -> bool:
        return self.w * self.w_tilde > 0


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def segment_intersections(p: np.ndarray, q: np.ndarray) -> list[tuple[int, int, float, float]]:
    """(i, j, s, t): segment i of p meets segment j of q at fractions s and t"""
    d1 = np.diff(p, axis=0)
    d2 = np.diff(q, axis=0)
    lo1, hi1 = np.minimum(p[:-1], p[1:]), np.maximum(p[:-1], p[1:])
    lo2, hi2 = np.minimum(q[:-1], q[1:]), np.maximum(q[:-1], q[1:])
    overlap = np.all(
        (lo1[:, None, :] <= hi2[None, :, :]) & (lo2[None, :, :] <= hi1[:, None, :]), axis=2
    )
    i_idx, j_idx = np.nonzero(overlap)
    if not len(i_idx):
        return []
    r = q[j_idx] - p[i_idx]
    denom = _cross(d1[i_idx], d2[j_idx])
    ok = np.abs(denom) > 1e-14
    s = np.where(ok, _cross(r, d2[j_idx]) / np.where(ok, denom, 1.0), -1.0)
    t = np.where(ok, _cross(r, d1[i_idx]) / np.where(ok, denom, 1.0), -1.0)
    hit = ok & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
    return [
        (int(i), int(j), float(a), float(b))
        for i, j, a, b in zip(i_idx[hit], j_idx[hit], s[hit], t[hit])
    ]


def _interp(values: np.ndarray, index: int, frac: float) -> np.ndarray:
    return values[index] + frac * (values[index + 1] - values[index])


def find_crossings(arcs: list[Arc], cfg: RealizationConfig) -> list[Crossing]:
    """All centerline intersections between arcs of different pages, away from the spine band"""
    found = []
    for a in range(len(arcs)):
        for b in range(a + 1, len(arcs)):
            first, second = arcs[a], arcs[b]
            if first.subspace == second.subspace or first.half != second.half:
                continue
            for i, j, s, t in segment_intersections(first.points, second.points):
                point = _interp(first.points, i, s)
                if abs(point[1]) <= cfg.kappa:
                    continue
                vel = _interp(first.velocities, i, s)
                vel_tilde = _interp(second.velocities, j, t)
                found.append(
                    Crossing(
                        a,
                        b,
                        (float(point[0]), float(point[1])),
                        i if s < 0.5 else i + 1,
                        j if t < 0.5 else j + 1,
                        float(vel.sum()),
                        float(vel_tilde.sum()),
                    )
                )
    return found


def adjust_crossings(arcs: list[Arc], cfg: RealizationConfig) -> list[Arc]:
    """Make the B-flow of every pair of crossing arcs agree in sign"""
    arcs = list(arcs)
    for round_ in range(MAX_ROUNDS):
        bad = [c for c in find_crossings(arcs, cfg) if not c.compatible]
        if not bad:
            if round_:
                _LOGGER.debug("Crossings resolved after %d adjustments", round_)
            return arcs
        crossing = bad[0]
        tilde = arcs[crossing.second]
        vel = tilde.velocities[crossing.index_second]
        _LOGGER.debug(
            "Incompatible crossing of %s and %s at %s",
            arcs[crossing.first].label,
            tilde.label,
            crossing.point,
        )
        adjusted = None
        if vel[0] * vel[1] < 0:
            adjusted = _rescale_horizontal_speed(tilde, crossing, cfg)
        if adjusted is None:
            adjusted = _reroute(tilde, arcs[crossing.first], crossing, cfg)
        arcs[crossing.second] = adjusted

    bad = [c for c in find_crossings(arcs, cfg) if not c.compatible]
    if not bad:
        return arcs
    raise SynthesisException(
        "could not make crossing arcs compatible",
        sorted({arcs[c.first].label for c in bad} | {arcs[c.second].label for c in bad}),
    )


def _speed_window(arc: Arc, index: int, cfg: RealizationConfig) -> tuple[int, int]:
    """Largest symmetric window around index where both velocity signs are constant"""
    vel = arc.velocities
    sign_u, sign_v = np.sign(vel[index])
    floor = MIN_SPEED_RATIO * cfg.tube_speed
    limit = int(4 * cfg.tube_radius / (cfg.tube_speed * (arc.times[1] - arc.times[0])))
    reach = 0
    while reach < limit:
        lo, hi = index - reach - 1, index + reach + 1
        if lo < 0 or hi >= len(vel):
            break
        if any(
            np.sign(vel[n, 0]) != sign_u
            or np.sign(vel[n, 1]) != sign_v
            or abs(vel[n, 0]) < floor
            for n in (lo, hi)
        ):
            break
        reach += 1
    return index - reach, index + reach


def _rescale_horizontal_speed(
    arc: Arc, crossing: Crossing, cfg: RealizationConfig
) -> Arc | None:
    """Scale u' near the crossing so u' + v' takes the other arc's sign"""
    index = crossing.index_second
    lo, hi = _speed_window(arc, index, cfg)
    if hi - lo < 8:
        return None
    u_dot, v_dot = arc.velocities[index]
    if np.sign(u_dot) == np.sign(crossing.w):
        target = 2.0 * abs(v_dot / u_dot)
    else:
        target = 0.5 * abs(v_dot / u_dot)

    t = arc.times[lo : hi + 1]
    centre = arc.times[index]
    half = min(centre - t[0], t[-1] - centre)
    distance = np.abs(t - centre)
    narrow = bump(distance, 0.25 * half, 0.5 * half)
    wide = bump(distance, 0.6 * half, half)
    speed = arc.velocities[lo : hi + 1, 0]
    ratio = trapezoid(speed * narrow, t) / trapezoid(speed * wide, t)
    if abs(1 - ratio) < 1e-6:
        return None
    gain = (target - 1.0) / (1.0 - ratio)
    factor = 1.0 + gain * (narrow - ratio * wide)
    if factor.min() < MIN_SPEED_RATIO:
        return None

    new_speed = factor * speed
    u = arc.points[lo, 0] + cumulative_trapezoid(new_speed, t, initial=0.0)
    # Remove the quadrature drift so the window end stays put
    drift = u[-1] - arc.points[hi, 0]
    u -= drift * (t - t[0]) / (t[-1] - t[0])

    points = arc.points.copy()
    velocities = arc.velocities.copy()
    points[lo : hi + 1, 0] = u
    velocities[lo : hi + 1, 0] = new_speed
    _LOGGER.debug("Rescaled horizontal speed of %s by %.3f", arc.label, target)
    return arc.with_samples(arc.times.copy(), points, velocities)


def _reroute(arc: Arc, other: Arc, crossing: Crossing, cfg: RealizationConfig) -> Arc:
    """
    Replace the passage through the other arc's tube by a Z: back along the
    other arc's flow, across it with the flow, and back again.
    """
    index = crossing.index_second
    inside = cKDTree(other.points).query(arc.points)[0] < 1.5 * cfg.tube_radius
    lo = hi = index
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    while hi < len(inside) - 1 and inside[hi + 1]:
        hi += 1
    pad = max(4, (hi - lo) // 2)
    if lo - 2 * pad < 0 or hi + 2 * pad >= len(arc.times):
        raise SynthesisException(
            "crossing too close to an arc end to reroute", [arc.label, other.label]
        )
    flow = other.velocities[crossing.index_first]
    flow = flow / np.linalg.norm(flow)
    if abs(flow.sum()) < 1e-9:
        raise SynthesisException(
            "other arc has no B-flow at the crossing", [arc.label, other.label]
        )
    entry, leave = arc.points[lo], arc.points[hi]
    across = leave - entry
    # Long enough that the crossing leg takes the sign of the other arc's u' + v'
    shift = (abs(across.sum()) + np.linalg.norm(across)) / (2 * abs(flow.sum()))
    waypoints = np.array(
        [
            arc.points[lo - 2 * pad],
            arc.points[lo - pad],
            entry,
            entry - shift * flow,
            leave + shift * flow,
            leave,
            arc.points[hi + pad],
            arc.points[hi + 2 * pad],
        ]
    )
    step = arc.times[1] - arc.times[0]
    corner = 0.2 * min(shift, np.linalg.norm(across + 2 * shift * flow))
    dense = rounded_polyline(waypoints, corner, step * cfg.tube_speed / 4)
    _, new_points, _ = resample(dense, step * cfg.tube_speed, cfg.tube_speed)

    start, stop = lo - 2 * pad, hi + 2 * pad
    points = np.concatenate([arc.points[:start], new_points, arc.points[stop + 1 :]])
    times = np.arange(len(points)) * step
    velocities = np.gradient(points, times, axis=0)
    velocities[:start] = arc.velocities[:start]
    velocities[start + len(new_points) :] = arc.velocities[stop + 1 :]
    _LOGGER.debug("Rerouted %s around %s", arc.label, other.label)
    return arc.with_samples(times, points, velocities)
