"""Embedded connection arcs in page (2D) and pair (3D) coordinates"""
from dataclasses import dataclass
from dataclasses import replace
import logging
import math
from typing import Any

import numpy as np

from ..book_embed import EdgePlacement
from ..ccn import SubspaceId
from ..common.config import RealizationConfig
from ..common.exceptions import SynthesisException

_LOGGER = logging.getLogger(__name__)

# Unit vectors spanning the plane transverse to the diagonal of (x_0, x_a, x_b)
E_A = np.array([2.0, -1.0, -1.0]) / math.sqrt(6.0)
E_B = np.array([0.0, 1.0, -1.0]) / math.sqrt(2.0)
# Columns map (u, a, b) to (x_0, x_a, x_b)
PAIR_BASIS = np.column_stack([np.ones(3), E_A, E_B])

SECTOR_WIDTH = math.pi / 3
MIN_ANGLE_GAP = math.radians(1.0)


@dataclass(frozen=True, eq=False)
class Arc:
    """
    A connection drawn as a sampled curve.

    2D arcs live in page coordinates (u, v); 3D arcs in (u, a, b) with u along
    the diagonal and (a, b) transverse. `radii` is the tube radius profile.
    """

    edge: tuple[int, int]
    subspace: SubspaceId
    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    radii: np.ndarray
    half: int = 0
    angle: float | None = None
    face: tuple[float, float] | None = None
    lane: int = 0
    doubled: bool = False

    @property
    def source(self) -> int:
        return self.edge[0]

    @property
    def target(self) -> int:
        return self.edge[1]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def label(self) -> str:
        where = f"{self.subspace}"
        if self.dim == 2:
            where += "+" if self.half > 0 else "-"
        else:
            where += f"@{math.degrees(self.angle):.0f}"
        return f"{self.edge[0]}->{self.edge[1]} {where}"

    def pair_points(self) -> np.ndarray:
        """Cell coordinates (x_0, x_a, x_b) of a 3D arc"""
        assert self.dim == 3
        return self.points @ PAIR_BASIS.T

    def pair_velocities(self) -> np.ndarray:
        assert self.dim == 3
        return self.velocities @ PAIR_BASIS.T

    def with_samples(
        self, times: np.ndarray, points: np.ndarray, velocities: np.ndarray
    ) -> "Arc":
        radii = np.interp(
            np.linspace(0, 1, len(times)), np.linspace(0, 1, len(self.times)), self.radii
        )
        return replace(
            self, times=times, points=points, velocities=velocities, radii=radii
        )

    def as_dict(self) -> dict[str, Any]:
        """Samples and tube radius profile"""
        return {
            "subspace": str(self.subspace),
            "indices": list(self.subspace.indices),
            "half": int(self.half),
            "lane": int(self.lane),
            "doubled": bool(self.doubled),
            "angle": None if self.angle is None else float(self.angle),
            "face": None if self.face is None else [float(f) for f in self.face],
            "times": self.times.tolist(),
            "points": self.points.tolist(),
            "velocities": self.velocities.tolist(),
            "radii": self.radii.tolist(),
        }

    @staticmethod
    def from_dict(edge: tuple[int, int], data: dict[str, Any]) -> "Arc":
        indices = data["indices"]
        if len(indices) == 1:
            subspace = SubspaceId.two_d(indices[0])
        else:
            subspace = SubspaceId.three_d(indices[0], indices[1])
        return Arc(
            edge,
            subspace,
            np.asarray(data["times"], dtype=float),
            np.asarray(data["points"], dtype=float),
            np.asarray(data["velocities"], dtype=float),
            np.asarray(data["radii"], dtype=float),
            half=data["half"],
            angle=data["angle"],
            face=None if data["face"] is None else tuple(data["face"]),
            lane=data["lane"],
            doubled=data["doubled"],
        )


def _fillet(corner: np.ndarray, start: np.ndarray, end: np.ndarray, count: int) -> np.ndarray:
    """Cubic Bezier from start to end pulled towards the corner"""
    c1 = start + 2.0 / 3.0 * (corner - start)
    c2 = end + 2.0 / 3.0 * (corner - end)
    s = np.linspace(0.0, 1.0, count)[:, None]
    return (
        (1 - s) ** 3 * start
        + 3 * (1 - s) ** 2 * s * c1
        + 3 * (1 - s) * s**2 * c2
        + s**3 * end
    )


def rounded_polyline(waypoints: np.ndarray, corner_radius: float, fine: float) -> np.ndarray:
    """Dense points along the waypoints with every corner rounded"""
    pts = np.asarray(waypoints, dtype=float)
    pieces = [pts[:1]]
    cursor = pts[0]
    for i in range(1, len(pts) - 1):
        before = pts[i] - pts[i - 1]
        after = pts[i + 1] - pts[i]
        lb, la = np.linalg.norm(before), np.linalg.norm(after)
        if lb == 0 or la == 0:
            continue
        db, da = before / lb, after / la
        if np.linalg.norm(db - da) < 1e-12:
            continue
        r = min(corner_radius, 0.5 * lb, 0.5 * la)
        start, end = pts[i] - r * db, pts[i] + r * da
        pieces.append(_line(cursor, start, fine)[1:])
        count = max(8, int(math.ceil(2 * r / fine)))
        pieces.append(_fillet(pts[i], start, end, count)[1:])
        cursor = end
    pieces.append(_line(cursor, pts[-1], fine)[1:])
    dense = np.concatenate(pieces)
    keep = np.concatenate([[True], np.linalg.norm(np.diff(dense, axis=0), axis=1) > 1e-12])
    return dense[keep]


def _line(a: np.ndarray, b: np.ndarray, fine: float) -> np.ndarray:
    count = max(2, int(math.ceil(np.linalg.norm(b - a) / fine)) + 1)
    s = np.linspace(0.0, 1.0, count)[:, None]
    return a + s * (b - a)


def resample(dense: np.ndarray, step: float, speed: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform arc-length samples at constant speed: times, points, velocities"""
    lengths = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    count = max(3, int(math.ceil(s[-1] / step)) + 1)
    grid = np.linspace(0.0, s[-1], count)
    points = np.column_stack([np.interp(grid, s, dense[:, d]) for d in range(dense.shape[1])])
    times = grid / speed
    velocities = np.gradient(points, times, axis=0)
    return times, points, velocities


def sample_path(
    waypoints: np.ndarray, cfg: RealizationConfig, corner_radius: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    step = cfg.tube_radius / 4
    dense = rounded_polyline(waypoints, corner_radius, step / 4)
    return resample(dense, step, cfg.tube_speed)


def corner_radius_2d(cfg: RealizationConfig) -> float:
    return min(cfg.lane_step / 2, 0.1 * cfg.spacing)


def lane_height(lane: int, cfg: RealizationConfig) -> float:
    return cfg.lane_base + lane * cfg.lane_step


def arc2d_waypoints(
    rho_s: float,
    rho_t: float,
    half: int,
    lane: int,
    cfg: RealizationConfig,
    slope: float = 0.0,
    rise: float | None = None,
    offset: float = 0.0,
) -> np.ndarray:
    """Leave along the unstable line, climb to the lane, run, descend onto the target"""
    h = half
    rise = 3 * cfg.kappa if rise is None else rise
    height = lane_height(lane, cfg)
    assert rise < height
    p0 = (rho_s + slope * h * cfg.kappa, h * cfg.kappa)
    p1 = (rho_s + slope * h * rise, h * rise)
    p2 = (p1[0], h * height)
    p3 = (rho_t + offset, h * height)
    p4 = (rho_t + offset, h * cfg.kappa)
    return np.array([p0, p1, p2, p3, p4])


def build_arc2d(
    edge: tuple[int, int],
    placement: EdgePlacement,
    lane: int,
    cfg: RealizationConfig,
    rho: list[float],
    slope: float = 0.0,
    rise: float | None = None,
    offset: float = 0.0,
    doubled: bool = False,
) -> Arc:
    """
    Arc of a connection on its page. `slope` is du/dv of the departure line,
    `rise` the height at which the arc leaves it and `offset` the arrival nudge
    relative to the target.
    """
    if lane < 0:
        raise SynthesisException("lane collision", [f"{edge[0]}->{edge[1]}"])
    waypoints = arc2d_waypoints(
        rho[edge[0]], rho[edge[1]], placement.half, lane, cfg, slope, rise, offset
    )
    times, points, velocities = sample_path(waypoints, cfg, corner_radius_2d(cfg))
    return Arc(
        edge=edge,
        subspace=SubspaceId.two_d(placement.page),
        times=times,
        points=points,
        velocities=velocities,
        radii=np.full(len(times), cfg.tube_radius),
        half=placement.half,
        lane=lane,
        doubled=doubled,
    )


def sector_angles(k: int) -> list[float]:
    """k angles strictly inside the six sectors cut by the coordinate planes"""
    per_sector: dict[int, int] = {}
    for i in range(k):
        sector = (i * 6) // k if k <= 6 else i % 6
        per_sector[sector] = per_sector.get(sector, 0) + 1
    angles = []
    for sector in sorted(per_sector):
        count = per_sector[sector]
        for r in range(count):
            angles.append(sector * SECTOR_WIDTH + SECTOR_WIDTH * (r + 1) / (count + 1))
    angles.sort()
    gaps = np.diff(angles + [angles[0] + 2 * math.pi]) if angles else []
    if len(angles) > 1 and min(gaps) < MIN_ANGLE_GAP:
        raise SynthesisException(f"no room for {k} arcs between the coordinate planes")
    return angles


def prism_faces(angles: list[float]) -> list[tuple[float, float]]:
    """(start, width) of the face around each sorted arc angle"""
    k = len(angles)
    faces = []
    for j, angle in enumerate(angles):
        prev = angles[j - 1] - (2 * math.pi if j == 0 else 0.0)
        nxt = angles[(j + 1) % k] + (2 * math.pi if j == k - 1 else 0.0)
        start = 0.5 * (prev + angle)
        faces.append((start % (2 * math.pi), 0.5 * (nxt - prev)))
    return faces


def build_arc3d(
    source: int,
    outgoing: list[tuple[int, int]],
    subspace: SubspaceId,
    cfg: RealizationConfig,
    rho: list[float],
) -> list[Arc]:
    """One radial-axial-radial arc per outgoing connection, each at its own angle"""
    k = len(outgoing)
    if k < 3:
        raise SynthesisException(f"node {source} needs at least three connections for 3D arcs")
    angles = sector_angles(k)
    faces = prism_faces(angles)
    ordered = sorted(outgoing, key=lambda e: (rho[e[1]], e[1]))
    arcs = []
    for j, (edge, angle, face) in enumerate(zip(ordered, angles, faces)):
        radius = lane_height(j, cfg)
        rho_s, rho_t = rho[source], rho[edge[1]]
        waypoints = np.array(
            [[rho_s, cfg.kappa], [rho_s, radius], [rho_t, radius], [rho_t, cfg.kappa]]
        )
        times, ur, ur_vel = sample_path(waypoints, cfg, corner_radius_2d(cfg))
        direction = np.array([math.cos(angle), math.sin(angle)])
        points = np.column_stack([ur[:, 0], np.outer(ur[:, 1], direction)])
        velocities = np.column_stack([ur_vel[:, 0], np.outer(ur_vel[:, 1], direction)])
        arcs.append(
            Arc(
                edge=edge,
                subspace=subspace,
                times=times,
                points=points,
                velocities=velocities,
                radii=_funnel_profile(times, ur[:, 1], cfg),
                angle=angle,
                face=face,
                lane=j,
            )
        )
        _LOGGER.debug(
            "3D arc %s at %.1f degrees, radius %.3f", edge, math.degrees(angle), radius
        )
    return arcs


def _funnel_profile(times: np.ndarray, radial: np.ndarray, cfg: RealizationConfig) -> np.ndarray:
    """Wide capture radius until the arc is 2*eps out, then taper to the tube radius"""
    s = times * cfg.tube_speed
    beyond = np.flatnonzero(radial >= 2 * cfg.eps)
    s_wide = s[beyond[0]] if len(beyond) else s[-1]
    frac = np.clip((s - s_wide) / cfg.eps, 0.0, 1.0)
    return 2 * cfg.eps + (cfg.tube_radius - 2 * cfg.eps) * frac
