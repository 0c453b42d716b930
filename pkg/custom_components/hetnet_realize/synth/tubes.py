"""Flow tubes around lifted arcs"""
from dataclasses import dataclass
from dataclasses import field
import itertools
import logging
import math

import numpy as np
from scipy.spatial import cKDTree

from ..ccn import SubspaceKind
from ..common.config import RealizationConfig
from ..common.exceptions import SynthesisException
from .arcs import E_A
from .arcs import E_B
from .arcs import Arc
from .bump import bump
from .bump import ramp
from .planes import LiftPlane

_LOGGER = logging.getLogger(__name__)

KIND_A = "A"
KIND_B = "B"
KIND_C = "C"


@dataclass(eq=False)
class Tube:
    """Neighbourhood of a centerline in one lift plane, imposing the arc's velocity"""

    plane: LiftPlane
    kind: str
    label: str
    edge: tuple[int, int]
    centers: np.ndarray
    velocities: np.ndarray
    radii: np.ndarray
    face: tuple[float, float] | None = None
    _tree: cKDTree = field(init=False, repr=False)
    _lo: np.ndarray = field(init=False, repr=False)
    _hi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._tree = cKDTree(self.centers)
        reach = float(self.radii.max())
        self._lo = self.centers.min(axis=0) - reach
        self._hi = self.centers.max(axis=0) + reach

    @property
    def is_3d(self) -> bool:
        return self.plane.dim == 3

    def _clip(self, coords: np.ndarray, cfg: RealizationConfig) -> np.ndarray:
        if self.is_3d:
            lateral = np.linalg.norm(coords - coords.mean(axis=1, keepdims=True), axis=1)
        else:
            lateral = np.abs(coords[:, 1])
        return ramp(lateral, cfg.kappa, 2 * cfg.kappa)

    def _sector(self, coords: np.ndarray) -> np.ndarray:
        if self.face is None:
            return np.ones(len(coords))
        start, width = self.face
        angle = np.arctan2(coords @ E_B, coords @ E_A)
        offset = np.mod(angle - start, 2 * math.pi)
        margin = 0.1 * width
        return ramp(offset, 0.0, margin) * ramp(width - offset, 0.0, margin)

    def _project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Closest centerline point, interpolated velocity and radius, and distance"""
        _, nearest = self._tree.query(points)
        last = len(self.centers) - 1
        best = None
        for shift in (-1, 0):
            i = np.clip(nearest + shift, 0, last - 1)
            a, b = self.centers[i], self.centers[i + 1]
            seg = b - a
            s = np.einsum("ij,ij->i", points - a, seg) / np.einsum("ij,ij->i", seg, seg)
            s = np.clip(s, 0.0, 1.0)[:, None]
            proj = a + s * seg
            dist = np.linalg.norm(points - proj, axis=1)
            vel = self.velocities[i] + s * (self.velocities[i + 1] - self.velocities[i])
            rad = self.radii[i] + s[:, 0] * (self.radii[i + 1] - self.radii[i])
            if best is None:
                best = [proj, vel, rad, dist]
                continue
            closer = dist < best[3]
            best[0] = np.where(closer[:, None], proj, best[0])
            best[1] = np.where(closer[:, None], vel, best[1])
            best[2] = np.where(closer, rad, best[2])
            best[3] = np.where(closer, dist, best[3])
        return best[0], best[1], best[2], best[3]

    def contribution(
        self, coords: np.ndarray, residual: np.ndarray, cfg: RealizationConfig
    ) -> tuple[np.ndarray, np.ndarray]:
        """Weight in [0, 1] and imposed value of f for every decoded row"""
        weight = np.zeros(len(coords))
        value = np.zeros(len(coords))
        candidates = (
            np.all((coords >= self._lo) & (coords <= self._hi), axis=1)
            & (residual < cfg.tube_radius)
        )
        idx = np.flatnonzero(candidates)
        if not len(idx):
            return weight, value
        points = coords[idx]
        proj, vel, rad, dist = self._project(points)
        w = (
            bump(dist, rad * cfg.bump_inner_fraction, rad)
            * bump(residual[idx], cfg.tube_inner, cfg.tube_radius)
            * self._clip(points, cfg)
            * self._sector(points)
        )
        flow = vel + cfg.attraction * (proj - points)
        weight[idx] = w
        value[idx] = flow @ self.plane.output
        return weight, value


def lift_and_tube(arc: Arc, arity: int, cfg: RealizationConfig) -> list[Tube]:
    """Tubes A and B for a 2D arc, A, B and C for a 3D arc"""
    if arc.subspace.kind == SubspaceKind.TWO_D:
        j = arc.subspace.indices[0]
        planes = [(KIND_A, LiftPlane.page_a(arity, j)), (KIND_B, LiftPlane.page_b(arity))]
        centers, velocities = arc.points, arc.velocities
    elif arc.subspace.kind == SubspaceKind.THREE_D:
        a, b = arc.subspace.indices
        planes = list(zip((KIND_A, KIND_B, KIND_C), LiftPlane.pair_planes(arity, a, b)))
        centers, velocities = arc.pair_points(), arc.pair_velocities()
    else:
        raise SynthesisException("arcs live in 2D or 3D synchrony subspaces", [arc.label])
    return [
        Tube(plane, kind, arc.label, arc.edge, centers, velocities, arc.radii, arc.face)
        for kind, plane in planes
    ]


def check_disjoint(tubes: list[Tube], cfg: RealizationConfig) -> None:
    """Primary tubes of different arcs in one plane must stay apart outside the spine band"""
    primary = [t for t in tubes if t.kind == KIND_A]
    for first, second in itertools.combinations(primary, 2):
        if first.plane.key != second.plane.key or first.label == second.label:
            continue
        pa = _outside_band(first, cfg)
        pb = _outside_band(second, cfg)
        if not len(pa) or not len(pb):
            continue
        gap = cKDTree(pa).query(pb)[0].min()
        if gap < cfg.tube_radius:
            raise SynthesisException(
                f"tubes overlap (gap {gap:.4f}); increase lane_step or spacing",
                [first.label, second.label],
            )


def _outside_band(tube: Tube, cfg: RealizationConfig) -> np.ndarray:
    centers = tube.centers
    if tube.is_3d:
        lateral = np.linalg.norm(centers - centers.mean(axis=1, keepdims=True), axis=1)
    else:
        lateral = np.abs(centers[:, 1])
    return centers[lateral > 2 * cfg.kappa]
