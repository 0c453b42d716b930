"""The synthesized scalar function f"""
from dataclasses import dataclass
import logging
import math
from typing import Any

import numpy as np

from ..ccn import CCN
from ..ccn import ScalarField
from ..common.config import RealizationConfig
from ..common.exceptions import SynthesisException
from .alphas import AlphaTable
from .arcs import Arc
from .bump import bump
from .bump import bump_max_slope
from .bump import smoothstep
from .planes import LiftPlane
from .tubes import Tube
from .tubes import check_disjoint
from .tubes import lift_and_tube

_LOGGER = logging.getLogger(__name__)

REGION_BALL = "ball"
REGION_CYLINDER = "cylinder"


@dataclass(frozen=True)
class BumpTerm:
    """amplitude * bump(|y - center|) added on top of f"""

    center: np.ndarray
    radius: float
    amplitude: float

    def __call__(self, args: np.ndarray) -> np.ndarray:
        dist = np.linalg.norm(args - self.center, axis=1)
        return self.amplitude * bump(dist, 0.5 * self.radius, self.radius)

    @property
    def c1_norm(self) -> float:
        """Bound on the value and the gradient of the term"""
        return abs(self.amplitude) * max(1.0, bump_max_slope(0.5 * self.radius, self.radius))

    def as_dict(self) -> dict[str, Any]:
        return {
            "center": self.center.tolist(),
            "radius": self.radius,
            "amplitude": self.amplitude,
        }


class SynthesizedField(ScalarField):
    """
    Linear terms near each equilibrium, blended with the flow imposed inside
    the lifted tubes. Where tubes of several planes reach a point, the plane
    the point lies closest to owns it.
    """

    def __init__(
        self,
        arity: int,
        alphas: AlphaTable,
        rho: list[float],
        cfg: RealizationConfig,
        tubes: list[Tube],
        region: str = REGION_BALL,
        extras: tuple[BumpTerm, ...] = (),
    ) -> None:
        self.arity = arity
        self.alphas = alphas
        self.rho = list(rho)
        self.cfg = cfg
        self.tubes = list(tubes)
        self.region = region
        self.extras = tuple(extras)
        self._coefficients = alphas.as_array()
        self._planes: dict[str, tuple[LiftPlane, list[Tube]]] = {}
        for tube in self.tubes:
            _, members = self._planes.setdefault(tube.plane.key, (tube.plane, []))
            members.append(tube)
        self._tau = cfg.kappa / 8

    def evaluate(self, args: np.ndarray) -> np.ndarray:
        args = np.asarray(args, dtype=float)
        shape = args.shape[:-1]
        rows = args.reshape(-1, self.arity)
        local = self._local(rows)
        weight, value = self._tube_flow(rows)
        if self.cfg.tube_override:
            result = (1.0 - np.minimum(weight, 1.0)) * local + value / np.maximum(1.0, weight)
        else:
            result = local + value
        for term in self.extras:
            result = result + term(rows)
        return result.reshape(shape)

    def region_weight(self, rows: np.ndarray, node: int) -> np.ndarray:
        """Bump of the local region of node, measured in RMS distance"""
        scale = math.sqrt(self.arity)
        mean = rows.mean(axis=1)
        lateral = np.linalg.norm(rows - mean[:, None], axis=1) / scale
        axial = np.abs(mean - self.rho[node])
        inner, outer = self.cfg.eps_inner, 2 * self.cfg.eps
        if self.region == REGION_CYLINDER:
            return bump(lateral, inner, outer) * bump(axial, inner, outer)
        return bump(np.hypot(lateral, axial), inner, outer)

    def _local(self, rows: np.ndarray) -> np.ndarray:
        result = np.zeros(len(rows))
        mean = rows.mean(axis=1)
        for node, rho in enumerate(self.rho):
            idx = np.flatnonzero(np.abs(mean - rho) < 2 * self.cfg.eps)
            if not len(idx):
                continue
            near = rows[idx]
            linear = (near - rho) @ self._coefficients[node]
            result[idx] = self.region_weight(near, node) * linear
        return result

    def _tube_flow(self, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        weight = np.zeros(len(rows))
        value = np.zeros(len(rows))
        if not self._planes:
            return weight, value
        decoded = {}
        effective = {}
        for key, (plane, _) in self._planes.items():
            coords, residual = plane.decode(rows)
            decoded[key] = (coords, residual)
            effective[key] = residual + (plane.dim - 2) * self._tau
        for key, (plane, members) in self._planes.items():
            coords, residual = decoded[key]
            if not np.any(residual < self.cfg.tube_radius):
                continue
            owner = np.ones(len(rows))
            for other, eff in effective.items():
                if other != key:
                    owner *= smoothstep((eff - effective[key]) / self._tau + 0.5)
            for tube in members:
                w, val = tube.contribution(coords, residual, self.cfg)
                w = w * owner
                weight += w
                value += w * val
        return weight, value

    def with_extras(self, extras: list[BumpTerm]) -> "SynthesizedField":
        return SynthesizedField(
            self.arity, self.alphas, self.rho, self.cfg, self.tubes, self.region,
            self.extras + tuple(extras),
        )

    def without_edge(self, edge: tuple[int, int]) -> "SynthesizedField":
        """The same field with every tube of one connection removed"""
        kept = [t for t in self.tubes if t.edge != edge]
        if len(kept) == len(self.tubes):
            raise SynthesisException(f"no tube realizes {edge}")
        return SynthesizedField(
            self.arity, self.alphas, self.rho, self.cfg, kept, self.region, self.extras
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "arity": self.arity,
            "region": self.region,
            "blend": "override" if self.cfg.tube_override else "additive",
            "alphas": [list(r) for r in self.alphas.rows],
            "rho": self.rho,
            "planes": sorted(self._planes),
            "tubes": [
                {"label": t.label, "plane": t.plane.key, "kind": t.kind, "samples": len(t.centers)}
                for t in self.tubes
            ],
            "perturbations": [term.as_dict() for term in self.extras],
        }


def assemble(
    ccn: CCN,
    alphas: AlphaTable,
    rho: list[float],
    arcs: list[Arc],
    cfg: RealizationConfig,
    region: str = REGION_BALL,
) -> SynthesizedField:
    """Lift every arc, check the tubes, and combine them with the local terms"""
    ordered = sorted(rho)
    if len(ordered) > 1 and min(np.diff(ordered)) <= 4 * cfg.eps:
        raise SynthesisException("local regions of the equilibria overlap; increase spacing")
    arity = 1 + ccn.num_types
    tubes = [tube for arc in arcs for tube in lift_and_tube(arc, arity, cfg)]
    check_disjoint(tubes, cfg)
    field = SynthesizedField(arity, alphas, rho, cfg, tubes, region)
    _LOGGER.info(
        "Synthesized f of arity %d: %d arcs, %d tubes on %d planes",
        arity, len(arcs), len(tubes), len(field.as_dict()["planes"]),
    )
    return field
