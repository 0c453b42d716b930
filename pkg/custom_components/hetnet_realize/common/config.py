"""Realization and pipeline configuration"""
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
import logging
from typing import Any

import voluptuous as vol

from ..const import ARRIVAL_TOL
from ..const import ATTRACTION
from ..const import BASIN_RAYS
from ..const import BUMP_INNER_FRACTION
from ..const import DEFAULT_ARRIVAL_TOL
from ..const import DEFAULT_ATTRACTION
from ..const import DEFAULT_BASIN_RAYS
from ..const import DEFAULT_BUMP_INNER_FRACTION
from ..const import DEFAULT_EPS
from ..const import DEFAULT_KAPPA
from ..const import DEFAULT_LANE_BASE
from ..const import DEFAULT_LANE_STEP
from ..const import DEFAULT_MAX_PAGES
from ..const import DEFAULT_PAIR_ALPHAS
from ..const import DEFAULT_PERTURB_TERMS
from ..const import DEFAULT_RESIDENCE
from ..const import DEFAULT_SEED
from ..const import DEFAULT_SPACING
from ..const import DEFAULT_START_OFFSET
from ..const import DEFAULT_T_MAX
from ..const import DEFAULT_TUBE_RADIUS
from ..const import DEFAULT_TUBE_SPEED
from ..const import DEFAULT_UNRESOLVED_FRACTION
from ..const import DOUBLE_ARCS
from ..const import EPS
from ..const import KAPPA
from ..const import LANE_BASE
from ..const import LANE_STEP
from ..const import MODE_BOOK
from ..const import MODES
from ..const import PAIR_ALPHAS
from ..const import PERTURB_TERMS
from ..const import RESIDENCE
from ..const import RK_STEP
from ..const import SEED
from ..const import SOLVER_EXACT
from ..const import SOLVERS
from ..const import SPACING
from ..const import START_OFFSET
from ..const import T_MAX
from ..const import TUBE_OVERRIDE
from ..const import TUBE_RADIUS
from ..const import TUBE_SPEED
from ..const import UNRESOLVED_FRACTION

_LOGGER = logging.getLogger(__name__)

_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))


def _check_lengths(data: dict[str, Any]) -> dict[str, Any]:
    if not data[KAPPA] < data[EPS]:
        raise vol.Invalid("kappa must be smaller than eps", path=[KAPPA])
    if not data[EPS] < data[SPACING] / 4:
        raise vol.Invalid("eps must be smaller than spacing/4", path=[EPS])
    if not data[TUBE_RADIUS] < data[LANE_STEP] / 2:
        raise vol.Invalid("tube_radius must be smaller than lane_step/2", path=[TUBE_RADIUS])
    return data


def _pair(value: Any) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise vol.Invalid("expected two coefficients")
    return (float(value[0]), float(value[1]))


REALIZATION_SCHEMA = vol.Schema(
    vol.All(
        {
            vol.Optional(SPACING, default=DEFAULT_SPACING): _POSITIVE,
            vol.Optional(EPS, default=DEFAULT_EPS): _POSITIVE,
            vol.Optional(KAPPA, default=DEFAULT_KAPPA): _POSITIVE,
            vol.Optional(TUBE_RADIUS, default=DEFAULT_TUBE_RADIUS): _POSITIVE,
            vol.Optional(LANE_BASE, default=DEFAULT_LANE_BASE): _POSITIVE,
            vol.Optional(LANE_STEP, default=DEFAULT_LANE_STEP): _POSITIVE,
            vol.Optional(
                BUMP_INNER_FRACTION, default=DEFAULT_BUMP_INNER_FRACTION
            ): vol.All(vol.Coerce(float), vol.Range(min=0, max=1, max_included=False)),
            vol.Optional(SEED, default=DEFAULT_SEED): vol.Coerce(int),
            vol.Optional(ATTRACTION, default=DEFAULT_ATTRACTION): vol.All(
                vol.Coerce(float), vol.Range(min=0)
            ),
            vol.Optional(TUBE_SPEED, default=DEFAULT_TUBE_SPEED): _POSITIVE,
            vol.Optional(TUBE_OVERRIDE, default=True): bool,
            vol.Optional(DOUBLE_ARCS, default=True): bool,
            vol.Optional(PAIR_ALPHAS, default=DEFAULT_PAIR_ALPHAS): _pair,
            vol.Optional(RK_STEP, default=None): vol.Any(None, _POSITIVE),
            vol.Optional(T_MAX, default=DEFAULT_T_MAX): _POSITIVE,
            vol.Optional(ARRIVAL_TOL, default=DEFAULT_ARRIVAL_TOL): _POSITIVE,
            vol.Optional(RESIDENCE, default=DEFAULT_RESIDENCE): vol.All(
                vol.Coerce(float), vol.Range(min=0)
            ),
            vol.Optional(START_OFFSET, default=DEFAULT_START_OFFSET): _POSITIVE,
            vol.Optional(BASIN_RAYS, default=DEFAULT_BASIN_RAYS): vol.All(
                vol.Coerce(int), vol.Range(min=12)
            ),
            vol.Optional(
                UNRESOLVED_FRACTION, default=DEFAULT_UNRESOLVED_FRACTION
            ): vol.All(vol.Coerce(float), vol.Range(min=0, max=1)),
            vol.Optional(PERTURB_TERMS, default=DEFAULT_PERTURB_TERMS): vol.All(
                vol.Coerce(int), vol.Range(min=0)
            ),
        },
        _check_lengths,
    )
)


@dataclass(frozen=True)
class RealizationConfig:
    """Geometric and numerical parameters of a realization"""

    spacing: float = DEFAULT_SPACING
    eps: float = DEFAULT_EPS
    kappa: float = DEFAULT_KAPPA
    tube_radius: float = DEFAULT_TUBE_RADIUS
    lane_base: float = DEFAULT_LANE_BASE
    lane_step: float = DEFAULT_LANE_STEP
    bump_inner_fraction: float = DEFAULT_BUMP_INNER_FRACTION
    seed: int = DEFAULT_SEED
    attraction: float = DEFAULT_ATTRACTION
    tube_speed: float = DEFAULT_TUBE_SPEED
    tube_override: bool = True
    double_arcs: bool = True
    pair_alphas: tuple[float, float] = DEFAULT_PAIR_ALPHAS
    rk_step: float | None = None
    t_max: float = DEFAULT_T_MAX
    arrival_tol: float = DEFAULT_ARRIVAL_TOL
    residence: float = DEFAULT_RESIDENCE
    start_offset: float = DEFAULT_START_OFFSET
    basin_rays: int = DEFAULT_BASIN_RAYS
    unresolved_fraction: float = DEFAULT_UNRESOLVED_FRACTION
    perturb_terms: int = DEFAULT_PERTURB_TERMS

    @staticmethod
    def from_dict(data: dict[str, Any] | None = None) -> "RealizationConfig":
        """Validate a (possibly partial) dict of overrides and build a config"""
        validated = REALIZATION_SCHEMA(dict(data or {}))
        _LOGGER.debug("Realization config: %s", validated)
        return RealizationConfig(**validated)

    def with_overrides(self, **overrides: Any) -> "RealizationConfig":
        data = self.as_dict()
        data.update(overrides)
        return RealizationConfig.from_dict(data)

    def as_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data[PAIR_ALPHAS] = list(self.pair_alphas)
        return data

    @property
    def step(self) -> float:
        """Integration step, defaulting to a fixed fraction of the spacing"""
        return self.rk_step if self.rk_step is not None else 1e-3 * self.spacing

    @property
    def eps_inner(self) -> float:
        return self.eps * self.bump_inner_fraction * 2

    @property
    def tube_inner(self) -> float:
        return self.tube_radius * self.bump_inner_fraction


PIPELINE_SCHEMA = vol.Schema(
    {
        vol.Required("input"): str,
        vol.Optional("mode", default=MODE_BOOK): vol.In(MODES),
        vol.Optional("solver", default=SOLVER_EXACT): vol.In(SOLVERS),
        vol.Optional("out", default="out"): str,
        vol.Optional("seed", default=DEFAULT_SEED): vol.Coerce(int),
        vol.Optional("pages_max", default=DEFAULT_MAX_PAGES): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional("perturb", default=0.0): vol.All(vol.Coerce(float), vol.Range(min=0)),
        vol.Optional("trials", default=0): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional("embedding", default=None): vol.Any(None, str),
        vol.Optional("allow_weak", default=False): bool,
        vol.Optional("realization", default=dict): dict,
    }
)


@dataclass(frozen=True)
class PipelineConfig:
    """Options of a single CLI pipeline run"""

    input: str
    mode: str = MODE_BOOK
    solver: str = SOLVER_EXACT
    out: str = "out"
    seed: int = DEFAULT_SEED
    pages_max: int = DEFAULT_MAX_PAGES
    perturb: float = 0.0
    trials: int = 0
    embedding: str | None = None
    allow_weak: bool = False
    realization: RealizationConfig = field(default_factory=RealizationConfig)

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "PipelineConfig":
        validated = PIPELINE_SCHEMA(dict(data))
        overrides = dict(validated.pop("realization"))
        overrides.setdefault(SEED, validated["seed"])
        return PipelineConfig(
            realization=RealizationConfig.from_dict(overrides), **validated
        )
