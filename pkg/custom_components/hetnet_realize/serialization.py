"""JSON and CSV artifacts of the pipeline"""
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol

from .book_embed import BookEmbedding
from .ccn import CCN
from .common.config import RealizationConfig
from .common.exceptions import HetNetValidationException
from .const import GRADES
from .const import MODE_BOOK
from .const import MODES
from .dynamics import Trajectory
from .graph_core import HetNet
from .graph_core import parse_hetnet
from .synth.alphas import AlphaTable
from .synth.arcs import Arc
from .synth.field import REGION_BALL
from .synth.field import REGION_CYLINDER
from .synth.field import BumpTerm
from .synth.field import assemble
from .synth.realize import Realization
from .synth.realize import assign_subspaces
from .verify import RealizationReport

_LOGGER = logging.getLogger(__name__)

ARC_SCHEMA = vol.Schema(
    {
        vol.Required("source"): str,
        vol.Required("target"): str,
        vol.Required("indices"): vol.All([int], vol.Length(min=1, max=2)),
        vol.Required("half"): int,
        vol.Required("lane"): int,
        vol.Required("doubled"): bool,
        vol.Required("angle"): vol.Any(None, vol.Coerce(float)),
        vol.Required("face"): vol.Any(None, [vol.Coerce(float)]),
        vol.Required("times"): list,
        vol.Required("points"): list,
        vol.Required("velocities"): list,
        vol.Required("radii"): list,
    },
    extra=vol.ALLOW_EXTRA,
)

DUMP_SCHEMA = vol.Schema(
    {
        vol.Required("mode"): vol.In(MODES),
        vol.Required("network"): dict,
        vol.Required("config"): dict,
        vol.Required("ccn"): dict,
        vol.Required("rho"): dict,
        vol.Required("alphas"): dict,
        vol.Required("arcs"): [ARC_SCHEMA],
        vol.Required("field"): dict,
        vol.Optional("embedding"): dict,
        vol.Optional("allow_weak", default=False): bool,
    },
    extra=vol.ALLOW_EXTRA,
)

REPORT_SCHEMA = vol.Schema(
    {
        vol.Required("mode"): vol.In(MODES),
        vol.Required("grade"): vol.In(GRADES),
        vol.Required("equilibria"): list,
        vol.Required("connections"): list,
        vol.Required("directions"): list,
        vol.Required("basins"): list,
        vol.Required("robustness"): vol.Any(None, dict),
    },
    extra=vol.ALLOW_EXTRA,
)


def to_json(data: Any) -> str:
    """Deterministic JSON; floats are written with repr and reload bit-identically"""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(data), encoding="utf-8")
    _LOGGER.debug("Wrote %s", path)
    return path


def _read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as ex:
        raise HetNetValidationException(f"invalid JSON in {path}", str(ex)) from ex


def load_network(path: Path, allow_weak: bool = False) -> HetNet:
    return parse_hetnet(Path(path).read_text(encoding="utf-8"), allow_weak=allow_weak)


def load_embedding(net: HetNet, path: Path) -> BookEmbedding:
    try:
        return BookEmbedding.from_dict(net, _read_json(path))
    except vol.Invalid as ex:
        raise HetNetValidationException("invalid embedding", str(ex)) from ex


def realization_dump(real: Realization, allow_weak: bool = False) -> dict[str, Any]:
    data = real.as_dict()
    data["allow_weak"] = allow_weak
    return data


def _arcs(net: HetNet, data: list[dict[str, Any]]) -> list[Arc]:
    return [Arc.from_dict((net.index(a["source"]), net.index(a["target"])), a) for a in data]


def _extras(field: dict[str, Any]) -> list[BumpTerm]:
    return [
        BumpTerm(np.asarray(t["center"], dtype=float), float(t["radius"]), float(t["amplitude"]))
        for t in field.get("perturbations", [])
    ]


def load_realization(path: Path) -> Realization:
    """Rebuild a realization from the arcs, tubes and coefficients stored in its dump"""
    try:
        data = DUMP_SCHEMA(_read_json(path))
    except vol.Invalid as ex:
        raise HetNetValidationException("invalid realization dump", str(ex)) from ex
    net = parse_hetnet(json.dumps(data["network"]), allow_weak=data["allow_weak"])
    cfg = RealizationConfig.from_dict(data["config"])
    emb = None
    assignment = None
    if data["mode"] == MODE_BOOK:
        if "embedding" not in data:
            raise HetNetValidationException("book realization dump without embedding")
        emb = BookEmbedding.from_dict(net, data["embedding"]).with_spacing(cfg.spacing)
        region = REGION_BALL
    else:
        _, _, assignment = assign_subspaces(net)
        region = REGION_CYLINDER
    try:
        ccn = CCN.from_dict(data["ccn"])
        rho = tuple(float(data["rho"][label]) for label in net.nodes)
        alphas = AlphaTable(
            tuple(tuple(float(v) for v in data["alphas"][label]) for label in net.nodes)
        )
        arcs = _arcs(net, data["arcs"])
        extras = _extras(data["field"])
    except (KeyError, ValueError, vol.Invalid) as ex:
        raise HetNetValidationException("inconsistent realization dump", str(ex)) from ex
    field = assemble(ccn, alphas, list(rho), arcs, cfg, region)
    if extras:
        field = field.with_extras(extras)
    _LOGGER.debug("Loaded %d arcs from %s", len(arcs), path)
    return Realization(
        net,
        ccn,
        data["mode"],
        cfg,
        alphas,
        rho,
        tuple(arcs),
        field,
        embedding=emb,
        assignment=assignment,
    )


def load_report(path: Path) -> dict[str, Any]:
    try:
        return REPORT_SCHEMA(_read_json(path))
    except vol.Invalid as ex:
        raise HetNetValidationException("invalid report", str(ex)) from ex


def save_report(report: RealizationReport, path: Path) -> Path:
    return write_json(path, report.as_dict())


def write_trajectory_csv(traj: Trajectory, path: Path) -> Path:
    """Columns: time, then one per cell"""
    path.parent.mkdir(parents=True, exist_ok=True)
    cells = traj.states.shape[1]
    header = ",".join(["time"] + [f"x{c}" for c in range(cells)])
    np.savetxt(
        path,
        np.column_stack([traj.times, traj.states]),
        delimiter=",",
        header=header,
        comments="",
        fmt="%.17g",
    )
    return path
