"""End-to-end construction of a realization from a network"""
from dataclasses import dataclass
from dataclasses import replace
import logging
from typing import Any

from ..book_embed import HALVES
from ..book_embed import UPPER
from ..book_embed import BookEmbedding
from ..book_embed import EdgePlacement
from ..book_embed import arcs_cross
from ..book_embed import validate_embedding
from ..ccn import CCN
from ..ccn import SubspaceId
from ..ccn import SubspaceKind
from ..ccn import build_Pn
from ..ccn import build_Q
from ..common.config import RealizationConfig
from ..common.exceptions import HetNetValidationException
from ..const import MODE_ALMOST_COMPLETE
from ..const import MODE_BOOK
from ..graph_core import HetNet
from ..graph_core import degree_profile
from .alphas import AlphaTable
from .alphas import choose_alphas_bookembed
from .alphas import choose_alphas_q
from .arcs import Arc
from .arcs import build_arc3d
from .crossings import adjust_crossings
from .field import REGION_BALL
from .field import REGION_CYLINDER
from .field import SynthesizedField
from .field import assemble
from .layout import ArcRequest
from .layout import plan_arcs

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Realization:
    """A network together with the coupled cell system that realizes it"""

    net: HetNet
    ccn: CCN
    mode: str
    cfg: RealizationConfig
    alphas: AlphaTable
    rho: tuple[float, ...]
    arcs: tuple[Arc, ...]
    field: SynthesizedField
    embedding: BookEmbedding | None = None
    assignment: tuple[SubspaceId, ...] | None = None

    def primary_arc(self, edge: tuple[int, int]) -> Arc:
        """The arc drawn for the connection itself, not a doubled copy"""
        return next(a for a in self.arcs if a.edge == edge and not a.doubled)

    def three_d_nodes(self) -> list[int]:
        if self.assignment is None:
            return []
        return [i for i, s in enumerate(self.assignment) if s.kind == SubspaceKind.THREE_D]

    def without_edge(self, edge: tuple[int, int]) -> "Realization":
        """
        Same realization with the tubes of one connection removed. The designed
        arcs stay, so the connection can still be launched and shown to fail.
        """
        return replace(self, field=self.field.without_edge(edge))

    def as_dict(self) -> dict[str, Any]:
        data = {
            "mode": self.mode,
            "network": self.net.as_dict(),
            "ccn": self.ccn.as_dict(),
            "config": self.cfg.as_dict(),
            "rho": {self.net.nodes[i]: r for i, r in enumerate(self.rho)},
            "alphas": {self.net.nodes[i]: list(r) for i, r in enumerate(self.alphas.rows)},
            "arcs": [
                {
                    **a.as_dict(),
                    "edge": self.net.edge_label(a.edge),
                    "source": self.net.nodes[a.source],
                    "target": self.net.nodes[a.target],
                    "samples": len(a.times),
                    "duration": float(a.times[-1]),
                }
                for a in self.arcs
            ],
            "field": self.field.as_dict(),
        }
        if self.embedding is not None:
            data["embedding"] = self.embedding.as_dict(self.net)
        if self.assignment is not None:
            data["assignment"] = {
                self.net.nodes[i]: str(s) for i, s in enumerate(self.assignment)
            }
        return data


def _double(
    net: HetNet, emb: BookEmbedding, requests: list[ArcRequest]
) -> list[ArcRequest]:
    """Copy lone outgoing arcs onto the empty half of their page where nothing crosses them"""
    doubled = []
    for request in requests:
        src = request.edge[0]
        page = request.placement.page
        same_page = [
            e for e in net.out_edges(src) if emb.placement(net, e).page == page
        ]
        if len(same_page) != 1:
            continue
        other = EdgePlacement(page, -request.placement.half)
        blocked = any(
            emb.placement(net, e) == other and arcs_cross(emb.spine, request.edge, e)
            for e in net.edges
        )
        if blocked:
            _LOGGER.debug("Not doubling %s: it would cross on the other half", request.edge)
            continue
        doubled.append(replace(request, placement=other, doubled=True))
    return doubled


def realize_book(
    net: HetNet, emb: BookEmbedding, cfg: RealizationConfig | None = None
) -> Realization:
    """Realize any network with a book embedding in P_k, k the number of pages"""
    cfg = cfg or RealizationConfig()
    violations = validate_embedding(net, emb)
    if violations:
        raise HetNetValidationException(
            "embedding violates the placement rules", "; ".join(map(str, violations))
        )
    emb = emb.with_spacing(cfg.spacing)
    ccn = build_Pn(emb.pages)
    alphas = choose_alphas_bookembed(net, emb)
    rho = [emb.spine.rho(i) for i in range(net.num_nodes)]
    requests = []
    for edge in net.edges:
        placement = emb.placement(net, edge)
        slope = alphas.departure_slope(edge[0], placement.page)
        requests.append(ArcRequest(edge, placement, slope))
    if cfg.double_arcs:
        requests += _double(net, emb, requests)
    arcs = adjust_crossings(plan_arcs(requests, rho, cfg), cfg)
    field = assemble(ccn, alphas, rho, arcs, cfg, REGION_BALL)
    _LOGGER.info(
        "Realized %d connections in P_%d with %d arcs", len(net.edges), emb.pages, len(arcs)
    )
    return Realization(
        net, ccn, MODE_BOOK, cfg, alphas, tuple(rho), tuple(arcs), field, embedding=emb
    )


def assign_subspaces(net: HetNet) -> tuple[int, int, tuple[SubspaceId, ...]]:
    """Low out-degree nodes take the 2D subspaces in order, the rest the 3D pairs"""
    profile = degree_profile(net)
    n1 = profile.n1
    page = 0
    pair = 0
    assignment = []
    for degree in profile.out_degree:
        if degree <= 2:
            page += 1
            assignment.append(SubspaceId.two_d(page))
        else:
            a = n1 + 2 * pair + 1
            pair += 1
            assignment.append(SubspaceId.three_d(a, a + 1))
    return profile.n1, profile.n2, tuple(assignment)


def realize_almost_complete(
    net: HetNet, cfg: RealizationConfig | None = None
) -> Realization:
    """
    Realize any network in Q(n1, n2): one synchrony subspace per node, 2D for
    nodes with at most two outgoing connections and 3D for the others.
    """
    cfg = cfg or RealizationConfig()
    n1, n2, assignment = assign_subspaces(net)
    ccn = build_Q(n1, n2)
    profile = degree_profile(net)
    alphas = choose_alphas_q(profile, dict(enumerate(assignment)), cfg.pair_alphas)
    rho = [i * cfg.spacing for i in range(net.num_nodes)]
    requests = []
    arcs3d = []
    for node, own in enumerate(assignment):
        outgoing = sorted(net.out_edges(node), key=lambda e: rho[e[1]])
        if own.kind == SubspaceKind.THREE_D:
            arcs3d += build_arc3d(node, outgoing, own, cfg, rho)
            continue
        page = own.indices[0]
        slope = alphas.departure_slope(node, page)
        for edge, half in zip(outgoing, HALVES):
            requests.append(ArcRequest(edge, EdgePlacement(page, half), slope))
        if len(outgoing) == 1 and cfg.double_arcs:
            requests.append(
                ArcRequest(outgoing[0], EdgePlacement(page, -UPPER), slope, doubled=True)
            )
    arcs = adjust_crossings(plan_arcs(requests, rho, cfg), cfg) + arcs3d
    field = assemble(ccn, alphas, rho, arcs, cfg, REGION_CYLINDER)
    _LOGGER.info(
        "Realized %d connections in Q(%d, %d) with %d arcs",
        len(net.edges), n1, n2, len(arcs),
    )
    return Realization(
        net,
        ccn,
        MODE_ALMOST_COMPLETE,
        cfg,
        alphas,
        tuple(rho),
        tuple(arcs),
        field,
        assignment=assignment,
    )
