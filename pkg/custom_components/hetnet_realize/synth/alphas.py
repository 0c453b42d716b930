"""Coefficients of the local linear terms at the equilibria"""
from dataclasses import dataclass
import logging

import numpy as np

from ..book_embed import BookEmbedding
from ..ccn import SubspaceId
from ..ccn import SubspaceKind
from ..common.exceptions import SynthesisException
from ..dynamics import eig_3d_pair
from ..dynamics import eig_full_sync_pn
from ..graph_core import DegreeProfile
from ..graph_core import HetNet

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphaTable:
    """rows[i][l] is the coefficient of (y_l - rho_i) at node i"""

    rows: tuple[tuple[float, ...], ...]

    def row(self, node: int) -> tuple[float, ...]:
        return self.rows[node]

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def departure_slope(self, node: int, page: int) -> float:
        """du/dv of the unstable direction of node in the 2D subspace of page"""
        row = self.rows[node]
        total = sum(row)
        unstable = row[0] - row[page]
        assert unstable > 0, f"node {node} is not a saddle in page {page}"
        return row[page] / (unstable - total)


def choose_alphas_bookembed(net: HetNet, emb: BookEmbedding) -> AlphaTable:
    """-1 for the own cell, -2k on pages with an outgoing edge, +1 otherwise"""
    k = emb.pages
    rows = []
    for node in range(net.num_nodes):
        out_pages = {emb.placement(net, e).page for e in net.out_edges(node)}
        if not out_pages:
            raise SynthesisException(
                f"node {net.nodes[node]} has no outgoing connection"
            )
        row = [-1.0] + [-2.0 * k if j in out_pages else 1.0 for j in range(1, k + 1)]
        spectrum = eig_full_sync_pn(row, k)
        assert spectrum[0] < 0
        for j in range(1, k + 1):
            assert (spectrum[j] > 0) == (j in out_pages)
        rows.append(tuple(row))
    return AlphaTable(tuple(rows))


def choose_alphas_q(
    profile: DegreeProfile,
    assignment: dict[int, SubspaceId],
    pair: tuple[float, float] = (-2.0, -2.0),
) -> AlphaTable:
    """-1 for the own cell, -2 on the own page, the pair coefficients on the own pair"""
    count = len(profile.out_degree)
    subspaces = [assignment[i] for i in range(count)]
    types = max(max(s.indices) for s in subspaces)
    rows = []
    for node, own in enumerate(subspaces):
        row = [-1.0] + [0.0] * types
        if own.kind == SubspaceKind.TWO_D:
            row[own.indices[0]] = -2.0
        else:
            a, b = own.indices
            row[a], row[b] = pair
        _check_q_row(node, row, own, subspaces)
        rows.append(tuple(row))
    return AlphaTable(tuple(rows))


def _check_q_row(
    node: int, row: list[float], own: SubspaceId, subspaces: list[SubspaceId]
) -> None:
    if sum(row) >= 0:
        raise SynthesisException(f"node {node}: full-sync direction is not stable")
    for subspace in set(subspaces):
        is_own = subspace == own
        if subspace.kind == SubspaceKind.TWO_D:
            j = subspace.indices[0]
            real = [row[0] - row[j]]
        else:
            a, b = subspace.indices
            b_complement = sum(row[1:]) - row[a] - row[b]
            real = list(eig_3d_pair(row[0], b_complement, (row[a], row[b])).lateral_real)
        if is_own and not all(r > 0 for r in real):
            raise SynthesisException(f"node {node}: own subspace {subspace} is not unstable")
        if not is_own and not all(r < 0 for r in real):
            raise SynthesisException(f"node {node}: subspace {subspace} is not stable")
    _LOGGER.debug("Coefficients for node %d: %s", node, row)
