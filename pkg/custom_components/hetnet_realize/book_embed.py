"""Constrained book embeddings of heteroclinic networks"""
from dataclasses import dataclass
import itertools
import logging
import time
from typing import Any
from typing import NamedTuple

import voluptuous as vol

from .common.exceptions import HetNetValidationException
from .common.exceptions import SolverLimitException
from .const import DEFAULT_MAX_PAGES
from .const import DEFAULT_TIME_LIMIT
from .const import DNN_INCOMING
from .const import DNN_OUTGOING
from .const import MAX_SOLVER_EDGES
from .const import MAX_SOLVER_NODES
from .graph_core import HetNet
from .graph_core import dnn_network

_LOGGER = logging.getLogger(__name__)

UPPER = 1
LOWER = -1
HALVES = (UPPER, LOWER)

RULE_IN_OUT = "in/out exclusivity"
RULE_OUT_PER_HALF = "outgoing per half-plane"
RULE_CROSSING = "crossing"
RULE_UNPLACED = "unplaced edge"

Edge = tuple[int, int]


@dataclass(frozen=True)
class SpineOrder:
    """Order of the nodes along the spine; order[r] is the node at rank r"""

    order: tuple[int, ...]
    spacing: float = 1.0

    def __post_init__(self) -> None:
        assert sorted(self.order) == list(range(len(self.order)))

    def rank(self, node: int) -> int:
        return self.order.index(node)

    def rho(self, node: int) -> float:
        return self.rank(node) * self.spacing

    def reversed(self) -> "SpineOrder":
        return SpineOrder(tuple(reversed(self.order)), self.spacing)

    @staticmethod
    def identity(count: int, spacing: float = 1.0) -> "SpineOrder":
        return SpineOrder(tuple(range(count)), spacing)


@dataclass(frozen=True)
class EdgePlacement:
    page: int
    half: int


@dataclass(frozen=True)
class BookEmbedding:
    """Spine plus one (page, half) placement per network edge, in edge order"""

    spine: SpineOrder
    placements: tuple[EdgePlacement, ...]
    pages: int

    def placement(self, net: HetNet, edge: Edge) -> EdgePlacement:
        return self.placements[net.edges.index(edge)]

    def page_edges(self, net: HetNet, page: int) -> list[tuple[Edge, EdgePlacement]]:
        return [(e, p) for e, p in zip(net.edges, self.placements) if p.page == page]

    def with_spacing(self, spacing: float) -> "BookEmbedding":
        return BookEmbedding(
            SpineOrder(self.spine.order, spacing), self.placements, self.pages
        )

    def as_dict(self, net: HetNet) -> dict[str, Any]:
        return {
            "spine": [net.nodes[i] for i in self.spine.order],
            "pages": self.pages,
            "edges": [
                {
                    "src": net.nodes[src],
                    "dst": net.nodes[dst],
                    "page": p.page,
                    "half": p.half,
                }
                for (src, dst), p in zip(net.edges, self.placements)
            ],
        }

    @staticmethod
    def from_dict(net: HetNet, data: dict[str, Any]) -> "BookEmbedding":
        data = EMBEDDING_SCHEMA(data)
        try:
            order = tuple(net.index(label) for label in data["spine"])
            placed = {
                (net.index(e["src"]), net.index(e["dst"])): EdgePlacement(
                    e["page"], e["half"]
                )
                for e in data["edges"]
            }
            placements = tuple(placed[e] for e in net.edges)
        except (ValueError, KeyError) as ex:
            raise HetNetValidationException(
                "embedding does not match network", str(ex)
            ) from ex
        if sorted(order) != list(range(net.num_nodes)):
            raise HetNetValidationException("embedding spine is not a permutation")
        return BookEmbedding(SpineOrder(order), placements, data["pages"])


EMBEDDING_SCHEMA = vol.Schema(
    {
        vol.Required("spine"): [str],
        vol.Required("pages"): vol.All(int, vol.Range(min=1)),
        vol.Required("edges"): [
            {
                vol.Required("src"): str,
                vol.Required("dst"): str,
                vol.Required("page"): vol.All(int, vol.Range(min=1)),
                vol.Required("half"): vol.In(HALVES),
            }
        ],
    }
)


@dataclass(frozen=True)
class Violation:
    rule: str
    page: int
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} on page {self.page}: {self.detail}"


def arcs_cross(spine: SpineOrder, e1: Edge, e2: Edge) -> bool:
    """True iff the two arcs interleave along the spine"""
    if len({e1[0], e1[1], e2[0], e2[1]}) < 4:
        return False
    lo, hi = sorted((spine.rank(e1[0]), spine.rank(e1[1])))
    inside = sum(1 for node in e2 if lo < spine.rank(node) < hi)
    return inside == 1


class _BookState:
    """Incremental bookkeeping of the three embedding rules"""

    def __init__(self, spine: SpineOrder) -> None:
        self._rank = {node: r for r, node in enumerate(spine.order)}
        self._roles: dict[tuple[int, int], str] = {}
        self._role_count: dict[tuple[int, int], int] = {}
        self._out: set[tuple[int, int, int]] = set()
        self._arcs: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def _spans(self, edge: Edge) -> tuple[int, int]:
        return tuple(sorted((self._rank[edge[0]], self._rank[edge[1]])))

    def role(self, page: int, node: int) -> str | None:
        return self._roles.get((page, node))

    def can_place(self, edge: Edge, page: int, half: int) -> bool:
        src, dst = edge
        if self._roles.get((page, src), "out") != "out":
            return False
        if self._roles.get((page, dst), "in") != "in":
            return False
        if (page, half, src) in self._out:
            return False
        lo, hi = self._spans(edge)
        for a, b in self._arcs.get((page, half), []):
            if len({a, b, lo, hi}) == 4 and (lo < a < hi) != (lo < b < hi):
                return False
        return True

    def _bump_role(self, key: tuple[int, int], role: str, delta: int) -> None:
        count = self._role_count.get(key, 0) + delta
        if count:
            self._role_count[key] = count
            self._roles[key] = role
        else:
            self._role_count.pop(key, None)
            self._roles.pop(key, None)

    def place(self, edge: Edge, page: int, half: int) -> None:
        self._bump_role((page, edge[0]), "out", 1)
        self._bump_role((page, edge[1]), "in", 1)
        self._out.add((page, half, edge[0]))
        self._arcs.setdefault((page, half), []).append(self._spans(edge))

    def remove(self, edge: Edge, page: int, half: int) -> None:
        self._bump_role((page, edge[0]), "out", -1)
        self._bump_role((page, edge[1]), "in", -1)
        self._out.discard((page, half, edge[0]))
        self._arcs[(page, half)].remove(self._spans(edge))


def validate_embedding(net: HetNet, emb: BookEmbedding) -> list[Violation]:
    """List every rule the embedding breaks; empty means valid"""
    violations: list[Violation] = []
    if len(emb.placements) != len(net.edges):
        violations.append(
            Violation(RULE_UNPLACED, 0, f"{len(net.edges)} edges, {len(emb.placements)} placements")
        )
        return violations

    for page in sorted({p.page for p in emb.placements}):
        on_page = emb.page_edges(net, page)
        if page > emb.pages:
            violations.append(
                Violation(RULE_UNPLACED, page, f"page exceeds declared count {emb.pages}")
            )
        for node in range(net.num_nodes):
            has_out = any(e[0] == node for e, _ in on_page)
            has_in = any(e[1] == node for e, _ in on_page)
            if has_out and has_in:
                violations.append(
                    Violation(RULE_IN_OUT, page, f"node {net.nodes[node]}")
                )
        for half in HALVES:
            in_half = [e for e, p in on_page if p.half == half]
            for node in range(net.num_nodes):
                outgoing = [e for e in in_half if e[0] == node]
                if len(outgoing) > 1:
                    violations.append(
                        Violation(
                            RULE_OUT_PER_HALF,
                            page,
                            f"node {net.nodes[node]} half {half}: "
                            + ", ".join(net.edge_label(e) for e in outgoing),
                        )
                    )
            for e1, e2 in itertools.combinations(in_half, 2):
                if arcs_cross(emb.spine, e1, e2):
                    violations.append(
                        Violation(
                            RULE_CROSSING,
                            page,
                            f"{net.edge_label(e1)} x {net.edge_label(e2)} half {half}",
                        )
                    )
    return violations


def greedy_embed(net: HetNet, spine: SpineOrder) -> BookEmbedding:
    """First-fit placement scanning halves before opening new pages"""
    state = _BookState(spine)
    placements = []
    for edge in net.edges:
        page = 1
        while True:
            half = next((h for h in HALVES if state.can_place(edge, page, h)), None)
            if half is not None:
                break
            page += 1
        state.place(edge, page, half)
        placements.append(EdgePlacement(page, half))
    pages = max(p.page for p in placements)
    _LOGGER.debug("Greedy embedding uses %d pages", pages)
    return BookEmbedding(spine, tuple(placements), pages)


class _Timeout(Exception):
    pass


class _Search:
    """Depth-first (page, half) assignment with page-label symmetry breaking"""

    def __init__(
        self,
        edges: list[Edge],
        spine: SpineOrder,
        pages: int,
        deadline: float | None,
        fixed_pages: list[int] | None = None,
    ) -> None:
        self._edges = edges
        self._state = _BookState(spine)
        self._pages = pages
        self._deadline = deadline
        self._fixed = fixed_pages
        self._result: list[EdgePlacement] = []
        self._nodes_visited = 0

    def run(self) -> list[EdgePlacement] | None:
        if self._dfs(0, 0):
            return list(self._result)
        return None

    def _candidates(self, index: int, max_used: int) -> list[tuple[int, int]]:
        if self._fixed is not None:
            return [(self._fixed[index], h) for h in HALVES]
        result = []
        for page in range(1, min(max_used + 1, self._pages) + 1):
            # Halves of an unused page are interchangeable
            halves = (UPPER,) if page > max_used else HALVES
            result.extend((page, h) for h in halves)
        return result

    def _dfs(self, index: int, max_used: int) -> bool:
        if index == len(self._edges):
            return True
        self._nodes_visited += 1
        if (
            self._deadline is not None
            and self._nodes_visited % 1024 == 0
            and time.monotonic() > self._deadline
        ):
            raise _Timeout()
        edge = self._edges[index]
        for page, half in self._candidates(index, max_used):
            if not self._state.can_place(edge, page, half):
                continue
            self._state.place(edge, page, half)
            self._result.append(EdgePlacement(page, half))
            if self._dfs(index + 1, max(max_used, page)):
                return True
            self._result.pop()
            self._state.remove(edge, page, half)
        return False


def canonical_spines(count: int) -> list[SpineOrder]:
    """All spine orders up to reversal"""
    return [
        SpineOrder(perm)
        for perm in itertools.permutations(range(count))
        if count < 2 or perm[0] < perm[-1]
    ]


class ThicknessResult(NamedTuple):
    pages: int
    embedding: BookEmbedding
    optimal: bool


def exact_thickness(
    net: HetNet,
    max_pages: int = DEFAULT_MAX_PAGES,
    time_limit: float | None = DEFAULT_TIME_LIMIT,
    max_nodes: int = MAX_SOLVER_NODES,
    max_edges: int = MAX_SOLVER_EDGES,
) -> ThicknessResult:
    """Minimal page count over all spine orders and placements"""
    if net.num_nodes > max_nodes or len(net.edges) > max_edges:
        raise SolverLimitException(
            f"network exceeds solver size bound ({max_nodes} nodes / {max_edges} edges)"
        )

    spines = canonical_spines(net.num_nodes)
    best = min(
        (greedy_embed(net, s) for s in spines[:64]), key=lambda emb: emb.pages
    )
    deadline = None if time_limit is None else time.monotonic() + time_limit
    edges = list(net.edges)

    try:
        for pages in range(1, min(best.pages, max_pages + 1)):
            for spine in spines:
                found = _Search(edges, spine, pages, deadline).run()
                if found is not None:
                    emb = BookEmbedding(spine, tuple(found), max(p.page for p in found))
                    _LOGGER.debug("Exact thickness %d with spine %s", emb.pages, spine.order)
                    return ThicknessResult(emb.pages, emb, True)
            _LOGGER.debug("No embedding with %d pages", pages)
    except _Timeout:
        _LOGGER.warning(
            "Exact thickness search timed out; returning %d-page bound", best.pages
        )
        if best.pages > max_pages:
            raise SolverLimitException("timeout", best) from None
        return ThicknessResult(best.pages, best, False)

    if best.pages > max_pages:
        raise SolverLimitException(f"infeasible within {max_pages} pages", best)
    return ThicknessResult(best.pages, best, True)


def _fixed_page_embedding(
    net: HetNet, spine: SpineOrder, pages_of: dict[Edge, int]
) -> BookEmbedding:
    edges = list(net.edges)
    found = _Search(edges, spine, max(pages_of.values()), None, [pages_of[e] for e in edges]).run()
    assert found is not None, "no valid half assignment for fixed pages"
    return BookEmbedding(spine, tuple(found), max(pages_of.values()))


def _incoming_pairs_pages(n: int) -> dict[tuple[int, int], int]:
    # Labels 1..n; node n+1 wraps to 1
    pages: dict[tuple[int, int], int] = {}
    for i in range(1, n - 1):
        pages[(i, i + 1)] = (i - 1) % 3 + 1
        pages[(i, i + 2)] = i % 3 + 1
    last = pages[(n - 2, n)]
    pages[(n - 1, n)] = last
    wrap, tail = {1: (4, 5), 2: (3, 1), 3: (4, 1)}[last]
    pages[(n - 1, 1)] = wrap
    pages[(n, 1)] = wrap
    pages[(n, 2)] = tail
    return pages


def _outgoing_pairs_embedding(net: HetNet, spine: SpineOrder) -> BookEmbedding:
    state = _BookState(spine)
    n = net.num_nodes
    placed: dict[Edge, EdgePlacement] = {}
    for i in range(n):
        first, second = (i, (i + 1) % n), (i, (i + 2) % n)
        page = 1
        while True:
            halves = next(
                (
                    hs
                    for hs in ((UPPER, LOWER), (LOWER, UPPER))
                    if _fits_pair(state, first, second, page, hs)
                ),
                None,
            )
            if halves is not None:
                break
            page += 1
        for edge, half in zip((first, second), halves):
            state.place(edge, page, half)
            placed[edge] = EdgePlacement(page, half)
    placements = tuple(placed[e] for e in net.edges)
    return BookEmbedding(spine, placements, max(p.page for p in placements))


def _fits_pair(
    state: _BookState, first: Edge, second: Edge, page: int, halves: tuple[int, int]
) -> bool:
    if not state.can_place(first, page, halves[0]):
        return False
    state.place(first, page, halves[0])
    fits = state.can_place(second, page, halves[1])
    state.remove(first, page, halves[0])
    return fits


def dnn_embedding(n: int, mode: str) -> tuple[HetNet, BookEmbedding]:
    """Explicit embeddings of the double next-neighbour network on the identity spine"""
    if n < 4:
        raise HetNetValidationException("double next-neighbour embedding needs n >= 4")
    net = dnn_network(n)
    spine = SpineOrder.identity(n)
    if mode == DNN_INCOMING:
        pages = {
            (src - 1, dst - 1): page for (src, dst), page in _incoming_pairs_pages(n).items()
        }
        emb = _fixed_page_embedding(net, spine, pages)
    elif mode == DNN_OUTGOING:
        emb = _outgoing_pairs_embedding(net, spine)
    else:
        raise HetNetValidationException("unknown double next-neighbour mode", mode)
    _LOGGER.debug("DNN(%d) %s embedding uses %d pages", n, mode, emb.pages)
    return net, emb
