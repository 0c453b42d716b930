"""Heteroclinic networks as directed graphs of equilibria"""
from dataclasses import dataclass
import json
import logging
from typing import Any

import networkx as nx
import voluptuous as vol

from .common.exceptions import HetNetValidationException

_LOGGER = logging.getLogger(__name__)

HETNET_SCHEMA = vol.Schema(
    {
        vol.Required("nodes"): vol.All([str], vol.Length(min=1)),
        vol.Required("edges"): [vol.All([str], vol.Length(min=2, max=2))],
    },
    extra=vol.REMOVE_EXTRA,
)


@dataclass(frozen=True)
class HetNet:
    """Equilibrium nodes (labels) and connections (index pairs)"""

    nodes: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def index(self, label: str) -> int:
        return self.nodes.index(label)

    def edge_label(self, edge: tuple[int, int]) -> str:
        return f"{self.nodes[edge[0]]}->{self.nodes[edge[1]]}"

    def out_edges(self, node: int) -> list[tuple[int, int]]:
        return [e for e in self.edges if e[0] == node]

    def in_edges(self, node: int) -> list[tuple[int, int]]:
        return [e for e in self.edges if e[1] == node]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.num_nodes))
        graph.add_edges_from(self.edges)
        return graph

    def as_dict(self) -> dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "edges": [[self.nodes[s], self.nodes[d]] for s, d in self.edges],
        }

    @staticmethod
    def from_labels(
        nodes: list[str], edges: list[tuple[str, str]], allow_weak: bool = False
    ) -> "HetNet":
        """Build and validate a network from node labels and labelled edges"""
        if len(set(nodes)) != len(nodes):
            raise HetNetValidationException("duplicate node label", str(nodes))
        index = {label: i for i, label in enumerate(nodes)}
        result: list[tuple[int, int]] = []
        for src, dst in edges:
            if src not in index or dst not in index:
                raise HetNetValidationException(
                    "edge references unknown node", f"{src}->{dst}"
                )
            if src == dst:
                raise HetNetValidationException(
                    "homoclinic connection unsupported", f"{src}->{dst}"
                )
            edge = (index[src], index[dst])
            if edge in result:
                raise HetNetValidationException(
                    "duplicate parallel edge", f"{src}->{dst}"
                )
            result.append(edge)

        net = HetNet(tuple(nodes), tuple(result))
        if not allow_weak and not is_strongly_connected(net):
            raise HetNetValidationException(
                "network is not strongly connected",
                "a heteroclinic network must be a union of cycles",
            )
        if allow_weak:
            _LOGGER.warning("Strong connectivity check skipped for %s", nodes)
        return net


def is_strongly_connected(net: HetNet) -> bool:
    if not net.edges:
        return False
    return nx.is_strongly_connected(net.to_networkx())


def parse_hetnet(text: str, allow_weak: bool = False) -> HetNet:
    """Parse and validate a network from its JSON document"""
    try:
        data = HETNET_SCHEMA(json.loads(text))
    except json.JSONDecodeError as ex:
        raise HetNetValidationException("invalid JSON", str(ex)) from ex
    except vol.Invalid as ex:
        raise HetNetValidationException("schema error", str(ex)) from ex
    return HetNet.from_labels(
        data["nodes"], [tuple(e) for e in data["edges"]], allow_weak=allow_weak
    )


def serialize_hetnet(net: HetNet) -> str:
    return json.dumps(net.as_dict(), indent=2)


@dataclass(frozen=True)
class DegreeProfile:
    """Out-degree statistics of a network"""

    out_degree: tuple[int, ...]
    n1: int
    n2: int

    def __post_init__(self) -> None:
        assert self.n1 + self.n2 == len(self.out_degree)


def degree_profile(net: HetNet) -> DegreeProfile:
    out_degree = [0] * net.num_nodes
    for src, _ in net.edges:
        out_degree[src] += 1
    n1 = sum(1 for d in out_degree if d <= 2)
    return DegreeProfile(tuple(out_degree), n1, net.num_nodes - n1)


def export_dot(net: HetNet) -> str:
    """Deterministic DOT digraph with one line per edge"""
    lines = ["digraph hetnet {"]
    lines.extend(f'  "{label}";' for label in net.nodes)
    lines.extend(
        f'  "{net.nodes[src]}" -> "{net.nodes[dst]}";' for src, dst in net.edges
    )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _labels(count: int) -> list[str]:
    return [str(i + 1) for i in range(count)]


def figure_two_network() -> HetNet:
    """Three equilibria a, b, c with the two 2-cycles a<->b and b<->c"""
    return HetNet.from_labels(
        ["a", "b", "c"], [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")]
    )


def cycle_network(n: int) -> HetNet:
    labels = _labels(n)
    return HetNet.from_labels(
        labels, [(labels[i], labels[(i + 1) % n]) for i in range(n)]
    )


def dnn_network(n: int) -> HetNet:
    """Double next-neighbour network: i -> i+1 and i -> i+2 (mod n)"""
    if n < 4:
        raise HetNetValidationException("double next-neighbour network needs n >= 4")
    labels = _labels(n)
    edges = []
    for i in range(n):
        edges.append((labels[i], labels[(i + 1) % n]))
        edges.append((labels[i], labels[(i + 2) % n]))
    return HetNet.from_labels(labels, edges)


def fan_network(k: int, hub: str = "h") -> HetNet:
    """A hub with k outgoing connections, each target returning to the hub"""
    spokes = [chr(ord("x") + i) if k <= 3 else f"s{i + 1}" for i in range(k)]
    edges = [(hub, s) for s in spokes] + [(s, hub) for s in spokes]
    return HetNet.from_labels([hub] + spokes, edges)


def hub_two_cycles(k: int = 4) -> HetNet:
    """k two-cycles sharing a common node"""
    return fan_network(k, hub="0")


GENERATORS = {
    "figure2": lambda n: figure_two_network(),
    "cycle": cycle_network,
    "dnn": dnn_network,
    "fan": fan_network,
    "hub": hub_two_cycles,
}
