"""SVG figures of embeddings, pages and pair subspaces"""
import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from slugify import slugify  # noqa: E402

from .book_embed import BookEmbedding  # noqa: E402
from .ccn import SubspaceId  # noqa: E402
from .ccn import SubspaceKind  # noqa: E402
from .graph_core import HetNet  # noqa: E402
from .synth.arcs import E_A  # noqa: E402
from .synth.arcs import E_B  # noqa: E402
from .synth.realize import Realization  # noqa: E402
from .verify import ConnectionReport  # noqa: E402

_LOGGER = logging.getLogger(__name__)

# Fixed salt and no timestamp keep the SVG bytes reproducible
plt.rcParams["svg.hashsalt"] = "hetnet_realize"
_METADATA = {"Date": None}


def figure_path(out_dir: Path, *parts: str) -> Path:
    return Path(out_dir) / (slugify("-".join(parts)) + ".svg")


def _save(fig: plt.Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata=_METADATA)
    plt.close(fig)
    _LOGGER.debug("Wrote %s", path)
    return path


def plot_book(net: HetNet, emb: BookEmbedding, path: Path) -> Path:
    """Spine with one semicircle per connection, coloured by page"""
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = plt.get_cmap("tab10")
    positions = [emb.spine.rho(i) for i in range(net.num_nodes)]
    ax.axhline(0.0, color="black", lw=0.8)
    for edge, placement in zip(net.edges, emb.placements):
        a, b = positions[edge[0]], positions[edge[1]]
        theta = np.linspace(0.0, math.pi, 64)
        radius = abs(b - a) / 2
        xs = (a + b) / 2 - math.copysign(radius, b - a) * np.cos(theta)
        ys = placement.half * radius * np.sin(theta)
        ax.plot(xs, ys, color=colors((placement.page - 1) % 10), lw=1.2)
        ax.annotate(
            "", xy=(xs[-1], ys[-1]), xytext=(xs[-4], ys[-4]),
            arrowprops={"arrowstyle": "->", "color": colors((placement.page - 1) % 10)},
        )
    ax.scatter(positions, np.zeros(len(positions)), color="black", zorder=3)
    for label, x in zip(net.nodes, positions):
        ax.text(x, 0.0, f" {label}", va="bottom")
    ax.set_title(f"{emb.pages}-page embedding")
    ax.set_aspect("equal")
    ax.axis("off")
    return _save(fig, path)


def _page_coords(states: np.ndarray, page: int) -> tuple[np.ndarray, np.ndarray]:
    return states[:, 0], states[:, page] - states[:, 0]


def plot_page(
    real: Realization, page: int, reports: list[ConnectionReport], path: Path
) -> Path:
    """Arcs of one 2D subspace in (u, v) with the connection orbits projected onto it"""
    subspace = SubspaceId.two_d(page)
    fig, ax = plt.subplots(figsize=(7, 4))
    for arc in real.arcs:
        if arc.dim != 2:
            continue
        own = arc.subspace == subspace
        ax.plot(
            arc.points[:, 0], arc.points[:, 1],
            color="C0" if own else "0.8", lw=1.5 if own else 0.8,
            ls="--" if arc.doubled else "-",
        )
    for report in reports:
        if report.subspace != str(subspace) or report.trajectory is None:
            continue
        u, v = _page_coords(report.trajectory.states, page)
        ax.plot(u, v, color="C3" if report.passed else "C1", lw=0.8)
    ax.scatter(real.rho, np.zeros(len(real.rho)), color="black", zorder=3)
    for label, x in zip(real.net.nodes, real.rho):
        ax.text(x, 0.0, f" {label}", va="bottom")
    ax.set_xlabel("u = x0")
    ax.set_ylabel(f"v = x{page} - x0")
    ax.set_title(str(subspace))
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_pair(
    real: Realization, node: int, reports: list[ConnectionReport], path: Path
) -> Path:
    """Transverse view of a pair subspace around one node: arcs, face boundaries and orbits"""
    subspace = real.assignment[node]
    assert subspace.kind == SubspaceKind.THREE_D
    a, b = subspace.indices
    fig, ax = plt.subplots(figsize=(5, 5))
    arcs = [arc for arc in real.arcs if arc.source == node and arc.dim == 3]
    reach = max(float(np.abs(arc.points[:, 1:]).max()) for arc in arcs) if arcs else 1.0
    for arc in arcs:
        ax.plot(arc.points[:, 1], arc.points[:, 2], color="C0", lw=1.5)
        start, width = arc.face
        for edge_angle in (start, start + width):
            ax.plot(
                [0.0, reach * math.cos(edge_angle)], [0.0, reach * math.sin(edge_angle)],
                color="0.7", lw=0.6, ls=":",
            )
        ax.text(
            *(0.8 * reach * np.array([math.cos(arc.angle), math.sin(arc.angle)])),
            real.net.nodes[arc.target],
        )
    for report in reports:
        if report.subspace != str(subspace) or report.trajectory is None:
            continue
        cells = report.trajectory.states[:, [0, a, b]]
        ax.plot(cells @ E_A, cells @ E_B, color="C3" if report.passed else "C1", lw=0.8)
    ax.set_xlabel("e_A")
    ax.set_ylabel("e_B")
    ax.set_title(f"{subspace} around {real.net.nodes[node]}")
    ax.set_aspect("equal")
    return _save(fig, path)


def write_plots(
    real: Realization, reports: list[ConnectionReport], out_dir: Path
) -> list[Path]:
    written = []
    if real.embedding is not None:
        written.append(plot_book(real.net, real.embedding, figure_path(out_dir, "book")))
    pages = sorted({arc.subspace.indices[0] for arc in real.arcs if arc.dim == 2})
    for page in pages:
        written.append(plot_page(real, page, reports, figure_path(out_dir, "page", str(page))))
    for node in real.three_d_nodes():
        written.append(
            plot_pair(real, node, reports, figure_path(out_dir, "pair", real.net.nodes[node]))
        )
    _LOGGER.info("Wrote %d figures to %s", len(written), out_dir)
    return written
