"""Numerical verification of realizations: equilibria, connections, basins and robustness"""
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field as dataclass_field
import logging
import math
from typing import Any

import numpy as np
from scipy.linalg import expm
from scipy.linalg import schur
from scipy.optimize import brentq

from .ccn import ScalarField
from .ccn import SubspaceId
from .ccn import SubspaceKind
from .ccn import admissible_rhs
from .ccn import minimal_synchrony
from .common.exceptions import VerificationException
from .const import BLOW_UP_FACTOR
from .const import EIGEN_TOL
from .const import GRADE_ALMOST_COMPLETE
from .const import GRADE_COMPLETE
from .const import GRADE_PARTIAL
from .const import INVARIANCE_TOL
from .const import MODE_BOOK
from .const import RESIDUAL_TOL
from .dynamics import ArrivalMonitor
from .dynamics import Termination
from .dynamics import Trajectory
from .dynamics import eig_3d_pair
from .dynamics import eig_full_sync_pn
from .dynamics import integrate
from .dynamics import integrate_batch
from .dynamics import jacobian
from .synth.arcs import E_A
from .synth.arcs import E_B
from .synth.bump import bump_max_slope
from .synth.field import BumpTerm
from .synth.field import SynthesizedField
from .synth.realize import Realization

_LOGGER = logging.getLogger(__name__)

UNRESOLVED = "unresolved"


@dataclass
class EquilibriumReport:
    node: str
    point: float
    residual: float
    eigenvalues: list[complex]
    expected: list[complex]
    max_deviation: float
    classification: dict[str, str]

    @property
    def ok(self) -> bool:
        return self.residual < RESIDUAL_TOL and self.max_deviation < EIGEN_TOL


@dataclass
class ConnectionReport:
    edge: str
    subspace: str
    direction: float
    start_offset: float
    hit_time: float | None
    final_distance: float
    max_deviation: float
    termination: str
    reached: str | None
    passed: bool
    trajectory: Trajectory | None = dataclass_field(default=None, repr=False, compare=False)


@dataclass
class DirectionReport:
    node: str
    subspace: str
    direction: float
    reached: str | None
    classified: bool


@dataclass
class BasinReport:
    node: str
    rays: int
    histogram: dict[str, int]

    @property
    def unresolved(self) -> int:
        return self.histogram.get(UNRESOLVED, 0)

    @property
    def unresolved_fraction(self) -> float:
        return self.unresolved / self.rays


@dataclass
class RobustnessReport:
    eta: float
    trials: int
    passed: int
    failures: dict[int, list[str]]


@dataclass
class RealizationReport:
    mode: str
    equilibria: list[EquilibriumReport]
    connections: list[ConnectionReport]
    directions: list[DirectionReport]
    basins: list[BasinReport]
    robustness: RobustnessReport | None
    grade: str

    @property
    def failed(self) -> list[str]:
        return [c.edge for c in self.connections if not c.passed]

    def as_dict(self) -> dict[str, Any]:
        def _complex(values: list[complex]) -> list[list[float]]:
            return [[float(v.real), float(v.imag)] for v in values]

        return {
            "mode": self.mode,
            "grade": self.grade,
            "equilibria": [
                {**asdict(e), "eigenvalues": _complex(e.eigenvalues), "expected": _complex(e.expected)}
                for e in self.equilibria
            ],
            "connections": [
                {k: v for k, v in asdict(c).items() if k != "trajectory"}
                for c in self.connections
            ],
            "directions": [asdict(d) for d in self.directions],
            "basins": [
                {**asdict(b), "unresolved_fraction": b.unresolved_fraction} for b in self.basins
            ],
            "robustness": asdict(self.robustness) if self.robustness else None,
        }


def subspace_basis(num_cells: int, subspace: SubspaceId) -> np.ndarray:
    """Columns: the diagonal, then one unit vector per free cell"""
    columns = [np.ones(num_cells)]
    for j in subspace.indices:
        unit = np.zeros(num_cells)
        unit[j] = 1.0
        columns.append(unit)
    return np.column_stack(columns)


def subspace_deviation(states: np.ndarray, subspace: SubspaceId) -> float:
    """Largest distance of a synchronized cell from cell 0 along a trajectory"""
    states = np.atleast_2d(states)
    synced = [c for c in range(states.shape[1]) if c not in subspace.indices]
    return float(np.max(np.abs(states[:, synced] - states[:, [0]])))


def lateral_offset(num_cells: int, subspace: SubspaceId, angle: float) -> np.ndarray:
    """Unit transverse direction at angle in a pair subspace, as a cell-space vector"""
    a, b = subspace.indices
    pair = math.cos(angle) * E_A + math.sin(angle) * E_B
    offset = np.full(num_cells, pair[0])
    offset[a], offset[b] = pair[1], pair[2]
    return offset


def refine_equilibria(field: ScalarField, rho: list[float], width: float) -> list[float]:
    """Zeros of f on the diagonal near each designed position"""
    arity = field.arity

    def on_diagonal(s: float) -> float:
        return field(*([s] * arity))

    refined = []
    for r in rho:
        lo, hi = r - width, r + width
        if on_diagonal(lo) * on_diagonal(hi) < 0:
            refined.append(float(brentq(on_diagonal, lo, hi, xtol=1e-14)))
        else:
            refined.append(float(r))
    return refined


def expected_spectrum(real: Realization, node: int) -> list[complex]:
    row = real.alphas.row(node)
    if real.mode == MODE_BOOK:
        return [complex(v) for v in eig_full_sync_pn(row, len(row) - 1)]
    values = [complex(sum(row))]
    for subspace in minimal_synchrony(real.ccn):
        if subspace.kind == SubspaceKind.TWO_D:
            values.append(complex(row[0] - row[subspace.indices[0]]))
        else:
            a, b = subspace.indices
            rest = sum(row[1:]) - row[a] - row[b]
            values.extend(eig_3d_pair(row[0], rest, (row[a], row[b])).lateral)
    return values


def _match(numeric: np.ndarray, expected: list[complex]) -> float:
    remaining = list(numeric)
    worst = 0.0
    for value in expected:
        gaps = [abs(value - n) for n in remaining]
        index = int(np.argmin(gaps))
        worst = max(worst, gaps[index])
        remaining.pop(index)
    return worst


def equilibrium_report(
    real: Realization, node: int, field: ScalarField | None = None, point: float | None = None
) -> EquilibriumReport:
    field = field or real.field
    ccn = real.ccn
    rho = real.rho[node] if point is None else point
    p = np.full(ccn.num_cells, rho)
    residual = float(np.linalg.norm(admissible_rhs(ccn, field, p)))
    J = jacobian(ccn, field, p)
    numeric = np.linalg.eigvals(J)
    expected = expected_spectrum(real, node)
    classification = {}
    for subspace in minimal_synchrony(ccn):
        basis = subspace_basis(ccn.num_cells, subspace)
        restricted = np.linalg.pinv(basis) @ J @ basis
        unstable = np.any(np.linalg.eigvals(restricted).real > 0)
        classification[str(subspace)] = "unstable" if unstable else "stable"
    report = EquilibriumReport(
        real.net.nodes[node],
        float(rho),
        residual,
        [complex(v) for v in numeric],
        expected,
        _match(numeric, expected),
        classification,
    )
    if not report.ok:
        _LOGGER.warning(
            "Equilibrium %s: residual %.2e, eigenvalue deviation %.2e",
            report.node, report.residual, report.max_deviation,
        )
    return report


def unstable_start(
    real: Realization,
    node: int,
    subspace: SubspaceId,
    direction: float,
    field: ScalarField | None = None,
    point: float | None = None,
) -> np.ndarray:
    """
    Start on the local unstable manifold of a node. In a 2D subspace direction
    is the half-plane sign; in a pair subspace it is the transverse angle at
    which the orbit should cross the exit radius kappa.
    """
    field = field or real.field
    cfg = real.cfg
    label = real.net.nodes[node]
    n = real.ccn.num_cells
    p = np.full(n, real.rho[node] if point is None else point)
    J = jacobian(real.ccn, field, p)
    delta = cfg.start_offset * cfg.spacing
    basis = subspace_basis(n, subspace)
    restricted = np.linalg.pinv(basis) @ J @ basis
    values, vectors = np.linalg.eig(restricted)
    unstable = values.real > 0
    if subspace.kind == SubspaceKind.TWO_D:
        best = int(np.argmax(values.real))
        if not unstable[best]:
            raise VerificationException(f"not unstable in {subspace}", label)
        w = vectors[:, best].real
        if w[1] * direction < 0:
            w = -w
        offset = basis @ w
        return p + delta * offset / np.linalg.norm(offset)

    if unstable.sum() != 2:
        raise VerificationException(f"not laterally unstable in {subspace}", label)
    # Ordered real Schur form: the first two columns span the unstable plane
    schur_form, unitary, dim = schur(restricted, output="real", sort="rhp")
    if dim != 2:
        raise VerificationException(f"no two-dimensional unstable subspace in {subspace}", label)
    zu = unitary[:, :2]
    a_u = schur_form[:2, :2]
    target = np.linalg.pinv(basis) @ (cfg.kappa * lateral_offset(n, subspace, direction))
    # Drop the stable part along its eigenvector; the unstable block may be defective
    stable = vectors[:, int(np.argmin(values.real))].real
    normal = unitary[:, 2]
    aim = zu.T @ (target - (normal @ target) / (normal @ stable) * stable)

    def pulled_back(t: float) -> np.ndarray:
        return basis @ (zu @ (expm(-a_u * t) @ aim))

    def log_size(t: float) -> float:
        size = float(np.linalg.norm(pulled_back(t)))
        if not math.isfinite(size) or size == 0.0:
            raise VerificationException(f"backward flow degenerates at t={t:g} in {subspace}", label)
        return math.log(size / delta)

    if log_size(0.0) <= 0:
        return p + pulled_back(0.0)
    hi = 1.0
    while log_size(hi) > 0:
        hi *= 2
        if hi > 1e4:
            raise VerificationException(f"unstable manifold does not shrink in {subspace}", label)
    return p + pulled_back(brentq(log_size, 0.0, hi))


def _blow_up(real: Realization) -> float:
    return BLOW_UP_FACTOR * max(max(real.rho), real.cfg.spacing)


def _monitor(real: Realization, points: list[float], origin: int) -> ArrivalMonitor:
    n = real.ccn.num_cells
    return ArrivalMonitor(
        [np.full(n, r) for r in points], real.cfg.arrival_tol, real.cfg.residence, origin
    )


def _hit_time(traj: Trajectory, target: np.ndarray, tol: float) -> float | None:
    outside = np.flatnonzero(np.linalg.norm(traj.states - target, axis=1) >= tol)
    if not len(outside):
        return float(traj.times[0])
    if outside[-1] == len(traj.times) - 1:
        return None
    return float(traj.times[outside[-1] + 1])


def verify_connection(
    real: Realization,
    edge: tuple[int, int],
    direction: float | None = None,
    field: ScalarField | None = None,
    step: float | None = None,
    points: list[float] | None = None,
) -> ConnectionReport:
    """Integrate from the unstable manifold of the source and check arrival at the target"""
    field = field or real.field
    cfg = real.cfg
    points = list(real.rho) if points is None else points
    arc = real.primary_arc(edge)
    subspace = arc.subspace
    if direction is None:
        direction = float(arc.half) if arc.dim == 2 else float(arc.angle)
    x0 = unstable_start(real, edge[0], subspace, direction, field, points[edge[0]])
    monitor = _monitor(real, points, edge[0])
    traj = integrate(
        real.ccn,
        field,
        x0,
        step or cfg.step,
        cfg.t_max,
        stop=monitor,
        blow_up=_blow_up(real),
        detect_stall=True,
    )
    target = np.full(real.ccn.num_cells, points[edge[1]])
    final_distance = float(np.linalg.norm(traj.final - target))
    deviation = subspace_deviation(traj.states, subspace)
    reached = real.net.nodes[traj.reached] if traj.reached is not None else None
    passed = (
        traj.reached == edge[1]
        and final_distance < cfg.arrival_tol
        and deviation < INVARIANCE_TOL
    )
    report = ConnectionReport(
        real.net.edge_label(edge),
        str(subspace),
        direction,
        cfg.start_offset * cfg.spacing,
        _hit_time(traj, target, cfg.arrival_tol) if passed else None,
        final_distance,
        deviation,
        traj.termination.value,
        reached,
        passed,
        traj,
    )
    if passed:
        _LOGGER.debug("Connection %s reached at t=%.3f", report.edge, report.hit_time)
    else:
        _LOGGER.warning(
            "Connection %s failed: %s, reached %s, deviation %.2e",
            report.edge, report.termination, reached, deviation,
        )
    return report


def _batch(
    real: Realization,
    starts: list[np.ndarray],
    origins: list[int],
    field: ScalarField,
    points: list[float],
) -> list[int | None]:
    if not starts:
        return []
    monitors = [_monitor(real, points, origin) for origin in origins]
    result = integrate_batch(
        real.ccn, field, np.array(starts), real.cfg.step, real.cfg.t_max, monitors,
        blow_up=_blow_up(real),
    )
    return [
        reached if term == Termination.REACHED_TARGET else None
        for reached, term in zip(result.reached, result.terminations)
    ]


def sample_directions(
    real: Realization, field: ScalarField | None = None, points: list[float] | None = None
) -> list[DirectionReport]:
    """Both half-plane directions of every 2D subspace a node is unstable in"""
    field = field or real.field
    points = list(real.rho) if points is None else points
    jobs = []
    for node in range(real.net.num_nodes):
        pages = sorted(
            {a.subspace.indices[0] for a in real.arcs if a.source == node and a.dim == 2}
        )
        for page in pages:
            for half in (1.0, -1.0):
                jobs.append((node, SubspaceId.two_d(page), half))
    starts = [unstable_start(real, n, s, h, field, points[n]) for n, s, h in jobs]
    reports = []
    for (node, subspace, half), reached in zip(jobs, _batch(real, starts, [j[0] for j in jobs], field, points)):
        classified = reached is not None and (node, reached) in real.net.edges
        reports.append(
            DirectionReport(
                real.net.nodes[node],
                str(subspace),
                half,
                real.net.nodes[reached] if reached is not None else None,
                classified,
            )
        )
        if not classified:
            _LOGGER.warning(
                "Direction %+.0f of %s in %s is unresolved", half, real.net.nodes[node], subspace
            )
    return reports


def basin_sample(
    real: Realization,
    node: int,
    rays: int | None = None,
    field: ScalarField | None = None,
    points: list[float] | None = None,
) -> BasinReport:
    """Histogram of where rays leaving a 3D-realized node end up"""
    field = field or real.field
    points = list(real.rho) if points is None else points
    rays = rays or real.cfg.basin_rays
    subspace = real.assignment[node]
    assert subspace.kind == SubspaceKind.THREE_D
    n = real.ccn.num_cells
    delta = real.cfg.start_offset * real.cfg.spacing
    p = np.full(n, points[node])
    starts = []
    for m in range(rays):
        offset = lateral_offset(n, subspace, 2 * math.pi * m / rays)
        starts.append(p + delta * offset / np.linalg.norm(offset))
    histogram = {real.net.nodes[t]: 0 for _, t in real.net.out_edges(node)}
    histogram[UNRESOLVED] = 0
    for reached in _batch(real, starts, [node] * rays, field, points):
        if reached is not None and (node, reached) in real.net.edges:
            histogram[real.net.nodes[reached]] += 1
        else:
            histogram[UNRESOLVED] += 1
    report = BasinReport(real.net.nodes[node], rays, histogram)
    if report.unresolved_fraction > real.cfg.unresolved_fraction:
        _LOGGER.warning(
            "%d of %d rays from %s are unresolved", report.unresolved, rays, report.node
        )
    return report


def perturb(
    field: SynthesizedField, eta: float, seed: int, terms: int = 8
) -> SynthesizedField:
    """Add random bump terms centred on the tubes, each bounded by eta in the C1 norm"""
    if eta == 0 or not field.tubes:
        return field.with_extras([])
    rng = np.random.default_rng(seed)
    spacing = field.cfg.spacing
    extras = []
    for _ in range(terms):
        tube = field.tubes[rng.integers(len(field.tubes))]
        center = tube.plane.lift_points(tube.centers[rng.integers(len(tube.centers))])
        radius = float(rng.uniform(0.1, 0.3) * spacing)
        scale = max(1.0, bump_max_slope(0.5 * radius, radius))
        extras.append(BumpTerm(center, radius, float(rng.uniform(-eta, eta)) / scale))
    return field.with_extras(extras)


def robustness_trials(
    real: Realization, eta: float, trials: int, step: float | None = None
) -> RobustnessReport:
    failures = {}
    passed = 0
    width = real.cfg.eps_inner
    for trial in range(trials):
        field = perturb(real.field, eta, real.cfg.seed + trial, real.cfg.perturb_terms)
        points = refine_equilibria(field, list(real.rho), width)
        failed = [
            real.net.edge_label(edge)
            for edge in real.net.edges
            if not verify_connection(real, edge, field=field, step=step, points=points).passed
        ]
        if failed:
            failures[trial] = failed
        else:
            passed += 1
    _LOGGER.info("Robustness at eta=%g: %d of %d trials pass", eta, passed, trials)
    return RobustnessReport(eta, trials, passed, failures)


def grade(
    connections: list[ConnectionReport],
    directions: list[DirectionReport],
    basins: list[BasinReport],
    unresolved_fraction: float,
) -> str:
    connected = all(c.passed for c in connections)
    # Sampled rays cannot certify a 3D node beyond almost completeness
    if connected and not basins and all(d.classified for d in directions):
        return GRADE_COMPLETE
    if connected and all(b.unresolved_fraction <= unresolved_fraction for b in basins):
        return GRADE_ALMOST_COMPLETE
    return GRADE_PARTIAL


def verify_all(
    real: Realization, eta: float = 0.0, trials: int = 0, step: float | None = None
) -> RealizationReport:
    """Run every suite and grade the realization"""
    equilibria = [equilibrium_report(real, i) for i in range(real.net.num_nodes)]
    connections = [verify_connection(real, e, step=step) for e in real.net.edges]
    directions = sample_directions(real)
    basins = [basin_sample(real, node) for node in real.three_d_nodes()]
    robustness = robustness_trials(real, eta, trials, step) if trials else None
    result = grade(connections, directions, basins, real.cfg.unresolved_fraction)
    _LOGGER.info(
        "Verified %d connections (%d failed); grade %s",
        len(connections), sum(not c.passed for c in connections), result,
    )
    return RealizationReport(
        real.mode, equilibria, connections, directions, basins, robustness, result
    )


def step_halving_drift(real: Realization, edge: tuple[int, int], step: float | None = None) -> float:
    """Change of the hit time when the integration step is halved"""
    h = step or real.cfg.step
    coarse = verify_connection(real, edge, step=h)
    fine = verify_connection(real, edge, step=h / 2)
    if coarse.hit_time is None or fine.hit_time is None:
        return math.inf
    return abs(coarse.hit_time - fine.hit_time)
