"""Tests for numerical verification and grading."""
import math

import numpy as np
import pytest

from custom_components.hetnet_realize.ccn import SubspaceId
from custom_components.hetnet_realize.common.config import RealizationConfig
from custom_components.hetnet_realize.common.exceptions import VerificationException
from custom_components.hetnet_realize.const import GRADE_ALMOST_COMPLETE
from custom_components.hetnet_realize.const import GRADE_COMPLETE
from custom_components.hetnet_realize.const import GRADE_PARTIAL
from custom_components.hetnet_realize.graph_core import fan_network
from custom_components.hetnet_realize.synth.realize import realize_almost_complete
from custom_components.hetnet_realize.synth.realize import realize_book
from custom_components.hetnet_realize.verify import UNRESOLVED
from custom_components.hetnet_realize.verify import BasinReport
from custom_components.hetnet_realize.verify import ConnectionReport
from custom_components.hetnet_realize.verify import DirectionReport
from custom_components.hetnet_realize.verify import RealizationReport
from custom_components.hetnet_realize.verify import equilibrium_report
from custom_components.hetnet_realize.verify import grade
from custom_components.hetnet_realize.verify import lateral_offset
from custom_components.hetnet_realize.verify import refine_equilibria
from custom_components.hetnet_realize.verify import robustness_trials
from custom_components.hetnet_realize.verify import step_halving_drift
from custom_components.hetnet_realize.verify import subspace_deviation
from custom_components.hetnet_realize.verify import unstable_start
from custom_components.hetnet_realize.verify import verify_all
from custom_components.hetnet_realize.verify import verify_connection

from .conftest import COARSE


def _connection(passed: bool) -> ConnectionReport:
    return ConnectionReport(
        edge="a->b",
        subspace="Delta_1",
        direction=1.0,
        start_offset=1e-4,
        hit_time=12.0 if passed else None,
        final_distance=1e-4 if passed else 0.7,
        max_deviation=0.0,
        termination="reached_target" if passed else "t_max",
        reached="b" if passed else None,
        passed=passed,
    )


def _direction(classified: bool) -> DirectionReport:
    return DirectionReport("a", "Delta_1", -1.0, "b" if classified else None, classified)


def _basin(unresolved: int) -> BasinReport:
    return BasinReport("h", 72, {"x": 72 - unresolved, UNRESOLVED: unresolved})


@pytest.mark.parametrize(
    ("connections", "directions", "basins", "expected"),
    [
        ([True, True], [True, True], [], GRADE_COMPLETE),
        ([True], [True, False], [], GRADE_ALMOST_COMPLETE),
        ([True], [True], [0], GRADE_ALMOST_COMPLETE),
        ([True], [True], [3], GRADE_ALMOST_COMPLETE),
        ([True], [True], [4], GRADE_PARTIAL),
        ([True, False], [True], [], GRADE_PARTIAL),
    ],
)
def test_grade(connections, directions, basins, expected):
    result = grade(
        [_connection(p) for p in connections],
        [_direction(c) for c in directions],
        [_basin(u) for u in basins],
        0.05,
    )
    assert result == expected


def test_subspace_deviation():
    states = np.array([[0.0, 0.3, 0.0], [1.0, 0.5, 1.25]])
    assert subspace_deviation(states, SubspaceId.two_d(1)) == pytest.approx(0.25)
    assert subspace_deviation(states, SubspaceId.three_d(1, 2)) == 0.0


@pytest.mark.parametrize("angle", [0.0, 0.4, math.pi / 2, 2.5, 5.0])
def test_lateral_offset(angle):
    offset = lateral_offset(3, SubspaceId.three_d(1, 2), angle)
    assert np.linalg.norm(offset) == pytest.approx(1.0)
    assert offset.sum() == pytest.approx(0.0, abs=1e-12)


def test_lateral_offset_keeps_synchronized_cells_together():
    offset = lateral_offset(6, SubspaceId.three_d(2, 3), 1.0)
    assert offset[0] == offset[1] == offset[4] == offset[5]


def test_report_as_dict():
    report = RealizationReport(
        mode="book",
        equilibria=[],
        connections=[_connection(True)],
        directions=[_direction(True)],
        basins=[_basin(2)],
        robustness=None,
        grade=GRADE_ALMOST_COMPLETE,
    )
    data = report.as_dict()
    assert data["grade"] == GRADE_ALMOST_COMPLETE
    assert "trajectory" not in data["connections"][0]
    assert data["basins"][0]["unresolved_fraction"] == pytest.approx(2 / 72)
    assert data["robustness"] is None
    assert report.failed == []


def test_equilibria_match_designed_spectrum(fig2_real):
    for node in range(fig2_real.net.num_nodes):
        report = equilibrium_report(fig2_real, node)
        assert report.ok, report
        assert report.point == fig2_real.rho[node]


def test_refine_equilibria_keeps_exact_zeros(fig2_real):
    refined = refine_equilibria(fig2_real.field, list(fig2_real.rho), fig2_real.cfg.eps_inner)
    assert refined == pytest.approx(list(fig2_real.rho), abs=1e-9)


def test_unstable_start_2d(fig2_real):
    delta = fig2_real.cfg.start_offset * fig2_real.cfg.spacing
    x0 = unstable_start(fig2_real, 0, SubspaceId.two_d(1), 1.0)
    p = np.full(3, fig2_real.rho[0])
    assert np.linalg.norm(x0 - p) == pytest.approx(delta)
    # Only the free cell of the page moves away from cell 0
    assert x0[2] == x0[0]
    assert x0[1] - x0[0] > 0


def test_unstable_start_rejects_stable_page(fig2_real):
    # Node a only leaves through page 1
    with pytest.raises(VerificationException):
        unstable_start(fig2_real, 0, SubspaceId.two_d(2), 1.0)


@pytest.mark.parametrize("angle", [0.0, 1.0, 2.5, 4.0, 5.5])
def test_unstable_start_3d_lies_on_the_unstable_plane(fan_real, angle):
    hub = fan_real.net.nodes.index("h")
    subspace = fan_real.assignment[hub]
    delta = fan_real.cfg.start_offset * fan_real.cfg.spacing
    x0 = unstable_start(fan_real, hub, subspace, angle)
    p = np.full(fan_real.ccn.num_cells, fan_real.rho[hub])
    assert np.all(np.isfinite(x0))
    assert np.linalg.norm(x0 - p) == pytest.approx(delta, rel=1e-6)
    assert subspace_deviation(x0[None, :], subspace) < 1e-12



@pytest.mark.slow
def test_figure_two_is_complete(fig2_real):
    report = verify_all(fig2_real)
    assert report.failed == []
    assert all(c.hit_time is not None for c in report.connections)
    assert all(d.classified for d in report.directions)
    assert report.grade == GRADE_COMPLETE


@pytest.mark.slow
def test_fan_connections_and_basin(fan_real):
    report = verify_all(fan_real)
    assert report.failed == []
    [basin] = report.basins
    assert basin.node == "h"
    assert sum(basin.histogram.values()) == fan_real.cfg.basin_rays
    assert all(basin.histogram[s] > 0 for s in ("x", "y", "z"))
    assert basin.unresolved_fraction <= 0.05
    assert report.grade == GRADE_ALMOST_COMPLETE


@pytest.mark.slow
def test_removed_tube_breaks_its_connection(fig2_real):
    broken = fig2_real.without_edge((0, 1))
    report = verify_connection(broken, (0, 1))
    assert not report.passed
    assert report.reached != "b"
    kept = verify_connection(broken, (1, 0))
    assert kept.passed
    assert grade([report, kept], [], [], 0.05) == GRADE_PARTIAL


@pytest.mark.slow
def test_hit_time_converges(fig2_real):
    assert step_halving_drift(fig2_real, (1, 2)) < 0.1


@pytest.mark.slow
def test_reversed_launch_on_a_single_arc_page_fails(fig2, fig2_embedding):
    cfg = RealizationConfig.from_dict({**COARSE, "double_arcs": False})
    real = realize_book(fig2, fig2_embedding, cfg)
    assert verify_connection(real, (0, 1)).passed
    reversed_launch = verify_connection(real, (0, 1), direction=-1.0)
    assert not reversed_launch.passed


@pytest.mark.slow
def test_small_perturbations_keep_every_connection(fig2_real):
    report = robustness_trials(fig2_real, 1e-3, 10)
    assert report.trials == 10
    assert report.failures == {}
    assert report.passed == 10


@pytest.mark.slow
def test_same_seed_gives_the_same_report(fig2, fig2_embedding):
    cfg = RealizationConfig.from_dict({**COARSE, "seed": 7})
    first = verify_all(realize_book(fig2, fig2_embedding, cfg), eta=1e-3, trials=2).as_dict()
    second = verify_all(realize_book(fig2, fig2_embedding, cfg), eta=1e-3, trials=2).as_dict()
    assert first == second


def test_unstable_start_3d_with_a_defective_pair():
    cfg = RealizationConfig.from_dict({**COARSE, "pair_alphas": [-2.0, -2.0]})
    real = realize_almost_complete(fan_network(3), cfg)
    hub = real.net.nodes.index("h")
    delta = cfg.start_offset * cfg.spacing
    x0 = unstable_start(real, hub, real.assignment[hub], 1.0)
    assert np.all(np.isfinite(x0))
    assert np.linalg.norm(x0 - real.rho[hub]) == pytest.approx(delta, rel=1e-6)

