"""Tests for JSON and CSV artifacts."""
import json

import numpy as np
import pytest

from custom_components.hetnet_realize.common.exceptions import HetNetValidationException
from custom_components.hetnet_realize.const import GRADE_COMPLETE
from custom_components.hetnet_realize.dynamics import Termination
from custom_components.hetnet_realize.dynamics import Trajectory
from custom_components.hetnet_realize.serialization import load_realization
from custom_components.hetnet_realize.serialization import load_report
from custom_components.hetnet_realize.serialization import realization_dump
from custom_components.hetnet_realize.serialization import save_report
from custom_components.hetnet_realize.serialization import to_json
from custom_components.hetnet_realize.serialization import write_json
from custom_components.hetnet_realize.serialization import write_trajectory_csv
from custom_components.hetnet_realize.synth import layout
from custom_components.hetnet_realize.verify import EquilibriumReport
from custom_components.hetnet_realize.verify import RealizationReport


def test_to_json_is_sorted_and_terminated():
    assert to_json({"b": 1, "a": 0.1}) == '{\n  "a": 0.1,\n  "b": 1\n}\n'


def test_realization_round_trip(tmp_path, fig2_real):
    path = write_json(tmp_path / "out" / "realization.json", realization_dump(fig2_real))
    loaded = load_realization(path)
    assert loaded.mode == fig2_real.mode
    assert loaded.cfg == fig2_real.cfg
    assert loaded.rho == fig2_real.rho
    assert loaded.alphas == fig2_real.alphas
    assert [a.label for a in loaded.arcs] == [a.label for a in fig2_real.arcs]
    rows = np.random.default_rng(1).uniform(-0.2, 2.2, size=(200, fig2_real.field.arity))
    assert np.array_equal(loaded.field.evaluate(rows), fig2_real.field.evaluate(rows))


def test_almost_complete_round_trip(tmp_path, fan_real):
    path = write_json(tmp_path / "realization.json", realization_dump(fan_real))
    loaded = load_realization(path)
    assert loaded.assignment == fan_real.assignment
    assert loaded.ccn.as_dict() == fan_real.ccn.as_dict()
    assert [a.label for a in loaded.arcs] == [a.label for a in fan_real.arcs]
    rows = np.random.default_rng(2).uniform(-0.2, 3.2, size=(300, fan_real.field.arity))
    assert np.array_equal(loaded.field.evaluate(rows), fan_real.field.evaluate(rows))


def test_load_reads_the_stored_arcs(tmp_path, monkeypatch, fig2_real):
    def _no_synthesis(*args, **kwargs):
        raise AssertionError("load must not plan arcs again")

    monkeypatch.setattr(layout, "build_arc2d", _no_synthesis)
    data = realization_dump(fig2_real)
    data["arcs"] = [a for a in data["arcs"] if not a["doubled"]]
    path = write_json(tmp_path / "realization.json", data)
    loaded = load_realization(path)
    assert len(loaded.arcs) == len(fig2_real.net.edges)
    assert not any(a.doubled for a in loaded.arcs)
    assert len(loaded.field.tubes) < len(fig2_real.field.tubes)
    first = fig2_real.primary_arc((0, 1))
    assert np.array_equal(loaded.primary_arc((0, 1)).points, first.points)
    assert np.array_equal(loaded.primary_arc((0, 1)).radii, first.radii)


def test_dump_without_arcs_is_rejected(tmp_path, fig2_real):
    data = realization_dump(fig2_real)
    del data["arcs"]
    path = write_json(tmp_path / "realization.json", data)
    with pytest.raises(HetNetValidationException):
        load_realization(path)


def test_book_dump_needs_embedding(tmp_path, fig2_real):
    data = realization_dump(fig2_real)
    del data["embedding"]
    path = write_json(tmp_path / "realization.json", data)
    with pytest.raises(HetNetValidationException):
        load_realization(path)


def test_report_round_trip(tmp_path):
    equilibrium = EquilibriumReport(
        node="a",
        point=0.0,
        residual=0.0,
        eigenvalues=[complex(-4.0, 0.0), complex(3.0, 0.0)],
        expected=[complex(-4.0, 0.0), complex(3.0, 0.0)],
        max_deviation=1e-9,
        classification={"Delta_1": "unstable"},
    )
    report = RealizationReport("book", [equilibrium], [], [], [], None, GRADE_COMPLETE)
    path = save_report(report, tmp_path / "report.json")
    data = load_report(path)
    assert data["grade"] == GRADE_COMPLETE
    assert data["equilibria"][0]["eigenvalues"] == [[-4.0, 0.0], [3.0, 0.0]]


def test_invalid_report(tmp_path):
    path = tmp_path / "report.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(HetNetValidationException):
        load_report(path)
    path.write_text(json.dumps({"mode": "book", "grade": "excellent"}), encoding="utf-8")
    with pytest.raises(HetNetValidationException):
        load_report(path)


def test_trajectory_csv(tmp_path):
    traj = Trajectory(
        np.array([0.0, 0.5, 1.0]),
        np.array([[0.0, 1.0], [0.1, 0.9], [1.0 / 3.0, 0.5]]),
        Termination.MAX_TIME,
    )
    path = write_trajectory_csv(traj, tmp_path / "traj" / "a_b.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "time,x0,x1"
    assert len(lines) == 4
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(table[:, 0], traj.times)
    assert np.array_equal(table[:, 1:], traj.states)
