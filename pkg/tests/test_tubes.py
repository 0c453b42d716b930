"""Tests for flow tubes around lifted arcs."""
import numpy as np
import pytest

from custom_components.hetnet_realize.book_embed import UPPER
from custom_components.hetnet_realize.book_embed import EdgePlacement
from custom_components.hetnet_realize.ccn import SubspaceId
from custom_components.hetnet_realize.common.config import RealizationConfig
from custom_components.hetnet_realize.common.exceptions import SynthesisException
from custom_components.hetnet_realize.synth.arcs import build_arc2d
from custom_components.hetnet_realize.synth.arcs import build_arc3d
from custom_components.hetnet_realize.synth.tubes import KIND_A
from custom_components.hetnet_realize.synth.tubes import KIND_B
from custom_components.hetnet_realize.synth.tubes import KIND_C
from custom_components.hetnet_realize.synth.tubes import check_disjoint
from custom_components.hetnet_realize.synth.tubes import lift_and_tube

CFG = RealizationConfig()
RHO = [0.0, 1.0, 2.0, 3.0]


def test_page_arc_lifts_to_two_tubes():
    arc = build_arc2d((0, 1), EdgePlacement(2, UPPER), 0, CFG, RHO)
    tubes = lift_and_tube(arc, 4, CFG)
    assert [t.kind for t in tubes] == [KIND_A, KIND_B]
    assert [t.plane.key for t in tubes] == ["page_a:2", "page_b"]
    assert not any(t.is_3d for t in tubes)


def test_pair_arc_lifts_to_three_tubes():
    [arc, *_] = build_arc3d(0, [(0, 1), (0, 2), (0, 3)], SubspaceId.three_d(1, 2), CFG, RHO)
    tubes = lift_and_tube(arc, 4, CFG)
    assert [t.kind for t in tubes] == [KIND_A, KIND_B, KIND_C]
    assert all(t.is_3d for t in tubes)
    assert tubes[0].face == arc.face


def test_centerline_contribution():
    arc = build_arc2d((0, 2), EdgePlacement(1, UPPER), 1, CFG, RHO)
    [tube_a, _] = lift_and_tube(arc, 3, CFG)
    i = len(arc.times) // 2
    rows = tube_a.plane.lift_points(arc.points[[i]])
    coords, residual = tube_a.plane.decode(rows)
    weight, value = tube_a.contribution(coords, residual, CFG)
    assert weight[0] == pytest.approx(1.0)
    assert value[0] == pytest.approx(arc.velocities[i, 0])


def test_far_points_are_ignored():
    arc = build_arc2d((0, 2), EdgePlacement(1, UPPER), 1, CFG, RHO)
    [tube_a, _] = lift_and_tube(arc, 3, CFG)
    coords = np.array([[10.0, 10.0], [1.0, -0.5]])
    weight, value = tube_a.contribution(coords, np.zeros(2), CFG)
    assert np.all(weight == 0.0)
    assert np.all(value == 0.0)


def test_overlapping_tubes_are_rejected():
    first = build_arc2d((0, 2), EdgePlacement(1, UPPER), 0, CFG, RHO)
    second = build_arc2d((1, 3), EdgePlacement(1, UPPER), 0, CFG, RHO)
    tubes = lift_and_tube(first, 3, CFG) + lift_and_tube(second, 3, CFG)
    with pytest.raises(SynthesisException):
        check_disjoint(tubes, CFG)


def test_separate_pages_may_overlap_in_their_own_planes():
    first = build_arc2d((0, 2), EdgePlacement(1, UPPER), 0, CFG, RHO)
    second = build_arc2d((1, 3), EdgePlacement(2, UPPER), 1, CFG, RHO)
    check_disjoint(lift_and_tube(first, 3, CFG) + lift_and_tube(second, 3, CFG), CFG)
