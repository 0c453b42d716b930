"""Tests for coupled cell networks and their synchrony subspaces."""
import numpy as np
import pytest

from custom_components.hetnet_realize.ccn import CCN
from custom_components.hetnet_realize.ccn import FULL_SYNC
from custom_components.hetnet_realize.ccn import CallableField
from custom_components.hetnet_realize.ccn import Coloring
from custom_components.hetnet_realize.ccn import SubspaceId
from custom_components.hetnet_realize.ccn import admissible_rhs
from custom_components.hetnet_realize.ccn import as_field
from custom_components.hetnet_realize.ccn import build_Pn
from custom_components.hetnet_realize.ccn import build_Q
from custom_components.hetnet_realize.ccn import enumerate_balanced
from custom_components.hetnet_realize.ccn import export_ccn_dot
from custom_components.hetnet_realize.ccn import is_balanced
from custom_components.hetnet_realize.ccn import minimal_synchrony
from custom_components.hetnet_realize.ccn import restricted_growth_strings
from custom_components.hetnet_realize.common.exceptions import CcnException


def test_p2_inputs():
    assert build_Pn(2).inputs == ((1, 2), (0, 2), (1, 0))


def test_p2_edge_sets():
    ccn = build_Pn(2)
    assert ccn.edge_set(1) == {(1, 0), (0, 1), (1, 2)}
    assert ccn.edge_set(2) == {(2, 0), (2, 1), (0, 2)}


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_pn_input_rule(n):
    ccn = build_Pn(n)
    assert (ccn.num_cells, ccn.num_types) == (n + 1, n)
    for c in range(n + 1):
        for j in range(1, n + 1):
            assert ccn.inputs[c][j - 1] == (0 if j == c else j)


def test_q11_inputs():
    ccn = build_Q(1, 1)
    assert ccn.inputs == ((1, 2, 3), (0, 2, 3), (1, 3, 3), (1, 0, 2))


@pytest.mark.parametrize("n1,n2,cells,types", [(0, 0, 1, 0), (0, 1, 3, 2), (1, 2, 6, 5), (3, 1, 6, 5)])
def test_q_sizes(n1, n2, cells, types):
    ccn = build_Q(n1, n2)
    assert (ccn.num_cells, ccn.num_types) == (cells, types)


@pytest.mark.parametrize("build,args", [(build_Pn, (0,)), (build_Q, (-1, 0)), (build_Q, (0, -2))])
def test_invalid_parameters(build, args):
    with pytest.raises(CcnException):
        build(*args)


def test_ccn_rejects_bad_rows():
    with pytest.raises(CcnException):
        CCN(2, 1, ((1,), (0, 1)))
    with pytest.raises(CcnException):
        CCN(2, 1, ((1,), (2,)))


def test_minimal_synchrony_pn():
    assert minimal_synchrony(build_Pn(3)) == [SubspaceId.two_d(j) for j in (1, 2, 3)]


def test_minimal_synchrony_q():
    assert minimal_synchrony(build_Q(1, 2)) == [
        SubspaceId.two_d(1),
        SubspaceId.three_d(2, 3),
        SubspaceId.three_d(4, 5),
    ]


def test_minimal_synchrony_needs_family():
    with pytest.raises(CcnException):
        minimal_synchrony(CCN(2, 1, ((1,), (0,))))


def test_subspace_coloring():
    coloring = SubspaceId.three_d(2, 3).coloring(4)
    assert coloring.classes == ((0, 1), (2,), (3,))
    assert str(SubspaceId.three_d(2, 3)) == "Delta_2,3"
    assert str(FULL_SYNC) == "Delta_0"


@pytest.mark.parametrize("n,bell", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_restricted_growth_strings(n, bell):
    strings = list(restricted_growth_strings(n))
    assert len(strings) == bell
    assert len({tuple(s) for s in strings}) == bell


def test_enumerate_balanced_p1():
    found = enumerate_balanced(build_Pn(1))
    assert found == [Coloring.of([[0, 1]]), Coloring.of([[0], [1]])]


def test_enumerate_balanced_contains_minimal_subspaces():
    ccn = build_Pn(2)
    found = enumerate_balanced(ccn)
    for subspace in minimal_synchrony(ccn):
        assert subspace.coloring(3) in found
    assert Coloring.of([[0, 1, 2]]) in found


def test_enumeration_guard():
    with pytest.raises(CcnException):
        enumerate_balanced(build_Q(1, 5))


def test_unbalanced_coloring():
    # Cell 2 reads (1, 3, 3) while cell 0 reads (1, 2, 3)
    assert not is_balanced(build_Q(1, 1), Coloring.of([[0, 1, 2], [3]]))
    assert is_balanced(build_Q(1, 1), Coloring.of([[0, 1], [2], [3]]))


def test_balanced_needs_partition():
    with pytest.raises(CcnException):
        is_balanced(build_Pn(2), Coloring.of([[0, 1]]))


def test_coarsening():
    fine = Coloring.of([[0], [1], [2]])
    coarse = Coloring.of([[0, 2], [1]])
    assert coarse.is_coarsening_of(fine)
    assert not fine.is_coarsening_of(coarse)


def test_admissible_rhs():
    ccn = build_Pn(2)
    field = CallableField(lambda y0, y1, y2: y0 + 10 * y1 + 100 * y2, 3)
    x = np.array([1.0, 2.0, 3.0])
    # Cell 1 reads (x1, x0, x2); cell 2 reads (x2, x1, x0)
    assert admissible_rhs(ccn, field, x).tolist() == [321.0, 312.0, 123.0]
    assert field(1.0, 0.0, 0.0) == 1.0


def test_admissible_rhs_dimension_mismatch():
    with pytest.raises(CcnException):
        admissible_rhs(build_Pn(2), lambda *y: 0.0, np.zeros(4))


def test_field_arity_mismatch():
    with pytest.raises(CcnException):
        as_field(CallableField(lambda y0: y0, 1), 3)


def test_ccn_dot_has_one_line_per_input():
    ccn = build_Q(1, 1)
    dot = export_ccn_dot(ccn)
    assert dot.count("->") == ccn.num_cells * ccn.num_types
    assert 'label="3"' in dot


def test_ccn_dict_round_trip():
    ccn = build_Q(1, 1)
    again = CCN.from_dict(ccn.as_dict())
    assert again.inputs == ccn.inputs
    assert again.num_types == 3


def test_q01_edge_sets():
    ccn = build_Q(0, 1)
    assert ccn.edge_set(1) == {(1, 0), (2, 1), (0, 2)}
    assert ccn.edge_set(2) == {(2, 0), (2, 1), (1, 2)}


def test_q01_has_no_balanced_planes():
    ccn = build_Q(0, 1)
    assert not is_balanced(ccn, SubspaceId.two_d(1).coloring(3))
    assert not is_balanced(ccn, SubspaceId.two_d(2).coloring(3))
    assert minimal_synchrony(ccn) == [SubspaceId.three_d(1, 2)]


def _minimal_by_enumeration(ccn: CCN) -> set[Coloring]:
    proper = [c for c in enumerate_balanced(ccn) if len(c.classes) > 1]
    return {
        c for c in proper if not any(d != c and d.is_coarsening_of(c) for d in proper)
    }


@pytest.mark.parametrize(
    "ccn",
    [build_Pn(n) for n in range(1, 6)]
    + [build_Q(n1, n2) for n1, n2 in [(0, 1), (1, 1), (2, 1), (3, 1), (0, 2), (1, 2)]],
)
def test_minimal_synchrony_matches_enumeration(ccn):
    found = {s.coloring(ccn.num_cells) for s in minimal_synchrony(ccn)}
    assert found == _minimal_by_enumeration(ccn)


@pytest.mark.parametrize("n1,n2", [(0, 1), (1, 1), (1, 2), (2, 2)])
def test_q_synchrony_subspaces_are_invariant(n1, n2):
    ccn = build_Q(n1, n2)
    rng = np.random.default_rng(n1 + 10 * n2)
    weights = rng.uniform(-1.0, 1.0, 1 + ccn.num_types)
    field = CallableField(
        lambda *y: float(np.tanh(np.dot(weights, y)) + y[0] * y[-1] - 0.3 * y[1] ** 2),
        1 + ccn.num_types,
    )
    for subspace in minimal_synchrony(ccn):
        x = np.full(ccn.num_cells, rng.uniform(-1.0, 1.0))
        for j in subspace.indices:
            x[j] = rng.uniform(-1.0, 1.0)
        rhs = admissible_rhs(ccn, field, x)
        synced = [c for c in range(ccn.num_cells) if c not in subspace.indices]
        assert np.allclose(rhs[synced], rhs[0], atol=1e-12)
