"""Tests for Jacobians, closed-form spectra and RK4 integration."""
import math

import numpy as np
import pytest

from custom_components.hetnet_realize.ccn import CallableField
from custom_components.hetnet_realize.ccn import build_Pn
from custom_components.hetnet_realize.ccn import build_Q
from custom_components.hetnet_realize.dynamics import ArrivalMonitor
from custom_components.hetnet_realize.dynamics import Termination
from custom_components.hetnet_realize.dynamics import eig_3d_pair
from custom_components.hetnet_realize.dynamics import eig_full_sync_pn
from custom_components.hetnet_realize.dynamics import integrate
from custom_components.hetnet_realize.dynamics import integrate_batch
from custom_components.hetnet_realize.dynamics import jacobian
from custom_components.hetnet_realize.dynamics import pair_lateral_block
from custom_components.hetnet_realize.dynamics import pair_matrix


def _linear(alphas, rho=0.0) -> CallableField:
    alphas = np.asarray(alphas, dtype=float)
    return CallableField(lambda *y: float(np.dot(alphas, np.asarray(y) - rho)), len(alphas))


def _sorted(values) -> list[complex]:
    return sorted((complex(v) for v in values), key=lambda v: (round(v.real, 6), round(v.imag, 6)))


def test_jacobian_of_linear_field_q01():
    ccn = build_Q(0, 1)
    J = jacobian(ccn, _linear([-1.0, -2.0, -2.0]), np.zeros(3))
    expected = np.array([[-1.0, -2.0, -2.0], [0.0, -1.0, -4.0], [-2.0, -2.0, -1.0]])
    assert np.allclose(J, expected, atol=1e-8)


def test_jacobian_of_zero_field():
    ccn = build_Pn(2)
    J = jacobian(ccn, CallableField(lambda *y: 0.0, 3), np.ones(3))
    assert np.array_equal(J, np.zeros((3, 3)))


def test_jacobian_rejects_non_finite():
    ccn = build_Pn(1)
    with pytest.raises(FloatingPointError):
        jacobian(ccn, CallableField(lambda y0, y1: math.inf, 2), np.zeros(2))


@pytest.mark.parametrize(
    "alphas,expected",
    [
        ((-1.0, -4.0, 1.0), [-4.0, 3.0, -2.0]),
        ((-1.0, -2.0), [-3.0, 1.0]),
        ((0.0, 0.0, 0.0), [0.0, 0.0, 0.0]),
    ],
)
def test_eig_full_sync_pn(alphas, expected):
    assert eig_full_sync_pn(alphas, len(alphas) - 1) == expected


@pytest.mark.parametrize("seed", range(100))
def test_eig_full_sync_pn_matches_jacobian(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 7))
    alphas = rng.uniform(-3.0, 3.0, k + 1)
    J = jacobian(build_Pn(k), _linear(alphas, 0.5), np.full(k + 1, 0.5))
    numeric = np.sort(np.linalg.eigvals(J).real)
    assert np.allclose(numeric, np.sort(eig_full_sync_pn(alphas, k)), atol=1e-6)


def test_eig_3d_pair_examples():
    values = eig_3d_pair(-1.0, 0.0, (-2.0, -2.0))
    assert values.radial == pytest.approx(-5.0)
    assert values.lateral_real == pytest.approx((1.0, 1.0))
    values = eig_3d_pair(-1.0, 0.0, (0.0, 0.0))
    assert values.lateral_real == pytest.approx((-1.0, -1.0))


@pytest.mark.parametrize("seed", range(100))
def test_eig_3d_pair_matches_matrices(seed):
    rng = np.random.default_rng(seed)
    f0, b, fa, fb = rng.uniform(-3.0, 3.0, 4)
    values = eig_3d_pair(f0, b, (fa, fb))
    full = np.linalg.eigvals(pair_matrix(f0, b, fa, fb))
    lateral = np.linalg.eigvals(pair_lateral_block(f0, fa, fb))
    assert np.allclose(_sorted(lateral), _sorted(values.lateral), atol=1e-8)
    assert np.allclose(_sorted(full), _sorted([values.radial, *values.lateral]), atol=1e-8)


def test_q01_spectrum_matches_pair_formula():
    alphas = [-1.0, -2.0, -1.0]
    J = jacobian(build_Q(0, 1), _linear(alphas), np.zeros(3))
    values = eig_3d_pair(alphas[0], 0.0, (alphas[1], alphas[2]))
    assert np.allclose(
        _sorted(np.linalg.eigvals(J)), _sorted([values.radial, *values.lateral]), atol=1e-6
    )


def test_rk4_linear_decay():
    ccn = build_Pn(1)
    traj = integrate(ccn, CallableField(lambda y0, y1: -y0, 2), np.ones(2), 0.01, 5.0)
    assert traj.termination == Termination.MAX_TIME
    assert traj.times[-1] == pytest.approx(5.0)
    assert np.allclose(traj.final, math.exp(-5.0), atol=1e-8)
    assert np.all(np.diff(traj.times) > 0)


def test_equilibrium_is_stationary():
    ccn = build_Pn(2)
    traj = integrate(ccn, _linear([-1.0, -4.0, 1.0], 2.0), np.full(3, 2.0), 0.01, 1.0)
    assert np.array_equal(traj.states, np.full_like(traj.states, 2.0))


def test_synchrony_subspace_is_invariant():
    ccn = build_Pn(3)
    field = CallableField(lambda y0, y1, y2, y3: -y0 + y2 * y2 - 0.3 * y1 * y3 + 0.1, 4)
    x0 = np.array([0.2, 0.2, -0.4, 0.2])
    traj = integrate(ccn, field, x0, 0.01, 10.0)
    synced = traj.states[:, [0, 1, 3]]
    assert np.max(np.abs(synced - synced[:, :1])) < 1e-10


def test_blow_up():
    ccn = build_Pn(1)
    traj = integrate(ccn, CallableField(lambda y0, y1: y0 * y0, 2), np.ones(2), 0.01, 5.0, blow_up=1e3)
    assert traj.termination == Termination.BLOW_UP
    assert traj.duration < 1.1


def test_stall_detection():
    ccn = build_Pn(1)
    traj = integrate(ccn, CallableField(lambda y0, y1: 0.0, 2), np.ones(2), 0.1, 10.0, detect_stall=True)
    assert traj.termination == Termination.STALLED
    assert traj.duration == pytest.approx(0.1)


def test_stop_on_arrival():
    ccn = build_Pn(1)
    monitor = ArrivalMonitor([np.zeros(2), np.full(2, 5.0)], 1e-2, 0.5)
    traj = integrate(ccn, CallableField(lambda y0, y1: -y0, 2), np.ones(2), 0.01, 50.0, stop=monitor)
    assert traj.termination == Termination.REACHED_TARGET
    assert traj.reached == 0
    # The two-cell state enters the ball once sqrt(2) e^-t < 1e-2; residence adds half a unit
    assert traj.duration == pytest.approx(math.log(100.0 * math.sqrt(2.0)) + 0.5, abs=0.02)


def test_monitor_ignores_origin_until_left():
    monitor = ArrivalMonitor([np.zeros(1), np.ones(1)], 0.1, 0.0, origin=0)
    assert not monitor(0.0, np.array([0.0]))
    assert not monitor(1.0, np.array([0.5]))
    assert monitor(2.0, np.array([0.05]))
    assert monitor.reached == 0


def test_monitor_needs_residence():
    monitor = ArrivalMonitor([np.zeros(1)], 0.1, 1.0)
    assert not monitor(0.0, np.array([0.0]))
    assert not monitor(0.5, np.array([0.2]))
    assert not monitor(0.6, np.array([0.0]))
    assert monitor(1.7, np.array([0.0]))


def test_integrate_batch():
    ccn = build_Pn(1)
    field = CallableField(lambda y0, y1: -y0 + y0 * y0, 2)
    starts = np.array([[0.5, 0.5], [2.0, 2.0]])
    monitors = [ArrivalMonitor([np.zeros(2)], 1e-3, 0.5) for _ in starts]
    result = integrate_batch(ccn, field, starts, 0.01, 30.0, monitors, blow_up=1e3)
    assert result.terminations == [Termination.REACHED_TARGET, Termination.BLOW_UP]
    assert result.reached == [0, None]
    assert result.final_times[0] < 30.0
