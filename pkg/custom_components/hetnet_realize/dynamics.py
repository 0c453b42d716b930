"""Admissible systems: Jacobians, closed-form spectra and RK4 trajectories"""
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from enum import Enum
import logging
from typing import Callable
from typing import NamedTuple

import numpy as np

from .ccn import CCN
from .ccn import ScalarField
from .ccn import admissible_rhs
from .const import FD_STEP
from .const import STALL_SPEED

_LOGGER = logging.getLogger(__name__)


class Termination(str, Enum):
    REACHED_TARGET = "reached_target"
    MAX_TIME = "max_time"
    BLOW_UP = "blow_up"
    STALLED = "stalled"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    termination: Termination
    reached: int | None = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])


def jacobian(
    ccn: CCN, field: ScalarField, p: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Central finite-difference Jacobian of the admissible vector field"""
    p = np.asarray(p, dtype=float)
    m = ccn.num_cells
    offsets = np.eye(m) * step
    # Evaluate all perturbed states in one batch
    states = np.concatenate([p + offsets, p - offsets])
    values = admissible_rhs(ccn, field, states)
    result = (values[:m] - values[m:]).T / (2 * step)
    if not np.all(np.isfinite(result)):
        raise FloatingPointError(f"non-finite Jacobian at {p}")
    return result


def eig_full_sync_pn(alphas: list[float] | np.ndarray, k: int) -> list[float]:
    """Spectrum at a full-sync equilibrium of P_k: sum, then a_0 - a_j"""
    alphas = [float(a) for a in alphas]
    assert len(alphas) == k + 1
    return [sum(alphas)] + [alphas[0] - alphas[j] for j in range(1, k + 1)]


class PairEigenvalues(NamedTuple):
    radial: float
    lateral: tuple[complex, complex]

    @property
    def lateral_real(self) -> tuple[float, float]:
        return (self.lateral[0].real, self.lateral[1].real)


def eig_3d_pair(
    f0: float, b_complement: float, pair: tuple[float, float]
) -> PairEigenvalues:
    """Radial and lateral eigenvalues on a three-dimensional pair subspace"""
    fa, fb = pair
    radial = f0 + b_complement + fa + fb
    disc = fb * fb + 2 * fa * fb - 3 * fa * fa
    root = np.sqrt(complex(disc))
    centre = 0.5 * (2 * f0 - fa - fb)
    if disc >= 0:
        root = complex(root.real, 0.0)
    return PairEigenvalues(
        radial, (complex(centre + 0.5 * root), complex(centre - 0.5 * root))
    )


def pair_matrix(f0: float, b_complement: float, fa: float, fb: float) -> np.ndarray:
    """Linearization restricted to a pair subspace, coordinates (x_0, x_a, x_b)"""
    b = b_complement
    return np.array(
        [
            [f0 + b, fa, fb],
            [b, f0, fa + fb],
            [b + fa, fb, f0],
        ]
    )


def pair_lateral_block(f0: float, fa: float, fb: float) -> np.ndarray:
    """Dynamics of (x_a - x_0, x_b - x_0) at a full-sync equilibrium"""
    return np.array([[f0 - fa, fa], [fb - fa, f0 - fb]])


class ArrivalMonitor:
    """
    Stop predicate: fires once a state has stayed near one target long enough.
    The origin target is ignored until the state has first left it.
    """

    def __init__(
        self,
        targets: list[np.ndarray],
        tolerance: float,
        residence: float,
        origin: int | None = None,
    ) -> None:
        self._targets = np.asarray(targets, dtype=float).reshape(len(targets), -1)
        self._tolerance = tolerance
        self._residence = residence
        self._origin = origin
        self._entered: float | None = None
        self._current: int | None = None
        self.reached: int | None = None

    def nearest(self, x: np.ndarray) -> tuple[int | None, float]:
        if not len(self._targets):
            return None, np.inf
        distances = np.linalg.norm(self._targets - x, axis=1)
        index = int(np.argmin(distances))
        return index, float(distances[index])

    def __call__(self, t: float, x: np.ndarray) -> bool:
        if self._origin is not None:
            if np.linalg.norm(self._targets[self._origin] - x) < self._tolerance:
                return False
            self._origin = None
        index, distance = self.nearest(x)
        if distance >= self._tolerance:
            self._entered = None
            self._current = None
            return False
        if self._current != index:
            self._current = index
            self._entered = t
        if t - self._entered >= self._residence:
            self.reached = index
            return True
        return False


def _rk4_step(
    rhs: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float
) -> tuple[np.ndarray, np.ndarray]:
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * h * k1)
    k3 = rhs(x + 0.5 * h * k2)
    k4 = rhs(x + h * k3)
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), k1


def integrate(
    ccn: CCN,
    field: ScalarField,
    x0: np.ndarray,
    h: float,
    T: float,
    stop: Callable[[float, np.ndarray], bool] | None = None,
    blow_up: float = 1e6,
    detect_stall: bool = False,
    record_every: int = 1,
) -> Trajectory:
    """Fixed-step classical Runge-Kutta integration of x' = f^N(x)"""
    assert h > 0 and T > 0
    x = np.array(x0, dtype=float)
    t = 0.0
    times = [t]
    states = [x.copy()]
    steps = int(np.ceil(T / h - 1e-9))
    termination = Termination.MAX_TIME

    def rhs(state: np.ndarray) -> np.ndarray:
        return admissible_rhs(ccn, field, state)

    if stop is not None and stop(t, x):
        termination = Termination.REACHED_TARGET
        steps = 0

    for n in range(1, steps + 1):
        x, slope = _rk4_step(rhs, x, h)
        t = n * h
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > blow_up:
            termination = Termination.BLOW_UP
            times.append(t)
            states.append(x.copy())
            _LOGGER.debug("Trajectory blew up at t=%.3f", t)
            break
        if n % record_every == 0 or n == steps:
            times.append(t)
            states.append(x.copy())
        if stop is not None and stop(t, x):
            termination = Termination.REACHED_TARGET
            break
        if detect_stall and np.linalg.norm(slope) < STALL_SPEED:
            termination = Termination.STALLED
            _LOGGER.debug("Trajectory stalled at t=%.3f", t)
            break

    if times[-1] != t:
        times.append(t)
        states.append(x.copy())
    reached = getattr(stop, "reached", None)
    return Trajectory(np.array(times), np.array(states), termination, reached)


@dataclass
class BatchResult:
    """Outcome of integrating many initial states side by side"""

    reached: list[int | None]
    terminations: list[Termination]
    final_states: np.ndarray
    final_times: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(0))


def integrate_batch(
    ccn: CCN,
    field: ScalarField,
    x0: np.ndarray,
    h: float,
    T: float,
    monitors: list[ArrivalMonitor],
    blow_up: float = 1e6,
) -> BatchResult:
    """RK4 on a stack of states; each row stops independently"""
    x = np.array(x0, dtype=float)
    count = x.shape[0]
    active = np.ones(count, dtype=bool)
    terminations = [Termination.MAX_TIME] * count
    final_times = np.full(count, T)
    steps = int(np.ceil(T / h - 1e-9))

    def rhs(state: np.ndarray) -> np.ndarray:
        return admissible_rhs(ccn, field, state)

    for n in range(1, steps + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        new, _ = _rk4_step(rhs, x[idx], h)
        x[idx] = new
        t = n * h
        for row, i in enumerate(idx):
            state = new[row]
            if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > blow_up:
                terminations[i] = Termination.BLOW_UP
            elif monitors[i](t, state):
                terminations[i] = Termination.REACHED_TARGET
            else:
                continue
            active[i] = False
            final_times[i] = t

    return BatchResult(
        [m.reached for m in monitors], terminations, x, final_times
    )
