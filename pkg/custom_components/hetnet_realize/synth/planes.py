"""Linear lifts of subspace coordinates into the argument space of f"""
from dataclasses import dataclass
from dataclasses import field

import numpy as np

from ..common.exceptions import SynthesisException

PAGE_A = "page_a"
PAGE_B = "page_b"
PAIR_A = "pair_a"
PAIR_B = "pair_b"
PAIR_C = "pair_c"


@dataclass(eq=False)
class LiftPlane:
    """
    Argument rows y = L @ P for subspace coordinates P.

    2D planes use P = (u, v) with u = x_0 and v = x_j - x_0; 3D planes use the
    cell states P = (x_0, x_a, x_b). The value f takes on the plane drives the
    velocity component selected by `output`.
    """

    key: str
    lift: np.ndarray
    output: np.ndarray
    _pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.lift = np.asarray(self.lift, dtype=float)
        self.output = np.asarray(self.output, dtype=float)
        self._pinv = np.linalg.pinv(self.lift)

    @property
    def dim(self) -> int:
        return self.lift.shape[1]

    @property
    def arity(self) -> int:
        return self.lift.shape[0]

    def lift_points(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.lift.T

    def decode(self, args: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Least-squares plane coordinates of each row and its distance to the plane"""
        coords = args @ self._pinv.T
        residual = np.linalg.norm(args - coords @ self.lift.T, axis=-1)
        return coords, residual

    @staticmethod
    def page_a(arity: int, j: int) -> "LiftPlane":
        lift = np.zeros((arity, 2))
        lift[:, 0] = 1.0
        lift[j, 1] = 1.0
        return LiftPlane(f"{PAGE_A}:{j}", lift, [1.0, 0.0])

    @staticmethod
    def page_b(arity: int) -> "LiftPlane":
        lift = np.zeros((arity, 2))
        lift[:, 0] = 1.0
        lift[0, 1] = 1.0
        return LiftPlane(PAGE_B, lift, [1.0, 1.0])

    @staticmethod
    def pair_planes(arity: int, a: int, b: int) -> list["LiftPlane"]:
        """Arguments of cell 0, cell a and cell b on the pair subspace"""
        spare = [t for t in range(1, arity) if t not in (a, b)]
        if not spare:
            raise SynthesisException(
                f"pair ({a}, {b}) has no spare input slot to anchor the diagonal"
            )
        x0, xa, xb = np.eye(3)
        rows_a = np.array([x0] * arity)
        rows_a[a], rows_a[b] = xa, xb
        rows_b = np.array([x0] * arity)
        rows_b[0], rows_b[a], rows_b[b] = xa, xb, xb
        rows_c = np.array([x0] * arity)
        rows_c[0], rows_c[a], rows_c[b] = xb, x0, xa
        return [
            LiftPlane(f"{PAIR_A}:{a},{b}", rows_a, x0),
            LiftPlane(f"{PAIR_B}:{a},{b}", rows_b, xa),
            LiftPlane(f"{PAIR_C}:{a},{b}", rows_c, xb),
        ]
