"""Homogeneous coupled cell networks with asymmetric inputs"""
from abc import ABC
from abc import abstractmethod
from dataclasses import dataclass
from enum import Enum
import logging
from typing import Any
from typing import Callable
from typing import Iterator

import numpy as np
import voluptuous as vol

from .common.exceptions import CcnException
from .const import FAMILY_PN
from .const import FAMILY_Q
from .const import MAX_ENUMERATION_CELLS

_LOGGER = logging.getLogger(__name__)

# One arrowhead per input type, cycled for larger networks
_ARROWHEADS = ["normal", "empty", "dot", "odot", "diamond", "odiamond", "box", "obox"]


@dataclass(frozen=True)
class CCN:
    """inputs[c][t - 1] is the cell feeding cell c through input type t"""

    num_cells: int
    num_types: int
    inputs: tuple[tuple[int, ...], ...]
    family: str | None = None
    params: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.inputs) != self.num_cells:
            raise CcnException("every cell needs an input row")
        for c, row in enumerate(self.inputs):
            if len(row) != self.num_types:
                raise CcnException(f"cell {c} must have exactly one input per type")
            if any(not 0 <= src < self.num_cells for src in row):
                raise CcnException(f"cell {c} has an input from an unknown cell")

    @property
    def index_matrix(self) -> np.ndarray:
        """(cells, 1 + types) array of the cells read by each component of f"""
        return np.array(
            [[c, *row] for c, row in enumerate(self.inputs)], dtype=int
        ).reshape(self.num_cells, 1 + self.num_types)

    def edge_set(self, t: int) -> set[tuple[int, int]]:
        """Edges (source, target) of input type t (1-based)"""
        return {(row[t - 1], c) for c, row in enumerate(self.inputs)}

    def arguments(self, x: np.ndarray) -> np.ndarray:
        """Arguments of f for every cell; shape (..., cells, 1 + types)"""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.num_cells:
            raise CcnException(
                f"state has dimension {x.shape[-1]}, network has {self.num_cells} cells"
            )
        return x[..., self.index_matrix]

    def as_dict(self) -> dict[str, Any]:
        return {
            "cells": self.num_cells,
            "types": self.num_types,
            "inputs": [list(row) for row in self.inputs],
        }

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "CCN":
        data = CCN_SCHEMA(data)
        return CCN(
            data["cells"], data["types"], tuple(tuple(r) for r in data["inputs"])
        )


CCN_SCHEMA = vol.Schema(
    {
        vol.Required("cells"): vol.All(int, vol.Range(min=1)),
        vol.Required("types"): vol.All(int, vol.Range(min=0)),
        vol.Required("inputs"): [[int]],
    },
    extra=vol.REMOVE_EXTRA,
)


def export_ccn_dot(ccn: CCN) -> str:
    lines = ["digraph ccn {"]
    lines.extend(f'  "{c}";' for c in range(ccn.num_cells))
    for t in range(1, ccn.num_types + 1):
        head = _ARROWHEADS[(t - 1) % len(_ARROWHEADS)]
        for c, row in enumerate(ccn.inputs):
            lines.append(f'  "{row[t - 1]}" -> "{c}" [arrowhead={head}, label="{t}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_Pn(n: int) -> CCN:
    """P_1 is the two-cell network; each step adds one cell and one input type"""
    if n < 1:
        raise CcnException(f"P_n needs n >= 1, got {n}")
    rows = [[1], [0]]
    for m in range(1, n):
        new = m + 1
        # The new cell reads cell j through every existing type j
        rows.append(list(range(1, new)))
        # New type: every cell reads the new cell, which reads cell 0
        for c, row in enumerate(rows):
            row.append(0 if c == new else new)
    return CCN(n + 1, n, tuple(tuple(r) for r in rows), FAMILY_PN, (n,))


def build_Q(n1: int, n2: int) -> CCN:
    """Start from P_{n1} (or a single cell) and add two cells and two types per step"""
    if n1 < 0 or n2 < 0:
        raise CcnException(f"Q needs n1, n2 >= 0, got ({n1}, {n2})")
    if n1 > 0:
        rows = [list(r) for r in build_Pn(n1).inputs]
    else:
        rows = [[]]
    for k in range(n2):
        a = n1 + 2 * k + 1
        b = a + 1
        old_types = len(rows[0])
        rows.append([j for j in range(1, old_types + 1)])
        rows.append([j for j in range(1, old_types + 1)])
        for c, row in enumerate(rows):
            if c == a:
                row.extend([b, b])
            elif c == b:
                row.extend([0, a])
            else:
                row.extend([a, b])
    types = n1 + 2 * n2
    return CCN(len(rows), types, tuple(tuple(r) for r in rows), FAMILY_Q, (n1, n2))


@dataclass(frozen=True)
class Coloring:
    """Partition of the cells into synchrony classes, canonically ordered"""

    classes: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(classes: list[list[int]] | list[set[int]]) -> "Coloring":
        return Coloring(tuple(sorted(tuple(sorted(c)) for c in classes if c)))

    @staticmethod
    def from_rgs(rgs: list[int]) -> "Coloring":
        groups: dict[int, list[int]] = {}
        for cell, block in enumerate(rgs):
            groups.setdefault(block, []).append(cell)
        return Coloring.of(list(groups.values()))

    @property
    def num_cells(self) -> int:
        return sum(len(c) for c in self.classes)

    def color_map(self) -> dict[int, int]:
        return {cell: i for i, cls in enumerate(self.classes) for cell in cls}

    def is_coarsening_of(self, other: "Coloring") -> bool:
        """True iff every class of other lies inside one class of self"""
        colors = self.color_map()
        return all(len({colors[c] for c in cls}) == 1 for cls in other.classes)


def is_balanced(ccn: CCN, coloring: Coloring) -> bool:
    """Same-coloured cells receive same-coloured inputs, type by type"""
    colors = coloring.color_map()
    if sorted(colors) != list(range(ccn.num_cells)):
        raise CcnException("coloring must partition the cells of the network")
    for cls in coloring.classes:
        first = ccn.inputs[cls[0]]
        for cell in cls[1:]:
            row = ccn.inputs[cell]
            if any(colors[a] != colors[b] for a, b in zip(first, row)):
                return False
    return True


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """Every set partition of n items as a restricted growth string"""
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def _grow(i: int, max_block: int) -> Iterator[list[int]]:
        if i == n:
            yield list(rgs)
            return
        for block in range(max_block + 2):
            rgs[i] = block
            yield from _grow(i + 1, max(max_block, block))

    rgs[0] = 0
    yield from _grow(1, 0)


def enumerate_balanced(ccn: CCN, max_cells: int = MAX_ENUMERATION_CELLS) -> list[Coloring]:
    if ccn.num_cells > max_cells:
        raise CcnException(
            f"{ccn.num_cells} cells exceeds enumeration guard of {max_cells}"
        )
    found = [
        Coloring.from_rgs(rgs)
        for rgs in restricted_growth_strings(ccn.num_cells)
        if is_balanced(ccn, Coloring.from_rgs(rgs))
    ]
    found.sort(key=lambda c: (len(c.classes), c.classes))
    _LOGGER.debug("%d balanced colorings found", len(found))
    return found


class SubspaceKind(str, Enum):
    FULL = "full"
    TWO_D = "2d"
    THREE_D = "3d"


@dataclass(frozen=True)
class SubspaceId:
    """Delta_0 (FULL), Delta_j (TWO_D) or Delta_{j1,j2} (THREE_D)"""

    kind: SubspaceKind
    indices: tuple[int, ...] = ()

    def coloring(self, num_cells: int) -> Coloring:
        free = set(self.indices)
        synced = [c for c in range(num_cells) if c not in free]
        return Coloring.of([synced] + [[j] for j in self.indices])

    def __str__(self) -> str:
        if self.kind == SubspaceKind.FULL:
            return "Delta_0"
        return "Delta_" + ",".join(str(j) for j in self.indices)

    @staticmethod
    def two_d(j: int) -> "SubspaceId":
        return SubspaceId(SubspaceKind.TWO_D, (j,))

    @staticmethod
    def three_d(j1: int, j2: int) -> "SubspaceId":
        return SubspaceId(SubspaceKind.THREE_D, (j1, j2))


FULL_SYNC = SubspaceId(SubspaceKind.FULL)


def _is_minimal(ccn: CCN, coloring: Coloring) -> bool:
    """No balanced coloring strictly between Delta_0 and this one"""
    blocks = coloring.classes
    for rgs in restricted_growth_strings(len(blocks)):
        merged = max(rgs) + 1
        if merged in (1, len(blocks)):
            continue
        coarser = Coloring.of(
            [[c for i, b in enumerate(blocks) if rgs[i] == m for c in b] for m in range(merged)]
        )
        if is_balanced(ccn, coarser):
            return False
    return True


def minimal_synchrony(ccn: CCN) -> list[SubspaceId]:
    """Minimal synchrony subspaces of P_n and Q_{n1,n2}"""
    if ccn.family == FAMILY_PN:
        result = [SubspaceId.two_d(j) for j in range(1, ccn.params[0] + 1)]
    elif ccn.family == FAMILY_Q:
        n1, n2 = ccn.params
        result = [SubspaceId.two_d(j) for j in range(1, n1 + 1)] + [
            SubspaceId.three_d(n1 + 2 * k + 1, n1 + 2 * k + 2) for k in range(n2)
        ]
    else:
        raise CcnException("minimal synchrony subspaces are only known for P_n and Q")

    for subspace in result:
        coloring = subspace.coloring(ccn.num_cells)
        assert is_balanced(ccn, coloring), f"{subspace} is not balanced"
        assert _is_minimal(ccn, coloring), f"{subspace} is not minimal"
    return result


class ScalarField(ABC):
    """The scalar function f of an admissible vector field"""

    arity: int

    @abstractmethod
    def evaluate(self, args: np.ndarray) -> np.ndarray:
        """Evaluate f on argument rows; args has shape (..., arity)"""

    def __call__(self, *values: float) -> float:
        return float(self.evaluate(np.asarray(values, dtype=float)[None, :])[0])


class CallableField(ScalarField):
    """Adapter for a plain Python function f(y0, y1, ..., yk)"""

    def __init__(self, fn: Callable[..., float], arity: int) -> None:
        self._fn = fn
        self.arity = arity

    def evaluate(self, args: np.ndarray) -> np.ndarray:
        args = np.asarray(args, dtype=float)
        flat = args.reshape(-1, args.shape[-1])
        values = np.array([self._fn(*row) for row in flat], dtype=float)
        return values.reshape(args.shape[:-1])


def as_field(f: ScalarField | Callable[..., float], arity: int) -> ScalarField:
    if isinstance(f, ScalarField):
        if f.arity != arity:
            raise CcnException(f"field has arity {f.arity}, network needs {arity}")
        return f
    return CallableField(f, arity)


def admissible_rhs(
    ccn: CCN, f: ScalarField | Callable[..., float], x: np.ndarray
) -> np.ndarray:
    """Component c is f(x_c, x_{c_1}, ..., x_{c_k})"""
    field = as_field(f, 1 + ccn.num_types)
    return field.evaluate(ccn.arguments(x))
