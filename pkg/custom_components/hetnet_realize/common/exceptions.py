"""Exceptions raised while building and verifying realizations"""
from typing import Any


class HetNetValidationException(Exception):
    """Raised when a heteroclinic network description is invalid"""

    def __init__(self, reason: str, detail: str = "") -> None:
        super().__init__(reason, detail)
        self.reason = reason
        self.detail = detail

    def __str__(self) -> str:
        """String representation"""
        if self.detail:
            return f"{self.reason}: {self.detail}"
        return self.reason


class CcnException(Exception):
    """Raised for invalid coupled cell network parameters or inputs"""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


class SolverLimitException(Exception):
    """Raised when the embedding solver cannot prove or find a result within its limits"""

    def __init__(self, reason: str, best: Any = None) -> None:
        super().__init__(reason)
        self.reason = reason
        self.best = best

    def __str__(self) -> str:
        return f"Embedding solver limit reached: {self.reason}"


class SynthesisException(Exception):
    """Raised when the vector field cannot be synthesized"""

    def __init__(self, message: str, arcs: list[str] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.arcs = arcs if arcs is not None else []

    def __str__(self) -> str:
        if self.arcs:
            return f"{self.message} (arcs: {', '.join(self.arcs)})"
        return self.message


class VerificationFailedException(Exception):
    """Raised when a realization does not verify"""

    def __init__(self, grade: str, failed: list[str]) -> None:
        super().__init__(grade)
        self.grade = grade
        self.failed = failed

    def __str__(self) -> str:
        return f"Realization graded '{self.grade}'; failed connections: {self.failed}"


class VerificationException(Exception):
    """Raised when a verification run cannot be set up, for example with no usable unstable manifold"""

    def __init__(self, message: str, node: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.node = node

    def __str__(self) -> str:
        if self.node is not None:
            return f"Node {self.node}: {self.message}"
        return self.message
