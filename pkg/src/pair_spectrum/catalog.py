"""Built-in example problems, and helpers to materialize them."""

from dataclasses import dataclass
from math import sqrt
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import InvalidInputError
from .structure import ProblemDef

__all__ = (
    "EXAMPLES",
    "ExampleDefinition",
    "KAPPA_SUPERIMPOSITION",
    "OVERLAY_KAPPAS",
    "a1_matrix",
    "create_example",
)


def a1_matrix(n: int) -> np.ndarray:
    """Returns the n x n tridiagonal matrix with zeros on the diagonal and ones
    on the two neighbouring diagonals. Its eigenvalues are 2 cos(pi j / (n + 1))
    for j = 1, ..., n.
    """
    if n < 1:
        raise InvalidInputError("matrix dimension must be positive")
    return np.eye(n, k=1) + np.eye(n, k=-1)


def _unit(n: int, index: int) -> np.ndarray:
    result = np.zeros(n)
    result[index] = 1.0
    return result


B1 = np.diag([1.0, 3.0])

B2 = np.array(
    [
        [-2.0, 1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 2.0, 1.0],
        [0.0, 0.0, 1.0, 3.0],
    ]
)


@dataclass(frozen=True)
class ExampleDefinition:
    """A built-in example problem."""

    title: str
    """One-line description of what the example illustrates."""

    kappa: float
    """Default coupling constant of the example."""

    factory: Callable[[int], Tuple[np.ndarray, np.ndarray, np.ndarray]]
    """Function that returns A, B and z for a given dimension."""

    default_n: int
    resizable: bool = False

    def create(self, kappa: Optional[float] = None, n: Optional[int] = None) -> ProblemDef:
        if n is None:
            n = self.default_n
        elif n != self.default_n and not self.resizable:
            raise InvalidInputError(f"this example has a fixed dimension of {self.default_n}")

        A, B, z = self.factory(n)
        return ProblemDef(A, B, z, self.kappa if kappa is None else kappa)


def _example_1(n: int):
    matrix = a1_matrix(n)
    return matrix, matrix.copy(), _unit(n, n - 1)


def _example_2(n: int):
    return np.diag([-1.0, 1.0]), B1, np.array([1 / sqrt(5), 2 / sqrt(5)])


def _example_3(n: int):
    return np.diag([-1.0, -1.0]), B1, np.array([1.0, 0.0])


def _example_4(n: int):
    return np.diag([1.0, 1.0, 3.0, 3.0]), B2, _unit(4, 3)


def _example_5(n: int):
    return np.diag([1.0, 2.0, 2.0, 3.0]), B2, np.array([1 / sqrt(2), 0.0, 0.0, 1 / sqrt(2)])


EXAMPLES: Dict[int, ExampleDefinition] = {
    1: ExampleDefinition(
        "tridiagonal A = B coupled through the last coordinate",
        kappa=1.0,
        factory=_example_1,
        default_n=4,
        resizable=True,
    ),
    2: ExampleDefinition(
        "no straight lines in the pair spectrum",
        kappa=2 / 3,
        factory=_example_2,
        default_n=2,
    ),
    3: ExampleDefinition(
        "a vertical line inside the mesh and a horizontal line outside of it",
        kappa=0.5,
        factory=_example_3,
        default_n=2,
    ),
    4: ExampleDefinition(
        "straight lines both inside and outside of the mesh",
        kappa=1.0,
        factory=_example_4,
        default_n=4,
    ),
    5: ExampleDefinition(
        "a mesh line at a common eigenvalue of A and its compression",
        kappa=1.0,
        factory=_example_5,
        default_n=4,
    ),
}
"""Dictionary of the built-in examples, keyed by their number."""

OVERLAY_KAPPAS: Tuple[float, ...] = (0.4, 1.0, 2.0)
"""Coupling constants at which the curves of the first example are usually
drawn together."""

KAPPA_SUPERIMPOSITION = np.arange(0.001, 10, 0.1)
"""Coupling constants of the superimposed picture of the first example."""


def create_example(
    number: int, kappa: Optional[float] = None, n: Optional[int] = None
) -> ProblemDef:
    """Returns one of the built-in example problems.

    Parameters:
        number: the number of the example, from 1 to 5
        kappa: the coupling constant; defaults to the one of the example
        n: the dimension; only the first example can be resized

    Raises:
        InvalidInputError: if there is no such example or it cannot be resized
    """
    try:
        definition = EXAMPLES[number]
    except KeyError:
        raise InvalidInputError(f"no such example: {number!r}") from None
    return definition.create(kappa, n)
