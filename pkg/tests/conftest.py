from functools import partial

import numpy as np

from pytest import fixture

from pair_spectrum.catalog import create_example
from pair_spectrum.structure import ProblemDef


def random_symmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    matrix = rng.normal(size=(n, n))
    return (matrix + matrix.T) / 2


def random_problem(rng: np.random.Generator, n: int, kappa: float = 1.0) -> ProblemDef:
    return ProblemDef(
        random_symmetric(rng, n), random_symmetric(rng, n), rng.normal(size=n), kappa
    )


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


@fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20220913)


@fixture
def scalar_problem() -> ProblemDef:
    """A = B = [0], z = [1] and kappa = 1; the curve is beta = 1 / alpha."""
    return ProblemDef(np.zeros((1, 1)), np.zeros((1, 1)), np.ones(1), 1.0)


@fixture
def example1() -> ProblemDef:
    return create_example(1)


@fixture
def example2() -> ProblemDef:
    return create_example(2)


@fixture
def example3() -> ProblemDef:
    return create_example(3)


@fixture
def example4() -> ProblemDef:
    return create_example(4)


@fixture
def example5() -> ProblemDef:
    return create_example(5)


@fixture
def make_random_problem(rng):
    """Factory of random problems drawn from the seeded generator."""
    return partial(random_problem, rng)


@fixture
def make_random_symmetric(rng):
    return partial(random_symmetric, rng)


@fixture
def make_random_orthogonal(rng):
    return partial(random_orthogonal, rng)
