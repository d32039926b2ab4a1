"""Dense numerical kernel: symmetric eigendecomposition, orthogonal
complements, characteristic polynomials, polynomial roots and determinants.

Everything else in the package is built on top of the functions in this
module. All functions are pure; inputs are never modified.
"""

from dataclasses import dataclass
from logging import getLogger
from math import pi
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .config import Settings, resolve_settings
from .errors import InvalidInputError, NumericalFailureError

__all__ = (
    "ComplexPolynomial",
    "EigDecomp",
    "RootCluster",
    "as_symmetric_matrix",
    "as_unit_vector",
    "char_poly",
    "complement_basis",
    "complex_det",
    "expand_roots",
    "jacobi_eig",
    "poly_roots",
)

log = getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_symmetric_matrix(
    entries, *, settings: Optional[Settings] = None
) -> np.ndarray:
    """Validates a square real matrix and returns an exactly symmetric,
    read-only copy of it.

    Raises:
        InvalidInputError: if the matrix is not square, not finite or its
            asymmetry exceeds the symmetry tolerance relative to its max-norm
    """
    settings = resolve_settings(settings)
    matrix = np.array(entries, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("matrix has non-finite entries")

    scale = float(np.max(np.abs(matrix)))
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    if asymmetry > settings.symmetry_tolerance * max(scale, 1.0):
        i, j = np.unravel_index(np.argmax(np.abs(matrix - matrix.T)), matrix.shape)
        raise InvalidInputError(
            f"matrix is not symmetric: entry ({i}, {j}) differs from ({j}, {i}) "
            f"by {asymmetry:.3g}"
        )

    return _frozen((matrix + matrix.T) / 2)


def as_unit_vector(vector, *, settings: Optional[Settings] = None) -> np.ndarray:
    """Returns a read-only unit-norm copy of the given real vector.

    Vectors whose norm is within the unit-norm tolerance of 1 are kept as they
    are; others are normalized.

    Raises:
        InvalidInputError: if the vector is empty, not finite or zero
    """
    settings = resolve_settings(settings)
    result = np.array(vector, dtype=float).reshape(-1)
    if result.size == 0 or not np.all(np.isfinite(result)):
        raise InvalidInputError("expected a non-empty finite vector")

    norm = float(np.linalg.norm(result))
    if norm == 0:
        raise InvalidInputError("the zero vector has no direction")
    if abs(norm - 1) > settings.unit_norm_tolerance:
        result = result / norm

    return _frozen(result)


@dataclass(frozen=True)
class EigDecomp:
    """Eigendecomposition of a real symmetric matrix.

    Eigenvalues are sorted in ascending order; column ``j`` of
    `eigenvectors` belongs to eigenvalue ``j``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @classmethod
    def empty(cls, dimension: int = 0) -> "EigDecomp":
        """Decomposition of the zero-dimensional matrix."""
        return cls(
            eigenvalues=_frozen(np.zeros(0)),
            eigenvectors=_frozen(np.zeros((dimension, 0))),
        )


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial with complex coefficients stored in ascending order of
    degree. Trailing coefficients that are negligible compared to the largest
    one are trimmed on construction.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=complex).reshape(-1)
        if coefficients.size == 0:
            coefficients = np.zeros(1, dtype=complex)

        threshold = 1e-14 * float(np.max(np.abs(coefficients)))
        last = len(coefficients) - 1
        while last > 0 and abs(coefficients[last]) <= threshold:
            last -= 1

        object.__setattr__(self, "coefficients", _frozen(coefficients[: last + 1]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, x):
        return P.polyval(x, self.coefficients)

    def __mul__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return ComplexPolynomial(P.polymul(self.coefficients, other.coefficients))

    def __sub__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return ComplexPolynomial(P.polysub(self.coefficients, other.coefficients))

    def monic(self) -> "ComplexPolynomial":
        return ComplexPolynomial(self.coefficients / self.coefficients[-1])

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "ComplexPolynomial":
        """Monic polynomial with the given roots."""
        return cls(P.polyfromroots(list(roots)) if len(roots) else [1.0])


class RootCluster(NamedTuple):
    """A root of a polynomial together with its multiplicity."""

    value: complex
    multiplicity: int


def expand_roots(clusters: Sequence[RootCluster]) -> np.ndarray:
    """Expands root clusters into a flat array where every root appears as
    many times as its multiplicity.
    """
    values = [cluster.value for cluster in clusters for _ in range(cluster.multiplicity)]
    return np.array(values, dtype=complex)


def jacobi_eig(matrix, *, settings: Optional[Settings] = None) -> EigDecomp:
    """Computes the eigendecomposition of a real symmetric matrix with the
    cyclic Jacobi method.

    Parameters:
        matrix: the symmetric matrix to decompose
        settings: tolerances to use; defaults to `DEFAULT_SETTINGS`

    Returns:
        the eigenvalues in ascending order and the corresponding orthonormal
        eigenvectors

    Raises:
        NumericalFailureError: if the off-diagonal part has not become
            negligible after the configured number of sweeps
    """
    settings = resolve_settings(settings)
    a = np.array(as_symmetric_matrix(matrix, settings=settings))
    n = a.shape[0]
    v = np.eye(n)

    frobenius = float(np.linalg.norm(a))
    threshold = settings.jacobi_tolerance * frobenius

    for sweep in range(settings.jacobi_max_sweeps + 1):
        off_diagonal = float(np.sqrt(2 * np.sum(np.triu(a, 1) ** 2)))
        if off_diagonal <= threshold:
            break

        if sweep == settings.jacobi_max_sweeps:
            raise NumericalFailureError(
                f"Jacobi iteration did not converge in {sweep} sweeps",
                residual=off_diagonal,
            )

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue

                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1 / np.hypot(t, 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q

                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                col_p, col_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * col_p - s * col_q
                v[:, q] = s * col_p + c * col_q

    log.debug("Jacobi iteration converged after %d sweeps (n=%d)", sweep, n)

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return EigDecomp(
        eigenvalues=_frozen(eigenvalues[order]),
        eigenvectors=_frozen(v[:, order]),
    )


def complement_basis(z, *, settings: Optional[Settings] = None) -> np.ndarray:
    """Returns an orthonormal basis of the orthogonal complement of z as the
    columns of an n x (n-1) matrix.

    The basis consists of the last n-1 columns of the Householder reflection
    that maps z to a multiple of the first coordinate vector.

    Raises:
        InvalidInputError: if z is the zero vector
    """
    z = as_unit_vector(z, settings=settings)
    n = len(z)

    u = z.copy()
    u[0] += 1.0 if z[0] >= 0 else -1.0
    reflection = np.eye(n) - 2 * np.outer(u, u) / float(u @ u)

    return _frozen(reflection[:, 1:].copy())


def char_poly(matrix, *, settings: Optional[Settings] = None) -> ComplexPolynomial:
    """Computes the characteristic polynomial det(xI - M) of a square matrix
    with the Faddeev-LeVerrier recursion.

    Raises:
        InvalidInputError: if the matrix is not square or is larger than the
            configured dimension cap
    """
    settings = resolve_settings(settings)
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {m.shape}")

    n = m.shape[0]
    if n > settings.max_dimension:
        raise InvalidInputError(
            f"matrix dimension {n} exceeds the limit of {settings.max_dimension}"
        )

    coefficients = np.zeros(n + 1, dtype=complex)
    coefficients[n] = 1.0
    identity = np.eye(n, dtype=complex)
    auxiliary = np.zeros((n, n), dtype=complex)

    for k in range(1, n + 1):
        auxiliary = m @ auxiliary + coefficients[n - k + 1] * identity
        coefficients[n - k] = -np.trace(m @ auxiliary) / k

    return ComplexPolynomial(coefficients)


def _fujiwara_bound(monic: np.ndarray) -> float:
    """Fujiwara's upper bound on the moduli of the roots of a monic
    polynomial given by its ascending coefficients.
    """
    degree = len(monic) - 1
    terms = np.abs(monic[:-1]).copy()
    terms[0] /= 2
    exponents = 1.0 / (degree - np.arange(degree))
    return 2 * float(np.max(terms**exponents))


def _cluster_roots(roots: np.ndarray, radius: float) -> Tuple[RootCluster, ...]:
    """Merges roots that are within the given distance of each other (with
    single linkage) into multiplicity clusters.
    """
    labels = list(range(len(roots)))

    def find(i: int) -> int:
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= radius:
                labels[find(i)] = find(j)

    groups = {}
    for i, root in enumerate(roots):
        groups.setdefault(find(i), []).append(root)

    clusters = [
        RootCluster(value=complex(np.mean(members)), multiplicity=len(members))
        for members in groups.values()
    ]
    clusters.sort(key=lambda cluster: (cluster.value.real, cluster.value.imag))
    return tuple(clusters)


def poly_roots(
    polynomial: ComplexPolynomial, *, settings: Optional[Settings] = None
) -> Tuple[RootCluster, ...]:
    """Finds all roots of a polynomial with the Durand-Kerner (Weierstrass)
    iteration.

    The polynomial is first rescaled so that its roots lie in the unit disk;
    the iteration then starts from equally spaced points, rotated by a fixed
    offset, on the circle of radius ``1 + max|coef| / |lead|`` of the rescaled
    polynomial. A root stops moving once the polynomial evaluated there is at
    the rounding level of the evaluation.

    Returns:
        the roots as clusters with multiplicities, sorted by real part and then
        by imaginary part; the multiplicities add up to the degree

    Raises:
        InvalidInputError: if the polynomial is constant
        NumericalFailureError: if the iteration does not converge
    """
    settings = resolve_settings(settings)
    degree = polynomial.degree
    if degree < 1:
        raise InvalidInputError("a constant polynomial has no roots to find")

    monic = polynomial.coefficients / polynomial.coefficients[-1]
    scale = _fujiwara_bound(monic)
    if scale == 0:
        return (RootCluster(value=0j, multiplicity=degree),)

    scaled = monic * scale ** (np.arange(degree + 1) - degree)
    magnitudes = np.abs(scaled)
    radius = 1 + float(np.max(magnitudes[:-1]))

    roots = radius * np.exp(1j * (2 * pi * np.arange(degree) / degree + 0.4))
    noise_factor = 64 * np.finfo(float).eps

    for iteration in range(1, settings.root_max_iterations + 1):
        values = P.polyval(roots, scaled)
        noise = noise_factor * P.polyval(np.abs(roots), magnitudes)

        differences = roots[:, None] - roots[None, :]
        np.fill_diagonal(differences, 1.0)
        denominators = np.prod(differences, axis=1)

        steps = np.where(np.abs(values) > noise, values / denominators, 0.0)
        if not np.all(np.isfinite(steps)):
            raise NumericalFailureError(
                "Durand-Kerner iteration broke down", best_iterate=roots * scale
            )

        roots = roots - steps
        largest_step = float(np.max(np.abs(steps)))
        if largest_step <= settings.root_step_tolerance * (1 + float(np.max(np.abs(roots)))):
            break
    else:
        raise NumericalFailureError(
            f"Durand-Kerner iteration did not converge in {iteration} iterations",
            residual=largest_step * scale,
            best_iterate=roots * scale,
        )

    log.debug("Durand-Kerner iteration converged after %d steps (degree %d)", iteration, degree)
    return _cluster_roots(roots * scale, settings.root_merge_radius)


def complex_det(matrix, *, settings: Optional[Settings] = None) -> complex:
    """Computes the determinant of a square complex matrix by LU factorization
    with partial pivoting.

    Returns exactly zero when a pivot column is negligible below the diagonal.
    """
    settings = resolve_settings(settings)
    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.size == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")

    n = a.shape[0]
    result = 1.0 + 0.0j
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[pivot, k]) <= settings.pivot_tolerance:
            return 0j

        if pivot != k:
            a[[k, pivot]] = a[[pivot, k]]
            result = -result

        result *= a[k, k]
        multipliers = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(multipliers, a[k, k:])

    return complex(result)
