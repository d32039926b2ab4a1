"""Spectral scaffolding of the coupled problem: problem definitions,
compressions onto the orthogonal complement of the coupling vector, the
exceptional eigenvalue sets and the chess-board mesh.
"""

import warnings

from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import Settings, resolve_settings
from .errors import InvalidInputError, MeshBoundaryError, NearDegeneracyWarning
from .linalg import EigDecomp, as_symmetric_matrix, as_unit_vector, complement_basis, jacobi_eig

__all__ = (
    "EigenCluster",
    "Mesh",
    "MeshOrigin",
    "MeshPoint",
    "OperatorStructure",
    "ProblemDef",
    "Rectangle",
    "analyze_operator",
    "analyze_problem",
    "build_mesh",
    "compress",
    "problem_warnings",
    "rectangle_of",
)

log = getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProblemDef:
    """The quadruple (A, B, z, kappa) defining the pair eigenvalue problem

        (A - alpha) u + kappa <z, v> z = 0
        kappa <z, u> z + (B - beta) v = 0

    A and B are validated to be symmetric matrices of the same dimension and
    z is stored as a unit vector of that dimension.
    """

    A: np.ndarray
    B: np.ndarray
    z: np.ndarray
    kappa: float = 1.0

    def __post_init__(self):
        a = as_symmetric_matrix(self.A)
        b = as_symmetric_matrix(self.B)
        z = as_unit_vector(self.z)
        if not (a.shape[0] == b.shape[0] == len(z)):
            raise InvalidInputError(
                f"dimension mismatch: A is {a.shape[0]}x{a.shape[0]}, "
                f"B is {b.shape[0]}x{b.shape[0]} and z has {len(z)} entries"
            )

        kappa = float(self.kappa)
        if not np.isfinite(kappa):
            raise InvalidInputError("the coupling constant must be finite")

        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "kappa", kappa)

    def __eq__(self, other):
        if not isinstance(other, ProblemDef):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.z, other.z)
            and self.kappa == other.kappa
        )

    __hash__ = None  # type: ignore

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def projection(self) -> np.ndarray:
        """The rank-one orthogonal projection onto the span of z."""
        return np.outer(self.z, self.z)

    def pair_matrix(self, alpha, beta) -> np.ndarray:
        """Returns the 2n x 2n matrix whose kernel contains the pair
        eigenvectors belonging to (alpha, beta).
        """
        n = self.n
        dtype = complex if np.iscomplexobj(alpha) or np.iscomplexobj(beta) else float
        coupling = self.kappa * self.projection

        result = np.empty((2 * n, 2 * n), dtype=dtype)
        result[:n, :n] = self.A - alpha * np.eye(n)
        result[:n, n:] = coupling
        result[n:, :n] = coupling
        result[n:, n:] = self.B - beta * np.eye(n)
        return result

    def with_kappa(self, kappa: float) -> "ProblemDef":
        return ProblemDef(self.A, self.B, self.z, kappa)


class EigenCluster(NamedTuple):
    """Group of numerically coinciding eigenvalues of an operator."""

    value: float
    """Mean of the eigenvalues in the cluster."""

    indices: Tuple[int, ...]
    """Indices of the eigenvalues (in ascending order) in the cluster."""

    weight: float
    """Total coupling weight of the eigenvectors of the cluster."""

    @property
    def multiplicity(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class OperatorStructure:
    """Spectral data of one of the two operators relative to the coupling
    vector.
    """

    eig: EigDecomp
    """Eigendecomposition of the operator."""

    weights: np.ndarray
    """Squared components of z along the eigenvectors; they add up to one."""

    compressed_eig: EigDecomp
    """Eigendecomposition of the compression of the operator onto the
    orthogonal complement of z."""

    clusters: Tuple[EigenCluster, ...]
    compressed_clusters: Tuple[EigenCluster, ...]

    gamma: Tuple[float, ...]
    """Eigenvalues whose eigenspace contains a non-zero vector orthogonal
    to z."""

    gamma_tilde: Tuple[float, ...]
    """Eigenvalues whose whole eigenspace is orthogonal to z."""

    delta: Tuple[float, ...]
    """Eigenvalues whose eigenspace is smaller than the corresponding
    eigenspace of the compression."""

    tolerance: float
    """Clustering tolerance used for the classification."""

    warnings: Tuple[str, ...] = field(default=())
    """Descriptions of near-degenerate classifications."""

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    @property
    def compressed_eigenvalues(self) -> np.ndarray:
        return self.compressed_eig.eigenvalues

    @property
    def diameter(self) -> float:
        values = self.eig.eigenvalues
        return float(values[-1] - values[0])

    def contains(self, values: Iterable[float], value: float) -> bool:
        """Returns whether the given value is within the clustering tolerance
        of one of the given values.
        """
        return any(abs(value - item) <= self.tolerance for item in values)


def compress(X, z, *, settings: Optional[Settings] = None) -> np.ndarray:
    """Returns the compression of the symmetric matrix X onto the orthogonal
    complement of z, expressed in the Householder complement basis.

    Raises:
        InvalidInputError: if X is a 1x1 matrix
    """
    matrix = as_symmetric_matrix(X, settings=settings)
    if matrix.shape[0] < 2:
        raise InvalidInputError("a 1x1 operator has no orthogonal complement to compress to")
    if matrix.shape[0] != np.size(z):
        raise InvalidInputError("dimension of z does not match the operator")

    basis = complement_basis(z, settings=settings)
    result = basis.T @ matrix @ basis
    result = (result + result.T) / 2
    result.setflags(write=False)
    return result


def _cluster(values: np.ndarray, weights: Sequence[float], tolerance: float) -> List[EigenCluster]:
    clusters: List[EigenCluster] = []
    start = 0
    for index in range(1, len(values) + 1):
        if index == len(values) or values[index] - values[index - 1] > tolerance:
            indices = tuple(range(start, index))
            clusters.append(
                EigenCluster(
                    value=float(np.mean(values[start:index])),
                    indices=indices,
                    weight=float(sum(weights[i] for i in indices)),
                )
            )
            start = index
    return clusters


def _near_degeneracies(
    values: np.ndarray, clusters: Sequence[EigenCluster], tolerance: float, settings: Settings
) -> List[str]:
    result = []
    band = settings.degeneracy_band
    threshold = settings.zero_weight

    for cluster in clusters:
        if threshold / band <= cluster.weight <= threshold * band:
            result.append(
                f"coupling weight {cluster.weight:.3g} of eigenvalue {cluster.value:.12g} "
                f"is close to the zero-weight threshold {threshold:.3g}"
            )

    gaps = np.diff(values)
    for index in np.flatnonzero((gaps > tolerance) & (gaps <= tolerance * band)):
        result.append(
            f"eigenvalues {values[index]:.12g} and {values[index + 1]:.12g} are "
            f"close to the clustering tolerance {tolerance:.3g}"
        )

    return result


def analyze_operator(X, z, *, settings: Optional[Settings] = None) -> OperatorStructure:
    """Computes the spectral structure of the symmetric operator X relative to
    the coupling vector z.

    Eigenvalues are grouped into clusters of numerically coinciding values.
    A cluster belongs to the straight-line set when it is multiple or its
    eigenspace carries no coupling weight; to the neutral set when it carries
    no weight; and to the re-included set when the compression has a strictly
    larger eigenspace at the same value.

    Classifications that are within the near-degeneracy band of a threshold
    are reported with a `NearDegeneracyWarning`.
    """
    settings = resolve_settings(settings)
    matrix = as_symmetric_matrix(X, settings=settings)
    z = as_unit_vector(z, settings=settings)
    if matrix.shape[0] != len(z):
        raise InvalidInputError("dimension of z does not match the operator")

    eig = jacobi_eig(matrix, settings=settings)
    weights = (eig.eigenvectors.T @ z) ** 2
    weights.setflags(write=False)

    values = eig.eigenvalues
    tolerance = settings.cluster_factor * (1 + float(values[-1] - values[0]))

    if len(z) > 1:
        compressed_eig = jacobi_eig(compress(matrix, z, settings=settings), settings=settings)
    else:
        compressed_eig = EigDecomp.empty()

    clusters = _cluster(values, weights, tolerance)
    compressed_clusters = _cluster(
        compressed_eig.eigenvalues, [0.0] * compressed_eig.size, tolerance
    )

    gamma, gamma_tilde, delta = [], [], []
    for cluster in clusters:
        neutral = cluster.weight < settings.zero_weight
        if neutral:
            gamma_tilde.append(cluster.value)
        if neutral or cluster.multiplicity >= 2:
            gamma.append(cluster.value)
        if any(
            abs(other.value - cluster.value) <= tolerance
            and other.multiplicity > cluster.multiplicity
            for other in compressed_clusters
        ):
            delta.append(cluster.value)

    notes = _near_degeneracies(values, clusters, tolerance, settings)
    for note in notes:
        warnings.warn(note, NearDegeneracyWarning, stacklevel=2)

    log.debug(
        "Operator of dimension %d: %d clusters, gamma=%r, gamma_tilde=%r, delta=%r",
        len(z),
        len(clusters),
        gamma,
        gamma_tilde,
        delta,
    )

    return OperatorStructure(
        eig=eig,
        weights=weights,
        compressed_eig=compressed_eig,
        clusters=tuple(clusters),
        compressed_clusters=tuple(compressed_clusters),
        gamma=tuple(gamma),
        gamma_tilde=tuple(gamma_tilde),
        delta=tuple(delta),
        tolerance=tolerance,
        warnings=tuple(notes),
    )


def analyze_problem(
    problem: ProblemDef, *, settings: Optional[Settings] = None
) -> Tuple[OperatorStructure, OperatorStructure]:
    """Returns the structures of A and B of the given problem."""
    return (
        analyze_operator(problem.A, problem.z, settings=settings),
        analyze_operator(problem.B, problem.z, settings=settings),
    )


def problem_warnings(
    problem: ProblemDef, sa: OperatorStructure, sb: OperatorStructure
) -> Tuple[str, ...]:
    """Collects the warnings that apply to a problem as a whole."""
    result = []
    if problem.kappa == 0:
        result.append(
            "kappa is zero: the pair spectrum degenerates to the union of the "
            "vertical lines through Spec(A) and the horizontal lines through Spec(B)"
        )
    result.extend(f"A: {note}" for note in sa.warnings)
    result.extend(f"B: {note}" for note in sb.warnings)
    return tuple(result)


class MeshOrigin(Enum):
    """Where a dividing point of the mesh comes from."""

    SPECTRUM = "Spec"
    COMPRESSED = "Compressed"
    BOTH = "Both"


class MeshPoint(NamedTuple):
    value: float
    origin: MeshOrigin


class Rectangle(NamedTuple):
    """One-based indices of a rectangle of the chess-board mesh."""

    p: int
    q: int

    @property
    def parity(self) -> int:
        return (self.p + self.q) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0


@dataclass(frozen=True)
class Mesh:
    """Dividing points of the chess-board mesh along both axes."""

    x_points: Tuple[MeshPoint, ...]
    y_points: Tuple[MeshPoint, ...]
    x_tolerance: float
    y_tolerance: float

    @property
    def xs(self) -> np.ndarray:
        return np.array([point.value for point in self.x_points], dtype=float)

    @property
    def ys(self) -> np.ndarray:
        return np.array([point.value for point in self.y_points], dtype=float)

    def span(self) -> Tuple[float, float, float, float]:
        """Returns the smallest and largest dividing points along both axes
        as (x_min, x_max, y_min, y_max).
        """
        xs, ys = self.xs, self.ys
        return float(xs.min()), float(xs.max()), float(ys.min()), float(ys.max())


def _mesh_points(structure: OperatorStructure) -> Tuple[MeshPoint, ...]:
    candidates: List[MeshPoint] = []
    neutral = structure.gamma_tilde

    for cluster in structure.clusters:
        if not structure.contains(neutral, cluster.value):
            candidates.append(MeshPoint(cluster.value, MeshOrigin.SPECTRUM))

    for cluster in structure.compressed_clusters:
        if not structure.contains(neutral, cluster.value):
            candidates.append(MeshPoint(cluster.value, MeshOrigin.COMPRESSED))

    for value in structure.delta:
        candidates.append(MeshPoint(value, MeshOrigin.BOTH))

    candidates.sort(key=lambda point: point.value)

    merged: List[MeshPoint] = []
    for point in candidates:
        if merged and point.value - merged[-1].value <= structure.tolerance:
            previous = merged[-1]
            origin = previous.origin if previous.origin is point.origin else MeshOrigin.BOTH
            merged[-1] = MeshPoint(previous.value, origin)
        else:
            merged.append(point)

    return tuple(merged)


def build_mesh(sa: OperatorStructure, sb: OperatorStructure) -> Mesh:
    """Builds the chess-board mesh from the structures of A and B.

    The dividing points along each axis are the eigenvalues of the operator
    and of its compression, without the neutral eigenvalues but with the
    re-included ones, enumerated without multiplicities.
    """
    return Mesh(
        x_points=_mesh_points(sa),
        y_points=_mesh_points(sb),
        x_tolerance=sa.tolerance,
        y_tolerance=sb.tolerance,
    )


def _axis_index(points: np.ndarray, value: float, tolerance: float, axis: str) -> int:
    if len(points) and np.min(np.abs(points - value)) <= tolerance:
        raise MeshBoundaryError(f"{axis}={value!r} lies on a mesh line")
    return 1 + int(np.count_nonzero(points < value))


def rectangle_of(mesh: Mesh, alpha: float, beta: float) -> Rectangle:
    """Returns the rectangle of the mesh containing the point (alpha, beta).

    Raises:
        MeshBoundaryError: if the point lies on one of the mesh lines
    """
    return Rectangle(
        p=_axis_index(mesh.xs, alpha, mesh.x_tolerance, "alpha"),
        q=_axis_index(mesh.ys, beta, mesh.y_tolerance, "beta"),
    )
