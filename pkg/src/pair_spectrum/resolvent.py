"""The scalar resolvent function R(t) = <(X - t)^-1 z, z> of an operator,
evaluated from its pole decomposition.
"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .config import Settings, resolve_settings
from .errors import PoleProximityError
from .linalg import EigDecomp
from .structure import OperatorStructure, ProblemDef, analyze_problem

__all__ = (
    "ProfilePair",
    "ResolventProfile",
    "SignChange",
    "SignChangeKind",
    "eval_R",
    "eval_R_prime",
    "pole_asymptote",
    "profiles_of",
    "sign_changes",
)


@dataclass(frozen=True)
class ResolventProfile:
    """Pole decomposition of the resolvent function of an operator.

    Only eigenvalue clusters with a non-negligible coupling weight are poles;
    the remaining (neutral) clusters do not contribute to the function at all.
    """

    poles: np.ndarray
    pole_weights: np.ndarray
    neutral_points: np.ndarray

    exclusion_radius: float
    """Real arguments closer than this to a pole are rejected."""

    tolerance: float
    """Clustering tolerance of the underlying operator structure."""

    @classmethod
    def from_structure(
        cls, structure: OperatorStructure, *, settings: Optional[Settings] = None
    ) -> "ResolventProfile":
        settings = resolve_settings(settings)

        poles, weights, neutral = [], [], []
        for cluster in structure.clusters:
            if cluster.weight < settings.zero_weight:
                neutral.append(cluster.value)
            else:
                poles.append(cluster.value)
                weights.append(cluster.weight)

        return cls(
            poles=np.array(poles, dtype=float),
            pole_weights=np.array(weights, dtype=float),
            neutral_points=np.array(neutral, dtype=float),
            exclusion_radius=settings.pole_factor * (1 + structure.diameter),
            tolerance=structure.tolerance,
        )

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.pole_weights))

    def nearest_pole(self, t: float) -> Optional[int]:
        """Index of the pole closest to the given real number, or `None` if
        the profile has no poles.
        """
        if not len(self.poles):
            return None
        return int(np.argmin(np.abs(self.poles - t)))

    def check(self, t) -> None:
        """Raises `PoleProximityError` if any real entry of t is inside the
        exclusion zone of a pole.
        """
        values = np.atleast_1d(np.asarray(t))
        if np.iscomplexobj(values):
            values = values[values.imag == 0].real
        if not len(self.poles) or not len(values):
            return

        distances = np.abs(values[:, None] - self.poles[None, :])
        if np.min(distances) <= self.exclusion_radius:
            point_index, pole_index = np.unravel_index(np.argmin(distances), distances.shape)
            raise PoleProximityError(
                pole=float(self.poles[pole_index]), point=values[point_index].item()
            )


class ProfilePair(NamedTuple):
    """Resolvent profiles of the two operators of a problem."""

    a: ResolventProfile
    b: ResolventProfile


def profiles_of(
    problem: ProblemDef,
    structures: Optional[Tuple[OperatorStructure, OperatorStructure]] = None,
    *,
    settings: Optional[Settings] = None,
) -> ProfilePair:
    """Builds the resolvent profiles of A and B of a problem."""
    sa, sb = structures if structures is not None else analyze_problem(problem, settings=settings)
    return ProfilePair(
        a=ResolventProfile.from_structure(sa, settings=settings),
        b=ResolventProfile.from_structure(sb, settings=settings),
    )


def _pole_sum(profile: ResolventProfile, t, power: int):
    t = np.asarray(t)
    terms = profile.pole_weights / (profile.poles - t[..., None]) ** power
    return np.sum(terms, axis=-1)


def eval_R(profile: ResolventProfile, t):
    """Evaluates the resolvent function at a real or complex point (or an
    array of points).

    Raises:
        PoleProximityError: if a real argument is inside the exclusion zone
            of a pole
    """
    profile.check(t)
    result = _pole_sum(profile, t, 1)
    return result.item() if np.ndim(result) == 0 else result


def eval_R_prime(profile: ResolventProfile, t):
    """Evaluates the derivative of the resolvent function; it is positive on
    the real axis away from the poles.
    """
    profile.check(t)
    result = _pole_sum(profile, t, 2)
    return result.item() if np.ndim(result) == 0 else result


def pole_asymptote(profile: ResolventProfile, t: float) -> float:
    """Leading term of the resolvent near its closest pole, valid also inside
    the exclusion zone (but not at the pole itself).
    """
    index = profile.nearest_pole(t)
    if index is None:
        return 0.0
    return float(profile.pole_weights[index] / (profile.poles[index] - t))


class SignChangeKind(Enum):
    POLE = "pole"
    ZERO = "zero"


class SignChange(NamedTuple):
    """A point where the resolvent function changes sign."""

    value: float
    kind: SignChangeKind
    neutral: bool = False
    """Whether the point is a neutral eigenvalue that is nevertheless a zero
    of the function."""


def sign_changes(
    profile: ResolventProfile,
    compressed: EigDecomp,
    delta: Tuple[float, ...] = (),
) -> Tuple[SignChange, ...]:
    """Lists the points where the resolvent function changes sign, in
    ascending order.

    The function jumps from +inf to -inf across each pole and crosses zero at
    the eigenvalues of the compression that are not eigenvalues of the
    operator itself. A neutral eigenvalue is a sign-changing zero only if it
    belongs to the re-included set `delta`.
    """
    tolerance = profile.tolerance
    eigenvalues = np.concatenate([profile.poles, profile.neutral_points])

    def near(values, value) -> bool:
        return bool(len(values)) and float(np.min(np.abs(np.asarray(values) - value))) <= tolerance

    result = [SignChange(float(pole), SignChangeKind.POLE) for pole in profile.poles]

    previous = None
    for value in compressed.eigenvalues:
        if previous is not None and value - previous <= tolerance:
            continue
        previous = value
        if not near(eigenvalues, value):
            result.append(SignChange(float(value), SignChangeKind.ZERO))

    for value in profile.neutral_points:
        if near(delta, value):
            result.append(SignChange(float(value), SignChangeKind.ZERO, neutral=True))

    result.sort(key=lambda change: change.value)
    return tuple(result)
