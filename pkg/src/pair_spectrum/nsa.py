"""The one-parameter non-self-adjoint problem

    [[A + gamma, kappa P], [-kappa P, -B - gamma]] x = lambda x

associated to the pair problem by alpha = lambda - gamma and
beta = -lambda - gamma, together with the tracking of its eigenvalue
collisions as gamma varies.
"""

from dataclasses import dataclass
from enum import Enum
from functools import partial
from logging import getLogger
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from numpy.polynomial import polynomial as P
from trio import run

from .config import Settings, resolve_settings
from .errors import (
    AmbiguousCollisionError,
    DegenerateCouplingError,
    InvalidInputError,
    NumericalFailureError,
    PoleProximityError,
    PreconditionError,
)
from .grids import create_parameter_grid
from .linalg import ComplexPolynomial, expand_roots, poly_roots
from .resolvent import ProfilePair, eval_R, eval_R_prime, profiles_of
from .structure import OperatorStructure, ProblemDef, analyze_problem
from .tracer import beta_roots, curve_slope, trace_branches
from .utils import map_concurrently

__all__ = (
    "CollisionRecord",
    "CollisionType",
    "NsaSpectrum",
    "find_collisions",
    "find_collisions_async",
    "nsa_block_matrix",
    "nsa_char_poly",
    "nsa_spectrum",
    "real_count_profile",
    "real_count_profile_async",
    "real_lambda_via_curves",
)

log = getLogger(__name__)


def nsa_block_matrix(problem: ProblemDef, gamma: float) -> np.ndarray:
    """Returns the explicit 2n x 2n matrix of the non-self-adjoint problem."""
    n = problem.n
    coupling = problem.kappa * problem.projection
    identity = np.eye(n)
    return np.block(
        [
            [problem.A + gamma * identity, coupling],
            [-coupling, -problem.B - gamma * identity],
        ]
    )


class _Context(NamedTuple):
    problem: ProblemDef
    sa: OperatorStructure
    sb: OperatorStructure
    profiles: ProfilePair
    settings: Settings


def _context(problem: ProblemDef, settings: Optional[Settings]) -> _Context:
    settings = resolve_settings(settings)
    sa, sb = analyze_problem(problem, settings=settings)
    return _Context(problem, sa, sb, profiles_of(problem, (sa, sb), settings=settings), settings)


def _line_roots(context: _Context, gamma: float) -> List[float]:
    """Eigenvalues coming from the straight lines of the pair spectrum; they
    do not depend on the coupling.
    """
    threshold = context.settings.zero_weight
    result = []
    for cluster in context.sa.clusters:
        count = cluster.multiplicity - (cluster.weight >= threshold)
        result.extend([cluster.value + gamma] * count)
    for cluster in context.sb.clusters:
        count = cluster.multiplicity - (cluster.weight >= threshold)
        result.extend([-(cluster.value + gamma)] * count)
    return result


def _cleared(roots: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Denominator prod(lambda - r) and numerator sum_p w_p prod_{q != p}
    (lambda - r_q) of sum_p w_p / (lambda - r_p), as coefficient arrays.
    """
    denominator = P.polyfromroots(roots) if len(roots) else np.ones(1)
    numerator = np.zeros(1)
    for index, weight in enumerate(weights):
        numerator = P.polyadd(numerator, weight * P.polyfromroots(np.delete(roots, index)))
    return denominator, numerator


def _reduced_poly(context: _Context, gamma: float) -> ComplexPolynomial:
    """Cleared form D_A D_B - kappa^2 N_A N_B of the characteristic equation
    in terms of lambda, without the straight-line factors.
    """
    pa, pb = context.profiles
    kappa = context.problem.kappa

    # R_A(lambda - gamma) = -sum w / (lambda - (pole + gamma))
    # R_B(-lambda - gamma) = sum w / (lambda + pole + gamma)
    d_a, n_a = _cleared(pa.poles + gamma, pa.pole_weights)
    d_b, n_b = _cleared(-(pb.poles + gamma), pb.pole_weights)
    sign = (-1) ** len(pa.poles)

    return ComplexPolynomial(
        sign * P.polysub(P.polymul(d_a, d_b), -(kappa**2) * P.polymul(n_a, n_b))
    )


def nsa_char_poly(
    problem: ProblemDef, gamma: float, *, settings: Optional[Settings] = None
) -> ComplexPolynomial:
    """Returns the characteristic polynomial of the non-self-adjoint problem in
    lambda, built from the pole decomposition of the two resolvent functions
    and the straight-line eigenvalues. Its degree is 2n and its leading
    coefficient is +1 or -1.
    """
    context = _context(problem, settings)
    return _char_poly(context, gamma)


def _char_poly(context: _Context, gamma: float) -> ComplexPolynomial:
    lines = _line_roots(context, gamma)
    factor = P.polyfromroots(lines) if lines else np.ones(1)
    return ComplexPolynomial(P.polymul(_reduced_poly(context, gamma).coefficients, factor))


@dataclass(frozen=True)
class NsaSpectrum:
    """Eigenvalues of the non-self-adjoint problem for a fixed gamma.

    Eigenvalues are listed with multiplicities, sorted by real part and then
    by imaginary part; real eigenvalues have an imaginary part of exactly
    zero.
    """

    gamma: float
    eigenvalues: np.ndarray
    from_line: np.ndarray
    """Whether the corresponding eigenvalue comes from a straight line of the
    pair spectrum."""

    @property
    def line_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.from_line].real

    @property
    def real_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.eigenvalues.imag == 0].real

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(self.eigenvalues.imag == 0))


def _polish(context: _Context, gamma: float, root: complex) -> complex:
    """Refines a root of the cleared polynomial with Newton steps on
    1 - kappa^2 R_A(lambda - gamma) R_B(-lambda - gamma). The refined root is
    kept only if it stayed close to the original one and improved the
    residual.
    """
    problem, _, _, (pa, pb), settings = context
    kappa2 = problem.kappa**2
    if kappa2 == 0:
        return root

    def residual(value: complex) -> Tuple[complex, complex]:
        alpha, beta = value - gamma, -value - gamma
        r_a, r_b = eval_R(pa, alpha), eval_R(pb, beta)
        slope = -kappa2 * (eval_R_prime(pa, alpha) * r_b - r_a * eval_R_prime(pb, beta))
        return 1 - kappa2 * r_a * r_b, slope

    try:
        initial, _ = residual(root)
        value = root
        for _ in range(settings.newton_polish_steps):
            g, slope = residual(value)
            if slope == 0:
                break
            step = g / slope
            value = value - step
            if abs(step) <= 1e-15 * (1 + abs(value)):
                break
        final, _ = residual(value)
    except PoleProximityError:
        return root

    if abs(value - root) < 1e-6 * (1 + abs(root)) and abs(final) <= abs(initial):
        return complex(value)
    return root


def _pair_conjugates(values: Sequence[complex], snap: float) -> List[complex]:
    """Snaps nearly real values to the real axis and makes the remaining
    values come in exact complex conjugate pairs.
    """
    remaining = [complex(value) for value in values]
    result: List[complex] = []

    while remaining:
        index = int(np.argmax([abs(value.imag) for value in remaining]))
        value = remaining.pop(index)
        if abs(value.imag) <= snap or not remaining:
            result.append(complex(value.real, 0.0))
            continue

        partner_index = int(np.argmin([abs(other - value.conjugate()) for other in remaining]))
        partner = remaining.pop(partner_index)
        mean = (value + partner.conjugate()) / 2
        if abs(mean.imag) <= snap:
            result.extend([complex(value.real, 0.0), complex(partner.real, 0.0)])
        else:
            mean = complex(mean.real, abs(mean.imag))
            result.extend([mean, mean.conjugate()])

    return result


def _spectrum(context: _Context, gamma: float) -> NsaSpectrum:
    settings = context.settings
    reduced = _reduced_poly(context, gamma)
    roots = expand_roots(poly_roots(reduced, settings=settings)) if reduced.degree > 0 else []
    roots = _pair_conjugates([_polish(context, gamma, root) for root in roots], settings.real_snap)

    entries = [(root, False) for root in roots]
    entries.extend((complex(value, 0.0), True) for value in _line_roots(context, gamma))
    entries.sort(key=lambda entry: (entry[0].real, entry[0].imag))

    eigenvalues = np.array([entry[0] for entry in entries], dtype=complex)
    from_line = np.array([entry[1] for entry in entries], dtype=bool)
    eigenvalues.setflags(write=False)
    from_line.setflags(write=False)

    return NsaSpectrum(gamma=float(gamma), eigenvalues=eigenvalues, from_line=from_line)


def nsa_spectrum(
    problem: ProblemDef, gamma: float, *, settings: Optional[Settings] = None
) -> NsaSpectrum:
    """Computes the spectrum of the non-self-adjoint problem for the given
    gamma.

    The roots of the cleared characteristic equation are found with the
    Durand-Kerner iteration and refined with Newton steps; the
    straight-line eigenvalues are known exactly. Nearly real eigenvalues are
    snapped to the real axis and complex ones are paired with their
    conjugates.

    Raises:
        NumericalFailureError: if the root finder does not converge
    """
    return _spectrum(_context(problem, settings), gamma)


def _real_count(context: _Context, gamma: float) -> int:
    return _spectrum(context, gamma).real_count


async def real_count_profile_async(
    problem: ProblemDef, gammas: Sequence[float], *, settings: Optional[Settings] = None
) -> np.ndarray:
    """Counts the real eigenvalues of the non-self-adjoint problem for each
    gamma, evaluating the gammas in worker threads.
    """
    context = _context(problem, settings)
    counts = await map_concurrently(
        partial(_real_count, context),
        [float(gamma) for gamma in gammas],
        max_workers=context.settings.max_workers,
    )
    return np.array(counts, dtype=int)


def real_count_profile(
    problem: ProblemDef, gammas: Sequence[float], *, settings: Optional[Settings] = None
) -> np.ndarray:
    """Synchronous version of `real_count_profile_async()`."""
    return run(partial(real_count_profile_async, problem, gammas, settings=settings))


def real_lambda_via_curves(
    problem: ProblemDef,
    gamma: float,
    *,
    samples: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> np.ndarray:
    """Finds the real eigenvalues of the non-self-adjoint problem as the
    intersections of the traced curves with the line beta = -alpha - 2 gamma.

    Raises:
        PreconditionError: if A or B has straight-line eigenvalues
        DegenerateCouplingError: if kappa is zero
    """
    context = _context(problem, settings)
    settings = context.settings
    if context.sa.gamma or context.sb.gamma:
        raise PreconditionError("straight-line eigenvalues are not traced by curves")
    if problem.kappa == 0:
        raise DegenerateCouplingError("curves need a non-zero kappa")

    # Every eigenvalue is bounded by the max row-sum norm of the block matrix
    bound = float(np.max(np.sum(np.abs(nsa_block_matrix(problem, gamma)), axis=1)))
    branches = trace_branches(
        problem,
        -bound - gamma - 1,
        bound - gamma + 1,
        samples,
        profiles=context.profiles,
        settings=settings,
    )

    def line_gap(alpha: float, ordinal: int) -> float:
        roots = beta_roots(problem, context.profiles, alpha, settings=settings)
        if len(roots) <= ordinal:
            return float("nan")
        return float(roots[ordinal] + alpha + 2 * gamma)

    result = []
    for branch in branches:
        gaps = branch.betas + branch.alphas + 2 * gamma
        result.extend(branch.alphas[gaps == 0])

        for index in np.flatnonzero(gaps[:-1] * gaps[1:] < 0):
            lo, hi = float(branch.alphas[index]), float(branch.alphas[index + 1])
            g_lo = gaps[index]
            mid = 0.5 * (lo + hi)
            for _ in range(settings.bisection_max_iterations):
                mid = 0.5 * (lo + hi)
                g_mid = line_gap(mid, branch.ordinal)
                if not np.isfinite(g_mid) or abs(g_mid) <= 1e-10 or hi - lo <= 1e-15 * (1 + abs(mid)):
                    break
                if (g_mid < 0) == (g_lo < 0):
                    lo, g_lo = mid, g_mid
                else:
                    hi = mid
            result.append(mid)

    return np.sort(np.array(result, dtype=float) + gamma)


class CollisionType(Enum):
    A = "A"
    """Two real eigenvalues collide and become a complex conjugate pair."""

    B = "B"
    """A complex conjugate pair collides and becomes real."""


@dataclass(frozen=True)
class CollisionRecord:
    """An eigenvalue collision of the non-self-adjoint problem."""

    gamma_star: float
    lambda_star: complex
    type: CollisionType
    dbeta_dalpha_at: float
    """Slope of the pair-spectrum curve at the collision; -1 in theory."""

    alpha_star: float
    beta_star: float
    verified: bool
    """Whether the slope is within the configured tolerance of -1."""


def _collisions_at(
    context: _Context, lo: float, hi: float, count_lo: int, count_hi: int
) -> List[CollisionRecord]:
    problem, _, _, profiles, settings = context
    jump = count_hi - count_lo
    kind = CollisionType.A if jump < 0 else CollisionType.B
    gamma_real = lo if jump < 0 else hi

    spectrum = _spectrum(context, gamma_real)
    mask = (spectrum.eigenvalues.imag == 0) & ~spectrum.from_line
    candidates = np.sort(spectrum.eigenvalues[mask].real)
    wanted = abs(jump) // 2
    if len(candidates) < 2 * wanted:
        raise AmbiguousCollisionError(
            f"cannot locate {wanted} colliding pair(s) near gamma={gamma_real!r}"
        )

    # Pick the closest disjoint pairs of adjacent real eigenvalues
    gaps = np.diff(candidates)
    used = set()
    pairs = []
    for index in np.argsort(gaps, kind="stable"):
        if index in used or index + 1 in used:
            continue
        used.update((index, index + 1))
        pairs.append(int(index))
        if len(pairs) == wanted:
            break

    records = []
    for index in sorted(pairs):
        lambda_star = 0.5 * (candidates[index] + candidates[index + 1])
        alpha_star = lambda_star - gamma_real
        target = -lambda_star - gamma_real

        # At a corner point alpha sits on a pole of R_A or at a zero of R_A
        # with beta on a pole of R_B; the slope is the limit along the curve.
        try:
            roots = beta_roots(problem, profiles, alpha_star, settings=settings)
        except PoleProximityError:
            beta_star = target
        else:
            candidates_b = roots if len(roots) else profiles.b.poles
            beta_star = float(candidates_b[np.argmin(np.abs(candidates_b - target))])

        slope = curve_slope(problem, profiles, alpha_star, beta_star, settings=settings)
        if not np.isfinite(slope):
            raise NumericalFailureError(
                f"slope of the curve at ({alpha_star!r}, {beta_star!r}) is not finite"
            )

        verified = bool(abs(slope + 1) <= settings.collision_slope_tolerance)
        if not verified:
            log.warning(
                "Slope at the collision near gamma=%.10g, lambda=%.10g is %.6g instead of -1",
                gamma_real,
                lambda_star,
                slope,
            )

        records.append(
            CollisionRecord(
                gamma_star=0.5 * (lo + hi),
                lambda_star=complex(lambda_star),
                type=kind,
                dbeta_dalpha_at=float(slope),
                alpha_star=float(alpha_star),
                beta_star=float(beta_star),
                verified=verified,
            )
        )

    return records


def _refine(context: _Context, bracket: Tuple[float, float, int, int]) -> List[CollisionRecord]:
    """Bisects a gamma-interval across which the real eigenvalue count
    changes until every change is localized to the collision tolerance.
    """
    lo, hi, count_lo, count_hi = bracket
    if count_lo == count_hi:
        return []

    if hi - lo <= context.settings.collision_tolerance:
        if (count_hi - count_lo) % 2:
            raise AmbiguousCollisionError(
                f"real eigenvalue count jumps from {count_lo} to {count_hi} "
                f"within [{lo!r}, {hi!r}]"
            )
        return _collisions_at(context, lo, hi, count_lo, count_hi)

    mid = 0.5 * (lo + hi)
    count_mid = _real_count(context, mid)
    return _refine(context, (lo, mid, count_lo, count_mid)) + _refine(
        context, (mid, hi, count_mid, count_hi)
    )


async def find_collisions_async(
    problem: ProblemDef,
    gamma_range: Tuple[float, float],
    samples: int = 100,
    *,
    settings: Optional[Settings] = None,
) -> Tuple[CollisionRecord, ...]:
    """Locates the eigenvalue collisions of the non-self-adjoint problem in a
    gamma-range.

    The real eigenvalue count is tracked on a uniform gamma-grid; every
    interval across which it changes is bisected down to the collision
    tolerance. A decreasing count marks Type-A collisions and an increasing
    count marks Type-B collisions (with respect to increasing gamma,
    regardless of the order in which the range is given). Grid samples and
    intervals are evaluated in worker threads.

    Returns:
        the collisions, sorted by gamma and then by lambda

    Raises:
        AmbiguousCollisionError: if the count changes by an odd number within
            an interval that cannot be refined any further
    """
    if samples < 10:
        raise InvalidInputError("collision search needs at least 10 samples")

    context = _context(problem, settings)
    workers = context.settings.max_workers
    start, stop = sorted(float(value) for value in gamma_range)
    grid = create_parameter_grid(start, stop, samples)

    counts = await map_concurrently(partial(_real_count, context), grid.tolist(), workers)
    brackets = [
        (float(grid[i]), float(grid[i + 1]), counts[i], counts[i + 1])
        for i in range(len(grid) - 1)
        if counts[i] != counts[i + 1]
    ]
    log.debug("%d gamma-intervals with a change in the real eigenvalue count", len(brackets))

    found = await map_concurrently(partial(_refine, context), brackets, workers)
    records = [record for group in found for record in group]
    records.sort(key=lambda record: (record.gamma_star, record.lambda_star.real))
    return tuple(records)


def find_collisions(
    problem: ProblemDef,
    gamma_range: Tuple[float, float],
    samples: int = 100,
    *,
    settings: Optional[Settings] = None,
) -> Tuple[CollisionRecord, ...]:
    """Synchronous version of `find_collisions_async()`."""
    return run(partial(find_collisions_async, problem, gamma_range, samples, settings=settings))
