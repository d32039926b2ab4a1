"""Real pair-eigenvalue curves of the coupled problem.

On the real plane the pair spectrum consists of the curves of the
characteristic equation

    kappa^2 R_A(alpha) R_B(beta) = 1,

the straight lines through the exceptional eigenvalues and the corner
points where the curves cross the mesh. For a fixed alpha the equation is a
secular equation in beta with one root between any two consecutive poles of
R_B and one more root outside of them; the roots are found by bisection,
for all grid points at once.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import partial
from logging import getLogger
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from trio import run

from .config import Settings, resolve_settings
from .errors import (
    DegenerateCouplingError,
    InvalidInputError,
    InvalidPointError,
    MeshBoundaryError,
    PoleProximityError,
    PreconditionError,
)
from .grids import create_alpha_grid
from .resolvent import (
    ProfilePair,
    ResolventProfile,
    SignChangeKind,
    eval_R,
    profiles_of,
    sign_changes,
)
from .structure import (
    Mesh,
    OperatorStructure,
    ProblemDef,
    Rectangle,
    analyze_problem,
    build_mesh,
    problem_warnings,
    rectangle_of,
)
from .utils import map_concurrently

__all__ = (
    "BranchEnd",
    "BranchEndKind",
    "CurveBranch",
    "CurvePoint",
    "LimitReport",
    "PairSpectrum",
    "assemble_spectrum",
    "beta_roots",
    "curve_derivative",
    "curve_slope",
    "limit_sweep",
    "limit_sweep_async",
    "swap_roles",
    "trace_branches",
)

log = getLogger(__name__)


def _pole_sum(profile: ResolventProfile, t: np.ndarray, power: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sum(profile.pole_weights / (profile.poles - t[..., None]) ** power, axis=-1)


def _solve_secular(
    profile: ResolventProfile,
    targets: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    settings: Settings,
) -> np.ndarray:
    """Solves R(beta) = target by bisection on brackets where R increases
    through the target. Brackets containing NaN yield NaN.
    """
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)

    for _ in range(settings.bisection_max_iterations):
        mid = 0.5 * (lo + hi)
        with np.errstate(invalid="ignore"):
            below = _pole_sum(profile, mid, 1) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

        with np.errstate(invalid="ignore"):
            if not np.any(hi - lo > settings.bisection_tolerance * (1 + np.abs(mid))):
                break

    return 0.5 * (lo + hi)


def _secular_table(
    kappa: float,
    pa: ResolventProfile,
    pb: ResolventProfile,
    alphas: np.ndarray,
    settings: Settings,
) -> np.ndarray:
    """Returns the sorted beta-roots for every alpha as the rows of an
    (N, m) array where m is the number of poles of R_B. Rows where R_A
    vanishes are NaN.
    """
    alphas = np.asarray(alphas, dtype=float)
    r = _pole_sum(pa, alphas, 1)
    valid = np.abs(r) > settings.resolvent_zero

    c = np.full(len(alphas), np.nan)
    c[valid] = 1 / (kappa**2 * r[valid])
    positive = (c > 0)[:, None]

    q = pb.poles
    m = len(q)
    spread = 2 * pb.total_weight / np.abs(c)

    # For c > 0 the roots lie in (-inf, q_0), (q_0, q_1), ..., (q_{m-2}, q_{m-1});
    # for c < 0 in (q_0, q_1), ..., (q_{m-1}, +inf)
    lo_positive = np.concatenate([[np.nan], q[:-1]])[None, :].repeat(len(alphas), axis=0)
    lo_positive[:, 0] = q[0] - spread
    hi_negative = np.concatenate([q[1:], [np.nan]])[None, :].repeat(len(alphas), axis=0)
    hi_negative[:, m - 1] = q[m - 1] + spread

    lo = np.where(positive, lo_positive, q[None, :])
    hi = np.where(positive, q[None, :], hi_negative)
    lo[~valid] = np.nan
    hi[~valid] = np.nan

    return _solve_secular(pb, c[:, None], lo, hi, settings)


def _resolve_profiles(
    problem: ProblemDef, profiles: Optional[ProfilePair], settings: Settings
) -> ProfilePair:
    return profiles if profiles is not None else profiles_of(problem, settings=settings)


def beta_roots(
    problem: ProblemDef,
    profiles: Optional[ProfilePair],
    alpha: float,
    *,
    settings: Optional[Settings] = None,
) -> np.ndarray:
    """Returns the real roots beta of the characteristic equation at the
    given alpha, in ascending order.

    There is one root per pole of R_B, except when R_A vanishes at alpha, in
    which case the curves only pass through corner points and the result is
    empty.

    Raises:
        DegenerateCouplingError: if kappa is zero
        PoleProximityError: if alpha is inside the exclusion zone of a pole
            of R_A
    """
    settings = resolve_settings(settings)
    if problem.kappa == 0:
        raise DegenerateCouplingError("the characteristic equation needs a non-zero kappa")

    profiles = _resolve_profiles(problem, profiles, settings)
    profiles.a.check(alpha)

    row = _secular_table(problem.kappa, profiles.a, profiles.b, np.array([alpha]), settings)[0]
    return row[np.isfinite(row)]


def _scaled_sums(
    profile: ResolventProfile, t: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns the distance d of each point to the nearest pole together with
    d * R(t) and d^2 * R'(t), which stay finite at the poles.
    """
    t = np.asarray(t, dtype=float)
    differences = profile.poles - t[..., None]
    distance = np.min(np.abs(differences), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            distance[..., None] > 0,
            distance[..., None] / differences,
            (differences == 0).astype(float),
        )
    weights = profile.pole_weights
    return distance, np.sum(weights * scaled, axis=-1), np.sum(weights * scaled**2, axis=-1)


def _slopes(
    kappa: float, pa: ResolventProfile, pb: ResolventProfile, alphas: np.ndarray, betas: np.ndarray
) -> np.ndarray:
    """Slopes -kappa^2 R_A'(alpha) R_B(beta)^2 / R_B'(beta) of points on the
    curves.

    Close to a pole of R_B the ratio R_B^2 / R_B' tends to the weight of the
    pole; close to a pole of R_A the equivalent form
    -R_A' / (kappa^2 R_A^2 R_B') is used instead. Both limits are finite, so
    corner points get their limiting slope.
    """
    da, a1, a2 = _scaled_sums(pa, alphas)
    db, b1, b2 = _scaled_sums(pb, betas)
    with np.errstate(divide="ignore", invalid="ignore"):
        near_b = -(kappa**2) * (a2 / da**2) * b1**2 / b2
        near_a = -(a2 / a1**2) * db**2 / (kappa**2 * b2)
    return np.where(da < db, near_a, near_b)


def characteristic_residual(
    problem: ProblemDef, profiles: ProfilePair, alpha: float, beta: float
) -> float:
    """Returns |kappa^2 R_A(alpha) R_B(beta) - 1|."""
    value = problem.kappa**2 * eval_R(profiles.a, alpha) * eval_R(profiles.b, beta)
    return abs(value - 1)


def curve_derivative(
    problem: ProblemDef,
    profiles: Optional[ProfilePair],
    alpha: float,
    beta: float,
    *,
    settings: Optional[Settings] = None,
) -> float:
    """Returns the slope d(beta)/d(alpha) of the curve through the given
    point, obtained by implicit differentiation of the characteristic
    equation. The slope is always negative.

    Raises:
        InvalidPointError: if the point does not satisfy the characteristic
            equation
    """
    settings = resolve_settings(settings)
    if problem.kappa == 0:
        raise DegenerateCouplingError("the characteristic equation needs a non-zero kappa")

    profiles = _resolve_profiles(problem, profiles, settings)
    residual = characteristic_residual(problem, profiles, alpha, beta)
    if residual > settings.on_curve_tolerance:
        raise InvalidPointError(
            f"({alpha!r}, {beta!r}) is not on a curve, residual is {residual:.3g}"
        )

    return curve_slope(problem, profiles, alpha, beta, settings=settings)


def curve_slope(
    problem: ProblemDef,
    profiles: Optional[ProfilePair],
    alpha: float,
    beta: float,
    *,
    settings: Optional[Settings] = None,
) -> float:
    """Returns the slope d(beta)/d(alpha) at a point that is known to lie on
    a curve, without checking the residual.

    Unlike `curve_derivative()`, the point may be a corner point or lie in the
    exclusion zone of a pole; the limiting slope is returned there.
    """
    settings = resolve_settings(settings)
    if problem.kappa == 0:
        raise DegenerateCouplingError("the characteristic equation needs a non-zero kappa")

    profiles = _resolve_profiles(problem, profiles, settings)
    slopes = _slopes(problem.kappa, profiles.a, profiles.b, np.array([alpha]), np.array([beta]))
    return float(slopes[0])


@dataclass(frozen=True)
class CurvePoint:
    alpha: float
    beta: float
    dbeta_dalpha: float
    rectangle: Rectangle


class BranchEndKind(Enum):
    BLOWUP = "blow-up"
    """The branch escapes to infinity at a pole of R_A."""

    CORNER = "corner"
    """The branch ends in a corner point on a pole of R_A."""

    OPEN = "open"
    """The branch is cut off by the end of the sampling window, or it stops
    next to a pole of R_A before |beta| reaches the blow-up threshold."""


class BranchEnd(NamedTuple):
    kind: BranchEndKind
    alpha: float
    beta: float


@dataclass(frozen=True)
class CurveBranch:
    """A continuous curve of the pair spectrum, sampled on a grid.

    A branch lives between two consecutive poles of R_A and is made of the
    roots with the same ordinal; it passes through a corner point wherever
    R_A vanishes.
    """

    branch_id: int
    interval: int
    """Number of poles of R_A to the left of the branch."""

    ordinal: int
    """Index of the branch among the roots of the characteristic equation,
    in ascending order of beta."""

    alphas: np.ndarray
    betas: np.ndarray
    slopes: np.ndarray
    rect_p: np.ndarray
    rect_q: np.ndarray

    start: BranchEnd
    end: BranchEnd
    corners: Tuple[Tuple[float, float], ...] = ()
    gaps: int = 0
    """Number of grid points left out because they fell on a mesh line."""

    def __len__(self) -> int:
        return len(self.alphas)

    @property
    def points(self) -> Tuple[CurvePoint, ...]:
        return tuple(
            CurvePoint(float(a), float(b), float(s), Rectangle(int(p), int(q)))
            for a, b, s, p, q in zip(self.alphas, self.betas, self.slopes, self.rect_p, self.rect_q)
        )

    @property
    def blows_up(self) -> bool:
        return BranchEndKind.BLOWUP in (self.start.kind, self.end.kind)


def _interior_zeros(profile: ResolventProfile, settings: Settings) -> np.ndarray:
    """Zeros of the resolvent function between its consecutive poles."""
    poles = profile.poles
    if len(poles) < 2:
        return np.zeros(0)
    return _solve_secular(profile, np.zeros(len(poles) - 1), poles[:-1], poles[1:], settings)


def _rectangles(
    mesh: Mesh, alphas: np.ndarray, betas: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = np.zeros(len(alphas), dtype=int)
    q = np.zeros(len(alphas), dtype=int)
    keep = np.ones(len(alphas), dtype=bool)
    for index, (alpha, beta) in enumerate(zip(alphas, betas)):
        try:
            p[index], q[index] = rectangle_of(mesh, alpha, beta)
        except MeshBoundaryError:
            keep[index] = False
    return p, q, keep


class _Context(NamedTuple):
    problem: ProblemDef
    sa: OperatorStructure
    sb: OperatorStructure
    profiles: ProfilePair
    mesh: Mesh
    settings: Settings


def _context(
    problem: ProblemDef, profiles: Optional[ProfilePair], settings: Optional[Settings]
) -> _Context:
    settings = resolve_settings(settings)
    sa, sb = analyze_problem(problem, settings=settings)
    if profiles is None:
        profiles = profiles_of(problem, (sa, sb), settings=settings)
    return _Context(problem, sa, sb, profiles, build_mesh(sa, sb), settings)


def _trace(
    context: _Context, alpha_min: float, alpha_max: float, samples: Optional[int]
) -> Tuple[CurveBranch, ...]:
    problem, sa, sb, profiles, mesh, settings = context
    pa, pb = profiles

    grid = create_alpha_grid(
        alpha_min,
        alpha_max,
        samples,
        poles=pa.poles,
        exclusion_radius=pa.exclusion_radius,
        settings=settings,
    )
    table = _secular_table(problem.kappa, pa, pb, grid, settings)
    intervals = np.searchsorted(pa.poles, grid)

    zeros_a = [
        change.value
        for change in sign_changes(pa, sa.compressed_eig, sa.delta)
        if change.kind is SignChangeKind.ZERO
    ]
    zeros_b = _interior_zeros(pb, settings)
    m = len(pb.poles)

    log.debug(
        "Tracing %d root ordinals on %d grid points in [%g, %g]",
        m,
        len(grid),
        alpha_min,
        alpha_max,
    )

    # Grid points are exact, so only the pole exclusion zones need to keep
    # them off the vertical mesh lines
    mesh = replace(mesh, x_tolerance=min(mesh.x_tolerance, pa.exclusion_radius))
    b_max = settings.blowup_factor * (1 + max(sa.diameter, sb.diameter))

    def unresolved(pole: float, beta: float) -> None:
        log.warning(
            "Branch next to the pole at alpha=%.10g stops at beta=%.6g without "
            "reaching the blow-up threshold %.3g",
            pole,
            beta,
            b_max,
        )

    def left_end(interval: int, ordinal: int, alphas, betas) -> BranchEnd:
        open_end = BranchEnd(BranchEndKind.OPEN, float(alphas[0]), float(betas[0]))
        if interval == 0 or pa.poles[interval - 1] < alpha_min:
            return open_end
        pole = float(pa.poles[interval - 1])
        if ordinal == m - 1:
            if betas[0] > b_max:
                return BranchEnd(BranchEndKind.BLOWUP, pole, float("inf"))
            unresolved(pole, betas[0])
            return open_end
        return BranchEnd(BranchEndKind.CORNER, pole, float(zeros_b[ordinal]))

    def right_end(interval: int, ordinal: int, alphas, betas) -> BranchEnd:
        open_end = BranchEnd(BranchEndKind.OPEN, float(alphas[-1]), float(betas[-1]))
        if interval == len(pa.poles) or pa.poles[interval] > alpha_max:
            return open_end
        pole = float(pa.poles[interval])
        if ordinal == 0:
            if betas[-1] < -b_max:
                return BranchEnd(BranchEndKind.BLOWUP, pole, float("-inf"))
            unresolved(pole, betas[-1])
            return open_end
        return BranchEnd(BranchEndKind.CORNER, pole, float(zeros_b[ordinal - 1]))

    branches: List[CurveBranch] = []
    for interval in np.unique(intervals):
        rows = intervals == interval
        lower = pa.poles[interval - 1] if interval > 0 else -np.inf
        upper = pa.poles[interval] if interval < len(pa.poles) else np.inf
        crossings = [x for x in zeros_a if lower < x < upper and alpha_min <= x <= alpha_max]

        for ordinal in range(m):
            alphas, betas = grid[rows], table[rows, ordinal]
            finite = np.isfinite(betas)
            alphas, betas = alphas[finite], betas[finite]

            rect_p, rect_q, keep = _rectangles(mesh, alphas, betas)
            gaps = int(np.count_nonzero(~finite) + np.count_nonzero(~keep))
            alphas, betas, rect_p, rect_q = alphas[keep], betas[keep], rect_p[keep], rect_q[keep]
            if not len(alphas):
                continue

            slopes = _slopes(problem.kappa, pa, pb, alphas, betas)
            for array in (alphas, betas, slopes, rect_p, rect_q):
                array.setflags(write=False)

            branches.append(
                CurveBranch(
                    branch_id=len(branches),
                    interval=int(interval),
                    ordinal=ordinal,
                    alphas=alphas,
                    betas=betas,
                    slopes=slopes,
                    rect_p=rect_p,
                    rect_q=rect_q,
                    start=left_end(interval, ordinal, alphas, betas),
                    end=right_end(interval, ordinal, alphas, betas),
                    corners=tuple((float(x), float(pb.poles[ordinal])) for x in crossings),
                    gaps=gaps,
                )
            )

    return tuple(branches)


def trace_branches(
    problem: ProblemDef,
    alpha_min: float,
    alpha_max: float,
    samples: Optional[int] = None,
    *,
    profiles: Optional[ProfilePair] = None,
    settings: Optional[Settings] = None,
) -> Tuple[CurveBranch, ...]:
    """Traces the curves of the pair spectrum over an alpha-window.

    The window is sampled uniformly with the given number of samples (the
    configured default when omitted), refined geometrically towards each
    pole of R_A. Grid points that fall on mesh lines are left out.

    A branch end next to a pole of R_A is a blow-up only if |beta| at the
    sample closest to the pole exceeds ``blowup_factor * (1 + diameter)``;
    an end that should blow up but stays below the threshold is left open
    and logged.

    Parameters:
        problem: the problem to trace
        alpha_min: left end of the window; must not be on a mesh line
        alpha_max: right end of the window; must not be on a mesh line
        samples: number of uniform samples in the window

    Returns:
        the branches, ordered by the pole interval they live in and then by
        their ordinal
    """
    if problem.kappa == 0:
        raise DegenerateCouplingError("curves need a non-zero kappa")
    return _trace(_context(problem, profiles, settings), alpha_min, alpha_max, samples)


def _corner_points(sa: OperatorStructure, sb: OperatorStructure) -> Tuple[Tuple[float, float], ...]:
    corners = set()
    for cluster in sa.clusters:
        if sa.contains(sa.gamma, cluster.value):
            continue
        for other in sb.compressed_clusters:
            if not sb.contains(sb.gamma, other.value):
                corners.add((cluster.value, other.value))

    for cluster in sb.clusters:
        if sb.contains(sb.gamma, cluster.value):
            continue
        for other in sa.compressed_clusters:
            if not sa.contains(sa.gamma, other.value):
                corners.add((other.value, cluster.value))

    return tuple(sorted(corners))


@dataclass(frozen=True)
class PairSpectrum:
    """The real pair spectrum of a problem: curves, straight lines and corner
    points, together with the mesh they live on.
    """

    problem: ProblemDef
    branches: Tuple[CurveBranch, ...]
    vertical_lines: Tuple[float, ...]
    horizontal_lines: Tuple[float, ...]
    corner_points: Tuple[Tuple[float, float], ...]
    mesh: Mesh
    profiles: ProfilePair
    window: Tuple[float, float]
    """The alpha-window the branches were traced on."""

    tolerance: float
    """Tolerance of `contains()` for the characteristic equation."""

    warnings: Tuple[str, ...] = ()

    @property
    def points(self) -> Tuple[CurvePoint, ...]:
        return tuple(point for branch in self.branches for point in branch.points)

    def contains(self, alpha: float, beta: float, tolerance: Optional[float] = None) -> bool:
        """Returns whether the given real point belongs to the spectrum, i.e.
        lies on one of the straight lines, is a corner point or satisfies the
        characteristic equation within the given tolerance.
        """
        tolerance = self.tolerance if tolerance is None else tolerance
        x_tolerance = max(tolerance, self.mesh.x_tolerance)
        y_tolerance = max(tolerance, self.mesh.y_tolerance)

        if any(abs(alpha - line) <= x_tolerance for line in self.vertical_lines):
            return True
        if any(abs(beta - line) <= y_tolerance for line in self.horizontal_lines):
            return True
        if any(
            abs(alpha - x) <= x_tolerance and abs(beta - y) <= y_tolerance
            for x, y in self.corner_points
        ):
            return True
        if self.problem.kappa == 0:
            return False

        try:
            residual = characteristic_residual(self.problem, self.profiles, alpha, beta)
        except PoleProximityError:
            return False
        return residual <= tolerance


def default_window(mesh: Mesh) -> Tuple[float, float]:
    """The alpha-window extending the mesh by one unit on both sides."""
    xs = mesh.xs
    return float(xs.min()) - 1, float(xs.max()) + 1


def assemble_spectrum(
    problem: ProblemDef,
    *,
    window: Optional[Tuple[float, float]] = None,
    samples: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> PairSpectrum:
    """Assembles the real pair spectrum of a problem.

    Parameters:
        problem: the problem to solve
        window: the alpha-window to trace the curves on; defaults to the mesh
            extended by one unit on both sides
        samples: number of uniform samples in the window

    Raises:
        DegenerateCouplingError: if kappa is zero
    """
    if problem.kappa == 0:
        raise DegenerateCouplingError("the pair spectrum needs a non-zero kappa")

    context = _context(problem, None, settings)
    window = window or default_window(context.mesh)
    branches = _trace(context, window[0], window[1], samples)

    return PairSpectrum(
        problem=problem,
        branches=branches,
        vertical_lines=context.sa.gamma,
        horizontal_lines=context.sb.gamma,
        corner_points=_corner_points(context.sa, context.sb),
        mesh=context.mesh,
        profiles=context.profiles,
        window=(float(window[0]), float(window[1])),
        tolerance=context.settings.on_curve_tolerance,
        warnings=problem_warnings(problem, context.sa, context.sb),
    )


def swap_roles(problem: ProblemDef) -> ProblemDef:
    """Returns the problem with the roles of A and B exchanged; its pair
    spectrum is the mirror image of the original one under
    (alpha, beta) -> (beta, alpha).
    """
    return ProblemDef(problem.B, problem.A, problem.z, problem.kappa)


@dataclass(frozen=True)
class LimitReport:
    """Distances of sampled curve points from the limiting line sets, per
    coupling constant.
    """

    kappas: np.ndarray
    d_small: np.ndarray
    """Largest distance from the lines through Spec(A) and Spec(B)."""

    d_large: np.ndarray
    """Largest distance from the lines through the compressed spectra."""

    window: Tuple[float, float, float, float]
    """Sampling window as (alpha_min, alpha_max, beta_min, beta_max)."""

    @property
    def small_kappa_converges(self) -> bool:
        """Whether d_small strictly decreases as kappa decreases."""
        order = np.argsort(self.kappas)
        return bool(np.all(np.diff(self.d_small[order]) > 0))

    @property
    def large_kappa_converges(self) -> bool:
        """Whether d_large strictly decreases as kappa increases."""
        order = np.argsort(self.kappas)
        return bool(np.all(np.diff(self.d_large[order]) < 0))


def _line_distance(
    alphas: np.ndarray, betas: np.ndarray, verticals: np.ndarray, horizontals: np.ndarray
) -> float:
    if not len(alphas):
        return 0.0

    distance = np.full(len(alphas), np.inf)
    if len(verticals):
        distance = np.minimum(distance, np.min(np.abs(alphas[:, None] - verticals[None, :]), axis=1))
    if len(horizontals):
        distance = np.minimum(
            distance, np.min(np.abs(betas[:, None] - horizontals[None, :]), axis=1)
        )
    return float(np.max(distance))


def _limit_distances(
    context: _Context, window: Tuple[float, float, float, float], samples: int, kappa: float
) -> Tuple[float, float]:
    _, sa, sb, profiles, _, settings = context
    alpha_min, alpha_max, beta_min, beta_max = window
    margin = settings.limit_margin * (1 + max(sa.diameter, sb.diameter))
    uniform = np.linspace(alpha_min, alpha_max, samples)

    result = []
    for verticals, horizontals in (
        (np.array([c.value for c in sa.clusters]), np.array([c.value for c in sb.clusters])),
        (
            np.array([c.value for c in sa.compressed_clusters]),
            np.array([c.value for c in sb.compressed_clusters]),
        ),
    ):
        alphas = uniform
        if len(verticals):
            alphas = alphas[np.min(np.abs(alphas[:, None] - verticals[None, :]), axis=1) > margin]

        table = _secular_table(kappa, profiles.a, profiles.b, alphas, settings)
        grid = np.repeat(alphas[:, None], table.shape[1], axis=1)
        inside = np.isfinite(table) & (table >= beta_min) & (table <= beta_max)
        result.append(_line_distance(grid[inside], table[inside], verticals, horizontals))

    return result[0], result[1]


async def limit_sweep_async(
    problem: ProblemDef,
    kappa_values: Sequence[float],
    *,
    samples: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> LimitReport:
    """Measures how close the curves get to the limiting line sets as kappa
    tends to zero or to infinity, evaluating the coupling constants in worker
    threads.

    The curves are sampled on the mesh extended by one unit in every
    direction, leaving out a margin around the vertical limiting lines.

    Raises:
        PreconditionError: if A or B has eigenvalues in its straight-line set
        InvalidInputError: if a coupling constant is not positive
    """
    context = _context(problem, None, settings)
    settings = context.settings

    if context.sa.gamma or context.sb.gamma:
        raise PreconditionError(
            "limit sweeps need operators without straight-line eigenvalues"
        )

    kappas = np.array(kappa_values, dtype=float)
    if not len(kappas) or np.any(kappas <= 0) or not np.all(np.isfinite(kappas)):
        raise InvalidInputError("coupling constants of a limit sweep must be positive")

    x_min, x_max, y_min, y_max = context.mesh.span()
    window = (x_min - 1, x_max + 1, y_min - 1, y_max + 1)
    samples = settings.grid_samples if samples is None else int(samples)

    distances = await map_concurrently(
        partial(_limit_distances, context, window, samples),
        kappas.tolist(),
        max_workers=settings.max_workers,
    )
    for kappa, (small, large) in zip(kappas, distances):
        log.debug("kappa=%g: d_small=%.3g, d_large=%.3g", kappa, small, large)

    return LimitReport(
        kappas=kappas,
        d_small=np.array([item[0] for item in distances]),
        d_large=np.array([item[1] for item in distances]),
        window=window,
    )


def limit_sweep(
    problem: ProblemDef,
    kappa_values: Sequence[float],
    *,
    samples: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> LimitReport:
    """Synchronous version of `limit_sweep_async()`."""
    return run(partial(limit_sweep_async, problem, kappa_values, samples=samples, settings=settings))
