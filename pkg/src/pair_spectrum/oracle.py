"""Brute-force verifiers that check the solvers along independent code paths:
diagonalization instead of secular bisection, determinants instead of the
characteristic equation and the Faddeev-LeVerrier polynomial of the explicit
block matrix instead of the cleared resolvent form.
"""

from dataclasses import dataclass
from logging import getLogger
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import Settings, resolve_settings
from .errors import InvalidInputError, SpectralError
from .linalg import char_poly, complex_det, expand_roots, jacobi_eig, poly_roots
from .nsa import nsa_block_matrix, nsa_spectrum
from .resolvent import eval_R, profiles_of
from .structure import ProblemDef, analyze_problem
from .tracer import assemble_spectrum, beta_roots

__all__ = (
    "CheckResult",
    "MembershipResult",
    "check_membership",
    "direct_beta",
    "multiset_distance",
    "nsa_matrix_spectrum",
    "run_verification_suite",
)

log = getLogger(__name__)


def direct_beta(
    problem: ProblemDef,
    alpha: float,
    *,
    secular_only: bool = False,
    settings: Optional[Settings] = None,
) -> np.ndarray:
    """Returns the eigenvalues beta of B - kappa^2 R_A(alpha) z z^T in
    ascending order.

    Parameters:
        problem: the problem to evaluate
        alpha: the value of the first spectral parameter
        secular_only: keep only the eigenvalues whose eigenvectors carry
            coupling weight, i.e. the ones that are also roots of the
            characteristic equation. Their number is the number of poles of
            R_B.

    Raises:
        PoleProximityError: if alpha is inside the exclusion zone of a pole
            of R_A
    """
    settings = resolve_settings(settings)
    profiles = profiles_of(problem, settings=settings)
    shift = problem.kappa**2 * eval_R(profiles.a, alpha)
    eig = jacobi_eig(problem.B - shift * problem.projection, settings=settings)

    if not secular_only:
        return np.array(eig.eigenvalues)

    weights = (eig.eigenvectors.T @ problem.z) ** 2
    keep = np.sort(np.argsort(-weights, kind="stable")[: len(profiles.b.poles)])
    return np.array(eig.eigenvalues[keep])


@dataclass(frozen=True)
class MembershipResult:
    is_pair_eigenvalue: bool
    residual: float
    """Smallest eigenvalue modulus of the pair matrix for real points, or the
    normalized modulus of its determinant for complex points."""

    scale: float
    """Scale the residual is compared against."""

    witness: Optional[Tuple[np.ndarray, np.ndarray]] = None
    """The pair eigenvector (u, v), when available."""


def check_membership(
    problem: ProblemDef, alpha: complex, beta: complex, *, settings: Optional[Settings] = None
) -> MembershipResult:
    """Decides whether (alpha, beta) is a pair eigenvalue by examining the
    2n x 2n pair matrix directly.

    For real points the pair matrix is symmetric and the residual is the
    smallest eigenvalue modulus, compared against the membership tolerance
    times the max row-sum norm; the corresponding eigenvector is the witness.
    For complex points the residual is the modulus of the determinant divided
    by the product of the largest entry moduli of the rows.
    """
    settings = resolve_settings(settings)
    alpha, beta = complex(alpha), complex(beta)
    n = problem.n

    if alpha.imag == 0 and beta.imag == 0:
        matrix = problem.pair_matrix(alpha.real, beta.real)
        scale = float(np.max(np.sum(np.abs(matrix), axis=1)))
        eig = jacobi_eig(matrix, settings=settings)
        index = int(np.argmin(np.abs(eig.eigenvalues)))
        residual = float(abs(eig.eigenvalues[index]))
        vector = eig.eigenvectors[:, index]
        return MembershipResult(
            is_pair_eigenvalue=residual <= settings.membership_tolerance * max(scale, 1.0),
            residual=residual,
            scale=scale,
            witness=(vector[:n].copy(), vector[n:].copy()),
        )

    matrix = problem.pair_matrix(alpha, beta)
    row_norms = np.max(np.abs(matrix), axis=1)
    if np.any(row_norms == 0):
        residual = 0.0
    else:
        residual = float(abs(complex_det(matrix, settings=settings)) / np.prod(row_norms))

    return MembershipResult(
        is_pair_eigenvalue=residual <= settings.membership_tolerance,
        residual=residual,
        scale=1.0,
    )


def nsa_matrix_spectrum(
    problem: ProblemDef, gamma: float, *, settings: Optional[Settings] = None
) -> np.ndarray:
    """Returns the eigenvalues of the explicit block matrix of the
    non-self-adjoint problem (with multiplicities, sorted by real part), via
    its Faddeev-LeVerrier characteristic polynomial.
    """
    if problem.n > 32:
        raise InvalidInputError("the block matrix oracle is limited to n <= 32")

    matrix = nsa_block_matrix(problem, gamma)
    scale = float(np.max(np.sum(np.abs(matrix), axis=1))) or 1.0
    roots = expand_roots(poly_roots(char_poly(matrix / scale, settings=settings), settings=settings))
    return np.array(sorted(roots * scale, key=lambda value: (value.real, value.imag)))


def multiset_distance(first: Sequence[complex], second: Sequence[complex]) -> float:
    """Largest distance between matched elements of two multisets of equal
    size, matching each element of the first to its nearest unused element of
    the second. Returns infinity if the sizes differ.
    """
    first = list(np.asarray(first, dtype=complex))
    second = list(np.asarray(second, dtype=complex))
    if len(first) != len(second):
        return float("inf")

    result = 0.0
    for value in sorted(first, key=lambda item: (item.real, item.imag)):
        index = int(np.argmin([abs(value - other) for other in second]))
        result = max(result, abs(value - second.pop(index)))
    return result


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one check of the verification suite."""

    name: str
    passed: bool
    detail: str = ""


_Outcome = Tuple[bool, str]


def _check_decompositions(problem, structures, settings) -> _Outcome:
    worst = 0.0
    for matrix, structure in zip((problem.A, problem.B), structures):
        eig = structure.eig
        vectors = eig.eigenvectors
        worst = max(
            worst,
            float(np.max(np.abs(vectors.T @ vectors - np.eye(eig.size)))),
            float(np.max(np.abs(matrix @ vectors - vectors * eig.eigenvalues)))
            / max(float(np.max(np.abs(matrix))), 1.0),
        )
    return worst <= 1e-10, f"worst residual {worst:.3g}"


def _check_interlacing(problem, structures, settings) -> _Outcome:
    worst = 0.0
    for structure in structures:
        values, compressed = structure.eigenvalues, structure.compressed_eigenvalues
        if len(compressed):
            worst = max(
                worst,
                float(np.max(values[:-1] - compressed)),
                float(np.max(compressed - values[1:])),
            )
    return worst <= 1e-9, f"worst violation {worst:.3g}"


def _sample_alphas(spectrum, count: int) -> np.ndarray:
    """Alphas spread over the window, away from mesh lines."""
    lo, hi = spectrum.window
    alphas = np.linspace(lo, hi, count + 2)[1:-1] + 1e-3 * (hi - lo) / (count + 1)
    xs = spectrum.mesh.xs
    return alphas[np.min(np.abs(alphas[:, None] - xs[None, :]), axis=1) > 1e-3]


def _check_secular_equation(problem, spectrum, settings) -> _Outcome:
    worst = 0.0
    for alpha in _sample_alphas(spectrum, 25):
        roots = beta_roots(problem, spectrum.profiles, alpha, settings=settings)
        if not len(roots):
            continue
        direct = direct_beta(problem, alpha, secular_only=True, settings=settings)
        worst = max(worst, float(np.max(np.abs(roots - direct) / (1 + np.abs(direct)))))
    return worst <= 1e-8, f"worst relative difference {worst:.3g}"


def _check_parity(problem, spectrum, settings) -> _Outcome:
    total = sum(len(branch) for branch in spectrum.branches)
    odd = sum(
        int(np.count_nonzero((branch.rect_p + branch.rect_q) % 2)) for branch in spectrum.branches
    )
    return odd == 0 and total > 0, f"{odd} of {total} points odd"


def _check_monotonicity(problem, spectrum, settings) -> _Outcome:
    bad = 0
    for branch in spectrum.branches:
        bad += int(np.count_nonzero(branch.slopes > 0))
        slack = 1e-9 * (1 + np.abs(branch.betas[1:]))
        bad += int(np.count_nonzero(np.diff(branch.betas) > slack))
    return bad == 0, f"{bad} violations"


def _check_residual(problem, spectrum, settings) -> _Outcome:
    pa, pb = spectrum.profiles
    margin = settings.refinement_radius
    xs, ys = spectrum.mesh.xs, spectrum.mesh.ys

    worst, checked = 0.0, 0
    for branch in spectrum.branches:
        far = (np.min(np.abs(branch.alphas[:, None] - xs[None, :]), axis=1) > margin) & (
            np.min(np.abs(branch.betas[:, None] - ys[None, :]), axis=1) > margin
        )
        if not np.any(far):
            continue
        alphas, betas = branch.alphas[far], branch.betas[far]
        values = problem.kappa**2 * eval_R(pa, alphas) * eval_R(pb, betas)
        worst = max(worst, float(np.max(np.abs(values - 1))))
        checked += len(alphas)

    return worst <= 1e-8, f"worst residual {worst:.3g} on {checked} points"


def _check_membership(problem, spectrum, settings) -> _Outcome:
    ys = spectrum.mesh.ys
    bound = 10 * (1 + float(np.max(np.abs(ys))))
    points: List[Tuple[float, float]] = []

    for branch in spectrum.branches:
        moderate = np.flatnonzero(np.abs(branch.betas) <= bound)
        for index in moderate[:: max(1, len(moderate) // 10)]:
            points.append((float(branch.alphas[index]), float(branch.betas[index])))

    points.extend(spectrum.corner_points)
    points.extend((line, 0.5) for line in spectrum.vertical_lines)
    points.extend((0.5, line) for line in spectrum.horizontal_lines)

    failures = sum(
        not check_membership(problem, alpha, beta, settings=settings).is_pair_eigenvalue
        for alpha, beta in points
    )
    return failures == 0, f"{failures} of {len(points)} points rejected"


def _check_nsa(problem, spectrum, settings) -> _Outcome:
    if problem.n > 32:
        return True, "skipped: dimension too large"

    worst = 0.0
    for gamma in (-1.5, -0.25, 0.0, 0.75, 2.0):
        solved = nsa_spectrum(problem, gamma, settings=settings).eigenvalues
        oracle = nsa_matrix_spectrum(problem, gamma, settings=settings)
        scale = 1 + float(np.max(np.abs(oracle)))
        worst = max(worst, multiset_distance(solved, oracle) / scale)
    return worst <= 1e-5, f"worst relative distance {worst:.3g}"


_STRUCTURE_CHECKS: Tuple[Tuple[str, Callable[..., _Outcome]], ...] = (
    ("eigendecomposition", _check_decompositions),
    ("interlacing", _check_interlacing),
)

_SPECTRUM_CHECKS: Tuple[Tuple[str, Callable[..., _Outcome]], ...] = (
    ("secular-vs-direct", _check_secular_equation),
    ("chess-board-parity", _check_parity),
    ("monotonicity", _check_monotonicity),
    ("characteristic-residual", _check_residual),
    ("membership", _check_membership),
    ("nsa-oracle", _check_nsa),
)


def _run_check(name: str, check: Callable[..., _Outcome], *args) -> CheckResult:
    try:
        passed, detail = check(*args)
    except SpectralError as ex:
        passed, detail = False, str(ex)
    log.debug("%s: %s (%s)", name, "passed" if passed else "FAILED", detail)
    return CheckResult(name, passed, detail)


def run_verification_suite(
    problem: ProblemDef, *, samples: Optional[int] = None, settings: Optional[Settings] = None
) -> Tuple[CheckResult, ...]:
    """Runs every oracle check on a problem and returns the outcomes.

    Checks that need curves are skipped (and reported as passed) when kappa
    is zero. A check that raises an error of this package is reported as
    failed with the error message as its detail.
    """
    settings = resolve_settings(settings)
    structures = analyze_problem(problem, settings=settings)
    results = [
        _run_check(name, check, problem, structures, settings) for name, check in _STRUCTURE_CHECKS
    ]

    if problem.kappa == 0:
        results.extend(
            CheckResult(name, True, "skipped: kappa is zero") for name, _ in _SPECTRUM_CHECKS
        )
        return tuple(results)

    spectrum = assemble_spectrum(problem, samples=samples, settings=settings)
    results.extend(
        _run_check(name, check, problem, spectrum, settings) for name, check in _SPECTRUM_CHECKS
    )
    return tuple(results)
