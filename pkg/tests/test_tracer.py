from math import sqrt

import numpy as np

from numpy.testing import assert_allclose
from pytest import mark, raises

from pair_spectrum.catalog import OVERLAY_KAPPAS, a1_matrix, create_example
from pair_spectrum.config import DEFAULT_SETTINGS
from pair_spectrum.errors import (
    DegenerateCouplingError,
    InvalidInputError,
    InvalidPointError,
    PoleProximityError,
    PreconditionError,
)
from pair_spectrum.structure import ProblemDef
from pair_spectrum.tracer import (
    BranchEndKind,
    assemble_spectrum,
    beta_roots,
    curve_derivative,
    curve_slope,
    limit_sweep,
    swap_roles,
    trace_branches,
)


def all_even(branches):
    return all(np.all((branch.rect_p + branch.rect_q) % 2 == 0) for branch in branches)


class TestBetaRoots:
    def test_example2(self, example2):
        roots = beta_roots(example2, None, 0.0)
        expected = [(14 - sqrt(48.25)) / 7.5, (14 + sqrt(48.25)) / 7.5]
        assert_allclose(roots, expected, atol=1e-10)

    def test_scalar_problem(self, scalar_problem):
        assert_allclose(beta_roots(scalar_problem, None, 2.0), [0.5], atol=1e-12)
        assert_allclose(beta_roots(scalar_problem, None, -0.5), [-2.0], atol=1e-12)

    def test_zero_of_resolvent_has_no_finite_root(self, example2):
        assert len(beta_roots(example2, None, -0.6)) == 0

    def test_one_root_per_pole(self, make_random_problem, rng):
        for n in (2, 4, 7):
            problem = make_random_problem(n)
            roots = beta_roots(problem, None, float(rng.normal()) + 0.123)
            assert len(roots) == n
            assert np.all(np.diff(roots) > 0)

    def test_zero_kappa(self, example2):
        with raises(DegenerateCouplingError):
            beta_roots(example2.with_kappa(0.0), None, 0.0)

    def test_alpha_on_pole(self, scalar_problem):
        with raises(PoleProximityError):
            beta_roots(scalar_problem, None, 0.0)


class TestCurveDerivative:
    def test_scalar_problem(self, scalar_problem):
        assert_allclose(curve_derivative(scalar_problem, None, 2.0, 0.5), -0.25, atol=1e-12)

    def test_finite_differences(self, example2):
        alpha, h = 0.3, 1e-5
        for ordinal in range(2):
            beta = beta_roots(example2, None, alpha)[ordinal]
            numeric = (
                beta_roots(example2, None, alpha + h)[ordinal]
                - beta_roots(example2, None, alpha - h)[ordinal]
            ) / (2 * h)
            slope = curve_derivative(example2, None, alpha, beta)
            assert slope < 0
            assert_allclose(slope, numeric, rtol=1e-4)

    def test_point_off_the_curve(self, scalar_problem):
        with raises(InvalidPointError):
            curve_derivative(scalar_problem, None, 2.0, 1.0)

    def test_limiting_slope_at_corner_points(self, example2):
        branches = trace_branches(example2, -2.0, 2.0, 400)
        middle = [branch for branch in branches if branch.interval == 1]

        # (-1, 1.4) sits on a pole of R_A, (-0.6, 1) on a pole of R_B
        start = middle[0].start
        slope = curve_slope(example2, None, start.alpha, start.beta)
        assert np.isfinite(slope) and slope < 0
        assert_allclose(slope, middle[0].slopes[0], rtol=1e-5)

        (alpha, beta) = middle[0].corners[0]
        slope = curve_slope(example2, None, alpha, beta)
        assert np.isfinite(slope) and slope < 0
        nearby = alpha + 1e-7
        nearby_beta = beta_roots(example2, None, nearby)[0]
        assert_allclose(slope, curve_slope(example2, None, nearby, nearby_beta), rtol=1e-4)

    def test_corner_slope_of_tridiagonal_pair(self):
        matrix = a1_matrix(3)
        problem = ProblemDef(matrix, matrix, np.array([0.0, 0.0, 1.0]), 1.0)

        # R_A(-1) = 0, R_A'(-1) = 2 and the pole of R_B at 0 has weight 1/2
        assert_allclose(curve_slope(problem, None, -1.0, 0.0), -1.0, rtol=1e-12)
        assert_allclose(curve_slope(problem, None, 0.0, -1.0), -1.0, rtol=1e-12)


class TestBranches:
    def test_example2_structure(self, example2):
        branches = trace_branches(example2, -2.0, 2.0, 400)
        assert len(branches) == 6
        assert [(branch.interval, branch.ordinal) for branch in branches] == [
            (interval, ordinal) for interval in range(3) for ordinal in range(2)
        ]
        assert all_even(branches)

        for branch in branches:
            assert np.all(branch.slopes < 0)
            assert np.all(np.diff(branch.betas) <= 1e-9 * (1 + np.abs(branch.betas[1:])))

        # One blow-up on each side of every pole of R_A
        for pole in (-1.0, 1.0):
            left = [b for b in branches if b.end.kind is BranchEndKind.BLOWUP and b.end.alpha == pole]
            right = [
                b for b in branches if b.start.kind is BranchEndKind.BLOWUP and b.start.alpha == pole
            ]
            assert len(left) == len(right) == 1
            assert left[0].end.beta == -np.inf
            assert right[0].start.beta == np.inf

    def test_example2_corners(self, example2):
        branches = trace_branches(example2, -2.0, 2.0, 400)
        middle = [branch for branch in branches if branch.interval == 1]

        assert middle[0].start.kind is BranchEndKind.CORNER
        assert_allclose((middle[0].start.alpha, middle[0].start.beta), (-1.0, 1.4), atol=1e-10)
        assert middle[1].end.kind is BranchEndKind.CORNER
        assert_allclose((middle[1].end.alpha, middle[1].end.beta), (1.0, 1.4), atol=1e-10)

        # Both middle branches pass through the zero of R_A
        for branch, beta in zip(middle, (1.0, 3.0)):
            assert len(branch.corners) == 1
            assert_allclose(branch.corners[0], (-0.6, beta), atol=1e-12)

    def test_outer_ends_are_open(self, example2):
        branches = trace_branches(example2, -2.0, 2.0, 400)
        assert branches[0].start.kind is BranchEndKind.OPEN
        assert branches[0].start.alpha == -2.0
        assert branches[-1].end.kind is BranchEndKind.OPEN
        assert branches[-1].end.alpha == 2.0

    def test_scalar_problem_blows_up(self, scalar_problem):
        left, right = trace_branches(scalar_problem, -1.0, 1.0, 200)
        assert left.end == (BranchEndKind.BLOWUP, 0.0, -np.inf)
        assert right.start == (BranchEndKind.BLOWUP, 0.0, np.inf)
        assert left.blows_up and right.blows_up
        assert_allclose(left.betas, 1 / left.alphas, rtol=1e-10)

    def test_example5_has_no_blowup_at_common_eigenvalue(self, example5):
        branches = trace_branches(example5, 0.0, 4.0, 400)
        ends = [end for branch in branches for end in (branch.start, branch.end)]
        assert not any(end.kind is BranchEndKind.BLOWUP and abs(end.alpha - 2) < 1e-6 for end in ends)
        assert any(end.kind is BranchEndKind.BLOWUP and abs(end.alpha - 1) < 1e-12 for end in ends)
        assert all_even(branches)

    @mark.parametrize("kappa", OVERLAY_KAPPAS)
    def test_example1_blowups_exceed_the_threshold(self, kappa):
        problem = create_example(1, kappa=kappa)
        branches = trace_branches(problem, -3.0, 3.0, 2000)
        poles = np.linalg.eigvalsh(problem.A)
        b_max = DEFAULT_SETTINGS.blowup_factor * (1 + np.ptp(poles))

        # Four poles of R_A, four root ordinals per interval
        assert len(branches) == 5 * 4
        assert all_even(branches)

        for index, pole in enumerate(poles):
            left = [branch for branch in branches if branch.interval == index]
            right = [branch for branch in branches if branch.interval == index + 1]

            blowups = [branch for branch in left if branch.end.kind is BranchEndKind.BLOWUP]
            assert len(blowups) == 1
            assert abs(blowups[0].end.alpha - pole) < 1e-12
            assert abs(blowups[0].alphas[-1] - pole) < 1e-8
            assert blowups[0].betas[-1] < -b_max
            bounded = [branch for branch in left if branch is not blowups[0]]
            assert all(abs(branch.betas[-1]) < b_max for branch in bounded)

            blowups = [branch for branch in right if branch.start.kind is BranchEndKind.BLOWUP]
            assert len(blowups) == 1
            assert abs(blowups[0].start.alpha - pole) < 1e-12
            assert abs(blowups[0].alphas[0] - pole) < 1e-8
            assert blowups[0].betas[0] > b_max
            bounded = [branch for branch in right if branch is not blowups[0]]
            assert all(abs(branch.betas[0]) < b_max for branch in bounded)

    def test_ends_below_the_threshold_stay_open(self, example2, caplog):
        settings = DEFAULT_SETTINGS.replace(blowup_factor=1e15)
        branches = trace_branches(example2, -2.0, 2.0, 400, settings=settings)

        ends = [end for branch in branches for end in (branch.start, branch.end)]
        assert not any(end.kind is BranchEndKind.BLOWUP for end in ends)
        assert sum(end.kind is BranchEndKind.OPEN for end in ends) == 4 + 4
        assert "without reaching the blow-up threshold" in caplog.text

    @mark.parametrize("number", [1, 2, 3, 4, 5])
    @mark.parametrize("kappa", OVERLAY_KAPPAS)
    def test_examples_are_even(self, number, kappa):
        spectrum = assemble_spectrum(create_example(number, kappa=kappa), samples=2000)
        assert spectrum.branches
        assert all_even(spectrum.branches)
        assert all(np.all(branch.slopes < 0) for branch in spectrum.branches)

    def test_random_problems_are_even(self, make_random_problem):
        for n in (2, 3, 5):
            problem = make_random_problem(n, 0.7)
            spectrum = assemble_spectrum(problem, samples=300)
            assert all_even(spectrum.branches)

    def test_points(self, scalar_problem):
        (branch, _) = trace_branches(scalar_problem, -1.0, 1.0, 50)
        point = branch.points[0]
        assert point.alpha == -1.0
        assert_allclose(point.beta, -1.0)
        assert_allclose(point.dbeta_dalpha, -1.0)
        assert point.rectangle == (1, 1)


class TestAssembledSpectrum:
    def test_example2(self, example2):
        spectrum = assemble_spectrum(example2, samples=400)
        assert spectrum.window == (-2.0, 2.0)
        assert spectrum.vertical_lines == spectrum.horizontal_lines == ()
        assert_allclose(
            spectrum.corner_points,
            [(-1.0, 1.4), (-0.6, 1.0), (-0.6, 3.0), (1.0, 1.4)],
            atol=1e-12,
        )
        assert len(spectrum.points) == sum(len(branch) for branch in spectrum.branches)
        assert spectrum.warnings == ()

    def test_straight_lines(self, example3, example4):
        spectrum = assemble_spectrum(example3, samples=200)
        assert_allclose(spectrum.vertical_lines, [-1.0])
        assert_allclose(spectrum.horizontal_lines, [3.0])

        spectrum = assemble_spectrum(example4, samples=200)
        assert_allclose(spectrum.vertical_lines, [1.0, 3.0])
        assert_allclose(
            spectrum.horizontal_lines, [-(3 + sqrt(5)) / 2, -(3 - sqrt(5)) / 2], atol=1e-10
        )

    def test_contains(self, example2, example3):
        spectrum = assemble_spectrum(example3, samples=200)
        assert spectrum.contains(-1.0, 17.3)
        assert spectrum.contains(42.0, 3.0)
        assert spectrum.contains(0.0, 1 + 1 / 4)
        assert not spectrum.contains(0.0, 2.0)

        spectrum = assemble_spectrum(example2, samples=200)
        assert not spectrum.contains(0.0, 0.0)
        assert spectrum.contains(-0.6, 3.0)
        assert spectrum.contains(-1.0, 2.0) is False
        branch = spectrum.branches[2]
        index = int(np.argmin(np.abs(branch.alphas)))
        assert spectrum.contains(float(branch.alphas[index]), float(branch.betas[index]))

    def test_zero_kappa(self, example2):
        with raises(DegenerateCouplingError):
            assemble_spectrum(example2.with_kappa(0.0))

    def test_swap_roles_mirrors_the_spectrum(self, example2):
        spectrum = assemble_spectrum(example2, samples=200)
        mirrored = assemble_spectrum(swap_roles(example2), samples=200)

        assert_allclose(mirrored.mesh.xs, spectrum.mesh.ys)
        assert_allclose(mirrored.mesh.ys, spectrum.mesh.xs)
        assert_allclose(
            sorted(mirrored.corner_points), sorted((y, x) for x, y in spectrum.corner_points)
        )
        for alpha in (-1.7, -0.3, 0.4, 1.6):
            for beta in beta_roots(example2, None, alpha):
                assert mirrored.contains(float(beta), alpha)


class TestLimitSweep:
    def test_small_kappa(self, example2):
        report = limit_sweep(example2, [1e-1, 1e-2, 1e-3])
        assert report.small_kappa_converges
        assert report.d_small[2] < 1e-4
        assert report.window == (-2.0, 2.0, 0.0, 4.0)

    def test_large_kappa(self, example2):
        report = limit_sweep(example2, [10.0, 100.0, 1000.0])
        assert report.large_kappa_converges
        assert report.d_large[2] < 1e-4

    def test_scalar_problem(self, scalar_problem):
        kappas = np.array([1e-3, 1e-2])
        report = limit_sweep(scalar_problem, kappas)
        assert_allclose(report.d_small, 20 * kappas**2, rtol=0.05)
        assert np.all(np.isinf(report.d_large))

    def test_straight_lines_are_rejected(self, example3):
        with raises(PreconditionError):
            limit_sweep(example3, [1.0])

    def test_kappa_must_be_positive(self, example2):
        with raises(InvalidInputError):
            limit_sweep(example2, [1.0, 0.0])
        with raises(InvalidInputError):
            limit_sweep(example2, [])
