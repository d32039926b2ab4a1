from math import cos, pi, sqrt

import numpy as np

from numpy.testing import assert_allclose
from pytest import mark, raises

from pair_spectrum.catalog import a1_matrix, create_example
from pair_spectrum.config import DEFAULT_SETTINGS
from pair_spectrum.errors import InvalidInputError, NumericalFailureError
from pair_spectrum.linalg import (
    ComplexPolynomial,
    as_symmetric_matrix,
    as_unit_vector,
    char_poly,
    complement_basis,
    complex_det,
    expand_roots,
    jacobi_eig,
    poly_roots,
)


class TestValidation:
    def test_symmetric_matrix_is_read_only_copy(self):
        source = np.array([[1.0, 2.0], [2.0, 3.0]])
        matrix = as_symmetric_matrix(source)
        assert not matrix.flags.writeable
        source[0, 0] = 5
        assert matrix[0, 0] == 1.0

    def test_asymmetric_matrix_is_rejected(self):
        with raises(InvalidInputError, match="not symmetric"):
            as_symmetric_matrix([[1.0, 2.0], [2.5, 3.0]])

    def test_non_square_matrix_is_rejected(self):
        with raises(InvalidInputError):
            as_symmetric_matrix(np.zeros((2, 3)))
        with raises(InvalidInputError):
            as_symmetric_matrix(np.zeros((0, 0)))

    def test_non_finite_matrix_is_rejected(self):
        with raises(InvalidInputError):
            as_symmetric_matrix([[np.nan]])

    def test_unit_vector(self):
        assert_allclose(as_unit_vector([3.0, 4.0]), [0.6, 0.8], atol=1e-15)
        unit = np.array([0.6, 0.8])
        assert np.array_equal(as_unit_vector(unit), unit)

    def test_zero_vector_is_rejected(self):
        with raises(InvalidInputError):
            as_unit_vector([0.0, 0.0])


class TestJacobi:
    def test_tridiagonal_eigenvalues(self):
        eig = jacobi_eig(a1_matrix(4))
        expected = sorted(2 * cos(pi * j / 5) for j in range(1, 5))
        assert_allclose(eig.eigenvalues, expected, atol=1e-10)

    def test_decomposition_of_random_matrices(self, make_random_symmetric):
        for n in (1, 2, 5, 8):
            matrix = make_random_symmetric(n)
            eig = jacobi_eig(matrix)
            vectors = eig.eigenvectors

            assert np.all(np.diff(eig.eigenvalues) >= 0)
            assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-12)
            assert_allclose(matrix @ vectors, vectors * eig.eigenvalues, atol=1e-11)
            assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(matrix), atol=1e-11)

    def test_decomposition_of_many_random_matrices(self, make_random_symmetric):
        for index in range(300):
            n = 2 + index % 7
            matrix = make_random_symmetric(n)
            eig = jacobi_eig(matrix)
            vectors = eig.eigenvectors

            assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(matrix), atol=1e-11)
            assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-12)
            assert_allclose(vectors @ np.diag(eig.eigenvalues) @ vectors.T, matrix, atol=1e-11)

    @mark.parametrize("kappa", [0.4, 1.0, 2.0])
    def test_rank_one_update_of_example1(self, kappa):
        problem = create_example(1, kappa=kappa)
        z = problem.z
        resolvent = z @ np.linalg.solve(problem.A - np.eye(problem.n), z)
        matrix = problem.B - kappa**2 * resolvent * np.outer(z, z)

        eig = jacobi_eig(matrix)
        assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(matrix), atol=1e-11)
        assert_allclose(
            matrix @ eig.eigenvectors, eig.eigenvectors * eig.eigenvalues, atol=1e-11
        )

    def test_diagonal_matrix_is_sorted(self):
        eig = jacobi_eig(np.diag([3.0, -1.0, 2.0]))
        assert_allclose(eig.eigenvalues, [-1.0, 2.0, 3.0])
        assert_allclose(np.abs(eig.eigenvectors), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])

    def test_multiple_eigenvalues(self):
        eig = jacobi_eig(np.ones((3, 3)))
        assert_allclose(eig.eigenvalues, [0.0, 0.0, 3.0], atol=1e-12)

    def test_failure_to_converge(self):
        settings = DEFAULT_SETTINGS.replace(jacobi_max_sweeps=0)
        with raises(NumericalFailureError) as info:
            jacobi_eig(a1_matrix(3), settings=settings)
        assert info.value.residual > 0


class TestComplementBasis:
    def test_orthonormal_complement(self, rng):
        for n in (2, 3, 6):
            z = as_unit_vector(rng.normal(size=n))
            basis = complement_basis(z)
            assert basis.shape == (n, n - 1)
            assert_allclose(basis.T @ basis, np.eye(n - 1), atol=1e-14)
            assert_allclose(z @ basis, np.zeros(n - 1), atol=1e-14)

    def test_complement_of_coordinate_vector(self):
        basis = complement_basis([0.0, 0.0, 1.0])
        assert_allclose(np.abs(basis[2]), [0.0, 0.0], atol=1e-15)

    def test_negative_leading_component(self):
        z = as_unit_vector([-1.0, 1e-3])
        basis = complement_basis(z)
        assert_allclose(z @ basis, [0.0], atol=1e-15)
        assert_allclose(np.linalg.norm(basis), 1.0)


class TestCharacteristicPolynomial:
    def test_two_by_two(self):
        poly = char_poly([[-2.0, 1.0], [1.0, -1.0]])
        assert_allclose(poly.coefficients, [1.0, 3.0, 1.0], atol=1e-14)

        roots = expand_roots(poly_roots(poly))
        assert_allclose(roots.real, [-(3 + sqrt(5)) / 2, -(3 - sqrt(5)) / 2], atol=1e-12)
        assert_allclose(roots.imag, [0.0, 0.0], atol=1e-12)

    def test_roots_match_eigenvalues(self):
        matrix = a1_matrix(6)
        roots = expand_roots(poly_roots(char_poly(matrix)))
        assert_allclose(roots.real, np.linalg.eigvalsh(matrix), atol=1e-9)
        assert_allclose(roots.imag, np.zeros(6), atol=1e-9)

    def test_random_matrices_match_numpy(self, rng):
        for index in range(100):
            n = 2 + index % 7
            matrix = rng.normal(size=(n, n))
            if index % 2:
                matrix = matrix + matrix.T
            poly = char_poly(matrix)
            assert_allclose(poly.coefficients[::-1], np.poly(matrix), rtol=1e-9, atol=1e-9)

    def test_non_symmetric_matrix(self):
        roots = expand_roots(poly_roots(char_poly([[0.0, 1.0], [-1.0, 0.0]])))
        assert_allclose(sorted(roots, key=lambda root: root.imag), [-1j, 1j], atol=1e-12)

    def test_dimension_cap(self):
        settings = DEFAULT_SETTINGS.replace(max_dimension=2)
        with raises(InvalidInputError, match="exceeds"):
            char_poly(np.eye(3), settings=settings)


class TestComplexPolynomial:
    def test_trailing_coefficients_are_trimmed(self):
        poly = ComplexPolynomial([1.0, 2.0, 0.0, 1e-20])
        assert poly.degree == 1
        assert poly.leading == 2.0

    def test_from_roots(self):
        poly = ComplexPolynomial.from_roots([1.0, 2.0])
        assert_allclose(poly.coefficients, [2.0, -3.0, 1.0])
        assert poly(1.0) == 0
        assert ComplexPolynomial.from_roots([]).degree == 0

    def test_arithmetic(self):
        p = ComplexPolynomial([1.0, 1.0])
        q = ComplexPolynomial([-1.0, 1.0])
        assert_allclose((p * q).coefficients, [-1.0, 0.0, 1.0])
        assert_allclose((p - q).coefficients, [2.0])
        assert_allclose(ComplexPolynomial([2.0, 4.0]).monic().coefficients, [0.5, 1.0])


class TestPolyRoots:
    def test_simple_roots(self):
        clusters = poly_roots(ComplexPolynomial.from_roots([3.0, -1.0, 2j, -2j]))
        values = sorted((cluster.value for cluster in clusters), key=lambda v: (round(v.real, 6), v.imag))
        assert_allclose(values, [-1.0, -2j, 2j, 3.0], atol=1e-10)
        assert all(cluster.multiplicity == 1 for cluster in clusters)

    def test_multiple_roots_are_clustered(self):
        clusters = poly_roots(ComplexPolynomial.from_roots([1.0, 1.0, -2.0]))
        assert [cluster.multiplicity for cluster in clusters] == [1, 2]
        assert_allclose([cluster.value for cluster in clusters], [-2.0, 1.0], atol=1e-6)

    def test_multiplicities_add_up_to_degree(self, rng):
        for degree in (1, 4, 9):
            roots = rng.normal(size=degree) + 1j * rng.normal(size=degree)
            clusters = poly_roots(ComplexPolynomial.from_roots(roots))
            assert sum(cluster.multiplicity for cluster in clusters) == degree

    def test_random_polynomials_match_numpy(self, rng):
        for index in range(100):
            degree = 2 + index % 7
            coefficients = rng.normal(size=degree + 1)
            ours = expand_roots(poly_roots(ComplexPolynomial(coefficients)))
            expected = np.roots(coefficients[::-1])

            assert len(ours) == degree
            distances = np.abs(expected[:, None] - ours[None, :]) / (1 + np.abs(expected[:, None]))
            assert np.max(np.min(distances, axis=1)) < 1e-6
            assert np.max(np.min(distances, axis=0)) < 1e-6

    def test_zero_roots(self):
        clusters = poly_roots(ComplexPolynomial([0.0, 0.0, 0.0, 2.0]))
        assert clusters == ((0j, 3),)

    def test_scaling(self):
        roots = [1e4, -3e3, 0.5]
        values = expand_roots(poly_roots(ComplexPolynomial.from_roots(roots)))
        assert_allclose(values.real, sorted(roots), rtol=1e-8, atol=1e-6)

    def test_constant_polynomial(self):
        with raises(InvalidInputError):
            poly_roots(ComplexPolynomial([5.0]))

    def test_failure_to_converge(self):
        settings = DEFAULT_SETTINGS.replace(root_max_iterations=1)
        with raises(NumericalFailureError) as info:
            poly_roots(ComplexPolynomial.from_roots([1.0, 2.0, 3.0, 4.0]), settings=settings)
        assert len(info.value.best_iterate) == 4


class TestComplexDeterminant:
    def test_real_matrix(self):
        assert abs(complex_det([[1.0, 2.0], [3.0, 4.0]]) + 2) < 1e-14

    def test_singular_matrix(self):
        assert complex_det([[1.0, 2.0], [2.0, 4.0]]) == 0

    def test_complex_matrix(self, rng):
        matrix = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        assert abs(complex_det(matrix) - np.linalg.det(matrix)) < 1e-10 * abs(
            np.linalg.det(matrix)
        )

    def test_empty_matrix(self):
        with raises(InvalidInputError):
            complex_det(np.zeros((0, 0)))
