"""Validators, dense linear algebra helpers, and splittable randomness."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnlab.numkernel import (
    DegenerateMatrixError,
    RandomSource,
    as_matrix,
    as_vector,
    frozen_array,
    gaussian_matrix,
    gaussian_sample,
    orthonormal_complement,
    singular_values,
    solve_spd,
    spd_power,
    svd,
)


class TestValidators:
    def test_as_vector_passes_through(self):
        v = as_vector([1.0, 2.0, 3.0])
        assert v.dtype == np.float64
        assert v.shape == (3,)

    def test_as_vector_rejects_matrix(self):
        with pytest.raises(ValueError, match="expected a vector"):
            as_vector(np.eye(2))

    def test_as_vector_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            as_vector([1.0, np.nan])

    def test_as_vector_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            as_vector([1.0, 2.0], dim=3)

    def test_as_matrix_shape_checks(self):
        m = as_matrix([[1.0, 2.0]], rows=1, cols=2)
        assert m.shape == (1, 2)
        with pytest.raises(ValueError, match="row mismatch"):
            as_matrix([[1.0, 2.0]], rows=2)
        with pytest.raises(ValueError, match="column mismatch"):
            as_matrix([[1.0, 2.0]], cols=3)
        with pytest.raises(ValueError, match="expected a matrix"):
            as_matrix([1.0, 2.0])

    def test_frozen_array_is_read_only(self):
        a = frozen_array([1.0, 2.0])
        with pytest.raises(ValueError):
            a[0] = 5.0


class TestLinearAlgebra:
    def test_svd_reconstructs(self):
        m = RandomSource(7).generator().standard_normal((4, 3))
        s, u, vt = svd(m)
        assert np.all(np.diff(s) <= 0)
        assert np.allclose(u @ np.diag(s) @ vt, m, atol=1e-10 * s[0])

    def test_svd_rejects_oversized(self):
        with pytest.raises(ValueError, match="per-side cap"):
            svd(np.zeros((40, 2)))

    def test_singular_values_of_diagonal(self):
        assert np.allclose(singular_values(np.diag([3.0, 2.0, 1.0])), [3.0, 2.0, 1.0])

    def test_solve_spd_matches_dense_solve(self):
        gen = RandomSource(11).generator()
        g = gen.standard_normal((4, 4))
        a = g @ g.T + 4 * np.eye(4)
        b = gen.standard_normal(4)
        assert np.allclose(solve_spd(a, b), np.linalg.solve(a, b), atol=1e-10)

    def test_solve_spd_rejects_indefinite(self):
        with pytest.raises(DegenerateMatrixError):
            solve_spd(np.diag([1.0, -1.0]), [1.0, 1.0])

    def test_solve_spd_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            solve_spd(np.array([[1.0, 0.5], [0.0, 1.0]]), [1.0, 1.0])

    def test_spd_power_square_root(self):
        gen = RandomSource(13).generator()
        g = gen.standard_normal((3, 3))
        a = g @ g.T + np.eye(3)
        half = spd_power(a, 0.5)
        assert np.allclose(half @ half, a, atol=1e-10)
        assert np.allclose(spd_power(a, -1.0) @ a, np.eye(3), atol=1e-10)

    def test_spd_power_rejects_semidefinite(self):
        with pytest.raises(DegenerateMatrixError):
            spd_power(np.diag([1.0, 0.0]), 0.5)

    def test_orthonormal_complement_of_difference(self):
        comp = orthonormal_complement([[1.0, -1.0]])
        assert comp.shape == (1, 2)
        assert np.allclose(np.abs(comp[0]), [np.sqrt(0.5)] * 2)

    def test_orthonormal_complement_is_orthonormal_and_orthogonal(self):
        kernel = RandomSource(17).generator().standard_normal((2, 5))
        comp = orthonormal_complement(kernel)
        assert comp.shape == (3, 5)
        assert np.allclose(comp @ comp.T, np.eye(3), atol=1e-10)
        assert np.abs(kernel @ comp.T).max() < 1e-10

    def test_orthonormal_complement_empty_kernel(self):
        assert np.array_equal(orthonormal_complement([], dim=3), np.eye(3))

    def test_orthonormal_complement_rejects_dependent_rows(self):
        with pytest.raises(DegenerateMatrixError):
            orthonormal_complement([[1.0, 0.0], [2.0, 0.0]])


class TestRandomSource:
    def test_same_seed_same_stream(self):
        a = RandomSource(5).generator().standard_normal(8)
        b = RandomSource(5).generator().standard_normal(8)
        assert np.array_equal(a, b)

    def test_generator_does_not_mutate_source(self):
        src = RandomSource(5)
        first = src.generator().standard_normal(4)
        second = src.generator().standard_normal(4)
        assert np.array_equal(first, second)

    def test_split_path_equivalence(self):
        via_split = RandomSource(3).split(1).split(2).generator().standard_normal(4)
        direct = RandomSource(3, (1, 2)).generator().standard_normal(4)
        assert np.array_equal(via_split, direct)

    def test_distinct_splits_distinct_streams(self):
        a = RandomSource(3).split(0).generator().standard_normal(4)
        b = RandomSource(3).split(1).generator().standard_normal(4)
        assert not np.array_equal(a, b)

    def test_seed_validation(self):
        with pytest.raises(ValueError):
            RandomSource(-1)
        with pytest.raises(ValueError):
            RandomSource(2**64)
        with pytest.raises(ValueError):
            RandomSource(1, algorithm="mt19937")

    def test_gaussian_helpers_deterministic(self):
        src = RandomSource(9, (4,))
        assert np.array_equal(gaussian_sample(src, 6), gaussian_sample(src, 6))
        assert gaussian_matrix(src, 2, 3).shape == (2, 3)
        with pytest.raises(ValueError):
            gaussian_sample(src, 0)
        with pytest.raises(ValueError):
            gaussian_matrix(src, 0, 3)

    @given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=50))
    @settings(max_examples=25, deadline=None)
    def test_split_reproducibility_property(self, seed, idx):
        x = RandomSource(seed).split(idx).generator().standard_normal(3)
        y = RandomSource(seed).split(idx).generator().standard_normal(3)
        assert np.array_equal(x, y)
