"""PCA fixtures, spectral properties, and projection oracles."""

from __future__ import annotations

import numpy as np
import pytest

from embgeom import errors
from embgeom.pca import fit_language_group, mean_center, project, top_components

from conftest import make_parallel_set
from oracles import captured_variance, random_orthonormal


class TestMeanCenter:
    def test_two_rows(self):
        centered, mean = mean_center([[1.0, 1.0], [3.0, 3.0]])
        assert np.array_equal(centered, [[-1.0, -1.0], [1.0, 1.0]])
        assert np.array_equal(mean, [2.0, 2.0])

    def test_single_row_becomes_zero(self):
        centered, mean = mean_center([[4.0, -7.0, 2.5]])
        assert np.array_equal(centered, [[0.0, 0.0, 0.0]])
        assert np.array_equal(mean, [4.0, -7.0, 2.5])

    def test_column_means_vanish(self):
        rng = np.random.default_rng(0)
        centered, _ = mean_center(rng.uniform(-5, 5, size=(40, 7)))
        assert np.max(np.abs(centered.mean(axis=0))) < 1e-10

    def test_idempotent_on_centered_data(self):
        rng = np.random.default_rng(1)
        centered, _ = mean_center(rng.standard_normal((30, 5)))
        again, mean = mean_center(centered)
        assert np.max(np.abs(again - centered)) < 1e-12
        assert np.max(np.abs(mean)) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(errors.PcaError):
            mean_center(np.empty((0, 3)))


class TestTopComponents:
    def test_rank_one_line(self):
        ts = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        data = ts[:, None] * np.array([3.0, 4.0])
        centered, _ = mean_center(data)
        result = top_components(centered, 1)
        assert np.max(np.abs(result.components[0] - [0.6, 0.8])) < 1e-8
        assert result.explained_ratio[0] == pytest.approx(1.0, abs=1e-8)

    def test_isotropic_square(self):
        data = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        centered, _ = mean_center(data)
        result = top_components(centered, 2)
        # covariance is (2/3) I: equal eigenvalues, orthonormal components
        assert result.eigenvalues[0] == result.eigenvalues[1]
        assert result.eigenvalues[0] == pytest.approx(2.0 / 3.0, rel=1e-12)
        gram = result.components @ result.components.T
        assert np.max(np.abs(gram - np.eye(2))) < 1e-8

    def test_full_rank_ratios_sum_to_one(self):
        rng = np.random.default_rng(3)
        centered, _ = mean_center(rng.standard_normal((50, 6)))
        result = top_components(centered, 6)
        assert result.explained_ratio.sum() == pytest.approx(1.0, abs=1e-8)

    def test_orthonormal_components(self):
        rng = np.random.default_rng(4)
        centered, _ = mean_center(rng.standard_normal((100, 12)))
        result = top_components(centered, 5)
        gram = result.components @ result.components.T
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8

    def test_eigenvalues_descending_nonnegative(self):
        rng = np.random.default_rng(5)
        centered, _ = mean_center(rng.standard_normal((60, 9)))
        result = top_components(centered, 9 - 1)
        assert np.all(np.diff(result.eigenvalues) <= 0)
        assert np.all(result.eigenvalues >= 0)

    def test_coordinate_variance_equals_eigenvalues(self):
        rng = np.random.default_rng(6)
        centered, _ = mean_center(rng.standard_normal((80, 10)))
        result = top_components(centered, 4)
        coords = project(centered, result.components)
        for j in range(4):
            assert coords[:, j].var(ddof=1) == pytest.approx(
                result.eigenvalues[j], rel=1e-6
            )

    def test_sign_convention_peak_positive(self):
        rng = np.random.default_rng(7)
        centered, _ = mean_center(rng.standard_normal((40, 8)))
        result = top_components(centered, 8 - 1)
        for row in result.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_k_out_of_range(self):
        rng = np.random.default_rng(8)
        centered, _ = mean_center(rng.standard_normal((10, 4)))
        for bad_k in (0, 5, -1):
            with pytest.raises(errors.ComponentCountError):
                top_components(centered, bad_k)
        # N-1 caps k even when d is larger
        centered, _ = mean_center(rng.standard_normal((3, 10)))
        with pytest.raises(errors.ComponentCountError):
            top_components(centered, 3)

    def test_needs_two_rows(self):
        with pytest.raises(errors.PcaError):
            top_components(np.zeros((1, 3)), 1)

    def test_degenerate_identical_rows(self):
        data = np.tile([2.0, -1.0, 0.5], (6, 1))
        centered, _ = mean_center(data)
        result = top_components(centered, 2)
        assert np.array_equal(result.components, np.eye(3)[:2])
        assert np.array_equal(result.eigenvalues, np.zeros(2))
        assert np.array_equal(result.explained_ratio, np.zeros(2))

    def test_deterministic_bitwise(self):
        rng = np.random.default_rng(9)
        centered, _ = mean_center(rng.standard_normal((70, 6)))
        a = top_components(centered, 3)
        b = top_components(centered, 3)
        assert a.components.tobytes() == b.components.tobytes()
        assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()

    @pytest.mark.parametrize("seed", range(3))
    def test_beats_random_subspaces(self, seed):
        # Monte-Carlo optimality: no random orthonormal k-subspace captures
        # more sample variance than the top-k components
        rng = np.random.default_rng(seed)
        n = int(rng.integers(8, 30))
        d = int(rng.integers(3, 6))
        k = int(rng.integers(1, d))
        centered, _ = mean_center(rng.standard_normal((n, d)))
        result = top_components(centered, k)
        top_var = captured_variance(centered, result.components)
        for _ in range(1000):
            basis = random_orthonormal(rng, d, k)
            assert top_var >= captured_variance(centered, basis) - 1e-10

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(10)
        centered, _ = mean_center(rng.standard_normal((50, 7)))
        result = top_components(centered, 3)
        rot = random_orthonormal(rng, 7, 7)
        rotated, _ = mean_center(centered @ rot.T)
        result_rot = top_components(rotated, 3)
        assert np.max(np.abs(result.eigenvalues - result_rot.eigenvalues)) < 1e-8
        # components follow the rotation up to the sign convention
        for before, after in zip(result.components, result_rot.components):
            assert abs(np.dot(after, rot @ before)) == pytest.approx(1.0, abs=1e-8)


class TestProject:
    def test_component_projects_to_own_axis(self):
        rng = np.random.default_rng(11)
        centered, _ = mean_center(rng.standard_normal((30, 5)))
        result = top_components(centered, 3)
        coords = project(result.components, result.components)
        assert np.max(np.abs(coords - np.eye(3))) < 1e-8

    def test_zero_vector_projects_to_origin(self):
        rng = np.random.default_rng(12)
        centered, _ = mean_center(rng.standard_normal((10, 4)))
        result = top_components(centered, 2)
        assert np.array_equal(project(np.zeros((1, 4)), result.components), [[0.0, 0.0]])

    def test_full_rank_reconstruction(self):
        rng = np.random.default_rng(13)
        data = rng.standard_normal((50, 8))
        centered, mean = mean_center(data)
        result = top_components(centered, 8)
        coords = project(centered, result.components)
        rebuilt = coords @ result.components + mean
        assert np.max(np.abs(rebuilt - data)) < 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatchError):
            project(np.zeros((3, 4)), np.zeros((2, 5)))


class TestFitLanguageGroup:
    def test_group_shapes_and_labels(self):
        set_, _ = make_parallel_set(seed=14, languages=4, sentences=20, dim=6)
        result = fit_language_group(set_, ["l2", "l0"], k=3)
        assert result.coordinates.shape == (40, 3)
        assert result.row_labels[:20] == tuple(["l2"] * 20)
        assert result.row_labels[20:] == tuple(["l0"] * 20)

    def test_single_language_variance_matches_top_eigenvalue(self):
        set_, _ = make_parallel_set(seed=15, languages=2, sentences=30, dim=5)
        result = fit_language_group(set_, ["l1"], k=1)
        assert result.coordinates.shape == (30, 1)
        assert result.coordinates[:, 0].var(ddof=1) == pytest.approx(
            result.eigenvalues[0], rel=1e-6
        )

    def test_unknown_code(self):
        set_, _ = make_parallel_set(seed=16, languages=2)
        with pytest.raises(errors.UnknownLanguageError):
            fit_language_group(set_, ["l0", "nope"], k=2)
