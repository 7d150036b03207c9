import numpy as np
import pytest

from src.core.exceptions import DimensionMismatchError, InsufficientDataError, InvalidInputError
from src.models.schemas import HankelPair, OutputSequence
from src.services.embedding import center, hankel_embed, stacked_window, unembed


class TestHankelEmbed:
    def test_scalar_sequence(self):
        h = hankel_embed(OutputSequence.from_array([1.0, 2.0, 3.0, 4.0, 5.0]), 2)
        np.testing.assert_array_equal(h.y_full, [[1, 2, 3, 4], [2, 3, 4, 5]])
        np.testing.assert_array_equal(h.y_past, [[1, 2, 3], [2, 3, 4]])
        np.testing.assert_array_equal(h.y_future, [[2, 3, 4], [3, 4, 5]])
        assert (h.m, h.s, h.ell) == (1, 2, 3)

    def test_vector_outputs_stack_blockwise(self):
        seq = OutputSequence.from_array([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]])
        h = hankel_embed(seq, 2)
        np.testing.assert_array_equal(h.y_full, [[1, 2], [10, 20], [2, 3], [20, 30]])
        assert h.rows == 4 and h.ell == 1

    def test_constant_anti_diagonals(self):
        seq = OutputSequence.from_array(np.random.default_rng(0).standard_normal((12, 3)))
        h = hankel_embed(seq, 4)
        for i in range(1, 4):
            np.testing.assert_array_equal(h.y_full[3 * i:3 * (i + 1), :-1], h.y_full[3 * (i - 1):3 * i, 1:])

    def test_columns_are_stacked_windows(self):
        seq = OutputSequence.from_array(np.random.default_rng(1).standard_normal((10, 2)))
        h = hankel_embed(seq, 3)
        for k in range(h.ell + 1):
            np.testing.assert_array_equal(h.y_full[:, k], stacked_window(seq, k, 3))

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientDataError) as excinfo:
            hankel_embed(OutputSequence.from_array([1.0, 2.0]), 2)
        assert excinfo.value.required == 3
        assert excinfo.value.available == 2
        assert excinfo.value.code == "insufficient_data"

    def test_delay_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            hankel_embed(OutputSequence.from_array([1.0, 2.0, 3.0]), 0)

    def test_unembed_recovers_samples(self):
        samples = np.random.default_rng(2).standard_normal((9, 2))
        np.testing.assert_array_equal(unembed(hankel_embed(OutputSequence(samples=samples), 4)), samples)


class TestSequences:
    def test_center_removes_mean(self):
        seq = OutputSequence.from_array([[1.0, 5.0], [3.0, 7.0]])
        centered, mean = center(seq)
        np.testing.assert_array_equal(mean, [2.0, 6.0])
        np.testing.assert_array_equal(centered.samples, [[-1.0, -1.0], [1.0, 1.0]])

    def test_non_finite_samples_rejected(self):
        with pytest.raises(InvalidInputError):
            OutputSequence.from_array([1.0, np.inf])

    def test_frame_shape_must_match(self):
        with pytest.raises(DimensionMismatchError):
            OutputSequence.from_array(np.ones((3, 6)), frame_shape=(2, 2))

    def test_window_out_of_range(self):
        with pytest.raises(InvalidInputError):
            stacked_window(OutputSequence.from_array([1.0, 2.0, 3.0]), 2, 2)

    def test_from_blocks_requires_equal_shapes(self):
        with pytest.raises(DimensionMismatchError):
            HankelPair.from_blocks(np.ones((2, 3)), np.ones((2, 4)))
