import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from src.core.exceptions import DefectiveMatrixError, DimensionMismatchError, IllConditionedError, InvalidInputError
from src.models.schemas import ModeSet, StateSpaceModel
from src.services.datagen import simulate
from src.services.embedding import hankel_embed, stacked_window
from src.services.lowrank import solve_rank_constrained
from src.services.sysid import (
    estimate_states,
    extract_system,
    identify,
    modes,
    observability_index,
    observability_matrix,
    one_step_objective,
    predict,
)
from tests.factories import ObservableSystemFactory, TrajectoryFactory


def spectrum_error(estimated, expected) -> float:
    distance = np.abs(np.subtract.outer(np.asarray(estimated), np.asarray(expected)))
    rows, cols = linear_sum_assignment(distance)
    return float(distance[rows, cols].max())


@pytest.fixture
def doubling_fit(doubling_sequence):
    lowrank = solve_rank_constrained(hankel_embed(doubling_sequence, 1), 1)
    return extract_system(lowrank), lowrank


class TestExtraction:
    def test_scalar_doubling(self, doubling_fit):
        model, _ = doubling_fit
        np.testing.assert_allclose(model.a, [[2.0]], rtol=1e-12)
        np.testing.assert_allclose(model.c, [[1.0]])
        assert model.provenance.method == "siddmd-factor"

    def test_shift_method_agrees_on_noiseless_data(self):
        system = ObservableSystemFactory(n=3, m=2, seed=1)
        seq = TrajectoryFactory(system=system, seed=1)
        lowrank = solve_rank_constrained(hankel_embed(seq, 4), 3)
        factor = np.linalg.eigvals(extract_system(lowrank, "factor").a)
        shift = np.linalg.eigvals(extract_system(lowrank, "shift").a)
        assert spectrum_error(shift, factor) <= 1e-8

    def test_shift_method_needs_two_blocks(self, doubling_fit):
        _, lowrank = doubling_fit
        with pytest.raises(InvalidInputError):
            extract_system(lowrank, "shift")

    def test_one_step_objective_vanishes_on_exact_data(self):
        seq = TrajectoryFactory(system=ObservableSystemFactory(n=2, m=1, seed=2), seed=2)
        h = hankel_embed(seq, 3)
        lowrank = solve_rank_constrained(h, 2)
        model = extract_system(lowrank)
        assert one_step_objective(model, lowrank, h) <= 1e-8 * np.linalg.norm(h.y_future)
        assert estimate_states(lowrank, h).shape == (2, h.ell + 1)

    def test_extracted_matrices_minimize_one_step_objective(self):
        seq = TrajectoryFactory(system=ObservableSystemFactory(n=3, m=2, seed=6), seed=6, noise_std=0.05)
        h = hankel_embed(seq, 3)
        lowrank = solve_rank_constrained(h, 2)
        model = extract_system(lowrank)
        best = one_step_objective(model, lowrank, h)
        rng = np.random.default_rng(0)
        for _ in range(5):
            perturbed = model.model_copy(update={
                "a": model.a + 1e-3 * rng.standard_normal(model.a.shape),
                "c": model.c + 1e-3 * rng.standard_normal(model.c.shape),
            })
            assert one_step_objective(perturbed, lowrank, h) >= best


class TestObservability:
    def test_observability_matrix_stacks_powers(self):
        model = StateSpaceModel(a=np.diag([1.0, 2.0]), c=[[1.0, 1.0]], s=1, m=1)
        np.testing.assert_array_equal(observability_matrix(model, 3), [[1, 1], [1, 2], [1, 4]])

    def test_observability_index(self):
        observable = StateSpaceModel(a=np.diag([1.0, 2.0]), c=[[1.0, 1.0]], s=1, m=1)
        hidden = StateSpaceModel(a=np.diag([1.0, 2.0]), c=[[1.0, 0.0]], s=1, m=1)
        assert observability_index(observable, 4) == 2
        assert observability_index(hidden, 4) is None


class TestModes:
    def test_rotation_modes(self):
        mode_set = modes(StateSpaceModel(a=[[0.0, -1.0], [1.0, 0.0]], c=np.eye(2), s=1, m=2))
        np.testing.assert_allclose(mode_set.temporal, [1j, -1j], atol=1e-14)
        np.testing.assert_allclose(mode_set.spatial, mode_set.eigenvectors)
        assert mode_set.census() == {"real": 0, "pairs": 1}

    def test_real_trend_decays(self):
        mode_set = modes(StateSpaceModel(a=[[0.9]], c=[[1.0]], s=1, m=1), dt=0.5)
        np.testing.assert_allclose(mode_set.trend([0.0, 0.5, 1.0]), [[1.0, 0.9, 0.81]], rtol=1e-12)
        assert mode_set.census() == {"real": 1, "pairs": 0}

    def test_defective_matrix_rejected(self):
        with pytest.raises(DefectiveMatrixError):
            modes(StateSpaceModel(a=[[1.0, 1.0], [0.0, 1.0]], c=np.eye(2), s=1, m=2))

    def test_ill_conditioned_amplitudes_refused(self):
        mode_set = ModeSet(
            spatial=np.eye(2),
            temporal=[0.5, 0.4],
            eigenvectors=[[1.0, 1.0], [0.0, 1e-12]],
            pairing=["real", "real"],
        )
        with pytest.raises(IllConditionedError):
            mode_set.amplitudes([1.0, 1.0])


class TestPrediction:
    @pytest.mark.parametrize("method", ["state-space", "extended-ar"])
    def test_scalar_doubling(self, doubling_fit, method):
        model, lowrank = doubling_fit
        prediction = predict(model, lowrank, [16.0], 3, method)
        np.testing.assert_allclose(prediction.outputs.ravel(), [32.0, 64.0, 128.0], rtol=1e-12)

    def test_predictions_match_held_samples(self):
        system = ObservableSystemFactory(n=3, m=2, seed=3)
        seq = TrajectoryFactory(system=system, seed=3, steps=40)
        s = 3
        result = identify(seq.model_copy(update={"samples": seq.samples[:30]}), n=3, s=s)
        window = stacked_window(seq, 30 - s, s)
        prediction = predict(result.model, result.lowrank, window, 10 + s - 1)
        np.testing.assert_allclose(prediction.outputs[s - 1:], seq.samples[30:], rtol=1e-6, atol=1e-9)

    def test_invalid_requests(self, doubling_fit):
        model, lowrank = doubling_fit
        with pytest.raises(InvalidInputError):
            predict(model, lowrank, [16.0], 0)
        with pytest.raises(DimensionMismatchError):
            predict(model, lowrank, [16.0, 32.0], 2)


class TestIdentify:
    def test_recovers_spectrum(self):
        system = ObservableSystemFactory(n=3, m=2, seed=4)
        result = identify(TrajectoryFactory(system=system, seed=4), n=3, s=3)
        assert result.relative_residual <= 1e-8
        assert spectrum_error(result.modes.temporal, np.linalg.eigvals(system.a)) <= 1e-6
        assert [step.stage for step in result.steps][-1] == "ModesStage"

    def test_rank_deficit_is_reported(self):
        system = ObservableSystemFactory(n=2, m=1, seed=5)
        result = identify(TrajectoryFactory(system=system, seed=5), n=4, s=4)
        assert result.model.n == 2
        assert any("reduced" in warning for warning in result.warnings)

    def test_similar_realizations_identify_identically(self):
        system = ObservableSystemFactory(n=3, m=2, seed=7)
        rng = np.random.default_rng(7)
        t = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
        t_inv = np.linalg.inv(t)
        similar = StateSpaceModel(a=t @ system.a @ t_inv, c=system.c @ t_inv, s=system.s, m=system.m)
        x0 = rng.standard_normal(3) + 1.0
        original = simulate(system, x0, 60)
        transformed = simulate(similar, t @ x0, 60)
        np.testing.assert_allclose(transformed.samples, original.samples, atol=1e-10)

        first, second = identify(original, n=2, s=4), identify(transformed, n=2, s=4)
        theta = first.lowrank.theta
        np.testing.assert_allclose(second.lowrank.theta, theta, atol=1e-8 * np.linalg.norm(theta))
        assert second.lowrank.residual_frobenius == pytest.approx(first.lowrank.residual_frobenius, rel=1e-8, abs=1e-10)
        assert spectrum_error(second.modes.temporal, first.modes.temporal) <= 1e-7
