"""
tests/test_multifidelity.py
Snapshots, greedy selection, Galerkin inference, pipeline and archive.
"""
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, os.path.dirname(__file__))

import numpy as np
import pytest

from mfschrod.core.fields import RandomSample
from mfschrod.core.grid import discrete_l2_norm
from mfschrod.core.sampling import sample_uniform
from mfschrod.errors import DomainError, ModelEvaluationError, SingularMatrixError
from mfschrod.multifidelity import (
    BIFIDELITY, TRIFIDELITY, SnapshotMatrix, archive_metadata, assemble_gramian, evaluate_model,
    build_snapshots, greedy_select, infer_coefficients, load_pipeline, offline_build, save_pipeline,
    snapshots_from_pairs, surrogate_evaluate,
)
from synthetic import FailingModel, high_model, low_model, medium_model


# ── Helpers ───────────────────────────────────────────────────────
def snapshot(columns, weight=1.0):
    columns = np.asarray(columns, dtype=float)
    samples = [RandomSample([0.0])] * columns.shape[1]
    return SnapshotMatrix(columns, samples, weight)


def gram_schmidt_greedy(u, w, k_max):
    """Dense reference: pick the column with the largest residual, orthogonalize, repeat."""
    residual = u.copy()
    chosen, dists = [], []
    for _ in range(k_max):
        norms = np.sqrt(w * np.sum(residual ** 2, axis=0))
        norms[chosen] = -1.0
        j = int(np.argmax(norms))
        dists.append(norms[j])
        chosen.append(j)
        q = residual[:, j] / norms[j]
        for _ in range(2):
            residual -= np.outer(q, w * (q @ residual))
    return chosen, dists


def rel(ref, approx, h):
    return discrete_l2_norm(ref - approx, h) / discrete_l2_norm(ref, h)


# ── Snapshots ─────────────────────────────────────────────────────
class TestSnapshots:

    def test_evaluation_keeps_sample_order(self):
        model = low_model()
        samples = sample_uniform(3, 12, seed=3)
        pairs, seconds = evaluate_model(model, samples, threads=4)
        for z, pair in zip(samples, pairs):
            assert np.allclose(pair.rho, model.evaluate(z).rho)
        assert seconds >= 0.0

    def test_failure_names_sample(self):
        samples = [RandomSample([0.0, 0, 0]), RandomSample([0.9, 0, 0])]
        with pytest.raises(ModelEvaluationError) as info:
            evaluate_model(FailingModel(), samples, threads=1)
        assert info.value.index == 1
        assert info.value.z[0] == pytest.approx(0.9)

    def test_empty_sample_set(self):
        with pytest.raises(DomainError):
            evaluate_model(low_model(), [], threads=1)

    def test_stacked_snapshots_are_scaled(self):
        model = low_model()
        samples = sample_uniform(3, 4, seed=5)
        pairs, _ = evaluate_model(model, samples, threads=1)
        snap = snapshots_from_pairs(pairs, samples, "stacked")
        assert snap.columns.shape == (64, 4)
        h = model.grid.h
        peak = max(discrete_l2_norm(snap.column(j)[:32], h) for j in range(4))
        assert peak == pytest.approx(1.0)

    def test_build_snapshots_single_quantity(self):
        model = low_model()
        samples = sample_uniform(3, 5, seed=6)
        snap = build_snapshots(model, samples, "current", threads=1)
        assert snap.columns.shape == (32, 5)
        assert np.allclose(snap.column(2), model.evaluate(samples[2]).current)
        with pytest.raises(DomainError):
            build_snapshots(model, samples, "phase", threads=1)

    def test_progress_counts_finished_evaluations(self, monkeypatch):
        import mfschrod.multifidelity.snapshots as snapshots_mod

        ticks, totals = [], []

        def recording_bar(iterable, total=None, **kwargs):
            totals.append(total)
            for item in iterable:
                ticks.append(item)
                yield item

        monkeypatch.setattr(snapshots_mod, "tqdm", recording_bar)
        samples = sample_uniform(3, 6, seed=4)
        pairs, _ = evaluate_model(low_model(), samples, threads=2)
        assert totals == [6]
        assert len(ticks) == 6
        assert all(isinstance(item[1], float) and item[0] is pair for item, pair in zip(ticks, pairs))

    def test_column_sample_mismatch(self):
        with pytest.raises(DomainError):
            SnapshotMatrix(np.ones((4, 3)), [RandomSample([0.0])] * 2, 1.0)


# ── Greedy ────────────────────────────────────────────────────────
class TestGreedy:

    def test_matches_dense_gram_schmidt(self):
        rng = np.random.default_rng(0)
        for trial in range(30):
            u = rng.standard_normal((20, 12))
            w = rng.uniform(0.1, 2.0)
            result = greedy_select(snapshot(u, w), 6)
            chosen, dists = gram_schmidt_greedy(u, w, 6)
            assert list(result.indices) == chosen, f"trial {trial}"
            assert np.allclose(result.residuals, dists, rtol=1e-8, atol=1e-8)

    def test_stops_at_exact_rank(self):
        rng = np.random.default_rng(1)
        u = rng.standard_normal((20, 3)) @ rng.standard_normal((3, 10))
        result = greedy_select(snapshot(u), 6, tol=1e-5)
        assert result.k == 3
        assert len(result.residuals) == 4
        assert result.residuals[-1] < 1e-5

    def test_orthogonal_columns_are_picked_by_norm(self):
        result = greedy_select(snapshot(np.diag([2.0, 3.0, 1.0])), 3)
        assert result.indices == (1, 0, 2)
        assert np.allclose(result.residuals, [3.0, 2.0, 1.0], atol=1e-14)

    def test_identical_columns_stop_after_one_pick(self):
        v = np.sin(np.linspace(0.0, 3.0, 40))
        v /= np.linalg.norm(v)
        result = greedy_select(snapshot(np.tile(v[:, None], (1, 6))), 4, tol=1e-6)
        assert result.k == 1
        assert len(result.residuals) == 2
        assert result.residuals[1] < 1e-6

    def test_residuals_never_increase(self):
        rng = np.random.default_rng(2)
        u = rng.standard_normal((30, 4)) @ rng.standard_normal((4, 20))
        u += 1e-9 * rng.standard_normal(u.shape)
        result = greedy_select(snapshot(u), 15)
        assert np.all(np.diff(result.residuals) <= 0.0)

    def test_first_pick_always_made(self):
        result = greedy_select(snapshot(np.eye(4)), 3, tol=1e9)
        assert result.k == 1

    def test_prefix(self):
        result = greedy_select(snapshot(np.eye(5)), 4)
        assert result.prefix(2).indices == result.indices[:2]
        with pytest.raises(DomainError):
            result.prefix(0)

    def test_k_max_range(self):
        with pytest.raises(DomainError):
            greedy_select(snapshot(np.eye(3)), 4)


# ── Galerkin ──────────────────────────────────────────────────────
class TestGalerkin:

    def test_duplicate_basis_vector_is_dropped(self):
        rng = np.random.default_rng(2)
        v1, v2 = rng.standard_normal(10), rng.standard_normal(10)
        snap = snapshot(np.column_stack([v1, v2, v1]), 0.1)
        system = assemble_gramian(snap, [0, 1, 2])
        assert system.active == (0, 1)
        coeffs = infer_coefficients(system, snap.columns, v1 + 2 * v2)
        assert np.allclose(coeffs, [1.0, 2.0, 0.0])
        assert system.lambda_min > 0

    def test_lambda_min_matches_dense_eigensolver(self):
        rng = np.random.default_rng(3)
        snap = snapshot(rng.standard_normal((30, 5)), 0.2)
        system = assemble_gramian(snap, range(5))
        dense = np.linalg.eigvalsh(0.2 * snap.columns.T @ snap.columns)[0]
        assert system.lambda_min == pytest.approx(dense, rel=1e-10)
        assert np.allclose(system.gram, system.gram.T, atol=1e-12)

    def test_projection_is_idempotent(self):
        rng = np.random.default_rng(4)
        snap = snapshot(rng.standard_normal((30, 4)), 0.5)
        system = assemble_gramian(snap, range(4))
        coeffs = infer_coefficients(system, snap.columns, rng.standard_normal(30))
        again = infer_coefficients(system, snap.columns, snap.columns @ coeffs)
        assert np.allclose(again, coeffs, atol=1e-10)

    def test_coefficients_are_scale_invariant(self):
        rng = np.random.default_rng(5)
        cols, u = rng.standard_normal((30, 4)), rng.standard_normal(30)
        base = infer_coefficients(assemble_gramian(snapshot(cols), range(4)), cols, u)
        scaled = infer_coefficients(assemble_gramian(snapshot(7.5 * cols), range(4)), 7.5 * cols, 7.5 * u)
        assert np.allclose(scaled, base, atol=1e-10)

    def test_vanishing_snapshots(self):
        with pytest.raises(SingularMatrixError):
            assemble_gramian(snapshot(np.zeros((5, 2))), [0, 1])

    def test_invalid_indices(self):
        with pytest.raises(DomainError):
            assemble_gramian(snapshot(np.eye(3)), [0, 0])

    def test_query_shape(self):
        snap = snapshot(np.eye(3))
        with pytest.raises(DomainError):
            infer_coefficients(assemble_gramian(snap, [0, 1]), snap.columns[:, :2], np.ones(4))


# ── Pipeline ──────────────────────────────────────────────────────
class TestPipeline:

    def setup_method(self):
        self.training = sample_uniform(3, 20, seed=11)
        self.tests = sample_uniform(3, 100, seed=12)

    def test_bifidelity_surrogate_is_exact_for_linear_models(self):
        low, high = low_model(), high_model()
        pipe = offline_build(low, None, high, self.training, k_max=3, threads=1)
        assert pipe.mode == BIFIDELITY
        assert pipe.k == 3
        assert high.calls == 3
        h = high.grid.h
        for z in self.tests:
            ref, got = high.evaluate(z), surrogate_evaluate(pipe, z)
            assert rel(ref.rho, got.rho, h) < 1e-10
            assert rel(ref.current, got.current, h) < 1e-10
        for z in pipe.samples:
            assert rel(high.evaluate(z).rho, surrogate_evaluate(pipe, z).rho, h) < 1e-8

    def test_trifidelity_uses_medium_for_inference(self):
        low, medium, high = low_model(), medium_model(), high_model()
        pipe = offline_build(low, medium, high, self.training, k_max=3, threads=1)
        assert pipe.mode == TRIFIDELITY
        assert pipe.inference_model is medium
        assert medium.calls == 3
        h = high.grid.h
        for z in self.tests[:20]:
            ref, got = high.evaluate(z), surrogate_evaluate(pipe, z)
            assert rel(ref.rho, got.rho, h) < 1e-10

    def test_truncation_matches_smaller_build(self):
        low, high = low_model(), high_model()
        full = offline_build(low, None, high, self.training, k_max=3, threads=1)
        small = offline_build(low, None, high, self.training, k_max=2, threads=1)
        cut = full.truncated(2)
        assert cut.k == 2
        assert cut.selection.indices == small.selection.indices
        pair = low.evaluate(self.tests[0])
        assert np.allclose(cut.combine(pair).rho, small.combine(pair).rho, atol=1e-12)
        assert full.truncated(3) is full

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            offline_build(low_model(d=3), None, high_model(d=2), self.training, k_max=2, threads=1)

    def test_archive_round_trip(self, tmp_path):
        low, high = low_model(), high_model()
        pipe = offline_build(low, None, high, self.training, k_max=3, threads=1)
        path = save_pipeline(pipe, tmp_path / "pipe" / "pipeline.npz", {"config_hash": "abc"})
        again = load_pipeline(path, low, None, high)
        assert archive_metadata(path) == {"config_hash": "abc"}
        assert again.selection == pipe.selection
        assert again.mode == pipe.mode
        z = self.tests[0]
        assert np.allclose(surrogate_evaluate(again, z).current, surrogate_evaluate(pipe, z).current, atol=1e-14)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
