"""Tests for the LS, oracle, and greedy estimators."""

import math

import numpy as np
import pytest

from twrn_cs.estimators import (
    CosampSettings,
    cosamp,
    cosamp_matrix,
    default_sparsity,
    ls_estimate,
    oracle_estimate,
)
from twrn_cs.harness import mse

from tests.test_link import _standard_instance
from twrn_cs.link import synthesize_received


def _noiseless(seed, n=40):
    model, comp, h1, rng = _standard_instance(seed, n=n)
    sig = synthesize_received(model, comp, h1, math.inf, rng, noiseless=True)
    return model, comp, h1, sig


def _rel_err(theta_hat, theta):
    return float(np.linalg.norm(theta_hat - theta) / np.linalg.norm(theta))


class TestDefaultSparsity:
    def test_reference_value(self):
        # K(K+1)/2 + K^2 = 7 for K = 2
        assert default_sparsity(2) == 7

    def test_single_path(self):
        assert default_sparsity(1) == 2


class TestCosampSettings:
    def test_iteration_cap_default(self):
        assert CosampSettings(sparsity=7).max_iterations == 28
        assert CosampSettings(sparsity=30).max_iterations == 100

    def test_invalid(self):
        with pytest.raises(ValueError):
            CosampSettings(sparsity=0)
        with pytest.raises(ValueError):
            CosampSettings(sparsity=1, max_iterations=0)
        with pytest.raises(ValueError):
            CosampSettings(sparsity=1, residual_tolerance=-1.0)


class TestLsEstimate:
    def test_noiseless_consistent_system(self):
        model, comp, _, sig = _noiseless(0)
        out = ls_estimate(model, sig.y)
        assert _rel_err(out.theta_hat, comp.theta) <= 1e-9
        assert out.iterations == 1
        assert out.support_hat.size == comp.theta.size

    def test_zero_data_gives_zero(self):
        model, _, _, sig = _noiseless(1)
        out = ls_estimate(model, np.zeros_like(sig.y))
        np.testing.assert_allclose(out.theta_hat, 0, atol=1e-14)

    def test_elapsed_and_residual_recorded(self):
        model, comp, h1, _ = _standard_instance(2)
        sig = synthesize_received(model, comp, h1, 10.0, np.random.default_rng(2))
        out = ls_estimate(model, sig.y)
        assert out.elapsed_seconds >= 0
        assert out.residual_norm > 0

    def test_underdetermined_model_rejected(self):
        # N = 20 < 2L leaves N_tilde = 50 rows against 62 unknowns
        model, _, _, _ = _standard_instance(0, n=20)
        with pytest.raises(ValueError, match="underdetermined"):
            ls_estimate(model, np.zeros(model.N_tilde))


class TestOracleEstimate:
    def test_full_support_equals_plain_ls(self):
        model, comp, h1, _ = _standard_instance(3)
        sig = synthesize_received(model, comp, h1, 10.0, np.random.default_rng(3))
        full = np.arange(comp.theta.size)
        np.testing.assert_allclose(
            oracle_estimate(model, sig.y, full).theta_hat,
            ls_estimate(model, sig.y).theta_hat,
            atol=1e-10,
        )

    def test_noiseless_with_true_support_exact(self):
        model, comp, _, sig = _noiseless(4)
        out = oracle_estimate(model, sig.y, comp.support)
        assert _rel_err(out.theta_hat, comp.theta) <= 1e-10
        assert np.all(out.theta_hat[np.setdiff1d(np.arange(62), comp.support)] == 0)

    def test_empty_support_returns_zero(self):
        model, _, _, sig = _noiseless(5)
        out = oracle_estimate(model, sig.y, [])
        np.testing.assert_array_equal(out.theta_hat, np.zeros(62))
        assert abs(out.residual_norm - np.linalg.norm(sig.y)) <= 1e-12

    def test_lower_bound_versus_cosamp_small_monte_carlo(self):
        """Oracle mean MSE never exceeds the greedy estimator's, per SNR."""
        settings = CosampSettings(sparsity=7)
        for snr_db in (0.0, 15.0, 30.0):
            oracle_sq, greedy_sq = 0.0, 0.0
            for i in range(50):
                model, comp, h1, rng = _standard_instance(1000 + i)
                sig = synthesize_received(model, comp, h1, snr_db, rng)
                oracle_sq += np.sum(np.abs(
                    oracle_estimate(model, sig.y, comp.support).theta_hat - comp.theta) ** 2)
                greedy_sq += np.sum(np.abs(
                    cosamp(model, sig.y, settings).theta_hat - comp.theta) ** 2)
            assert oracle_sq <= greedy_sq


class TestCosamp:
    def test_identity_matrix_recovers_sparse_signal(self):
        rng = np.random.default_rng(0)
        signal = np.zeros(30, dtype=complex)
        signal[[4, 11, 25]] = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        out = cosamp_matrix(np.eye(30), signal, CosampSettings(sparsity=3))
        assert out.iterations == 1
        np.testing.assert_allclose(out.theta_hat, signal, atol=1e-12)
        assert out.support_hat.tolist() == [4, 11, 25]

    def test_noiseless_relay_instance(self):
        model, comp, _, sig = _noiseless(6)
        out = cosamp(model, sig.y, CosampSettings(sparsity=7))
        assert _rel_err(out.theta_hat, comp.theta) <= 1e-6

    def test_one_sparse_single_iteration_all_supports(self):
        """Exhaustive over all 62 columns: argmax of the proxy is the true index."""
        model, _, _, _ = _standard_instance(314)
        a = model.alpha * model.X
        settings = CosampSettings(sparsity=1, residual_tolerance=1e-10)
        for j in range(a.shape[1]):
            theta = np.zeros(a.shape[1], dtype=complex)
            theta[j] = 1.3 - 0.4j
            out = cosamp_matrix(a, a @ theta, settings)
            assert out.iterations == 1
            assert out.support_hat.tolist() == [j]
            assert out.residual_norm <= 1e-10

    def test_iterate_sparsity_bounded(self):
        model, comp, h1, _ = _standard_instance(7)
        sig = synthesize_received(model, comp, h1, 5.0, np.random.default_rng(7))
        sizes = []
        cosamp_matrix(
            model.alpha * model.X, sig.y, CosampSettings(sparsity=7),
            on_iterate=lambda th: sizes.append(np.count_nonzero(th)),
        )
        assert sizes and all(s <= 7 for s in sizes)

    def test_final_residual_no_worse_than_zero_estimate(self):
        model, comp, h1, _ = _standard_instance(8)
        sig = synthesize_received(model, comp, h1, 0.0, np.random.default_rng(8))
        out = cosamp(model, sig.y, CosampSettings(sparsity=7))
        assert out.residual_norm <= np.linalg.norm(sig.y)

    def test_scaling_invariance(self):
        """Scaling y scales the estimate and leaves every selected support alone."""
        model, comp, h1, _ = _standard_instance(9)
        sig = synthesize_received(model, comp, h1, 10.0, np.random.default_rng(9))
        settings = CosampSettings(sparsity=7)
        base = cosamp(model, sig.y, settings)
        scaled = cosamp(model, 7.3 * sig.y, settings)
        np.testing.assert_array_equal(base.support_hat, scaled.support_hat)
        np.testing.assert_allclose(scaled.theta_hat, 7.3 * base.theta_hat, rtol=1e-12)
        assert base.iterations == scaled.iterations

    def test_residual_tolerance_stops_early(self):
        model, comp, _, sig = _noiseless(10)
        out = cosamp(model, sig.y, CosampSettings(sparsity=7, residual_tolerance=1e-6))
        assert out.iterations < 28

    def test_quick_exact_recovery_batch(self):
        hits = 0
        for seed in range(20):
            model, comp, _, sig = _noiseless(2000 + seed)
            out = cosamp(model, sig.y, CosampSettings(sparsity=7))
            hits += _rel_err(out.theta_hat, comp.theta) <= 1e-6
        assert hits == 20

    def test_sparsity_preconditions(self):
        model, _, _, sig = _noiseless(11)
        with pytest.raises(ValueError, match="sparsity"):
            cosamp(model, sig.y, CosampSettings(sparsity=21))  # 3S > 62
        with pytest.raises(ValueError, match="measurements"):
            cosamp_matrix(np.ones((5, 12)), np.ones(5), CosampSettings(sparsity=2))

    def test_zero_column_rejected(self):
        a = np.eye(12)
        a[:, 3] = 0.0
        with pytest.raises(ValueError, match="zero column"):
            cosamp_matrix(a, np.ones(12), CosampSettings(sparsity=2))

    def test_duplicate_columns_repaired_by_drop(self):
        """A rank-deficient merged support is repaired by dropping dependent columns."""
        rng = np.random.default_rng(12)
        a = rng.standard_normal((24, 9)) + 1j * rng.standard_normal((24, 9))
        a[:, 8] = a[:, 0]  # exact duplicate
        theta = np.zeros(9, dtype=complex)
        theta[0] = 2.0
        out = cosamp_matrix(a, a @ theta, CosampSettings(sparsity=2))
        recon = a @ out.theta_hat
        assert np.linalg.norm(recon - a @ theta) <= 1e-8 * np.linalg.norm(a @ theta)


class TestMseUnit:
    def test_perfect_estimates(self):
        truth = np.ones(31, dtype=complex)
        assert mse(truth, [truth.copy(), truth.copy()]) == 0.0

    def test_single_error_entry(self):
        truth = np.zeros(31, dtype=complex)
        est = truth.copy()
        est[4] = 0.31
        assert abs(mse(truth, [est]) - 0.31**2 / 31) <= 1e-15

    def test_two_trial_arithmetic(self):
        truth = np.zeros(31, dtype=complex)
        e1 = truth.copy(); e1[0] = 1.0            # squared norm 1
        e2 = truth.copy(); e2[1] = np.sqrt(3.0)   # squared norm 3
        assert abs(mse(truth, [e1, e2]) - 4.0 / 62.0) <= 1e-15

    def test_concatenation_linearity(self):
        rng = np.random.default_rng(13)
        truth = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        group_a = [truth + rng.standard_normal(10) * 0.1 for _ in range(3)]
        group_b = [truth + rng.standard_normal(10) * 0.2 for _ in range(5)]
        combined = mse(truth, group_a + group_b)
        weighted = (3 * mse(truth, group_a) + 5 * mse(truth, group_b)) / 8
        assert abs(combined - weighted) <= 1e-12

    def test_invalid_inputs(self):
        with pytest.raises(ValueError, match="nonempty"):
            mse(np.ones(3), [])
        with pytest.raises(ValueError, match="length"):
            mse(np.ones(3), [np.ones(4)])
