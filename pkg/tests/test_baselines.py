import math

import numpy as np
import pytest

from crossmmd import (InvalidInputError, KernelSpec, PermutationPlan,
                      block_mmd_test, gram_matrix, h_mmd, linear_mmd_test,
                      median_kernel_spec, mmd_relabeled, mmd_u_direct,
                      mmd_u_statistic, normal_quantile, permutation_test)
from crossmmd.datagen import RngState, SourceSpec, sample

from oracles import h_value, kernel_value, mmd_u_quadruple

GAUSS = KernelSpec("gaussian", 1.0)
E1 = math.exp(-1.0)


def _gram_1d(xs, ys, spec=GAUSS):
    return gram_matrix(spec, np.asarray(xs, float)[:, None],
                       np.asarray(ys, float)[:, None])


class TestHMmd:
    def test_all_points_equal(self):
        g = _gram_1d([2.0, 2.0], [2.0, 2.0])
        assert h_mmd(g, 0, 1, 0, 1) == 0.0

    def test_separated_points(self):
        g = _gram_1d([0.0, 0.0], [1.0, 1.0])
        assert h_mmd(g, 0, 1, 0, 1) == pytest.approx(2 - 2 * E1, rel=1e-12)

    def test_index_symmetries(self):
        rng = np.random.default_rng(0)
        g = gram_matrix(GAUSS, rng.normal(size=(4, 2)), rng.normal(size=(4, 2)))
        assert h_mmd(g, 0, 1, 2, 3) == h_mmd(g, 1, 0, 3, 2)
        # swapping (i, j) with (i', j') simultaneously leaves h unchanged
        assert h_mmd(g, 0, 1, 2, 3) == pytest.approx(h_mmd(g, 1, 0, 3, 2), rel=1e-14)

    def test_matches_pointwise_formula(self):
        rng = np.random.default_rng(1)
        X, Y = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
        g = gram_matrix(GAUSS, X, Y)
        for (i, i2, j, j2) in [(0, 1, 0, 1), (2, 0, 1, 2), (1, 1, 2, 0)]:
            expected = h_value("gaussian", 1.0, None, X[i], X[i2], Y[j], Y[j2])
            assert h_mmd(g, i, i2, j, j2) == pytest.approx(expected, rel=1e-12)

    def test_out_of_range(self):
        g = _gram_1d([0.0, 1.0], [2.0, 3.0])
        with pytest.raises(InvalidInputError):
            h_mmd(g, 0, 2, 0, 1)
        with pytest.raises(InvalidInputError):
            h_mmd(g, 0, 1, -1, 1)


class TestMmdUStatistic:
    def test_two_vs_two(self):
        g = _gram_1d([0.0, 0.0], [1.0, 1.0])
        assert mmd_u_statistic(g) == pytest.approx(2 - 2 * E1, rel=1e-12)

    def test_equal_multisets_match_oracle(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(4, 2))
        Y = X[rng.permutation(4)]
        g = gram_matrix(GAUSS, X, Y)
        assert mmd_u_statistic(g) == pytest.approx(
            mmd_u_quadruple(X, Y, "gaussian", 1.0), rel=1e-10, abs=1e-14)

    def test_small_random_matches_oracle(self):
        rng = np.random.default_rng(3)
        X, Y = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
        g = gram_matrix(GAUSS, X, Y)
        assert mmd_u_statistic(g) == pytest.approx(
            mmd_u_quadruple(X, Y, "gaussian", 1.0), rel=1e-10)

    def test_randomized_oracle_equivalence(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            n, m = rng.integers(2, 7), rng.integers(2, 7)
            d = rng.integers(1, 4)
            X, Y = rng.normal(size=(n, d)), rng.normal(size=(m, d))
            scale = rng.uniform(0.2, 2.0)
            spec = KernelSpec("gaussian", scale)
            got = mmd_u_statistic(gram_matrix(spec, X, Y))
            assert got == pytest.approx(
                mmd_u_quadruple(X, Y, "gaussian", scale), rel=1e-10, abs=1e-12)

    def test_preconditions(self):
        with pytest.raises(InvalidInputError):
            mmd_u_statistic(_gram_1d([0.0], [1.0, 2.0]))

    def test_direct_path_agrees(self):
        rng = np.random.default_rng(5)
        X, Y = rng.normal(size=(12, 3)), rng.normal(size=(9, 3))
        for spec in (GAUSS, KernelSpec("laplace", 0.5),
                     KernelSpec("polynomial", 0.3, degree=2)):
            via_gram = mmd_u_statistic(gram_matrix(spec, X, Y))
            assert mmd_u_direct(X, Y, spec) == pytest.approx(via_gram, rel=1e-10, abs=1e-13)


class TestPermutationTest:
    def _null_gram(self, seed, n=20, m=20, d=2):
        rng = np.random.default_rng(seed)
        X, Y = rng.normal(size=(n, d)), rng.normal(size=(m, d))
        return gram_matrix(median_kernel_spec(X, Y), X, Y)

    def test_p_value_bounds(self):
        g = self._null_gram(0)
        for B in (1, 7, 50):
            r = permutation_test(g, 0.05, PermutationPlan(B=B, seed=1))
            assert 1.0 / (B + 1) <= r.p_value <= 1.0

    def test_extreme_observed_gives_minimal_p(self):
        # widely separated samples: observed statistic beats every permutation
        X = np.zeros((10, 1))
        Y = np.full((10, 1), 50.0)
        g = gram_matrix(GAUSS, X, Y)
        B = 99
        r = permutation_test(g, 0.05, PermutationPlan(B=B, seed=2))
        assert r.p_value == pytest.approx(1.0 / (B + 1), rel=1e-12)
        assert r.reject

    def test_deterministic_given_seed(self):
        g = self._null_gram(1)
        plan = PermutationPlan(B=64, seed=12345)
        r1 = permutation_test(g, 0.05, plan)
        r2 = permutation_test(g, 0.05, plan)
        assert r1.p_value == r2.p_value
        assert r1.statistic == r2.statistic

    def test_statistic_equals_u_statistic(self):
        g = self._null_gram(2)
        r = permutation_test(g, 0.05, PermutationPlan(B=5, seed=0))
        assert r.statistic == mmd_u_statistic(g)

    def test_relabeling_invariance_composed(self):
        # permuting the pooled data and composing the labels gives the same value
        rng = np.random.default_rng(6)
        X, Y = rng.normal(size=(5, 2)), rng.normal(size=(6, 2))
        Z = np.vstack([X, Y])
        g = gram_matrix(GAUSS, X, Y)
        for _ in range(10):
            pi = rng.permutation(11)
            labels = rng.permutation(11)
            g_pi = gram_matrix(GAUSS, Z[pi][:5], Z[pi][5:])
            lhs = mmd_relabeled(g_pi, labels)
            rhs = mmd_relabeled(g, pi[labels])
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)

    def test_super_uniform_p_values_under_null(self):
        trials = 1000
        B = 60
        pvals = np.empty(trials)
        for t in range(trials):
            g = self._null_gram(1000 + t, n=12, m=12, d=2)
            pvals[t] = permutation_test(g, 0.05, PermutationPlan(B=B, seed=t)).p_value
        for q in np.arange(0.05, 0.501, 0.05):
            frac = np.mean(pvals <= q)
            assert frac <= q + 3.0 * math.sqrt(q * (1 - q) / trials)

    def test_validation(self):
        g = self._null_gram(3)
        with pytest.raises(InvalidInputError):
            permutation_test(g, 1.5, PermutationPlan(B=10, seed=0))
        with pytest.raises(InvalidInputError):
            PermutationPlan(B=0, seed=0)


class TestBlockMmd:
    def test_full_block_equals_u_statistic(self):
        rng = np.random.default_rng(7)
        X, Y = rng.normal(size=(10, 2)), rng.normal(size=(10, 2))
        r = block_mmd_test(X, Y, GAUSS, b=10, alpha=0.05,
                           fallback_plan=PermutationPlan(B=20, seed=0))
        assert r.statistic == mmd_u_statistic(gram_matrix(GAUSS, X, Y))
        assert r.p_value is not None  # permutation fallback drives the decision

    def test_two_blocks_average_of_per_block_oracles(self):
        rng = np.random.default_rng(8)
        X, Y = rng.normal(size=(8, 1)), rng.normal(size=(8, 1))
        r = block_mmd_test(X, Y, GAUSS, b=4, alpha=0.05)
        blocks = [mmd_u_quadruple(X[i:i + 4], Y[i:i + 4], "gaussian", 1.0)
                  for i in (0, 4)]
        mean = np.mean(blocks)
        sd = np.std(blocks, ddof=1)
        assert r.statistic == pytest.approx(mean / (sd / math.sqrt(2)), rel=1e-9)
        assert r.meta["blocks"] == 2
        assert r.threshold == pytest.approx(normal_quantile(0.95), rel=1e-12)

    def test_leftover_pairs_dropped(self):
        rng = np.random.default_rng(9)
        X, Y = rng.normal(size=(11, 1)), rng.normal(size=(11, 1))
        r = block_mmd_test(X, Y, GAUSS, b=4, alpha=0.05)
        assert r.meta["blocks"] == 2  # 11 // 4

    def test_size_validation(self):
        rng = np.random.default_rng(10)
        X, Y = rng.normal(size=(10, 1)), rng.normal(size=(9, 1))
        with pytest.raises(InvalidInputError):
            block_mmd_test(X, Y, GAUSS, b=4, alpha=0.05)
        Y = rng.normal(size=(10, 1))
        with pytest.raises(InvalidInputError):
            block_mmd_test(X, Y, GAUSS, b=1, alpha=0.05)
        with pytest.raises(InvalidInputError):
            block_mmd_test(X, Y, GAUSS, b=11, alpha=0.05)
        # 2 <= b <= n but fewer than two complete blocks: refuse Gaussian calibration
        with pytest.raises(InvalidInputError):
            block_mmd_test(X, Y, GAUSS, b=6, alpha=0.05)


class TestLinearMmd:
    def test_minimal_size_hand_computation(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        Y = np.array([[0.5], [1.7], [2.1], [3.9]])
        k = lambda a, b: kernel_value("gaussian", 1.0, None, [a], [b])
        h1 = k(0, 1) - k(0, 1.7) - k(0.5, 1) + k(0.5, 1.7)
        h2 = k(2, 3) - k(2, 3.9) - k(2.1, 3) + k(2.1, 3.9)
        terms = np.array([h1, h2])
        expected = terms.mean() / (terms.std(ddof=1) / math.sqrt(2))
        r = linear_mmd_test(X, Y, GAUSS, alpha=0.05)
        assert r.statistic == pytest.approx(expected, rel=1e-9)
        assert r.meta["terms"] == 2

    def test_identical_pairs_do_not_reject(self):
        X = np.arange(8.0)[:, None]
        r = linear_mmd_test(X, X.copy(), GAUSS, alpha=0.05)
        assert r.statistic == 0.0
        assert not r.reject

    def test_size_validation(self):
        rng = np.random.default_rng(11)
        with pytest.raises(InvalidInputError):
            linear_mmd_test(rng.normal(size=(4, 1)), rng.normal(size=(5, 1)), GAUSS, 0.05)
        with pytest.raises(InvalidInputError):
            linear_mmd_test(rng.normal(size=(3, 1)), rng.normal(size=(3, 1)), GAUSS, 0.05)

    def test_odd_sizes_drop_last_point(self):
        rng = np.random.default_rng(12)
        X, Y = rng.normal(size=(9, 2)), rng.normal(size=(9, 2))
        r = linear_mmd_test(X, Y, GAUSS, alpha=0.05)
        assert r.meta["terms"] == 4
        r2 = linear_mmd_test(X[:8], Y[:8], GAUSS, alpha=0.05)
        assert r.statistic == pytest.approx(r2.statistic, rel=1e-12)


class TestGaussianCalibrationNullBands:
    def test_block_mmd_type_one_error_band(self):
        # null data N(0, I_10), n = m = 128, b = floor(sqrt(n)), 500 trials
        src = SourceSpec("gaussian-shift", d=10)
        b = int(math.sqrt(128))
        rejects = 0
        trials = 500
        for t in range(trials):
            X = sample(src, "P", 128, RngState(311, 2 * t))
            Y = sample(src, "P", 128, RngState(311, 2 * t + 1))
            spec = median_kernel_spec(X, Y)
            rejects += int(block_mmd_test(X, Y, spec, b, alpha=0.05).reject)
        rate = rejects / trials
        assert 0.02 <= rate <= 0.09, rate

    def test_linear_mmd_type_one_error_band(self):
        # null data N(0, I_10), n = m = 512, 500 trials
        src = SourceSpec("gaussian-shift", d=10)
        rejects = 0
        trials = 500
        for t in range(trials):
            X = sample(src, "P", 512, RngState(313, 2 * t))
            Y = sample(src, "P", 512, RngState(313, 2 * t + 1))
            spec = median_kernel_spec(X, Y)
            rejects += int(linear_mmd_test(X, Y, spec, alpha=0.05).reject)
        rate = rejects / trials
        assert 0.02 <= rate <= 0.09, rate


class TestResultConventions:
    def test_meta_has_provenance(self):
        rng = np.random.default_rng(13)
        X, Y = rng.normal(size=(10, 2)), rng.normal(size=(10, 2))
        r = permutation_test(gram_matrix(GAUSS, X, Y), 0.05, PermutationPlan(B=10, seed=4))
        for key in ("test", "calibration", "B", "seed", "n", "m", "elapsed_ns"):
            assert key in r.meta
        assert r.reject == (r.p_value <= 0.05)
        r2 = linear_mmd_test(X, Y, GAUSS, 0.05)
        assert r2.reject == (r2.statistic >= r2.threshold)
