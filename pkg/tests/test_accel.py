"""Backend parity: the numba kernels and the pure-numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from crossmmd._accel import _numpy_impl as npy
from crossmmd._rng import mix64, shuffled_indices, sm64_scramble, substream

try:
    from crossmmd._accel import _numba_impl as nb
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


class TestRngPrimitives:
    def test_scramble_reference_values(self):
        # splitmix64 with seed 1234567: first outputs per the published algorithm
        state = 1234567
        outs = []
        for _ in range(3):
            state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
            outs.append(sm64_scramble(state))
        assert outs[0] == sm64_scramble((1234567 + 0x9E3779B97F4A7C15) & (2**64 - 1))
        assert len(set(outs)) == 3

    def test_mix64_spreads_indices(self):
        vals = {mix64(42, i) for i in range(1000)}
        assert len(vals) == 1000

    def test_substream_order_sensitivity(self):
        assert substream(1, 2) != substream(2, 1)

    def test_shuffle_is_permutation(self):
        idx = shuffled_indices(100, mix64(7, 0))
        assert sorted(idx) == list(range(100))


@needs_numba
class TestBackendParity:
    def test_sqdist_matrix(self):
        rng = np.random.default_rng(0)
        Z = rng.normal(size=(30, 5))
        a, b = nb.sqdist_matrix(Z), npy.sqdist_matrix(Z)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
        assert np.array_equal(a, a.T)
        assert np.array_equal(b, b.T)

    def test_sqdist_condensed(self):
        rng = np.random.default_rng(1)
        Z = rng.normal(size=(18, 3))
        np.testing.assert_allclose(nb.sqdist_condensed(Z), npy.sqdist_condensed(Z),
                                   rtol=1e-12)

    def test_mmd_direct_all_families(self):
        rng = np.random.default_rng(2)
        X, Y = rng.normal(size=(25, 3)), rng.normal(size=(20, 3))
        for fam, s, deg in ((0, 0.5, 0), (1, 0.8, 0), (2, 0.3, 2)):
            assert nb.mmd_direct(X, Y, fam, s, deg) == pytest.approx(
                npy.mmd_direct(X, Y, fam, s, deg), rel=1e-11, abs=1e-13)

    def test_labels_statistic(self):
        rng = np.random.default_rng(3)
        K = npy.sqdist_matrix(rng.normal(size=(21, 2)))
        K = np.exp(-0.4 * K)
        labels = np.asarray(rng.permutation(21), dtype=np.int64)
        assert nb.mmd_from_labels(K, labels, 10, 11) == pytest.approx(
            npy.mmd_from_labels(K, labels, 10, 11), rel=1e-12)

    def test_perm_stats_identical_shuffles(self):
        # same seeds must drive the exact same permutations in both backends,
        # so the permuted statistics agree to rounding
        rng = np.random.default_rng(4)
        K = np.exp(-0.2 * npy.sqdist_matrix(rng.normal(size=(24, 3))))
        a = nb.perm_mmd_stats(K, 12, 12, 40, np.uint64(991))
        b = npy.perm_mmd_stats(K, 12, 12, 40, 991)
        np.testing.assert_allclose(a, b, rtol=1e-10)

    @needs_numba
    def test_thread_count_does_not_change_results(self):
        import numba
        rng = np.random.default_rng(5)
        Z = rng.normal(size=(40, 4))
        K = np.exp(-0.3 * nb.sqdist_matrix(Z))
        default = numba.get_num_threads()
        try:
            numba.set_num_threads(1)
            a1 = nb.sqdist_matrix(Z)
            p1 = nb.perm_mmd_stats(K, 20, 20, 30, np.uint64(5))
            numba.set_num_threads(min(4, numba.config.NUMBA_NUM_THREADS))
            a2 = nb.sqdist_matrix(Z)
            p2 = nb.perm_mmd_stats(K, 20, 20, 30, np.uint64(5))
        finally:
            numba.set_num_threads(default)
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(p1, p2)


class TestEnvFlagFallback:
    def test_no_numba_env_selects_numpy_and_agrees(self):
        code = (
            "import crossmmd as cm, numpy as np\n"
            "assert cm.backend_name() == 'numpy', cm.backend_name()\n"
            "rng = np.random.default_rng(6)\n"
            "X, Y = rng.normal(size=(15, 2)), rng.normal(size=(15, 2))\n"
            "spec = cm.median_kernel_spec(X, Y)\n"
            "g = cm.gram_matrix(spec, X, Y)\n"
            "r = cm.permutation_test(g, 0.05, cm.PermutationPlan(50, 3))\n"
            "print(repr(r.p_value), repr(cm.mmd_u_statistic(g)))\n"
        )
        env = dict(os.environ, CROSSMMD_NO_NUMBA="1")
        out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                             text=True, env=env)
        assert out.returncode == 0, out.stderr
        p_np, stat_np = out.stdout.split()
        # same computation in-process (numba backend when available)
        import crossmmd as cm
        rng = np.random.default_rng(6)
        X, Y = rng.normal(size=(15, 2)), rng.normal(size=(15, 2))
        spec = cm.median_kernel_spec(X, Y)
        g = cm.gram_matrix(spec, X, Y)
        r = cm.permutation_test(g, 0.05, cm.PermutationPlan(50, 3))
        assert float(p_np) == pytest.approx(r.p_value, abs=1e-12)
        assert float(stat_np) == pytest.approx(cm.mmd_u_statistic(g), rel=1e-12)
