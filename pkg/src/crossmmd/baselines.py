"""Classical quadratic-time MMD U-statistic and its cheaper variants.

The permutation test relabels the pooled gram matrix (no kernel
re-evaluation), so B permutations cost B * O((n+m)^2). The block and linear
tests never build the pooled gram; they are calibrated against the standard
normal after studentization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .calibration import normal_quantile
from .errors import InvalidInputError
from .kernels import GramBlocks, KernelSpec, as_sample, eval_kernel_rowwise, gram_matrix


@dataclass(frozen=True)
class PermutationPlan:
    """Permutation count and seed for the permutation null distribution."""

    B: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.B < 1:
            raise InvalidInputError("permutation count B must be >= 1")


@dataclass
class TestResult:
    """Outcome of one two-sample test.

    Exactly one of ``p_value``/``threshold`` drives ``reject``; which one is
    recorded in ``meta['calibration']`` ('permutation' or 'gaussian').
    """

    statistic: float
    reject: bool
    p_value: float | None = None
    threshold: float | None = None
    meta: dict = field(default_factory=dict)


def h_mmd(gram: GramBlocks, i: int, i2: int, j: int, j2: int) -> float:
    """The degenerate MMD core h(X_i, X_i2, Y_j, Y_j2) read from the gram.

    h(x, x', y, y') = k(x, x') - k(x, y') - k(y, x') + k(y, y').
    """
    n, m = gram.n, gram.m
    if not (0 <= i < n and 0 <= i2 < n):
        raise InvalidInputError(f"X index out of range: {i}, {i2} (n={n})")
    if not (0 <= j < m and 0 <= j2 < m):
        raise InvalidInputError(f"Y index out of range: {j}, {j2} (m={m})")
    K = gram.pooled
    return float(K[i, i2] - K[i, n + j2] - K[n + j, i2] + K[n + j, n + j2])


def mmd_u_statistic(gram: GramBlocks) -> float:
    """Unbiased squared-MMD U-statistic from the pooled gram, O((n+m)^2).

    Uses the same summation kernel as the permutation relabeling path, so
    observed and permuted statistics are directly comparable.
    """
    n, m = gram.n, gram.m
    if n < 2 or m < 2:
        raise InvalidInputError(f"mmd_u_statistic needs n, m >= 2, got n={n}, m={m}")
    K = np.ascontiguousarray(gram.pooled)
    return float(_accel.mmd_contiguous(K, n, m))


def mmd_u_direct(X, Y, spec: KernelSpec) -> float:
    """Unbiased squared-MMD U-statistic evaluated pair-by-pair, O(1) memory.

    For reference computations on samples too large for a pooled gram.
    """
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if Xv.shape[1] != Yv.shape[1]:
        raise InvalidInputError("dimension mismatch between X and Y")
    if Xv.shape[0] < 2 or Yv.shape[0] < 2:
        raise InvalidInputError("need n, m >= 2")
    deg = spec.degree if spec.degree is not None else 0
    return float(_accel.mmd_direct(Xv, Yv, spec.family_code, spec.scale, deg))


def mmd_relabeled(gram: GramBlocks, labels) -> float:
    """MMD U-statistic for an explicit relabeling of the pooled indices.

    ``labels`` is a permutation of range(n+m); the first n entries form the
    relabeled X.
    """
    lab = np.asarray(labels, dtype=np.int64)
    N = gram.n + gram.m
    if lab.shape != (N,) or not np.array_equal(np.sort(lab), np.arange(N)):
        raise InvalidInputError("labels must be a permutation of range(n+m)")
    K = np.ascontiguousarray(gram.pooled)
    return float(_accel.mmd_from_labels(K, lab, gram.n, gram.m))


def permutation_test(gram: GramBlocks, alpha: float, plan: PermutationPlan) -> TestResult:
    """Permutation-calibrated MMD test on a precomputed pooled gram.

    p-value uses the add-one rule (1 + #{stat_b >= stat_obs}) / (B + 1),
    which is exactly valid at finite B.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"level must lie in (0,1), got {alpha}")
    n, m = gram.n, gram.m
    if n < 2 or m < 2:
        raise InvalidInputError("permutation test needs n, m >= 2")
    t0 = time.perf_counter_ns()
    K = np.ascontiguousarray(gram.pooled)
    stat_obs = float(_accel.mmd_contiguous(K, n, m))
    seed64 = np.uint64(plan.seed & (2**64 - 1))
    perm_stats = _accel.perm_mmd_stats(K, n, m, plan.B, seed64)
    count = int(np.sum(perm_stats >= stat_obs))
    p_value = (1.0 + count) / (plan.B + 1.0)
    elapsed = time.perf_counter_ns() - t0
    return TestResult(
        statistic=stat_obs,
        reject=bool(p_value <= alpha),
        p_value=p_value,
        meta={
            "test": "mmd-perm",
            "calibration": "permutation",
            "B": plan.B,
            "seed": plan.seed,
            "alpha": alpha,
            "n": n,
            "m": m,
            "elapsed_ns": elapsed,
        },
    )


def _studentized_mean(values: np.ndarray, ddof: int) -> float:
    """mean / (sd / sqrt(count)), with the signed-infinity degenerate rule."""
    k = len(values)
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=ddof))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0
        return float(np.inf) if mean > 0 else float(-np.inf)
    return mean / (sd / np.sqrt(k))


def block_mmd_test(X, Y, spec: KernelSpec, b: int, alpha: float,
                   fallback_plan: PermutationPlan | None = None) -> TestResult:
    """Block-averaged MMD with a Gaussian threshold.

    Paired indices are cut into floor(n/b) consecutive blocks of size b
    (leftovers dropped); the per-block unbiased U-statistics are averaged
    and studentized across blocks ((blocks-1)-denominator variance). Fewer
    than 2 complete blocks is refused, except b == n, which degenerates to
    the full U-statistic and is calibrated by permutation instead.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"level must lie in (0,1), got {alpha}")
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    n, m = Xv.shape[0], Yv.shape[0]
    if n != m:
        raise InvalidInputError(f"block MMD requires n == m, got {n}, {m}")
    if not (2 <= b <= n):
        raise InvalidInputError(f"block size must lie in [2, n], got {b}")
    t0 = time.perf_counter_ns()
    if b == n:
        result = permutation_test(gram_matrix(spec, Xv, Yv), alpha,
                                  fallback_plan or PermutationPlan())
        result.meta.update({"test": "block", "b": b, "blocks": 1,
                            "elapsed_ns": time.perf_counter_ns() - t0})
        return result
    nblocks = n // b
    if nblocks < 2:
        raise InvalidInputError(
            f"block size {b} leaves fewer than 2 complete blocks of {n} pairs; "
            "Gaussian calibration is invalid (use b == n for the full statistic)")
    per_block = np.empty(nblocks)
    for t in range(nblocks):
        sl = slice(t * b, (t + 1) * b)
        per_block[t] = mmd_u_statistic(gram_matrix(spec, Xv[sl], Yv[sl]))
    stat = _studentized_mean(per_block, ddof=1)
    z = normal_quantile(1.0 - alpha)
    return TestResult(
        statistic=stat,
        reject=bool(stat >= z),
        threshold=z,
        meta={
            "test": "block",
            "calibration": "gaussian",
            "b": b,
            "blocks": nblocks,
            "per_block": per_block.tolist(),
            "variance_convention": "unbiased per-block U-statistic; ddof=1 across blocks",
            "alpha": alpha,
            "n": n,
            "m": m,
            "elapsed_ns": time.perf_counter_ns() - t0,
        },
    )


def linear_mmd_test(X, Y, spec: KernelSpec, alpha: float) -> TestResult:
    """Linear-time MMD: h over disjoint consecutive quadruples.

    Term t is h(X_{2t}, X_{2t+1}, Y_{2t}, Y_{2t+1}); the statistic is the
    studentized mean of the floor(n/2) terms. O(n) kernel evaluations.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"level must lie in (0,1), got {alpha}")
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    n, m = Xv.shape[0], Yv.shape[0]
    if n != m or n < 4:
        raise InvalidInputError(f"linear MMD requires n == m >= 4, got {n}, {m}")
    t0 = time.perf_counter_ns()
    half = n // 2
    x1, x2 = Xv[0:2 * half:2], Xv[1:2 * half:2]
    y1, y2 = Yv[0:2 * half:2], Yv[1:2 * half:2]
    terms = (eval_kernel_rowwise(spec, x1, x2)
             - eval_kernel_rowwise(spec, x1, y2)
             - eval_kernel_rowwise(spec, y1, x2)
             + eval_kernel_rowwise(spec, y1, y2))
    stat = _studentized_mean(terms, ddof=1)
    z = normal_quantile(1.0 - alpha)
    return TestResult(
        statistic=stat,
        reject=bool(stat >= z),
        threshold=z,
        meta={
            "test": "linear",
            "calibration": "gaussian",
            "terms": half,
            "alpha": alpha,
            "n": n,
            "m": m,
            "elapsed_ns": time.perf_counter_ns() - t0,
        },
    )
