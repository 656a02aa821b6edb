"""The cross-MMD statistic: sample splitting plus studentization.

X is split into X1 (first n1 rows) and X2, Y into Y1 and Y2. The statistic
is the RKHS inner product of the two independent empirical differences,

    xmmd2 = < mu1 - nu1, mu2 - nu2 >,

which is a sum of terms that are i.i.d. conditional on the second splits.
Writing

    ux[i] = mean_j k(X1_i, X2_j) - mean_j k(X1_i, Y2_j)      (i <= n1)
    uy[j] = mean_i k(Y1_j, X2_i) - mean_i k(Y1_j, Y2_i)      (j <= m1)

gives xmmd2 = mean(ux) - mean(uy), and the studentizer

    sigma^2 = var(ux)/n1 + var(uy)/m1        (divisor-n1 / divisor-m1 variances)

yields t = xmmd2 / sigma, which is asymptotically N(0, 1) under the null.
The test rejects when t >= z_{1-alpha}; no permutations are needed. Both
xmmd2 and sigma cost O((n+m)^2) total.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .baselines import TestResult
from .calibration import normal_quantile
from .errors import InvalidInputError
from .kernels import GramBlocks, KernelSpec, as_sample, gram_matrix
from ._rng import shuffled_indices


@dataclass(frozen=True)
class SplitPlan:
    """Sizes of the four splits, plus an optional seeded row pre-shuffle.

    The default balanced plan puts floor(n/2) rows in the first split
    (the extra row of an odd sample lands in the second split).
    """

    n1: int
    n2: int
    m1: int
    m2: int
    shuffle_seed: int | None = None

    def __post_init__(self):
        if min(self.n1, self.n2, self.m1, self.m2) < 1:
            raise InvalidInputError(f"all split sizes must be >= 1, got {self}")

    @classmethod
    def balanced(cls, n: int, m: int, shuffle_seed: int | None = None) -> "SplitPlan":
        if n < 2 or m < 2:
            raise InvalidInputError(f"need n, m >= 2 to split, got n={n}, m={m}")
        return cls(n1=n // 2, n2=n - n // 2, m1=m // 2, m2=m - m // 2,
                   shuffle_seed=shuffle_seed)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def m(self) -> int:
        return self.m1 + self.m2


@dataclass(frozen=True)
class CrossMmdResult:
    """Cross-MMD statistic with its studentizer and per-point projections."""

    xmmd2: float
    sigma_x2: float
    sigma_y2: float
    sigma: float
    t: float
    ux: np.ndarray
    uy: np.ndarray
    split: SplitPlan


def split_samples(X, Y, plan: SplitPlan):
    """Partition X and Y into (X1, X2, Y1, Y2) according to the plan.

    Without a shuffle seed the split is the deterministic first-n1 /
    first-m1 cut; with one, rows are first permuted by a seeded shuffle.
    No row is dropped or duplicated.
    """
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if Xv.shape[0] != plan.n or Yv.shape[0] != plan.m:
        raise InvalidInputError(
            f"plan expects n={plan.n}, m={plan.m}; data has n={Xv.shape[0]}, m={Yv.shape[0]}")
    if plan.shuffle_seed is not None:
        Xv = Xv[shuffled_indices(plan.n, plan.shuffle_seed)]
        Yv = Yv[shuffled_indices(plan.m, plan.shuffle_seed ^ 0x5DEECE66D)]
    return Xv[: plan.n1], Xv[plan.n1:], Yv[: plan.m1], Yv[plan.m1:]


def _check_plan(gram: GramBlocks, plan: SplitPlan):
    if plan.n != gram.n or plan.m != gram.m:
        raise InvalidInputError(
            f"plan ({plan.n}, {plan.m}) does not match gram ({gram.n}, {gram.m})")


def cross_mmd_statistic(gram: GramBlocks, plan: SplitPlan) -> float:
    """xmmd2 via the four block averages of the pooled gram.

    The gram must be assembled over [X1; X2; Y1; Y2] order, i.e. over X and
    Y as returned by :func:`split_samples`.
    """
    _check_plan(gram, plan)
    n, n1 = gram.n, plan.n1
    m1 = plan.m1
    K = gram.pooled
    x1 = slice(0, n1)
    x2 = slice(n1, n)
    y1 = slice(n, n + m1)
    y2 = slice(n + m1, n + gram.m)
    return float(K[x1, x2].mean() + K[y1, y2].mean()
                 - K[x1, y2].mean() - K[y1, x2].mean())


def studentize(gram: GramBlocks, plan: SplitPlan) -> CrossMmdResult:
    """Cross-MMD statistic, variance components, and studentized value.

    Degenerate rule: when sigma == 0, t is 0 for xmmd2 == 0 and signed
    infinity otherwise.
    """
    _check_plan(gram, plan)
    if plan.n1 < 2 or plan.m1 < 2:
        raise InvalidInputError(
            f"studentization needs n1, m1 >= 2, got n1={plan.n1}, m1={plan.m1}")
    n, n1 = gram.n, plan.n1
    m1 = plan.m1
    K = gram.pooled
    x1 = slice(0, n1)
    x2 = slice(n1, n)
    y1 = slice(n, n + m1)
    y2 = slice(n + m1, n + gram.m)
    ux = K[x1, x2].mean(axis=1) - K[x1, y2].mean(axis=1)
    uy = K[y1, x2].mean(axis=1) - K[y1, y2].mean(axis=1)
    xmmd2 = float(ux.mean() - uy.mean())
    sigma_x2 = float(np.mean((ux - ux.mean()) ** 2))
    sigma_y2 = float(np.mean((uy - uy.mean()) ** 2))
    sigma = float(np.sqrt(sigma_x2 / n1 + sigma_y2 / m1))
    if sigma > 0.0:
        t = xmmd2 / sigma
    elif xmmd2 == 0.0:
        t = 0.0
    else:
        t = float(np.inf) if xmmd2 > 0 else float(-np.inf)
    return CrossMmdResult(xmmd2=xmmd2, sigma_x2=sigma_x2, sigma_y2=sigma_y2,
                          sigma=sigma, t=t, ux=ux, uy=uy, split=plan)


def xmmd_test_from_gram(gram: GramBlocks, plan: SplitPlan, alpha: float) -> TestResult:
    """One-sided cross-MMD test on a gram already in split order."""
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"level must lie in (0,1), got {alpha}")
    t0 = time.perf_counter_ns()
    res = studentize(gram, plan)
    z = normal_quantile(1.0 - alpha)
    return TestResult(
        statistic=res.t,
        reject=bool(res.t >= z),
        threshold=z,
        meta={
            "test": "xmmd",
            "calibration": "gaussian",
            "alpha": alpha,
            "n": gram.n,
            "m": gram.m,
            "split": {"n1": plan.n1, "m1": plan.m1},
            "shuffle_seed": plan.shuffle_seed,
            "xmmd2": res.xmmd2,
            "sigma": res.sigma,
            "elapsed_ns": time.perf_counter_ns() - t0,
        },
    )


def xmmd_test(X, Y, spec: KernelSpec, alpha: float,
              plan: SplitPlan | None = None) -> TestResult:
    """Permutation-free two-sample test: reject iff t >= z_{1-alpha}."""
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if plan is None:
        plan = SplitPlan.balanced(Xv.shape[0], Yv.shape[0])
    t0 = time.perf_counter_ns()
    X1, X2, Y1, Y2 = split_samples(Xv, Yv, plan)
    gram = gram_matrix(spec, np.vstack([X1, X2]), np.vstack([Y1, Y2]))
    result = xmmd_test_from_gram(gram, plan, alpha)
    result.meta["kernel"] = spec.describe()
    result.meta["elapsed_ns"] = time.perf_counter_ns() - t0
    return result
