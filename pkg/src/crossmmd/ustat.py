"""General degenerate two-sample cross U-statistics.

Any four-argument degenerate core h(x, x', y, y') fits the same recipe as
the MMD: average h over the second splits to get

    phi[i, j] = mean_{i', j'} h(X1_i, X2_{i'}, Y1_j, Y2_{j'}),

take the grand mean as the statistic, and studentize with the empirical
variances of phi's row means and column means. The exact partial
expectations that appear in the theory are unknowable for a user-supplied
h; the row/column means differ from them only by an additive constant in
the MMD case, which cancels inside the centered variances, so this path
reproduces the cross-MMD studentizer exactly there.

This is an oracle/extension facility: phi costs O(n1 m1 n2 m2) evaluations
of h. The fast quadratic path for the MMD lives in :mod:`crossmmd.cross`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cross import CrossMmdResult, SplitPlan, split_samples
from .errors import InvalidInputError
from .kernels import KernelSpec, as_sample, eval_kernel


@dataclass(frozen=True)
class DegenerateKernel:
    """A four-point core h(x1, x2, y1, y2) -> real.

    Degeneracy (both one-point conditional means vanish under the null) is
    the caller's contract; it cannot be checked pointwise.
    """

    h: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], float]
    name: str


@dataclass(frozen=True)
class PhiMatrix:
    """phi values over (first X split) x (first Y split)."""

    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 2 or not np.all(np.isfinite(self.values)):
            raise InvalidInputError("phi matrix must be 2-D with finite entries")


def mmd_kernel(spec: KernelSpec) -> DegenerateKernel:
    """The MMD core h = k(x,x') - k(x,y') - k(y,x') + k(y,y') for a kernel."""
    def h(x1, x2, y1, y2):
        return (eval_kernel(spec, x1, x2) - eval_kernel(spec, x1, y2)
                - eval_kernel(spec, y1, x2) + eval_kernel(spec, y1, y2))
    return DegenerateKernel(h=h, name=f"mmd-{spec.family}")


def phi_matrix(kern: DegenerateKernel, X1, X2, Y1, Y2) -> PhiMatrix:
    """Average h over the second splits for every (X1_i, Y1_j) pair."""
    X1, X2, Y1, Y2 = (as_sample(a, name)
                      for a, name in ((X1, "X1"), (X2, "X2"), (Y1, "Y1"), (Y2, "Y2")))
    n1, n2 = X1.shape[0], X2.shape[0]
    m1, m2 = Y1.shape[0], Y2.shape[0]
    values = np.zeros((n1, m1))
    for i in range(n1):
        for j in range(m1):
            acc = 0.0
            for i2 in range(n2):
                for j2 in range(m2):
                    acc += kern.h(X1[i], X2[i2], Y1[j], Y2[j2])
            values[i, j] = acc / (n2 * m2)
    return PhiMatrix(values=values)


def general_cross_t(kern: DegenerateKernel, X, Y, plan: SplitPlan) -> CrossMmdResult:
    """Studentized cross U-statistic T = U / sigma for an arbitrary core."""
    if plan.n1 < 2 or plan.m1 < 2:
        raise InvalidInputError(
            f"studentization needs n1, m1 >= 2, got n1={plan.n1}, m1={plan.m1}")
    X1, X2, Y1, Y2 = split_samples(X, Y, plan)
    phi = phi_matrix(kern, X1, X2, Y1, Y2).values
    u_bar = float(phi.mean())
    row_means = phi.mean(axis=1)
    col_means = phi.mean(axis=0)
    sigma_x2 = float(np.mean((row_means - row_means.mean()) ** 2))
    sigma_y2 = float(np.mean((col_means - col_means.mean()) ** 2))
    sigma = float(np.sqrt(sigma_x2 / plan.n1 + sigma_y2 / plan.m1))
    if sigma > 0.0:
        t = u_bar / sigma
    elif u_bar == 0.0:
        t = 0.0
    else:
        t = float(np.inf) if u_bar > 0 else float(-np.inf)
    return CrossMmdResult(xmmd2=u_bar, sigma_x2=sigma_x2, sigma_y2=sigma_y2,
                          sigma=sigma, t=t, ux=row_means, uy=col_means, split=plan)
