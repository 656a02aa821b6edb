"""Pure-numpy fallback for the hot loops (no numba required).

Index shuffles reuse the python splitmix64 reference from ``crossmmd._rng``
so permutations are bit-identical to the numba backend; floating-point sums
may differ from it at rounding level only.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .._rng import mix64, shuffled_indices

GAUSSIAN, LAPLACE, POLYNOMIAL = 0, 1, 2

_BLOCK = 512


def sqdist_matrix(Z):
    """Full symmetric matrix of squared Euclidean distances, zero diagonal."""
    return squareform(pdist(Z, "sqeuclidean"))


def sqdist_condensed(Z):
    """Squared distances of the N*(N-1)/2 unordered pairs, row-major order."""
    return pdist(Z, "sqeuclidean")


def sqdist_both(Z):
    """(condensed, full matrix) from one distance pass."""
    cond = pdist(Z, "sqeuclidean")
    return cond, squareform(cond)


def gram_dist_kernel(Z, scale, laplace):
    """Pooled gaussian/laplace gram over [X; Y]."""
    return gram_from_sqdist(squareform(pdist(Z, "sqeuclidean")), scale, laplace)


def gram_from_sqdist(D, scale, laplace):
    """Gaussian/laplace gram from a precomputed squared-distance matrix."""
    if laplace:
        return np.exp(-scale * np.sqrt(D))
    return np.exp(-scale * D)


def _kblock(A, B, family, scale, degree):
    if family == POLYNOMIAL:
        return (1.0 + scale * (A @ B.T)) ** degree
    D = cdist(A, B, "sqeuclidean")
    if family == LAPLACE:
        return np.exp(-scale * np.sqrt(D))
    return np.exp(-scale * D)


def mmd_direct(X, Y, family, scale, degree):
    """Unbiased squared-MMD U-statistic, row-blocked so the pooled gram is
    never materialized."""
    n, m = X.shape[0], Y.shape[0]
    sxx = 0.0
    for i0 in range(0, n, _BLOCK):
        rows = X[i0:i0 + _BLOCK]
        for i, row in enumerate(rows):
            gi = i0 + i
            if gi + 1 < n:
                sxx += _kblock(row[None, :], X[gi + 1:], family, scale, degree).sum()
    syy = 0.0
    for j0 in range(0, m, _BLOCK):
        rows = Y[j0:j0 + _BLOCK]
        for j, row in enumerate(rows):
            gj = j0 + j
            if gj + 1 < m:
                syy += _kblock(row[None, :], Y[gj + 1:], family, scale, degree).sum()
    sxy = 0.0
    for i0 in range(0, n, _BLOCK):
        sxy += _kblock(X[i0:i0 + _BLOCK], Y, family, scale, degree).sum()
    return (2.0 * sxx / (n * (n - 1.0))
            + 2.0 * syy / (m * (m - 1.0))
            - 2.0 * sxy / (n * m))


def mmd_contiguous(K, n, m):
    """Unbiased MMD U-statistic of a pooled gram laid out as [X; Y]."""
    xx = K[:n, :n]
    yy = K[n:, n:]
    sxx = (xx.sum() - np.trace(xx)) / 2.0
    syy = (yy.sum() - np.trace(yy)) / 2.0
    sxy = K[:n, n:].sum()
    return (2.0 * sxx / (n * (n - 1.0))
            + 2.0 * syy / (m * (m - 1.0))
            - 2.0 * sxy / (n * m))


def mmd_from_labels(K, labels, n, m):
    """Unbiased MMD U-statistic of a relabeling of the pooled gram."""
    Kp = K[np.ix_(labels, labels)]
    return mmd_contiguous(Kp, n, m)


def perm_mmd_stats(K, n, m, B, seed):
    """B permuted MMD statistics from seeded Fisher-Yates index shuffles."""
    N = n + m
    seed = int(seed)
    stats = np.empty(B)
    for b in range(B):
        idx = np.asarray(shuffled_indices(N, mix64(seed, b)), dtype=np.int64)
        stats[b] = mmd_from_labels(K, idx, n, m)
    return stats
