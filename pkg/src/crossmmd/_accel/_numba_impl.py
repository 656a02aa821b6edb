"""numba implementations of the quadratic-time inner loops.

Each function here has a pure-numpy twin in ``_numpy_impl`` with the same
signature; agreement between the two backends is asserted in the tests.
Kernels are compiled single-threaded on purpose: results must not depend
on thread count, and the loops are memory-bound enough that this is cheap.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)

GAUSSIAN, LAPLACE, POLYNOMIAL = 0, 1, 2


@njit(cache=True)
def _sm64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True)
def _mix64(seed, index):
    return _sm64(seed + (index + U64(1)) * _GOLDEN)


@njit(cache=True)
def _mirror_upper(D):
    # blocked transpose-copy: upper triangle into the lower, cache-friendly
    N = D.shape[0]
    blk = 128
    for i0 in range(0, N, blk):
        i1 = min(i0 + blk, N)
        for j0 in range(i0, N, blk):
            j1 = min(j0 + blk, N)
            for i in range(i0, i1):
                for j in range(max(j0, i + 1), j1):
                    D[j, i] = D[i, j]


@njit(cache=True)
def sqdist_matrix(Z):
    """Full symmetric matrix of squared Euclidean distances, zero diagonal.

    Each unordered pair is evaluated once (row-blocked upper triangle) and
    mirrored, so the output is bit-exactly symmetric.
    """
    N, d = Z.shape
    D = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            acc = 0.0
            for k in range(d):
                diff = Z[i, k] - Z[j, k]
                acc += diff * diff
            D[i, j] = acc
    _mirror_upper(D)
    return D


@njit(cache=True)
def sqdist_condensed(Z):
    """Squared distances of the N*(N-1)/2 unordered pairs, row-major order."""
    N, d = Z.shape
    out = np.empty(N * (N - 1) // 2)
    pos = 0
    for i in range(N):
        for j in range(i + 1, N):
            acc = 0.0
            for k in range(d):
                diff = Z[i, k] - Z[j, k]
                acc += diff * diff
            out[pos] = acc
            pos += 1
    return out


@njit(cache=True)
def sqdist_both(Z):
    """(condensed, full matrix) from one distance pass.

    The condensed vector feeds the median heuristic while the matrix feeds
    the gram assembly, so median-auto trials pay for distances once.
    """
    N, d = Z.shape
    D = np.zeros((N, N))
    cond = np.empty(N * (N - 1) // 2)
    pos = 0
    for i in range(N):
        for j in range(i + 1, N):
            acc = 0.0
            for k in range(d):
                diff = Z[i, k] - Z[j, k]
                acc += diff * diff
            cond[pos] = acc
            pos += 1
            D[i, j] = acc
    _mirror_upper(D)
    return cond, D


@njit(cache=True)
def gram_dist_kernel(Z, scale, laplace):
    """Pooled gaussian/laplace gram in one fused distance+exp triangle pass."""
    N, d = Z.shape
    K = np.empty((N, N))
    for i in range(N):
        K[i, i] = 1.0
        for j in range(i + 1, N):
            acc = 0.0
            for k in range(d):
                diff = Z[i, k] - Z[j, k]
                acc += diff * diff
            if laplace:
                acc = np.sqrt(acc)
            K[i, j] = np.exp(-scale * acc)
    _mirror_upper(K)
    return K


@njit(cache=True)
def gram_from_sqdist(D, scale, laplace):
    """Gaussian/laplace gram from a precomputed squared-distance matrix."""
    N = D.shape[0]
    K = np.empty((N, N))
    for i in range(N):
        K[i, i] = 1.0
        for j in range(i + 1, N):
            acc = D[i, j]
            if laplace:
                acc = np.sqrt(acc)
            K[i, j] = np.exp(-scale * acc)
    _mirror_upper(K)
    return K


@njit(cache=True)
def _kval(a, b, family, scale, degree):
    if family == POLYNOMIAL:
        dot = 0.0
        for k in range(a.shape[0]):
            dot += a[k] * b[k]
        return (1.0 + scale * dot) ** degree
    acc = 0.0
    for k in range(a.shape[0]):
        diff = a[k] - b[k]
        acc += diff * diff
    if family == LAPLACE:
        return np.exp(-scale * np.sqrt(acc))
    return np.exp(-scale * acc)


@njit(cache=True)
def mmd_direct(X, Y, family, scale, degree):
    """Unbiased squared-MMD U-statistic without materializing the gram.

    O(1) memory; used for large reference samples where the pooled gram
    would not fit.
    """
    n = X.shape[0]
    m = Y.shape[0]
    sxx = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            sxx += _kval(X[i], X[j], family, scale, degree)
    syy = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            syy += _kval(Y[i], Y[j], family, scale, degree)
    sxy = 0.0
    for i in range(n):
        for j in range(m):
            sxy += _kval(X[i], Y[j], family, scale, degree)
    return (2.0 * sxx / (n * (n - 1.0))
            + 2.0 * syy / (m * (m - 1.0))
            - 2.0 * sxy / (n * m))


@njit(cache=True)
def mmd_contiguous(K, n, m):
    """Unbiased MMD U-statistic of a pooled gram laid out as [X; Y]."""
    sxx = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            sxx += K[p, q]
    syy = 0.0
    for p in range(n, n + m):
        for q in range(p + 1, n + m):
            syy += K[p, q]
    sxy = 0.0
    for p in range(n):
        for q in range(n, n + m):
            sxy += K[p, q]
    return (2.0 * sxx / (n * (n - 1.0))
            + 2.0 * syy / (m * (m - 1.0))
            - 2.0 * sxy / (n * m))


@njit(cache=True)
def _permute_into(K, labels, out):
    N = labels.shape[0]
    for p in range(N):
        row = K[labels[p]]
        for q in range(N):
            out[p, q] = row[labels[q]]


@njit(cache=True)
def mmd_from_labels(K, labels, n, m):
    """Unbiased MMD U-statistic of a relabeling of the pooled gram.

    ``labels[:n]`` are the pooled indices assigned to the first sample,
    ``labels[n:]`` to the second. The relabeled gram is materialized and
    summed by the same contiguous routine as the observed statistic.
    """
    N = n + m
    Kp = np.empty((N, N))
    _permute_into(K, labels, Kp)
    return mmd_contiguous(Kp, n, m)


@njit(cache=True)
def perm_mmd_stats(K, n, m, B, seed):
    """B permuted MMD statistics from seeded Fisher-Yates index shuffles.

    Permutation b draws its splitmix64 stream from (seed, b), so the output
    does not depend on evaluation order. Each draw rebuilds the permuted
    gram (label relabeling only, no kernel re-evaluation): B * O((n+m)^2).
    """
    N = n + m
    stats = np.empty(B)
    idx = np.empty(N, dtype=np.int64)
    Kp = np.empty((N, N))
    for b in range(B):
        state = _mix64(U64(seed), U64(b))
        for i in range(N):
            idx[i] = i
        for i in range(N - 1, 0, -1):
            state = state + _GOLDEN
            r = _sm64(state)
            j = np.int64(r % U64(i + 1))
            tmp = idx[i]
            idx[i] = idx[j]
            idx[j] = tmp
        _permute_into(K, idx, Kp)
        stats[b] = mmd_contiguous(Kp, n, m)
    return stats
