"""Positive-definite kernels, gram-matrix assembly, and bandwidth selection.

Three bounded-or-polynomial kernel families are supported:

* ``gaussian``:    k(x, y) = exp(-s * ||x - y||^2)
* ``laplace``:     k(x, y) = exp(-s * ||x - y||)
* ``polynomial``:  k(x, y) = (1 + s * <x, y>) ** degree

The quadratic kernel is ``polynomial`` with degree 2; the alternative
convention (1 + <x, y>/s)**r is reached by passing ``scale=1/s``.

Scale selection uses the median heuristic: with w the median of the
pairwise Euclidean distances over the pooled sample (distinct pairs only),
``s = 1/(2 w^2)`` for the gaussian kernel and ``s = 1/w`` for the laplace
and polynomial kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DegenerateDataError, InvalidInputError

FAMILIES = ("gaussian", "laplace", "polynomial")

_FAMILY_CODE = {
    "gaussian": _accel.GAUSSIAN,
    "laplace": _accel.LAPLACE,
    "polynomial": _accel.POLYNOMIAL,
}


@dataclass(frozen=True)
class KernelSpec:
    """Identifies one positive-definite kernel.

    ``degree`` is meaningful (and mandatory) only for the polynomial family.
    """

    family: str
    scale: float
    degree: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown kernel family {self.family!r}")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise InvalidInputError(f"kernel scale must be positive, got {self.scale}")
        if self.family == "polynomial":
            if self.degree is None or int(self.degree) < 1:
                raise InvalidInputError("polynomial kernel needs degree >= 1")
        elif self.degree is not None:
            raise InvalidInputError(f"degree is only valid for polynomial, not {self.family}")

    @property
    def family_code(self) -> int:
        return _FAMILY_CODE[self.family]

    def describe(self) -> dict:
        d = {"family": self.family, "scale": float(self.scale)}
        if self.degree is not None:
            d["degree"] = int(self.degree)
        return d


@dataclass(frozen=True)
class GramBlocks:
    """Pooled (n+m) x (n+m) kernel matrix with views into the XX/XY/YY blocks.

    ``pooled`` is exactly symmetric: each unordered pair is evaluated once.
    Rows 0..n-1 correspond to X, rows n..n+m-1 to Y.
    """

    pooled: np.ndarray
    n: int
    m: int

    @property
    def xx(self) -> np.ndarray:
        return self.pooled[: self.n, : self.n]

    @property
    def xy(self) -> np.ndarray:
        return self.pooled[: self.n, self.n:]

    @property
    def yy(self) -> np.ndarray:
        return self.pooled[self.n:, self.n:]


def as_sample(a, name: str = "sample") -> np.ndarray:
    """Validate and return an n x d float64 sample matrix (rows = observations).

    1-D input is treated as a column of scalar observations.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a nonempty n x d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(arr)


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate k(x, y) for a single pair of d-vectors."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape:
        raise InvalidInputError(f"dimension mismatch: {xv.shape} vs {yv.shape}")
    if spec.family == "polynomial":
        return float((1.0 + spec.scale * float(xv @ yv)) ** spec.degree)
    d2 = float(np.sum((xv - yv) ** 2))
    if spec.family == "laplace":
        return float(np.exp(-spec.scale * np.sqrt(d2)))
    return float(np.exp(-spec.scale * d2))


def eval_kernel_rowwise(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vector of k(A[i], B[i]) for row-aligned matrices (the linear-MMD path)."""
    if A.shape != B.shape:
        raise InvalidInputError(f"shape mismatch: {A.shape} vs {B.shape}")
    if spec.family == "polynomial":
        return (1.0 + spec.scale * np.einsum("ij,ij->i", A, B)) ** spec.degree
    d2 = np.einsum("ij,ij->i", A - B, A - B)
    if spec.family == "laplace":
        return np.exp(-spec.scale * np.sqrt(d2))
    return np.exp(-spec.scale * d2)


def _polynomial_gram(spec: KernelSpec, Z: np.ndarray) -> np.ndarray:
    G = Z @ Z.T
    G = np.triu(G) + np.triu(G, 1).T  # one value per unordered pair
    return (1.0 + spec.scale * G) ** spec.degree


def gram_matrix(spec: KernelSpec, X, Y) -> GramBlocks:
    """Assemble the pooled kernel matrix over [X; Y].

    Cost is one kernel evaluation per unordered pair, O((n+m)^2) total.
    """
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if Xv.shape[1] != Yv.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: X has d={Xv.shape[1]}, Y has d={Yv.shape[1]}")
    Z = np.ascontiguousarray(np.vstack([Xv, Yv]))
    if spec.family == "polynomial":
        K = _polynomial_gram(spec, Z)
    else:
        K = _accel.gram_dist_kernel(Z, spec.scale, spec.family == "laplace")
    return GramBlocks(pooled=K, n=Xv.shape[0], m=Yv.shape[0])


def _scale_from_median(w: float, family: str) -> float:
    if w <= 0.0:
        raise DegenerateDataError("median pairwise distance is zero")
    if family == "gaussian":
        return 1.0 / (2.0 * w * w)
    return 1.0 / w


def _median_inplace(a: np.ndarray) -> float:
    # numpy's median convention (average of the two middle order statistics
    # for even counts) via a single partition; destroys the order of `a`
    k = a.shape[0] // 2
    if a.shape[0] % 2:
        a.partition(k)
        return float(a[k])
    a.partition([k - 1, k])
    return float(0.5 * (a[k - 1] + a[k]))


def median_bandwidth(X, Y, family: str = "gaussian") -> float:
    """Kernel scale from the median pairwise distance of the pooled sample.

    Self-pairs are excluded; for an even pair count the median is the
    average of the two middle order statistics.
    """
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown kernel family {family!r}")
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if Xv.shape[1] != Yv.shape[1]:
        raise InvalidInputError("dimension mismatch between X and Y")
    Z = np.ascontiguousarray(np.vstack([Xv, Yv]))
    if Z.shape[0] < 2:
        raise InvalidInputError("need at least two pooled observations")
    w = _median_inplace(np.sqrt(_accel.sqdist_condensed(Z)))
    return _scale_from_median(w, family)


def median_kernel_spec(X, Y, family: str = "gaussian", degree: int = 2) -> KernelSpec:
    """KernelSpec with the median-heuristic scale for the given family."""
    s = median_bandwidth(X, Y, family)
    return KernelSpec(family, s, degree if family == "polynomial" else None)


def median_auto_gram(X, Y, family: str = "gaussian", degree: int = 2):
    """(KernelSpec, GramBlocks) with one shared distance pass.

    The pooled squared-distance matrix serves both the median heuristic and
    (for the distance-based families) the gram assembly, which matters in
    Monte Carlo loops that re-select the bandwidth every trial.
    """
    Xv = as_sample(X, "X")
    Yv = as_sample(Y, "Y")
    if Xv.shape[1] != Yv.shape[1]:
        raise InvalidInputError("dimension mismatch between X and Y")
    Z = np.ascontiguousarray(np.vstack([Xv, Yv]))
    if Z.shape[0] < 2:
        raise InvalidInputError("need at least two pooled observations")
    if family == "polynomial":
        w = _median_inplace(np.sqrt(_accel.sqdist_condensed(Z)))
        spec = KernelSpec(family, _scale_from_median(w, family), degree)
        K = _polynomial_gram(spec, Z)
    else:
        cond, D = _accel.sqdist_both(Z)
        w = _median_inplace(np.sqrt(cond))
        spec = KernelSpec(family, _scale_from_median(w, family))
        K = _accel.gram_from_sqdist(D, spec.scale, family == "laplace")
    return spec, GramBlocks(pooled=K, n=Xv.shape[0], m=Yv.shape[0])
