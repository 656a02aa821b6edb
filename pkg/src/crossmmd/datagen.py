"""Seeded synthetic data sources for the Monte Carlo studies.

Two families:

* ``gaussian-shift`` (GMD): P = N(0, I_d), Q = N(a, I_d) where a has its
  first j coordinates equal to eps and the rest 0.
* ``dirichlet``: P = Dirichlet(base * 1), Q = Dirichlet(base * (1+eps) * 1).

All draws come from numpy's counter-based Philox4x64 generator keyed by
(seed, stream); the same (seed, stream) always reproduces the same matrix,
and distinct streams are independent, so trials can be scheduled in any
order. Normal variates use numpy's ziggurat; Dirichlet rows are normalized
standard-gamma draws (numpy's Marsaglia-Tsang sampler, including the
shape < 1 boost).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

RNG_ALGORITHM = "philox4x64"

GAUSSIAN_SHIFT = "gaussian-shift"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class SourceSpec:
    """One P/Q pair; eps == 0 is the null configuration (P == Q)."""

    family: str
    d: int
    eps: float = 0.0
    j: int = 1
    base: float = 1.0

    def __post_init__(self):
        if self.family not in (GAUSSIAN_SHIFT, DIRICHLET):
            raise InvalidInputError(f"unknown source family {self.family!r}")
        if self.d < 1:
            raise InvalidInputError("dimension must be >= 1")
        if self.eps < 0:
            raise InvalidInputError("perturbation eps must be >= 0")
        if self.family == GAUSSIAN_SHIFT and not (1 <= self.j <= self.d):
            raise InvalidInputError(f"perturbed-coordinate count j={self.j} out of [1, d={self.d}]")
        if self.family == DIRICHLET and self.base <= 0:
            raise InvalidInputError("dirichlet base parameter must be positive")

    @property
    def is_null(self) -> bool:
        return self.eps == 0.0

    def describe(self) -> dict:
        d = {"family": self.family, "d": self.d, "eps": self.eps}
        if self.family == GAUSSIAN_SHIFT:
            d["j"] = self.j
        else:
            d["base"] = self.base
        return d


@dataclass(frozen=True)
class RngState:
    """(seed, stream) key of a Philox4x64 generator."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & (2**64 - 1), self.stream & (2**64 - 1)],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def shift_vector(d: int, j: int, eps: float) -> np.ndarray:
    """The d-vector with first j coordinates eps and the rest 0."""
    if not (1 <= j <= d):
        raise InvalidInputError(f"j={j} out of [1, d={d}]")
    a = np.zeros(d)
    a[:j] = eps
    return a


def sample(source: SourceSpec, which: str, n: int, rng: RngState) -> np.ndarray:
    """n i.i.d. rows from P (``which='P'``) or Q (``which='Q'``)."""
    if which not in ("P", "Q"):
        raise InvalidInputError(f"which must be 'P' or 'Q', got {which!r}")
    if n < 1:
        raise InvalidInputError("sample size must be >= 1")
    g = rng.generator()
    if source.family == GAUSSIAN_SHIFT:
        out = g.standard_normal((n, source.d))
        if which == "Q" and source.eps != 0.0:
            out += shift_vector(source.d, source.j, source.eps)
        return out
    alpha = source.base * (1.0 + source.eps) if which == "Q" else source.base
    gam = g.standard_gamma(alpha, size=(n, source.d))
    return gam / gam.sum(axis=1, keepdims=True)
