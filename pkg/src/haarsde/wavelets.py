"""Haar and Faber systems on the unit interval.

Coefficients are stored flat, ordered by level then translation, so that
``(j, m)`` lives at position ``2**j - 1 + m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when an input sequence has the wrong length."""


@dataclass(frozen=True)
class DyadicIndex:
    j: int
    m: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError(f"level must be non-negative, got j={self.j}")
        if not 0 <= self.m < 2**self.j:
            raise ValueError(
                f"translation m={self.m} outside [0, {2**self.j - 1}] for level {self.j}"
            )

    @property
    def flat(self) -> int:
        return 2**self.j - 1 + self.m


def n_coefficients(level: int) -> int:
    """Number of dyadic coefficients for levels ``0..level``."""
    return 2 ** (level + 1) - 1


def n_samples(level: int) -> int:
    """Number of grid values ``g(k / 2**(level+1))`` needed for ``level``."""
    return 2 ** (level + 1) + 1


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _dyadic_indices(level: int) -> Iterator[DyadicIndex]:
    for j in range(level + 1):
        for m in range(2**j):
            yield DyadicIndex(j, m)


@dataclass(frozen=True, eq=False)
class HaarExpansion:
    """Truncated series ``mu0 * h0 + sum_{j<=level, m} coeffs[j, m] * h_{j,m}``."""

    level: int
    mu0: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"level must be non-negative, got {self.level}")
        object.__setattr__(self, "mu0", float(self.mu0))
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        expected = n_coefficients(self.level)
        if self.coeffs.shape != (expected,):
            raise DimensionError(
                f"level {self.level} needs {expected} coefficients, got {self.coeffs.shape}"
            )

    def __getitem__(self, idx: DyadicIndex | tuple[int, int]) -> float:
        if not isinstance(idx, DyadicIndex):
            idx = DyadicIndex(*idx)
        if idx.j > self.level:
            raise KeyError(idx)
        return float(self.coeffs[idx.flat])

    def level_coeffs(self, j: int) -> np.ndarray:
        return self.coeffs[2**j - 1 : 2 ** (j + 1) - 1]

    def items(self) -> Iterator[tuple[DyadicIndex, float]]:
        for idx in _dyadic_indices(self.level):
            yield idx, float(self.coeffs[idx.flat])

    def __eq__(self, other):
        if not isinstance(other, HaarExpansion):
            return NotImplemented
        return (
            self.level == other.level
            and self.mu0 == other.mu0
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __add__(self, other: HaarExpansion) -> HaarExpansion:
        if self.level != other.level:
            raise ValueError("cannot add expansions of different levels")
        return HaarExpansion(self.level, self.mu0 + other.mu0, self.coeffs + other.coeffs)

    @classmethod
    def zeros(cls, level: int) -> HaarExpansion:
        return cls(level, 0.0, np.zeros(n_coefficients(level)))


@dataclass(frozen=True, eq=False)
class FaberCoefficients:
    level: int
    mu0bar: float
    mu1bar: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mu0bar", float(self.mu0bar))
        object.__setattr__(self, "mu1bar", float(self.mu1bar))
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))
        expected = n_coefficients(self.level)
        if self.coeffs.shape != (expected,):
            raise DimensionError(
                f"level {self.level} needs {expected} coefficients, got {self.coeffs.shape}"
            )

    def __getitem__(self, idx: DyadicIndex | tuple[int, int]) -> float:
        if not isinstance(idx, DyadicIndex):
            idx = DyadicIndex(*idx)
        return float(self.coeffs[idx.flat])

    def level_coeffs(self, j: int) -> np.ndarray:
        return self.coeffs[2**j - 1 : 2 ** (j + 1) - 1]


# -- single basis functions -------------------------------------------------


def haar_eval(idx: DyadicIndex, x: float) -> float:
    """Haar wavelet ``h_{j,m}``: +1 on the left half of its support, -1 on the right."""
    scale = 2.0**idx.j
    left = idx.m / scale
    mid = (idx.m + 0.5) / scale
    right = (idx.m + 1) / scale
    if left <= x < mid:
        return 1.0
    if mid <= x < right:
        return -1.0
    return 0.0


def faber_eval(idx: DyadicIndex, x: float) -> float:
    """Hat function ``v_{j,m}`` (the scaled antiderivative of ``h_{j,m}``), peak 1."""
    scale = 2.0**idx.j
    left = idx.m / scale
    mid = (idx.m + 0.5) / scale
    right = (idx.m + 1) / scale
    if left <= x < mid:
        return 2.0 ** (idx.j + 1) * (x - left)
    if mid <= x < right:
        return 2.0 ** (idx.j + 1) * (right - x)
    return 0.0


# -- coefficients from samples ----------------------------------------------


def _check_samples(samples: Sequence[float], level: int) -> np.ndarray:
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    arr = np.asarray(samples, dtype=float)
    expected = n_samples(level)
    if arr.ndim != 1 or arr.shape[0] != expected:
        raise DimensionError(
            f"level {level} needs {expected} samples, got {arr.shape[0] if arr.ndim else 0}"
        )
    return arr


def _second_difference(samples: np.ndarray, level: int, j: int) -> np.ndarray:
    """``g((m+1)/2^j) - 2 g((m+1/2)/2^j) + g(m/2^j)`` for every m at level j.

    ``samples`` holds ``g(k / 2**(level+1))``; shared by the Haar and Faber
    paths so the two coefficient families differ by an exact power of two.
    """
    half = 2 ** (level - j)
    step = 2 * half
    left = samples[0:-1:step]
    mid = samples[half::step]
    right = samples[step::step]
    return (right - 2.0 * mid) + left


def haar_coefficients_from_samples(samples: Sequence[float], level: int) -> HaarExpansion:
    """Haar expansion of ``g'`` from values of ``g`` on the grid ``k / 2**(level+1)``."""
    g = _check_samples(samples, level)
    coeffs = np.empty(n_coefficients(level))
    for j in range(level + 1):
        coeffs[2**j - 1 : 2 ** (j + 1) - 1] = -(2.0**j) * _second_difference(g, level, j)
    return HaarExpansion(level, g[-1] - g[0], coeffs)


def faber_coefficients_from_samples(samples: Sequence[float], level: int) -> FaberCoefficients:
    g = _check_samples(samples, level)
    coeffs = np.empty(n_coefficients(level))
    for j in range(level + 1):
        coeffs[2**j - 1 : 2 ** (j + 1) - 1] = -0.5 * _second_difference(g, level, j)
    return FaberCoefficients(level, g[0], g[-1], coeffs)


def interleave(old_samples: Sequence[float], midpoints: Sequence[float]) -> np.ndarray:
    old = np.asarray(old_samples, dtype=float)
    mid = np.asarray(midpoints, dtype=float)
    if old.shape[0] != mid.shape[0] + 1:
        raise DimensionError(
            f"expected {old.shape[0] - 1} midpoints for {old.shape[0]} samples, got {mid.shape[0]}"
        )
    out = np.empty(old.shape[0] + mid.shape[0])
    out[0::2] = old
    out[1::2] = mid
    return out


def refine_expansion(
    exp: HaarExpansion,
    new_midpoint_samples: Sequence[float],
    old_samples: Sequence[float],
) -> HaarExpansion:
    """Add level ``exp.level + 1`` using only the new midpoint values.

    Existing coefficients are carried over untouched.
    """
    old = _check_samples(old_samples, exp.level)
    mid = np.asarray(new_midpoint_samples, dtype=float)
    if mid.ndim != 1 or mid.shape[0] != old.shape[0] - 1:
        raise DimensionError(
            f"expected {old.shape[0] - 1} midpoint samples, got {mid.shape[0]}"
        )
    level = exp.level + 1
    fine = interleave(old, mid)
    new_level = -(2.0**level) * _second_difference(fine, level, level)
    coeffs = np.concatenate([exp.coeffs, new_level])
    return HaarExpansion(level, exp.mu0, coeffs)


# -- series evaluation --------------------------------------------------------


def _locate(x: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Translation index and sign of the level-j Haar function covering x.

    Scaling by a power of two is exact, so the floor reproduces the
    half-open interval convention of ``haar_eval``.
    """
    k = np.floor(x * 2.0 ** (j + 1)).astype(np.int64)
    return k >> 1, np.where(k & 1, -1.0, 1.0)


def haar_sum_eval(exp: HaarExpansion, x):
    """Evaluate the truncated Haar series at x (scalar or array).

    At most one translation per level is non-zero at a given point, so the
    cost is O(level) per point.
    """
    xs = np.asarray(x, dtype=float)
    inside = (xs >= 0.0) & (xs < 1.0)
    xin = np.where(inside, xs, 0.0)
    total = np.where(inside & (xs > 0.0), exp.mu0, 0.0)
    for j in range(exp.level + 1):
        m, sign = _locate(xin, j)
        total = total + np.where(inside, sign * exp.level_coeffs(j)[m], 0.0)
    return float(total) if np.ndim(x) == 0 else total


def faber_sum_eval(fc: FaberCoefficients, x):
    """Evaluate the Faber series; equals piecewise-linear interpolation of the samples."""
    xs = np.asarray(x, dtype=float)
    if np.any((xs < 0.0) | (xs > 1.0)) or np.any(np.isnan(xs)):
        raise ValueError("Faber series is defined on [0, 1] only")
    total = fc.mu0bar * (1.0 - xs) + fc.mu1bar * xs
    xin = np.where(xs < 1.0, xs, 0.0)
    for j in range(fc.level + 1):
        scale = 2.0**j
        m, sign = _locate(xin, j)
        left = m / scale
        right = (m + 1) / scale
        hat = np.where(sign > 0, 2.0 * scale * (xin - left), 2.0 * scale * (right - xin))
        total = total + np.where(xs < 1.0, fc.level_coeffs(j)[m] * hat, 0.0)
    return float(total) if np.ndim(x) == 0 else total
