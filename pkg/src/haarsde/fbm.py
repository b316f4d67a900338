"""Exact fractional Brownian motion on a finite grid via Cholesky factors.

Paths can be refined by inserting midpoints while keeping every
previously generated value fixed (block-Cholesky conditioning).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, solve_triangular

logger = logging.getLogger(__name__)

JITTER_START = 1e-12
JITTER_ESCALATIONS = 3


class FactorizationError(np.linalg.LinAlgError):
    def __init__(self, pivot: int, jitter: float):
        self.pivot = pivot
        self.jitter = jitter
        super().__init__(
            f"matrix not positive definite at pivot {pivot} (last jitter {jitter:.3g})"
        )


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_hurst(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise ValueError(f"Hurst index must lie in (0, 1), got {H}")


def fbm_covariance(x, y, H: float):
    """``E[B(x) B(y)] = (x^2H + y^2H - |x - y|^2H) / 2``; broadcasts over arrays."""
    _check_hurst(H)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("fBm covariance is defined for non-negative arguments")
    # one ufunc call for all three powers so equal bases give equal results
    px, py, pd = np.power(np.stack(np.broadcast_arrays(x, y, np.abs(x - y))), 2.0 * H)
    cov = 0.5 * (px + py - pd)
    return float(cov) if cov.ndim == 0 else cov


def covariance_matrix(points, H: float, other=None) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    other = points if other is None else np.asarray(other, dtype=float)
    return fbm_covariance(points[:, None], other[None, :], H)


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    lower: np.ndarray = field(repr=False)
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lower", _frozen(self.lower))

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    def residual(self, matrix) -> float:
        """Relative Frobenius error of ``L L^T`` against ``matrix``."""
        matrix = np.asarray(matrix, dtype=float)
        return float(
            np.linalg.norm(self.lower @ self.lower.T - matrix) / np.linalg.norm(matrix)
        )


def cholesky_factor(matrix) -> CholeskyFactor:
    """Lower Cholesky factor, adding diagonal jitter if a pivot fails.

    Jitter starts at ``1e-12 * max(diag)`` and grows tenfold, at most three
    times, before giving up.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise ValueError("matrix is not symmetric")
    if a.shape[0] == 0:
        return CholeskyFactor(a)

    scale = float(np.max(np.abs(np.diag(a))))
    jitters = [0.0] + [JITTER_START * 10.0**k * scale for k in range(JITTER_ESCALATIONS + 1)]
    pivot = -1
    for jitter in jitters:
        if jitter > 0:
            logger.warning(
                "Cholesky pivot %d failed; retrying with diagonal jitter %.3g", pivot, jitter
            )
        c, info = lapack.dpotrf(a + jitter * np.eye(a.shape[0]), lower=1, clean=1)
        if info == 0:
            return CholeskyFactor(c, jitter)
        if info < 0:
            raise ValueError(f"illegal argument {-info} passed to dpotrf")
        pivot = int(info) - 1
    raise FactorizationError(pivot, jitter)


@dataclass(frozen=True, eq=False)
class FbmPath:
    """fBm values on ``grid`` (B(0) = 0 is implicit and not stored).

    ``gaussians`` is the standard normal vector G with ``values = M @ G``,
    ``M`` the Cholesky factor of the grid covariance; refinement needs it.
    """

    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    hurst: float
    gaussians: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_hurst(self.hurst)
        for name in ("grid", "values", "gaussians"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.grid.shape[0]
        if self.values.shape != (n,) or self.gaussians.shape != (n,):
            raise ValueError("grid, values and gaussians must have the same length")
        check_grid(self.grid)

    def __len__(self) -> int:
        return self.grid.shape[0]

    def with_origin(self) -> np.ndarray:
        """Values including ``B(0) = 0`` in front."""
        return np.concatenate([[0.0], self.values])


def check_grid(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 1 or points.shape[0] == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if points[0] <= 0.0 or points[-1] > 1.0:
        raise ValueError("grid points must lie in (0, 1]")
    if np.any(np.diff(points) <= 0.0):
        raise ValueError("grid points must be strictly increasing")
    return points


def dyadic_grid(n: int) -> np.ndarray:
    if n < 1 or n & (n - 1):
        raise ValueError(f"number of points must be a power of two, got {n}")
    return np.arange(1, n + 1) / n


def sample_fbm(grid, H: float, rng: np.random.Generator) -> FbmPath:
    points = check_grid(grid)
    _check_hurst(H)
    factor = cholesky_factor(covariance_matrix(points, H))
    g = rng.standard_normal(points.shape[0])
    return FbmPath(points, factor.lower @ g, H, g)


def refine_fbm(path: FbmPath, rng: np.random.Generator) -> FbmPath:
    """Insert the midpoint of every grid interval, keeping old values fixed.

    With ``[[C, A], [A^T, C~]]`` the covariance of (old, new) points and
    ``[[M, 0], [N, P]]`` its block Cholesky factor, the new values are
    ``N G + P G~`` for fresh normals ``G~``.
    """
    n = len(path)
    if n & (n - 1) or not np.array_equal(path.grid, dyadic_grid(n)):
        raise ValueError("refine_fbm needs the dyadic grid {k/n : k = 1..n}, n a power of two")
    H = path.hurst
    old = path.grid
    new = (2 * np.arange(1, n + 1) - 1) / (2 * n)

    M = cholesky_factor(covariance_matrix(old, H)).lower
    A = covariance_matrix(old, H, new)
    N = solve_triangular(M, A, lower=True).T
    schur = covariance_matrix(new, H) - N @ N.T
    P = cholesky_factor(0.5 * (schur + schur.T)).lower

    g_new = rng.standard_normal(n)
    mid_values = N @ path.gaussians + P @ g_new

    grid = np.empty(2 * n)
    grid[0::2] = new
    grid[1::2] = old
    values = np.empty(2 * n)
    values[0::2] = mid_values
    values[1::2] = path.values

    # G for the refined grid in its sorted order: whiten against its own factor.
    L = cholesky_factor(covariance_matrix(grid, H)).lower
    gaussians = solve_triangular(L, values, lower=True)
    return FbmPath(grid, values, H, gaussians)
