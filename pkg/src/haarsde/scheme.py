"""Euler-Maruyama for ``dX = a(X) dt + dW`` with Brownian increments shared across resolutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .wavelets import DimensionError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


@dataclass(frozen=True)
class SchemeConfig:
    steps: int
    horizon: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.steps < 1:
            raise ValueError(f"need at least one step, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.horizon / self.steps


@dataclass(frozen=True, eq=False)
class BrownianGrid:
    horizon: float
    fine_steps: int
    increments: np.ndarray = field(repr=False)

    def __post_init__(self):
        inc = np.array(self.increments, dtype=float)
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)
        if inc.shape != (self.fine_steps,):
            raise DimensionError(
                f"expected {self.fine_steps} increments, got {inc.shape[0]}"
            )


@dataclass(frozen=True, eq=False)
class SamplePath:
    times: np.ndarray
    states: np.ndarray


def sample_brownian_grid(T: float, m_fine: int, rng: np.random.Generator) -> BrownianGrid:
    if not _is_power_of_two(m_fine):
        raise ValueError(f"number of fine steps must be a power of two, got {m_fine}")
    return BrownianGrid(T, m_fine, rng.standard_normal(m_fine) * np.sqrt(T / m_fine))


def coarsen(bg: BrownianGrid | np.ndarray, m: int) -> np.ndarray:
    """Sum consecutive fine increments into ``m`` coarse ones, left to right.

    Also accepts a raw ``(m_fine, ...)`` array so batches of paths coarsen
    in one call.
    """
    fine = bg.increments if isinstance(bg, BrownianGrid) else np.asarray(bg, dtype=float)
    m_fine = fine.shape[0]
    if m < 1 or m_fine % m:
        raise ValueError(f"{m} coarse steps do not divide {m_fine} fine steps")
    blocks = fine.reshape((m, m_fine // m) + fine.shape[1:])
    out = blocks[:, 0].copy()
    for c in range(1, blocks.shape[1]):
        out += blocks[:, c]
    return out


def euler_maruyama(
    drift: Callable[[np.ndarray], np.ndarray],
    cfg: SchemeConfig,
    dW,
) -> SamplePath:
    """Left-point Euler scheme ``X_{k+1} = X_k + a(X_k) T/m + dW_k``.

    ``dW`` has shape ``(steps,)`` for one path or ``(steps, n_paths)`` for a
    batch integrated in lockstep; ``drift`` must accept arrays.
    """
    dW = np.asarray(dW, dtype=float)
    if dW.shape[0] != cfg.steps:
        raise DimensionError(f"expected {cfg.steps} increments, got {dW.shape[0]}")
    dt = cfg.dt
    states = np.empty((cfg.steps + 1,) + dW.shape[1:])
    states[0] = cfg.x0
    x = states[0].copy()
    for k in range(cfg.steps):
        x = x + drift(x) * dt + dW[k]
        states[k + 1] = x
    return SamplePath(cfg.times, states)


def brownian_path(increments) -> np.ndarray:
    """``W`` at the grid times, ``W_0 = 0``, accumulated left to right."""
    inc = np.asarray(increments, dtype=float)
    out = np.zeros((inc.shape[0] + 1,) + inc.shape[1:])
    np.cumsum(inc, axis=0, out=out[1:])
    return out


def euler_on_path(
    drift: Callable[[np.ndarray], np.ndarray],
    cfg: SchemeConfig,
    W,
) -> SamplePath:
    """The same Euler scheme written as ``X_k = x0 + W_{t_k} + D_k``.

    ``D_{k+1} = D_k + a(X_k) T/m`` collects the drift.  Paths at different
    resolutions driven by one fine ``W`` (subsampled) then agree bit-for-bit
    whenever their drift contributions do, e.g. for a zero drift.
    """
    W = np.asarray(W, dtype=float)
    if W.shape[0] != cfg.steps + 1:
        raise DimensionError(f"expected {cfg.steps + 1} path values, got {W.shape[0]}")
    dt = cfg.dt
    base = cfg.x0 + W
    states = np.empty_like(base)
    d = np.zeros(W.shape[1:])
    for k in range(cfg.steps + 1):
        x = base[k] + d
        states[k] = x
        if k < cfg.steps:
            d = d + drift(x) * dt
    return SamplePath(cfg.times, states)
