"""Rate schedules, Monte-Carlo strong errors against a fine proxy, and rate fits."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .fbm import dyadic_grid, sample_fbm
from .mollifier import MollifiedDrift
from .scheme import SchemeConfig, brownian_path, euler_on_path, sample_brownian_grid
from .wavelets import HaarExpansion, haar_coefficients_from_samples

logger = logging.getLogger(__name__)

ETA_RULES = ("schedule", "per_m", "fixed")


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class RateParams:
    beta0: float
    q0: float
    gamma0: float
    theta_star: float
    predicted_rate: float


def theoretical_rate(beta0: float, q0: float = math.inf) -> RateParams:
    """Supremal strong rate of the scheme under the ``eta = m^-theta*`` schedule.

    ``q0`` may be ``math.inf``; the epsilon loss of the bound is taken as 0.
    """
    if not 0.0 <= beta0 < 0.25:
        raise ValueError(f"beta0 must lie in [0, 1/4), got {beta0}")
    if not q0 > 4.0:
        raise ValueError(f"q0 must exceed 4, got {q0}")
    gamma0 = 1.0 - beta0 - 1.0 / q0
    if not gamma0 > 0.5:
        raise ValueError(f"gamma0 = 1 - beta0 - 1/q0 = {gamma0} must exceed 1/2")
    theta = 0.5 / (0.75 - beta0 * (gamma0 - 0.5))
    return RateParams(beta0, q0, gamma0, theta, theta * (0.5 - beta0) * (gamma0 - 0.5))


def default_q0(beta0: float) -> float:
    """Largest admissible ``q0 = 1/beta0``, infinite for a function-valued drift."""
    return math.inf if beta0 == 0 else 1.0 / beta0


def schedule(m: int, theta_star: float) -> tuple[float, int]:
    """Mollification time ``m^-theta*`` and truncation level ``ceil(2 theta* log2 m)``."""
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    if not theta_star > 0:
        raise ValueError(f"theta_star must be positive, got {theta_star}")
    return m ** (-theta_star), math.ceil(2.0 * theta_star * math.log2(m))


def hurst_rule(beta0: float) -> float:
    """Hurst index used when none is given: just above ``1 - beta0``, capped at 0.99."""
    return min(1.0 - beta0 + 0.01, 0.99)


def drift_rng(drift_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(drift_seed))


def path_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for Monte-Carlo path ``index``.

    A pure function of ``(master_seed, index)`` through SeedSequence spawn
    keys, so results do not depend on which worker draws which path.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def build_drift(beta0: float, hurst: float, level_N: int, drift_seed: int) -> HaarExpansion:
    """Haar coefficients of the derivative of one fBm path on [0, 1]."""
    if not hurst > 0.75:
        raise ValueError(f"need hurst > 3/4, got {hurst}")
    if not (hurst > 1.0 - beta0 or (beta0 == 0 and hurst >= hurst_rule(0.0))):
        raise ValueError(f"need hurst > 1 - beta0 = {1.0 - beta0}, got {hurst}")
    if level_N < 0:
        raise ValueError(f"level must be non-negative, got {level_N}")
    path = sample_fbm(dyadic_grid(2 ** (level_N + 1)), hurst, drift_rng(drift_seed))
    return haar_coefficients_from_samples(path.with_origin(), level_N)


@dataclass(frozen=True)
class StudyConfig:
    beta0: float = 0.05
    hurst: float | None = None
    level_N: int = 9
    m_list: tuple[int, ...] = (16, 32, 64, 128, 256)
    m0: int = 512
    n_paths: int = 200
    master_seed: int = 0
    drift_seed: int = 0
    eta_rule: str = "schedule"
    eta: float | None = None
    horizon: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "m_list", tuple(sorted(int(m) for m in self.m_list)))
        if self.m0 < 2 or self.m0 & (self.m0 - 1):
            raise ValueError(f"m0 must be a power of two, got {self.m0}")
        if not self.m_list:
            raise ValueError("m_list is empty")
        for m in self.m_list:
            if m < 1 or self.m0 % m or m >= self.m0:
                raise ValueError(f"every m must divide m0={self.m0} and be smaller, got {m}")
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if self.eta_rule not in ETA_RULES:
            raise ValueError(f"eta_rule must be one of {ETA_RULES}, got {self.eta_rule!r}")
        if self.eta_rule == "fixed" and not (self.eta is not None and self.eta > 0):
            raise ValueError("eta_rule 'fixed' needs a positive eta")

    @property
    def resolved_hurst(self) -> float:
        return hurst_rule(self.beta0) if self.hurst is None else self.hurst

    @property
    def rate_params(self) -> RateParams:
        return theoretical_rate(self.beta0, default_q0(self.beta0))

    def eta_for(self, m: int) -> float:
        if self.eta_rule == "fixed":
            return self.eta
        if self.eta_rule == "schedule":
            m = self.m0
        return m ** (-self.rate_params.theta_star)


@dataclass(frozen=True, eq=False)
class ErrorCurve:
    m: np.ndarray
    error: np.ndarray
    config: StudyConfig
    std_error: np.ndarray | None = field(default=None, repr=False)
    degenerate: bool = False

    def entries(self) -> list[tuple[int, float]]:
        return [(int(m), float(e)) for m, e in zip(self.m, self.error)]


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    residual: float

    @property
    def rate(self) -> float:
        return -self.slope


def _drifts(study: StudyConfig, expansion: HaarExpansion) -> dict[int, MollifiedDrift]:
    out = {}
    for m in (*study.m_list, study.m0):
        eta = study.eta_for(m)
        # reuse the object (and its cached breakpoints) when eta coincides
        out[m] = next((d for d in out.values() if d.eta == eta), None) or MollifiedDrift(
            expansion, eta
        )
    return out


def path_errors(
    study: StudyConfig,
    drifts: dict[int, MollifiedDrift],
    indices: Sequence[int],
) -> dict[int, np.ndarray]:
    """``|X^m_{t_k} - X^{m0}_{t_k}|`` on each coarse grid, shape ``(m + 1, len(indices))``."""
    fine = np.stack(
        [
            sample_brownian_grid(study.horizon, study.m0, path_rng(study.master_seed, i)).increments
            for i in indices
        ],
        axis=1,
    )
    W = brownian_path(fine)
    proxy = euler_on_path(drifts[study.m0], SchemeConfig(study.m0, study.horizon, study.x0), W).states
    out = {}
    for m in study.m_list:
        stride = study.m0 // m
        coarse = euler_on_path(
            drifts[m], SchemeConfig(m, study.horizon, study.x0), W[::stride]
        ).states
        out[m] = np.abs(coarse - proxy[::stride])
    return out


def mc_error(
    study: StudyConfig,
    expansion: HaarExpansion | None = None,
    workers: int = 1,
    chunk_size: int = 50,
) -> ErrorCurve:
    """``max_k mean_i |X^m_{t_k} - X^{m0}_{t_k}|`` for every m in the study.

    One drift realisation is shared by all paths.  Paths are processed in
    fixed chunks and the per-path errors are averaged in path order, so the
    result does not depend on ``workers``.
    """
    if expansion is None:
        expansion = build_drift(
            study.beta0, study.resolved_hurst, study.level_N, study.drift_seed
        )
    drifts = _drifts(study, expansion)
    chunks = [
        range(lo, min(lo + chunk_size, study.n_paths))
        for lo in range(0, study.n_paths, chunk_size)
    ]
    run = lambda idx: path_errors(study, drifts, idx)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]

    errors, stderrs = [], []
    for m in study.m_list:
        abs_err = np.concatenate([p[m] for p in parts], axis=1)
        mean = abs_err.mean(axis=1)
        k = int(np.argmax(mean))
        errors.append(mean[k])
        sd = abs_err[k].std(ddof=1) if study.n_paths > 1 else 0.0
        stderrs.append(sd / math.sqrt(study.n_paths))
    errors = np.array(errors)
    degenerate = bool(np.any(errors <= 0.0))
    if degenerate:
        logger.warning("zero strong error for some m; drift is degenerate")
    return ErrorCurve(np.array(study.m_list), errors, study, np.array(stderrs), degenerate)


def fit_rate(curve: ErrorCurve | Iterable[tuple[float, float]]) -> RateFit:
    """Least squares of ``log2(error)`` on ``log2(m)``; slope is negative when converging."""
    if isinstance(curve, ErrorCurve):
        m, err = curve.m, curve.error
    else:
        pairs = list(curve)
        m = np.array([p[0] for p in pairs], dtype=float)
        err = np.array([p[1] for p in pairs], dtype=float)
    m = np.asarray(m, dtype=float)
    err = np.asarray(err, dtype=float)
    if m.size < 2:
        raise FitError(f"need at least two points, got {m.size}")
    if np.any(err <= 0) or np.any(m <= 0):
        raise FitError("errors and step counts must be positive")
    x = np.log2(m)
    y = np.log2(err)
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise FitError("step counts must not all be equal")
    slope = float(xc @ (y - y.mean())) / denom
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    return RateFit(slope, intercept, float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class TableRow:
    beta0: float
    hurst: float
    empirical_rate: float
    theoretical_rate: float
    n_paths: int
    m0: int
    N: int
    eta: float
    master_seed: int
    drift_seed: int
    curve: ErrorCurve = field(repr=False, compare=False)


def run_table(
    beta0_list: Sequence[float],
    base_config: StudyConfig,
    workers: int = 1,
    on_row: Callable[[TableRow], None] | None = None,
) -> list[TableRow]:
    """Empirical and theoretical rates for each ``beta0``.

    The Hurst index follows ``hurst_rule`` unless the base config pins it.
    ``on_row`` is called as soon as each row is finished.
    """
    rows = []
    for beta0 in beta0_list:
        theory = theoretical_rate(beta0, default_q0(beta0))
        cfg = replace(base_config, beta0=beta0)
        curve = mc_error(cfg, workers=workers)
        fit = fit_rate(curve) if not curve.degenerate else RateFit(0.0, 0.0, 0.0)
        row = TableRow(
            beta0=beta0,
            hurst=cfg.resolved_hurst,
            empirical_rate=fit.rate,
            theoretical_rate=theory.predicted_rate,
            n_paths=cfg.n_paths,
            m0=cfg.m0,
            N=cfg.level_N,
            eta=cfg.eta_for(cfg.m0),
            master_seed=cfg.master_seed,
            drift_seed=cfg.drift_seed,
            curve=curve,
        )
        if on_row is not None:
            on_row(row)
        rows.append(row)
    return rows
