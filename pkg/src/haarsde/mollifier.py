"""Killed heat semigroup applied to a truncated Haar series, in closed form.

The kernel is ``p(t, z) = exp(-t) (2 pi t)^{-1/2} exp(-z^2 / 2t)``; on an
indicator of ``[x1, x2)`` it reduces to a difference of normal CDFs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import erfc

from .wavelets import HaarExpansion, haar_sum_eval

# Terms whose interval lies further than this many kernel widths from x are skipped.
PRUNE_WIDTHS = 40.0

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x):
    """Standard normal CDF through ``erfc``; accurate in both tails."""
    out = 0.5 * erfc(-np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if out.ndim == 0 else out


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


def heat_kernel(t: float, z):
    """Killed heat kernel density at time t."""
    z = np.asarray(z, dtype=float)
    return math.exp(-t) * np.exp(-z * z / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)


def _check_eta(eta: float) -> None:
    if not eta > 0.0:
        raise ValueError(f"mollification parameter must be positive, got {eta}")


def mollified_indicator(x1, x2, eta: float, x):
    """``(P_eta 1_[x1, x2))(x)`` via the normal CDF."""
    _check_eta(eta)
    if np.any(np.asarray(x1) >= np.asarray(x2)):
        raise ValueError(f"need x1 < x2, got x1={x1}, x2={x2}")
    s = math.sqrt(eta)
    damp = math.exp(-eta)
    x = np.asarray(x, dtype=float)
    out = damp * std_normal_cdf((x2 - x) / s) - damp * std_normal_cdf((x1 - x) / s)
    return float(out) if np.ndim(out) == 0 else out


def _mollified_indicator_grad(x1, x2, eta: float, x):
    s = math.sqrt(eta)
    damp = math.exp(-eta)
    return -damp * std_normal_pdf((x2 - x) / s) / s + damp * std_normal_pdf((x1 - x) / s) / s


@dataclass(frozen=True)
class MollifiedDrift:
    """``a = P_eta b`` for a truncated Haar expansion ``b``.

    Calling the object evaluates ``a`` on arrays through the jump
    representation of the piecewise-constant ``b`` (one CDF per breakpoint
    of the finest grid).  ``drift_eval`` is the term-by-term reference.
    """

    expansion: HaarExpansion
    eta: float

    def __post_init__(self):
        _check_eta(self.eta)
        object.__setattr__(self, "eta", float(self.eta))

    @cached_property
    def _jumps(self) -> tuple[np.ndarray, np.ndarray]:
        cells = 2 ** (self.expansion.level + 1)
        breaks = np.arange(cells + 1) / cells
        values = haar_sum_eval(self.expansion, (np.arange(cells) + 0.5) / cells)
        padded = np.concatenate([[0.0], values, [0.0]])
        jumps = padded[:-1] - padded[1:]
        keep = jumps != 0.0
        return breaks[keep], jumps[keep]

    def __call__(self, x):
        breaks, jumps = self._jumps
        x = np.asarray(x, dtype=float)
        if breaks.size == 0:
            return np.zeros_like(x) if x.ndim else 0.0
        s = math.sqrt(self.eta)
        z = (breaks - x[..., None]) / s
        # Row-wise reduction keeps each point's result independent of batch shape.
        out = math.exp(-self.eta) * np.sum(std_normal_cdf(z) * jumps, axis=-1)
        return float(out) if out.ndim == 0 else out

    def grad(self, x):
        breaks, jumps = self._jumps
        x = np.asarray(x, dtype=float)
        if breaks.size == 0:
            return np.zeros_like(x) if x.ndim else 0.0
        s = math.sqrt(self.eta)
        z = (breaks - x[..., None]) / s
        out = -math.exp(-self.eta) / s * np.sum(std_normal_pdf(z) * jumps, axis=-1)
        return float(out) if out.ndim == 0 else out


def _terms(d: MollifiedDrift, x: float, indicator) -> float:
    exp = d.expansion
    reach = PRUNE_WIDTHS * math.sqrt(d.eta)
    total = 0.0
    if -reach <= x <= 1.0 + reach:
        total += exp.mu0 * indicator(0.0, 1.0, d.eta, x)
    for j in range(exp.level + 1):
        scale = 2**j
        lo = max(0, math.floor((x - reach) * scale))
        hi = min(scale - 1, math.ceil((x + reach) * scale))
        if lo > hi:
            continue
        m = np.arange(lo, hi + 1)
        left = m / scale
        mid = (m + 0.5) / scale
        right = (m + 1) / scale
        coeffs = exp.level_coeffs(j)[lo : hi + 1]
        total += float(
            np.sum(coeffs * (indicator(left, mid, d.eta, x) - indicator(mid, right, d.eta, x)))
        )
    return total


def drift_eval(d: MollifiedDrift, x: float) -> float:
    """``mu0 P h0 + sum mu_jm P h_jm`` at a single point, term by term.

    Terms supported further than ``40 sqrt(eta)`` from x are below 1e-14
    and skipped.
    """
    return _terms(d, float(x), mollified_indicator)


def drift_grad_eval(d: MollifiedDrift, x: float) -> float:
    """Exact x-derivative of ``drift_eval``."""
    return _terms(d, float(x), _mollified_indicator_grad)
