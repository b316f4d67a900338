"""CSV round-trips for expansions, fBm paths, sample paths and study outputs.

Floats are written with ``repr``, the shortest decimal that reads back to
the identical double.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .experiment import ErrorCurve, TableRow
from .fbm import FbmPath
from .mollifier import MollifiedDrift
from .scheme import SamplePath
from .wavelets import HaarExpansion, n_coefficients

TABLE_HEADER = (
    "beta0,hurst,empirical_rate,theoretical_rate,n_paths,m0,N,eta,master_seed,drift_seed"
)


def fmt(x: float) -> str:
    return repr(float(x))


def _write(path: Path | str, lines: Sequence[str]) -> Path:
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _split(path: Path | str) -> tuple[dict[str, str], list[list[str]]]:
    """Comment metadata (``# key=value``) and the data rows after the header."""
    meta: dict[str, str] = {}
    rows: list[list[str]] = []
    header_seen = False
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        elif not header_seen:
            header_seen = True
        else:
            rows.append(line.split(","))
    return meta, rows


# -- Haar expansions -----------------------------------------------------------


def expansion_lines(exp: HaarExpansion) -> list[str]:
    lines = ["j,m,coeff", f"-1,0,{fmt(exp.mu0)}"]
    lines += [f"{idx.j},{idx.m},{fmt(c)}" for idx, c in exp.items()]
    return lines


def write_expansion(path, exp: HaarExpansion) -> Path:
    return _write(path, expansion_lines(exp))


def _parse_expansion(rows: list[list[str]]) -> HaarExpansion:
    mu0 = None
    entries = {}
    for j, m, c in rows:
        j, m = int(j), int(m)
        if j == -1:
            mu0 = float(c)
        else:
            entries[(j, m)] = float(c)
    if mu0 is None:
        raise ValueError("expansion CSV lacks the '-1,0,<mu0>' row")
    level = max((j for j, _ in entries), default=-1)
    if level < 0 or len(entries) != n_coefficients(level):
        raise ValueError("expansion CSV does not cover every (j, m) up to its top level")
    coeffs = np.empty(n_coefficients(level))
    for (j, m), c in entries.items():
        coeffs[2**j - 1 + m] = c
    return HaarExpansion(level, mu0, coeffs)


def read_expansion(path) -> HaarExpansion:
    _, rows = _split(path)
    return _parse_expansion(rows)


def write_mollified(path, d: MollifiedDrift) -> Path:
    return _write(path, [f"# eta={fmt(d.eta)}"] + expansion_lines(d.expansion))


def read_mollified(path, eta: float | None = None) -> MollifiedDrift:
    """Read an expansion CSV; ``eta`` overrides (or supplies) the ``# eta=`` line."""
    meta, rows = _split(path)
    if eta is None:
        if "eta" not in meta:
            raise ValueError(f"{path} has no '# eta=' line and no eta was given")
        eta = float(meta["eta"])
    return MollifiedDrift(_parse_expansion(rows), eta)


def read_eta(path) -> float | None:
    meta, _ = _split(path)
    return float(meta["eta"]) if "eta" in meta else None


# -- fBm paths -----------------------------------------------------------------


def write_fbm(path, p: FbmPath) -> Path:
    lines = [
        f"# hurst={fmt(p.hurst)}",
        "# gaussians=" + ",".join(fmt(g) for g in p.gaussians),
        "x,value",
    ]
    lines += [f"{fmt(x)},{fmt(v)}" for x, v in zip(p.grid, p.values)]
    return _write(path, lines)


def read_fbm(path) -> FbmPath:
    meta, rows = _split(path)
    grid = [float(r[0]) for r in rows]
    values = [float(r[1]) for r in rows]
    gaussians = [float(g) for g in meta["gaussians"].split(",")]
    return FbmPath(grid, values, float(meta["hurst"]), gaussians)


# -- scheme and study outputs ----------------------------------------------------


def write_sample_path(path, sp: SamplePath) -> Path:
    return _write(path, ["t,x"] + [f"{fmt(t)},{fmt(x)}" for t, x in zip(sp.times, sp.states)])


def read_sample_path(path) -> SamplePath:
    _, rows = _split(path)
    return SamplePath(
        np.array([float(r[0]) for r in rows]), np.array([float(r[1]) for r in rows])
    )


def write_error_curve(path, curve: ErrorCurve) -> Path:
    return _write(path, ["m,error"] + [f"{m},{fmt(e)}" for m, e in curve.entries()])


def read_error_curve(path) -> list[tuple[int, float]]:
    _, rows = _split(path)
    return [(int(m), float(e)) for m, e in rows]


def table_row_line(row: TableRow) -> str:
    return ",".join(
        [
            fmt(row.beta0),
            fmt(row.hurst),
            fmt(row.empirical_rate),
            fmt(row.theoretical_rate),
            str(row.n_paths),
            str(row.m0),
            str(row.N),
            fmt(row.eta),
            str(row.master_seed),
            str(row.drift_seed),
        ]
    )


def read_table(path) -> list[dict[str, float]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    keys = lines[0].split(",")
    return [
        {k: (math.inf if v == "inf" else float(v)) for k, v in zip(keys, line.split(","))}
        for line in lines[1:]
        if line
    ]
