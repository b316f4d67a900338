"""Command-line front end.

Every subcommand writes its artifacts plus a ``run_manifest`` (flat
``key=value``) into ``--out-dir``.  Exit status: 0 success, 1 numerical or
runtime failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import math
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import (
    TABLE_HEADER,
    fmt,
    read_eta,
    read_expansion,
    table_row_line,
    write_error_curve,
    write_expansion,
    write_fbm,
    write_mollified,
    write_sample_path,
)
from .experiment import (
    ETA_RULES,
    FitError,
    StudyConfig,
    TableRow,
    build_drift,
    default_q0,
    drift_rng,
    hurst_rule,
    path_rng,
    run_table,
    theoretical_rate,
)
from .fbm import FactorizationError, dyadic_grid, refine_fbm, sample_fbm
from .mollifier import MollifiedDrift, drift_eval, drift_grad_eval
from .plotting import write_loglog_svg
from .scheme import SchemeConfig, euler_maruyama, sample_brownian_grid

logger = logging.getLogger("haarsde")

MANIFEST = "run_manifest"


class UsageError(Exception):
    pass


# -- argument types --------------------------------------------------------------


def power_of_two(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"{n} is not a power of two")
    return n


def non_negative_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"{n} is negative")
    return n


def positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"{n} is not positive")
    return n


def float_or_inf(text: str) -> float:
    if text.strip().lower() in ("inf", "infinite", "infinity"):
        return math.inf
    return float(text)


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def pow2_list(text: str) -> list[int]:
    return [power_of_two(v) for v in text.split(",") if v.strip()]


# -- manifest --------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, args: argparse.Namespace, argv: list[str], files: list[Path]):
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "out_dir", "verbose", "command")
    }
    lines = [
        f"package_version={__version__}",
        f"subcommand={args.command}",
        "argv=" + shlex.join(_strip_out_dir(argv)),
    ]
    for key, value in params.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, float):
            value = fmt(value)
        lines.append(f"{key}={value}")
    for f in files:
        lines.append(f"sha256.{f.name}={_sha256(f)}")
    (out_dir / MANIFEST).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _strip_out_dir(argv: list[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out-dir":
            skip = True
            continue
        if tok.startswith("--out-dir="):
            continue
        out.append(tok)
    return out


def read_manifest(path) -> dict[str, str]:
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        # artifact names may contain '=', hex digests never do
        if line.startswith("sha256."):
            key, _, value = line.rpartition("=")
        else:
            key, _, value = line.partition("=")
        entries[key] = value
    return entries


# -- drift inputs shared by several subcommands --------------------------------------


def _add_drift_source(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--beta0", type=float, required=required, help="drift regularity beta0")
    p.add_argument("--level", type=non_negative_int, default=9, help="truncation level N")
    p.add_argument("--drift-seed", type=int, default=0)
    p.add_argument("--hurst", type=float, default=None, help="override the Hurst rule")


def _expansion_from_args(args):
    if getattr(args, "drift", None):
        return read_expansion(args.drift)
    if args.beta0 is None:
        raise UsageError("give either --drift FILE or --beta0 to regenerate the drift")
    hurst = hurst_rule(args.beta0) if args.hurst is None else args.hurst
    return build_drift(args.beta0, hurst, args.level, args.drift_seed)


# -- subcommands -------------------------------------------------------------------


def cmd_fbm(args, out: Path) -> list[Path]:
    rng = drift_rng(args.seed)
    path = sample_fbm(dyadic_grid(args.points), args.hurst, rng)
    files = [write_fbm(out / "fbm.csv", path)]
    if args.refine:
        files.append(write_fbm(out / "fbm_refined.csv", refine_fbm(path, rng)))
    return files


def cmd_drift(args, out: Path) -> list[Path]:
    exp = _expansion_from_args(args)
    hurst = hurst_rule(args.beta0) if args.hurst is None else args.hurst
    summary = [
        f"beta0={fmt(args.beta0)}",
        f"hurst={fmt(hurst)}",
        f"level={exp.level}",
        f"coefficients={exp.coeffs.size}",
        f"mu0={fmt(exp.mu0)}",
    ]
    for j in range(exp.level + 1):
        summary.append(f"max_abs_level_{j}={fmt(np.max(np.abs(exp.level_coeffs(j))))}")
    summary_path = out / "drift_summary.txt"
    summary_path.write_text("\n".join(summary) + "\n", encoding="utf-8")
    return [write_expansion(out / "drift.csv", exp), summary_path]


def cmd_mollify(args, out: Path) -> list[Path]:
    exp = _expansion_from_args(args)
    d = MollifiedDrift(exp, args.eta)
    xs = np.linspace(args.x_min, args.x_max, args.points)
    lines = ["x,drift,grad"] + [
        f"{fmt(x)},{fmt(drift_eval(d, x))},{fmt(drift_grad_eval(d, x))}" for x in xs
    ]
    values = out / "drift_values.csv"
    values.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [write_mollified(out / "mollified_drift.csv", d), values]


def cmd_simulate(args, out: Path) -> list[Path]:
    exp = _expansion_from_args(args)
    eta = args.eta
    if eta is None and args.drift:
        eta = read_eta(args.drift)
    if eta is None:
        raise UsageError("--eta is required unless the drift file carries '# eta='")
    cfg = SchemeConfig(args.steps, args.horizon, args.x0)
    bg = sample_brownian_grid(args.horizon, args.steps, path_rng(args.seed, 0))
    sp = euler_maruyama(MollifiedDrift(exp, eta), cfg, bg.increments)
    return [write_sample_path(out / "path.csv", sp)]


def cmd_study(args, out: Path) -> list[Path]:
    base = StudyConfig(
        beta0=args.beta0_list[0],
        hurst=args.hurst,
        level_N=args.level,
        m_list=tuple(args.m_list),
        m0=args.m0,
        n_paths=args.paths,
        master_seed=args.master_seed,
        drift_seed=args.drift_seed,
        eta_rule=args.eta_rule,
        eta=args.eta,
    )
    table_path = out / "table.csv"
    files = [table_path]
    with table_path.open("w", encoding="utf-8") as fh:
        fh.write(TABLE_HEADER + "\n")
        fh.flush()

        def flush(row: TableRow) -> None:
            fh.write(table_row_line(row) + "\n")
            fh.flush()
            files.append(write_error_curve(out / f"error_curve_beta0={row.beta0}.csv", row.curve))
            print(
                f"beta0={row.beta0}: empirical {row.empirical_rate:.3f}, "
                f"theoretical {row.theoretical_rate:.3f}",
                file=sys.stderr,
            )

        rows = run_table(args.beta0_list, base, workers=args.workers, on_row=flush)

    plot_csv = out / "error_curves.csv"
    lines = ["beta0,m,error,std_error"]
    for row in rows:
        c = row.curve
        lines += [
            f"{fmt(row.beta0)},{int(m)},{fmt(e)},{fmt(s)}"
            for m, e, s in zip(c.m, c.error, c.std_error)
        ]
    plot_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    svg = write_loglog_svg(
        out / "error_curves.svg",
        [(f"beta0={row.beta0}", row.curve.m, row.curve.error) for row in rows],
        title="strong L1 error against the fine proxy",
    )
    return files + [plot_csv, svg]


def cmd_rates(args, out: Path) -> list[Path]:
    lines = ["beta0,q0,gamma0,theta_star,predicted_rate"]
    print(f"{'beta0':>7} {'q0':>8} {'gamma0':>8} {'theta*':>8} {'rate':>8} {'rounded':>7}")
    for beta0 in args.beta0:
        q0 = default_q0(beta0) if args.q0 is None else args.q0
        r = theoretical_rate(beta0, q0)
        print(
            f"{beta0:7.3f} {q0:8.3f} {r.gamma0:8.4f} {r.theta_star:8.4f} "
            f"{r.predicted_rate:8.4f} {r.predicted_rate:7.2f}"
        )
        lines.append(
            ",".join(fmt(v) if math.isfinite(v) else "inf"
                     for v in (beta0, q0, r.gamma0, r.theta_star, r.predicted_rate))
        )
    path = out / "rates.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [path]


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarsde",
        description="Haar-mollified Euler-Maruyama for SDEs with fBm-derivative drift.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out-dir", type=Path, default=Path("."))
        p.add_argument("-v", "--verbose", action="store_true")
        p.set_defaults(func=func)
        return p

    p = add("fbm", cmd_fbm, "sample a fractional Brownian path on k/n, k=1..n")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--points", type=power_of_two, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--refine", action="store_true", help="also write the midpoint-refined path")

    p = add("drift", cmd_drift, "Haar coefficients of the fBm-derivative drift")
    _add_drift_source(p, required=True)

    p = add("mollify", cmd_mollify, "evaluate the heat-mollified drift on a grid")
    p.add_argument("--drift", type=Path, help="expansion CSV written by 'drift'")
    _add_drift_source(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--points", type=positive_int, default=1001)
    p.add_argument("--x-min", type=float, default=-0.25)
    p.add_argument("--x-max", type=float, default=1.25)

    p = add("simulate", cmd_simulate, "one Euler-Maruyama path")
    p.add_argument("--drift", type=Path, help="expansion CSV (optionally with '# eta=')")
    _add_drift_source(p)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--steps", type=power_of_two, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=0.0)

    p = add("study", cmd_study, "Monte-Carlo error curves and the rate table")
    p.add_argument("--beta0-list", type=float_list, default=[0.0, 0.05, 0.1, 0.15, 0.2])
    p.add_argument("--paths", type=positive_int, default=200)
    p.add_argument("--m0", type=power_of_two, default=512)
    p.add_argument("--m-list", type=pow2_list, default=[16, 32, 64, 128, 256])
    p.add_argument("--level", type=non_negative_int, default=9)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--drift-seed", type=int, default=0)
    p.add_argument("--hurst", type=float, default=None)
    p.add_argument("--eta-rule", choices=ETA_RULES, default="schedule")
    p.add_argument("--eta", type=float, default=None, help="used with --eta-rule fixed")
    p.add_argument("--workers", type=positive_int, default=1)

    p = add("rates", cmd_rates, "theoretical rates for given beta0 (and q0)")
    p.add_argument("--beta0", type=float_list, default=[0.0, 0.05, 0.1, 0.15, 0.2])
    p.add_argument("--q0", type=float_or_inf, default=None, help="default: 1/beta0")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    out = args.out_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = args.func(args, out)
        write_manifest(out, args, argv, files)
    except (FactorizationError, FitError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"haarsde {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError) as exc:
        print(f"haarsde {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"haarsde {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
