"""How the fitted rate at one beta0 depends on the mollification rule and the drift draw."""

import argparse
import sys

from haarsde.experiment import StudyConfig, mc_error, fit_rate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta0", type=float, default=0.05)
    ap.add_argument("--paths", type=int, default=200)
    ap.add_argument("--drift-seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--fixed-eta", type=float, nargs="+", default=[1e-3, 1e-5])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    variants = [("schedule", None), ("per_m", None)] + [("fixed", e) for e in args.fixed_eta]
    print(f"{'rule':>10} {'eta':>9} {'seed':>5} {'rate':>7} {'resid':>7}  errors")
    for rule, eta in variants:
        for seed in args.drift_seeds:
            cfg = StudyConfig(beta0=args.beta0, n_paths=args.paths, eta_rule=rule, eta=eta,
                              drift_seed=seed)
            curve = mc_error(cfg, workers=args.workers)
            fit = fit_rate(curve)
            errs = " ".join(f"{e:.2e}" for e in curve.error)
            label = "-" if eta is None else f"{eta:.0e}"
            print(f"{rule:>10} {label:>9} {seed:>5} {fit.rate:7.3f} {fit.residual:7.3f}  {errs}",
                  flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
