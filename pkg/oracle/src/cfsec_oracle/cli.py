"""Command line front end: one dump, one SNR, CSV out."""

from __future__ import annotations

import argparse
import sys

from .detmax import run_detmax
from .model import ScenarioError, read_scenario


def build_parser():
    p = argparse.ArgumentParser(
        prog="cfsec-oracle",
        description="Determinant-maximization cross-check for cfsec channel "
                    "dumps (tiny instances only).")
    p.add_argument("--dump", required=True, help="channel dump from cfsec-sim")
    p.add_argument("--config", required=True, help="flat key=value scenario file")
    p.add_argument("--snr-db", type=float, required=True,
                   help="transmit SNR point, dB")
    p.add_argument("--out", required=True,
                   help="output prefix; writes <out>.drops.csv and <out>.summary.csv")
    p.add_argument("--drops", type=int, default=None,
                   help="solve only the first N dumped drops")
    p.add_argument("--max-iter", type=int, default=30,
                   help="bound-and-resolve rounds per drop")
    p.add_argument("--eps", type=float, default=1e-4,
                   help="relative Frobenius stop tolerance on the Gramians")
    p.add_argument("--solver", default="CLARABEL",
                   help="any installed cvxpy solver handling log_det")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.max_iter < 0:
            raise ScenarioError("--max-iter must be >= 0")
        if args.eps <= 0:
            raise ScenarioError("--eps must be positive")
        scen = read_scenario(args.config)
        if scen.K > 3 or scen.N > 6 or scen.M > 2:
            raise ScenarioError(
                f"instance K={scen.K}, N={scen.N}, M={scen.M} is beyond the "
                "tiny-instance ceiling (K <= 3, N <= 6, M <= 2)")
        paths, rows = run_detmax(args.dump, scen, args.snr_db, args.out,
                                 drops=args.drops, max_iter=args.max_iter,
                                 eps=args.eps, solver=args.solver)
        failed = sum(1 for r in rows if r["status"] != "ok")
        print(f"{len(rows)} drops ({failed} failed), wrote " + ", ".join(paths))
        return 0
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
