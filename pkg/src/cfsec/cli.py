"""Command line front end for sweeps, complexity tables, and channel dumps."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config
from .simulate import (ALGORITHMS, complexity_table, emit_csv, run_sweep,
                       _write_csv)


def build_parser():
    p = argparse.ArgumentParser(
        prog="cfsec-sim",
        description="Monte Carlo secrecy-rate sweeps for cell-free downlink "
                    "beamforming (mmse / srm / seclm).")
    p.add_argument("--config", required=True, help="flat key=value scenario file")
    p.add_argument("--algos", default=",".join(ALGORITHMS),
                   help="comma list out of mmse,srm,seclm")
    p.add_argument("--snr-min", type=float, default=None, help="sweep start, dB")
    p.add_argument("--snr-max", type=float, default=None, help="sweep end, dB (inclusive)")
    p.add_argument("--snr-step", type=float, default=5.0, help="sweep step, dB")
    p.add_argument("--drops", type=int, default=200, help="Monte Carlo drops")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True,
                   help="output prefix; writes <out>.drops.csv and <out>.summary.csv")
    p.add_argument("--trace", action="store_true",
                   help="also write per-iteration traces to <out>.trace.csv")
    p.add_argument("--complexity", action="store_true",
                   help="emit the flop-count table instead of running a sweep")
    p.add_argument("--channel-dump", default=None, metavar="PATH",
                   help="dump every drop's channel blocks to PATH")
    return p


def _snr_grid(args, cfg):
    if (args.snr_min is None) != (args.snr_max is None):
        raise ConfigError("--snr-min and --snr-max must be given together")
    if args.snr_min is None:
        return cfg.snr_grid_db
    if args.snr_step <= 0:
        raise ConfigError("--snr-step must be positive")
    if args.snr_max < args.snr_min:
        raise ConfigError("--snr-max must be >= --snr-min")
    grid = np.arange(args.snr_min, args.snr_max + 0.5 * args.snr_step,
                     args.snr_step)
    return tuple(round(float(s), 9) for s in grid)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.drops < 0:
            raise ConfigError("--drops must be >= 0")

        if args.complexity:
            rows = complexity_table(cfg)
            path = args.out if args.out.endswith(".csv") else args.out + ".complexity.csv"
            _write_csv(path, ["N", "flops_proposed", "flops_srm", "flops_sdp"], rows)
            print(f"wrote {path} (K={cfg.K}, M={cfg.M}, "
                  "i_fp=10, i_ccp=10, i_bs=30, i_sdp=20)")
            return 0

        algos = tuple(a.strip() for a in args.algos.split(",") if a.strip())
        for a in algos:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}; pick from {ALGORITHMS}")
        grid = _snr_grid(args, cfg)
        result = run_sweep(cfg, algos=algos, snr_grid_db=grid, drops=args.drops,
                           trace=args.trace, dump_path=args.channel_dump)
        paths = emit_csv(result, args.out)
        failed = sum(1 for r in result.rows if r["status"] != "ok")
        print(f"{len(result.rows)} rows ({failed} failed), wrote " + ", ".join(paths))
        if args.channel_dump:
            print(f"channel dump at {args.channel_dump}")
        return 0
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
