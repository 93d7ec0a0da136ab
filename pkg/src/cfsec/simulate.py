"""Seeded Monte Carlo harness: paired drops, SNR sweeps, CSV emission.

A drop is one topology + channel realization.  Every algorithm and every
SNR point sees the same drop (paired design), so curve differences are
algorithmic, not sampling noise.  Drop d of a run with seed s uses the RNG
stream seeded by (s, d), making any subset of drops reproducible in
isolation and the emitted drops CSV byte-identical across reruns.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .channel import build_channel_set, dump_channels
from .complexity import flops_proposed, flops_sdp, flops_srm
from .config import SystemConfig, place_nodes, snr_to_pmax
from .metrics import BeamformerSet, evaluate
from .mmse import rx_mmse, tx_mmse_init
from .seclm import run_seclm
from .srm import run_srm

ALGORITHMS = ("mmse", "srm", "seclm")


def drop_rng(seed, drop_idx):
    """Independent generator for one drop, derived from (seed, drop)."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(drop_idx))))


def channel_checksum(chans):
    """CRC of the effective channel bytes; pins pairing in the drops CSV."""
    return int(zlib.crc32(np.ascontiguousarray(chans.eff).tobytes()))


def solve_algo(algo, cfg, chans, p_max):
    """Run one algorithm on one drop.  Returns (record, info dict)."""
    H = chans.eff
    if algo == "mmse":
        V = tx_mmse_init(H, cfg.sigma2_w, p_max)
        bf = BeamformerSet(V=V, U=rx_mmse(H, V, cfg.sigma2_w), p_max=p_max)
        rec = evaluate(bf, H, cfg.sigma2_w, flops=0.0)
        return rec, {"converged": True, "iter_fp": 0, "iter_ccp": 0, "records": []}
    if algo == "srm":
        _, state, rec = run_srm(cfg, chans, p_max)
    elif algo == "seclm":
        _, state, rec = run_seclm(cfg, chans, p_max)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return rec, {"converged": state.converged, "iter_fp": state.iter_fp,
                 "iter_ccp": state.iter_ccp, "records": state.iter_records}


@dataclass
class SweepResult:
    cfg: SystemConfig
    algos: tuple
    snr_grid_db: tuple
    n_drops: int
    seed: int
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    trace_rows: list = field(default_factory=list)


def run_sweep(cfg: SystemConfig, algos=ALGORITHMS, snr_grid_db=None, drops=1,
              trace=False, dump_path=None, progress=False) -> SweepResult:
    """Paired Monte Carlo sweep; failures are recorded, never raised."""
    algos = tuple(algos)
    for a in algos:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}; pick from {ALGORITHMS}")
    grid = tuple(float(s) for s in (cfg.snr_grid_db if snr_grid_db is None
                                    else snr_grid_db))
    result = SweepResult(cfg=cfg, algos=algos, snr_grid_db=grid,
                         n_drops=int(drops), seed=cfg.seed)
    K = cfg.K
    dump_fh = open(dump_path, "w", encoding="utf-8") if dump_path else None
    if dump_fh:
        dump_fh.write("# drop,l,k then re,im pairs of the (M x N_t) block, row-major\n")
    try:
        for d in range(int(drops)):
            rng = drop_rng(cfg.seed, d)
            topo = place_nodes(cfg, rng)
            chans = build_channel_set(cfg, topo, rng)
            crc = channel_checksum(chans)
            if dump_fh:
                dump_channels(dump_fh, d, chans)
            for snr in grid:
                p_max = float(snr_to_pmax(cfg, snr))
                for algo in algos:
                    row = {"algo": algo, "snr_db": snr, "drop": d,
                           "channel_crc": crc, "status": "ok"}
                    t0 = time.perf_counter()
                    try:
                        rec, info = solve_algo(algo, cfg, chans, p_max)
                    except Exception as exc:            # failed drop: keep sweeping
                        row["status"] = "failed"
                        row["error"] = f"{type(exc).__name__}: {exc}"
                        row["wall_s"] = time.perf_counter() - t0
                        result.rows.append(row)
                        continue
                    row["wall_s"] = time.perf_counter() - t0
                    row.update({
                        "converged": int(info["converged"]),
                        "iter_fp": info["iter_fp"],
                        "iter_ccp": info["iter_ccp"],
                        "power_used": rec.power_used,
                        "flops": rec.flops,
                        "sum_rate": rec.sum_rate,
                        "sum_leakage": rec.sum_leakage,
                        "sum_secrecy": rec.sum_secrecy,
                    })
                    for k in range(K):
                        row[f"eta_i_{k}"] = float(rec.eta_i[k])
                        row[f"eta_l_{k}"] = float(rec.eta_l_worst[k])
                        row[f"e_worst_{k}"] = int(rec.e_worst[k])
                        row[f"secrecy_{k}"] = float(rec.secrecy[k])
                    result.rows.append(row)
                    if trace:
                        for r in info["records"]:
                            result.trace_rows.append({
                                "algo": algo, "snr_db": snr, "drop": d,
                                "iter": r["iter"], "objective": r["objective"],
                                "power": r["power"], "max_delta": r["max_delta"],
                            })
            if progress:
                print(f"drop {d + 1}/{drops} done")
    finally:
        if dump_fh:
            dump_fh.close()
    result.summary = summarize(result)
    return result


def _mean_se(vals):
    a = np.asarray(vals, dtype=float)
    if a.size == 0:
        return float("nan"), float("nan")
    if a.size == 1:
        return float(a[0]), 0.0
    return float(a.mean()), float(a.std(ddof=1) / np.sqrt(a.size))


def summarize(result: SweepResult):
    """Per (algorithm, SNR) means and standard errors over successful drops."""
    out = []
    for algo in result.algos:
        for snr in result.snr_grid_db:
            rows = [r for r in result.rows
                    if r["algo"] == algo and r["snr_db"] == snr]
            ok = [r for r in rows if r["status"] == "ok"]
            entry = {"algo": algo, "snr_db": snr,
                     "drops": len(rows), "failed": len(rows) - len(ok)}
            entry["converged_frac"] = (
                float(np.mean([r["converged"] for r in ok])) if ok else float("nan"))
            for key in ("sum_secrecy", "sum_rate", "sum_leakage"):
                m, se = _mean_se([r[key] for r in ok])
                entry[f"mean_{key}"] = m
                entry[f"se_{key}"] = se
            entry["mean_wall_s"] = (
                float(np.mean([r["wall_s"] for r in ok])) if ok else float("nan"))
            entry["seed"] = result.seed
            out.append(entry)
    return out


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path, fieldnames, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(f, "")) for f in fieldnames) + "\n")


def drops_fieldnames(cfg: SystemConfig):
    base = ["algo", "snr_db", "drop", "channel_crc", "status", "converged",
            "iter_fp", "iter_ccp", "power_used", "flops",
            "sum_rate", "sum_leakage", "sum_secrecy"]
    for k in range(cfg.K):
        base += [f"eta_i_{k}", f"eta_l_{k}", f"e_worst_{k}", f"secrecy_{k}"]
    return base

SUMMARY_FIELDS = ["algo", "snr_db", "drops", "failed", "converged_frac",
                  "mean_sum_secrecy", "se_sum_secrecy",
                  "mean_sum_rate", "se_sum_rate",
                  "mean_sum_leakage", "se_sum_leakage",
                  "mean_wall_s", "seed"]

TRACE_FIELDS = ["algo", "snr_db", "drop", "iter", "objective", "power",
                "max_delta"]


def emit_csv(result: SweepResult, prefix):
    """Write <prefix>.drops.csv and <prefix>.summary.csv (+ .trace.csv).

    The drops file carries only deterministic fields; wall-clock lives in
    the summary.  Floats are printed with 12 significant digits.
    """
    prefix = str(prefix)
    _write_csv(prefix + ".drops.csv", drops_fieldnames(result.cfg), result.rows)
    _write_csv(prefix + ".summary.csv", SUMMARY_FIELDS, result.summary)
    paths = [prefix + ".drops.csv", prefix + ".summary.csv"]
    if result.trace_rows:
        _write_csv(prefix + ".trace.csv", TRACE_FIELDS, result.trace_rows)
        paths.append(prefix + ".trace.csv")
    return paths


DEFAULT_N_GRID = (8, 16, 32, 64, 128, 256)


def complexity_table(cfg: SystemConfig, n_grid=DEFAULT_N_GRID,
                     i_fp=10, i_ccp=10, i_bs=30, i_sdp=20):
    """Flop-count rows across total antenna count N at fixed K, M."""
    rows = []
    for n in n_grid:
        rows.append({
            "N": int(n),
            "flops_proposed": flops_proposed(i_fp, i_ccp, i_bs, cfg.K, n, cfg.M),
            "flops_srm": flops_srm(i_fp, i_bs, cfg.K, n, cfg.M),
            "flops_sdp": flops_sdp(i_sdp, cfg.K, n, cfg.M),
        })
    return rows
