"""Small Monte Carlo sweep reproducing the qualitative curve ordering.

40 paired drops across 0..20 dB keep the runtime around a minute while the
ordering is already clear: the secrecy solver tracks the sum-rate baseline
to within a few percent on throughput and cuts the leakage well below it,
with an ever-growing margin over plain MMSE on sum secrecy.  Bump `drops`
for smoother curves.  Writes sweep.drops.csv / sweep.summary.csv next to
this script and, when matplotlib is importable, a sweep.png with the three
panels.
"""

import pathlib

from cfsec import SystemConfig, emit_csv, run_sweep

here = pathlib.Path(__file__).resolve().parent
drops = 40

cfg = SystemConfig()
res = run_sweep(cfg, drops=drops)
paths = emit_csv(res, here / "sweep")
print("wrote", *paths)

by = {(e["algo"], e["snr_db"]): e for e in res.summary}
grid = res.snr_grid_db
print(f"\n{'snr':>5} | {'secrecy  mmse/srm/seclm':>26} | "
      f"{'leakage  srm/seclm':>19} | {'rate  srm/seclm':>16}")
for s in grid:
    m, r, c = by[("mmse", s)], by[("srm", s)], by[("seclm", s)]
    print(f"{s:5.0f} | {m['mean_sum_secrecy']:7.2f} {r['mean_sum_secrecy']:7.2f} "
          f"{c['mean_sum_secrecy']:7.2f}    | {r['mean_sum_leakage']:8.2f} "
          f"{c['mean_sum_leakage']:8.2f}  | {r['mean_sum_rate']:7.2f} "
          f"{c['mean_sum_rate']:7.2f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not available, skipping the figure")
else:
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    for ax, key, title in zip(
            axes,
            ("mean_sum_secrecy", "mean_sum_leakage", "mean_sum_rate"),
            ("sum secrecy", "sum leakage (worst eavesdropper)", "sum rate")):
        for algo, style in (("mmse", "s:"), ("srm", "o--"), ("seclm", "d-")):
            ys = [by[(algo, s)][key] for s in grid]
            es = [by[(algo, s)][key.replace("mean", "se")] for s in grid]
            ax.errorbar(grid, ys, yerr=es, fmt=style, label=algo, capsize=3)
        ax.set_xlabel("transmit SNR (dB)")
        ax.set_ylabel("bits per channel use")
        ax.set_title(f"{title}, {drops} drops")
        ax.grid(alpha=0.3)
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(here / "sweep.png", dpi=120)
    print(f"\nfigure at {here / 'sweep.png'}")
