"""Successive convex bounding of the secrecy objective, solved exactly.

Each round freezes the interference inverses D_k at the previous Gramians,
turning every convex -log|E| term into an affine one; what remains is a
sum of concave log-dets of affine matrix expressions under a trace budget,
which an interior-point solver maximizes globally.  Re-tightening the
bound at the new point and repeating climbs the true objective.

All solves run in noise-normalized units (F / sigma2 against unit noise):
the rates only depend on that ratio, and watt-scale budgets of 1e-12 and
below would starve the solver's absolute tolerances.
"""

from __future__ import annotations

import time
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np
import cvxpy as cp

from .model import (_floor_cov, _herm, effective, mmse_gramians,
                    relaxed_objective, score, snr_to_pmax, worst_eavesdropper)

_ACCEPTED = ("optimal", "optimal_inaccurate")


class SolverFailure(RuntimeError):
    """Interior-point solve ended without a usable point."""

    def __init__(self, status):
        super().__init__(f"solver returned status {status!r}")
        self.status = status


def taylor_point(F, H, sigma2):
    """Interference-plus-noise inverses D_k at the current Gramians."""
    return [_herm(np.linalg.inv(_floor_cov(k, {k}, H, F, sigma2)))
            for k in range(len(F))]


def _project_feasible(F, p_max):
    """Clip solver jitter back onto the feasible set.

    Interior-point answers tagged inaccurate can carry eigenvalues a few
    1e-6 below zero; the nearest PSD matrix just drops them.  If the clip
    (or the solve itself) leaves the trace sum over budget, a uniform
    rescale restores it, which also turns the p_max = 0 case into exact
    zeros.
    """
    out = []
    for Fk in F:
        w, Q = np.linalg.eigh(Fk)
        if w[0] < 0.0:
            Fk = (Q * np.clip(w, 0.0, None)) @ Q.conj().T
        out.append(Fk)
    total = sum(np.trace(Fk).real for Fk in out)
    if total > p_max and total > 0.0:
        out = [(p_max / total) * Fk for Fk in out]
    return out


def solve_sdp_iteration(D, e_tilde, H, sigma2, p_max, solver="CLARABEL"):
    """One convex bound maximization.  Returns (Gramians, status, value).

    The objective keeps every log-det term whose argument is affine in the
    F_k and replaces each -log|E| with its tangent -tr(D E), constants
    dropped; `value` is the solver's optimum in nats.  For a lone user the
    leakage sum is empty and the problem is plain rate maximization.
    """
    K = len(H)
    N = H[0].shape[1]
    Fv = [cp.Variable((N, N), hermitian=True) for _ in range(K)]

    def floor_expr(rx, skip):
        E = sigma2 * np.eye(H[rx].shape[0])
        for j in range(K):
            if j not in skip:
                E = E + H[rx] @ Fv[j] @ H[rx].conj().T
        return E

    obj = 0
    for k in range(K):
        Ek = floor_expr(k, {k})
        obj = obj + cp.log_det(Ek + H[k] @ Fv[k] @ H[k].conj().T)
        obj = obj - cp.real(cp.trace(D[k] @ Ek))
    if K > 1:
        for k in range(K):
            e = e_tilde[k]
            # leakage floor excludes streams k and e; adding stream k back
            # gives exactly terminal e's own interference floor, so its
            # tangent reuses D_e
            obj = obj + cp.log_det(floor_expr(e, {k, e}))
            obj = obj - cp.real(cp.trace(D[e] @ floor_expr(e, {e})))
    constraints = [f >> 0 for f in Fv]
    constraints.append(cp.real(sum(cp.trace(f) for f in Fv)) <= p_max)
    prob = cp.Problem(cp.Maximize(obj), constraints)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")     # status string carries accuracy info
        prob.solve(solver=solver)
    if prob.status not in _ACCEPTED:
        raise SolverFailure(prob.status)
    F_opt = _project_feasible([_herm(f.value) for f in Fv], p_max)
    return F_opt, prob.status, float(prob.value)


@dataclass
class SdpState:
    iter_sdp: int = 0
    converged: bool = False
    solver_status: str = "init"
    objective_trace: list = field(default_factory=list)


def solve_drop(H, sigma2, p_max, max_iter=30, eps=1e-4, solver="CLARABEL"):
    """Bound-and-resolve loop for one channel realization.

    Starts from the simulator's MMSE Gramians and stops once the largest
    per-user Frobenius change falls under eps * (p_max / sigma2) in
    normalized units, or after max_iter rounds.  Returns Gramians in the
    caller's (watt) scale plus an SdpState whose objective_trace holds the
    relaxed secrecy objective in bits, entry 0 at the start.
    """
    p_norm = p_max / sigma2
    F = [Fk / sigma2 for Fk in mmse_gramians(H, sigma2, p_max)]
    state = SdpState()
    state.objective_trace.append(relaxed_objective(F, H, 1.0))
    for i in range(max_iter):
        D = taylor_point(F, H, 1.0)
        et = [worst_eavesdropper(k, H, F, 1.0)[0] for k in range(len(H))]
        F_new, status, _ = solve_sdp_iteration(D, et, H, 1.0, p_norm, solver)
        delta = max(np.linalg.norm(fn - f) for fn, f in zip(F_new, F))
        F = F_new
        state.iter_sdp = i + 1
        state.solver_status = status
        state.objective_trace.append(relaxed_objective(F, H, 1.0))
        if delta < eps * p_norm:
            state.converged = True
            break
    return [sigma2 * Fk for Fk in F], state


def _drops_fieldnames(K):
    base = ["algo", "snr_db", "drop", "channel_crc", "status", "converged",
            "iter_sdp", "power_used", "sum_rate", "sum_leakage", "sum_secrecy"]
    for k in range(K):
        base += [f"eta_i_{k}", f"eta_l_{k}", f"e_worst_{k}", f"secrecy_{k}"]
    return base + ["solver_status"]


# the simulator's summary schema, plus the solver status tally
SUMMARY_FIELDS = ["algo", "snr_db", "drops", "failed", "converged_frac",
                  "mean_sum_secrecy", "se_sum_secrecy",
                  "mean_sum_rate", "se_sum_rate",
                  "mean_sum_leakage", "se_sum_leakage",
                  "mean_wall_s", "seed", "solver_status"]


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path, fieldnames, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(f, "")) for f in fieldnames) + "\n")


def _mean_se(vals):
    a = np.asarray(vals, dtype=float)
    if a.size == 0:
        return float("nan"), float("nan")
    if a.size == 1:
        return float(a[0]), 0.0
    return float(a.mean()), float(a.std(ddof=1) / np.sqrt(a.size))


def run_detmax(dump_path, scen, snr_db, out_prefix, drops=None,
               max_iter=30, eps=1e-4, solver="CLARABEL"):
    """Solve every dumped drop at one SNR and write drops + summary CSVs.

    `drops` limits the run to the first n drop indices.  A drop whose
    solve fails is recorded with status "failed" and skipped in the means.
    Returns (paths, rows).
    """
    from .model import load_dump      # local to keep module import light

    dumped = load_dump(dump_path, scen)
    keys = sorted(dumped)
    if drops is not None:
        keys = keys[:drops]
    p_max = snr_to_pmax(scen, snr_db)
    rows = []
    walls = []
    for d in keys:
        H = effective(dumped[d])
        row = {"algo": "sdp", "snr_db": snr_db, "drop": d,
               "channel_crc": int(zlib.crc32(np.ascontiguousarray(H).tobytes())),
               "status": "ok"}
        t0 = time.perf_counter()
        try:
            F, state = solve_drop(H, scen.sigma2_w, p_max,
                                  max_iter=max_iter, eps=eps, solver=solver)
        except (SolverFailure, np.linalg.LinAlgError) as exc:
            row["status"] = "failed"
            row["solver_status"] = getattr(exc, "status", type(exc).__name__)
            rows.append(row)
            continue
        walls.append(time.perf_counter() - t0)
        sc = score(F, H, scen.sigma2_w)
        row.update({
            "converged": int(state.converged),
            "iter_sdp": state.iter_sdp,
            "power_used": sc["power"],
            "sum_rate": sc["sum_rate"],
            "sum_leakage": sc["sum_leakage"],
            "sum_secrecy": sc["sum_secrecy"],
            "solver_status": state.solver_status,
        })
        for k in range(scen.K):
            row[f"eta_i_{k}"] = float(sc["eta_i"][k])
            row[f"eta_l_{k}"] = float(sc["eta_l"][k])
            row[f"e_worst_{k}"] = int(sc["e_worst"][k])
            row[f"secrecy_{k}"] = float(sc["secrecy"][k])
        rows.append(row)

    ok = [r for r in rows if r["status"] == "ok"]
    tally = {}
    for r in rows:
        s = r.get("solver_status", "failed")
        tally[s] = tally.get(s, 0) + 1
    summary = {"algo": "sdp", "snr_db": snr_db,
               "drops": len(rows), "failed": len(rows) - len(ok),
               "converged_frac": (float(np.mean([r["converged"] for r in ok]))
                                  if ok else float("nan")),
               "mean_wall_s": float(np.mean(walls)) if walls else float("nan"),
               "seed": "",
               "solver_status": ";".join(f"{k}:{v}" for k, v in sorted(tally.items()))}
    for key in ("sum_secrecy", "sum_rate", "sum_leakage"):
        m, se = _mean_se([r[key] for r in ok])
        summary[f"mean_{key}"] = m
        summary[f"se_{key}"] = se

    prefix = str(out_prefix)
    paths = [prefix + ".drops.csv", prefix + ".summary.csv"]
    _write_csv(paths[0], _drops_fieldnames(scen.K), rows)
    _write_csv(paths[1], SUMMARY_FIELDS, [summary])
    return paths, rows
