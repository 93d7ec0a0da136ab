"""Sum-rate-maximizing baseline: the FP machinery with the leakage head off."""

from __future__ import annotations

import math

import numpy as np

from .complexity import flops_srm
from .metrics import BeamformerSet, evaluate, intended_rate
from .mmse import rx_mmse, tx_mmse_init
from .seclm import FpState, _max_delta, build_aux_i, update_precoders


def run_srm(cfg, channels, p_max=None):
    """Iterate surrogate refresh + precoder update on the sum rate alone.

    Same stopping rule as the secrecy solver (eps_fp on the unit-power
    scale, cap i_fp_max); each refresh is tight at the iterate, so the sum
    rate ascends monotonically up to bisection tolerance.  Returns
    (BeamformerSet, FpState, MetricsRecord).
    """
    H = channels.eff if hasattr(channels, "eff") else channels
    sigma2 = cfg.sigma2_w
    P = cfg.p_max_ref_w if p_max is None else float(p_max)
    K = len(H)
    V = tx_mmse_init(H, sigma2, P)
    scale = math.sqrt(P) if P > 0 else 1.0

    def sum_rate(Vc):
        F = [Vk @ Vk.conj().T for Vk in Vc]
        return float(sum(intended_rate(k, H, F, sigma2) for k in range(K)))

    state = FpState(v_prev=[v.copy() for v in V])
    state.objective_trace.append(sum_rate(V))
    aux_i = None
    for n in range(cfg.i_fp_max):
        aux_i = build_aux_i(V, H, sigma2)
        V_new, mu, nbs = update_precoders(aux_i, None, H, P, cfg.i_bs_max)
        state.iter_fp = n + 1
        state.bisect_total += nbs
        state.mu_last = mu
        delta = _max_delta(V_new, V)
        V = V_new
        obj = sum_rate(V)
        state.objective_trace.append(obj)
        state.iter_records.append({
            "iter": state.iter_fp,
            "objective": obj,
            "power": float(sum(np.linalg.norm(v) ** 2 for v in V)),
            "max_delta": delta,
        })
        if delta <= cfg.eps_fp * scale:
            state.converged = True
            break

    if aux_i is not None:
        state.gamma_i, state.y_i, state.m_i = aux_i.gamma, aux_i.y, aux_i.m

    U = rx_mmse(H, V, sigma2)
    bf = BeamformerSet(V=V, U=U, p_max=P)
    if state.iter_fp:
        flops = flops_srm(state.iter_fp, state.bisect_total / state.iter_fp,
                          K, H[0].shape[1], H[0].shape[0])
    else:
        flops = 0.0
    rec = evaluate(bf, H, sigma2, flops=flops)
    return bf, state, rec
