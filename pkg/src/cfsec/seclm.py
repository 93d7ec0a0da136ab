"""Secrecy-leakage-minimizing beamformer via nested fractional programming.

The relaxed objective sum_k (eta_I[k] - eta_L[k, e~_k]) is handled in three
layers:

* an outer loop that pins each user's worst eavesdropper e~_k and rebuilds
  the intended-rate surrogate state (M_I, Gamma_I, Y_I) at the current
  iterate,
* an inner convex-concave loop that rebuilds the leakage surrogate state
  (M_L, Gamma_L, Y_L) every pass and linearizes the leakage term around the
  iterate,
* a closed-form precoder update whose single Lagrange multiplier mu is
  found by bisection on the total power, followed by a backtracking step
  toward the update that keeps the relaxed objective non-decreasing (the
  linearized leakage model holds only locally, so the raw update may
  overshoot; the damped step restores monotone ascent).

Both rate heads use the same two-step surrogate.  For a link with signal
S = H V, interference-plus-noise E and total covariance M = S S^H + E:

    eta            = log2|I + S S^H E^-1|
    eta_ldt(Gamma) = log2|I+Gamma| + (-tr Gamma + tr((I+Gamma) S^H M^-1 S)) / ln 2
    eta_qt(Gamma,Y)= as above with  2 Re tr((I+Gamma) S^H Y) - tr((I+Gamma) Y^H M Y)

with multipliers Gamma = S^H E^-1 S and Y = M^-1 S taken at the previous
iterate.  Gamma enters as S^H E^-1 S (not S E^-1 S^H): only that ordering
makes both bounds coincide with eta at the expansion point, which the
surrogate-tightness tests pin to 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complexity import flops_proposed
from .metrics import (BeamformerSet, evaluate, relaxed_secrecy_objective,
                      worst_eavesdropper, LN2)
from .mmse import rx_mmse, tx_mmse_init


@dataclass
class FpAux:
    """Frozen surrogate state for one rate head (intended or leakage).

    Entry i describes user i's term: rx[i] is the receiving terminal
    (i itself for the intended head, e~_i for leakage), skip[i] the
    transmitter left out of the live covariance (none for the intended
    head, e~_i for leakage, whose own stream is already cancelled).
    """
    rx: list
    skip: list
    m: list          # frozen M at the expansion point, (M, M) each
    gamma: list      # (M, M) multipliers, Hermitian PSD
    y: list          # (M, M) quadratic-transform multipliers


def _aux_entry(S, E):
    m_frozen = E + S @ S.conj().T
    gamma = S.conj().T @ np.linalg.solve(E, S)
    gamma = 0.5 * (gamma + gamma.conj().T)
    y = np.linalg.solve(m_frozen, S)
    return m_frozen, gamma, y


def _rx_cov(rx, V, H, sigma2, exclude):
    M = H[rx].shape[0]
    C = sigma2 * np.eye(M, dtype=complex)
    for kp in range(len(V)):
        if kp in exclude:
            continue
        S = H[rx] @ V[kp]
        C += S @ S.conj().T
    return 0.5 * (C + C.conj().T)


def build_aux_i(V, H, sigma2) -> FpAux:
    """Intended-head state at the expansion point V: M_I, Gamma_I, Y_I."""
    K = len(V)
    aux = FpAux(rx=list(range(K)), skip=[None] * K, m=[], gamma=[], y=[])
    for k in range(K):
        E = _rx_cov(k, V, H, sigma2, exclude={k})
        S = H[k] @ V[k]
        m, g, y = _aux_entry(S, E)
        aux.m.append(m)
        aux.gamma.append(g)
        aux.y.append(y)
    return aux


def build_aux_l(V, e_tilde, H, sigma2) -> FpAux:
    """Leakage-head state at V for the pinned eavesdropper map e_tilde.

    With a single user there is no leakage; the state comes back empty and
    the rest of the machinery treats it as a zero term.
    """
    aux = FpAux(rx=[], skip=[], m=[], gamma=[], y=[])
    for k in range(len(V)):
        e = e_tilde[k]
        E = _rx_cov(e, V, H, sigma2, exclude={k, e})
        S = H[e] @ V[k]
        m, g, y = _aux_entry(S, E)
        aux.rx.append(e)
        aux.skip.append(e)
        aux.m.append(m)
        aux.gamma.append(g)
        aux.y.append(y)
    return aux


def _live_cov(aux, i, V, H, sigma2):
    exclude = set() if aux.skip[i] is None else {aux.skip[i]}
    return _rx_cov(aux.rx[i], V, H, sigma2, exclude)


def ldt_surrogate(i, V, aux: FpAux, H, sigma2):
    """First-stage surrogate of entry i at precoders V, in bits.

    Equals the true rate when V is the expansion point of aux; a lower
    bound elsewhere.
    """
    S = H[aux.rx[i]] @ V[i]
    m_live = _live_cov(aux, i, V, H, sigma2)
    IG = np.eye(S.shape[1], dtype=complex) + aux.gamma[i]
    _, ldg = np.linalg.slogdet(IG)
    ratio = np.trace(IG @ (S.conj().T @ np.linalg.solve(m_live, S))).real
    return (ldg - np.trace(aux.gamma[i]).real + ratio) / LN2


def qt_surrogate(i, V, aux: FpAux, H, sigma2):
    """Second-stage surrogate, quadratic in V; equals ldt at the expansion."""
    S = H[aux.rx[i]] @ V[i]
    m_live = _live_cov(aux, i, V, H, sigma2)
    IG = np.eye(S.shape[1], dtype=complex) + aux.gamma[i]
    _, ldg = np.linalg.slogdet(IG)
    lin = 2.0 * np.trace(IG @ (S.conj().T @ aux.y[i])).real
    quad = np.trace(IG @ (aux.y[i].conj().T @ m_live @ aux.y[i])).real
    return (ldg - np.trace(aux.gamma[i]).real + lin - quad) / LN2


def leakage_gradient(V, aux_l: FpAux, H):
    """Gradient of sum_k qt_surrogate(k) over the leakage head, w.r.t. each V_k.

    Convention: for real-valued f, grad = df/dRe(V) + j df/dIm(V), which is
    what central finite differences of the surrogate reconstruct.  Entry j:

        2 H_{e~_j}^H Y_L[j] (I + Gamma_L[j])
        - 2 sum_{k: e~_k != j} B_k V_j,   B_k = A_k (I+Gamma_L[k]) A_k^H,
                                          A_k = H_{e~_k}^H Y_L[k]

    in bits (the 1/ln 2 of the surrogate is included).  The k-sum skips
    terms with e~_k = j because V_j never enters that eavesdropper's live
    covariance.
    """
    K = len(V)
    if not aux_l.rx:
        return [np.zeros_like(Vk) for Vk in V]
    IGs = []
    Bs = []
    for k in range(K):
        IG = np.eye(aux_l.gamma[k].shape[0], dtype=complex) + aux_l.gamma[k]
        A = H[aux_l.rx[k]].conj().T @ aux_l.y[k]
        IGs.append(IG)
        Bs.append(A @ IG @ A.conj().T)
    grads = []
    for j in range(K):
        lin = H[aux_l.rx[j]].conj().T @ aux_l.y[j] @ IGs[j]
        quad = np.zeros_like(V[j])
        for k in range(K):
            if aux_l.skip[k] != j:
                quad += Bs[k] @ V[j]
        grads.append((2.0 * lin - 2.0 * quad) / LN2)
    return grads


def update_precoders(aux_i: FpAux, grad, H, p_max, i_bs_max,
                     power_rtol=1e-6):
    """One batch precoder update under the frozen intended-head state.

    Solves, for every user simultaneously,

        V_k = (mu I + D)^-1 (H_k^H Y_I[k] (I+Gamma_I[k]) - grad_k ln2 / 2),
        D   = sum_k' H_k'^H Y_I[k'] (I+Gamma_I[k']) Y_I[k']^H H_k'

    with one shared mu >= 0 picked by bisection so total power stays within
    p_max (hit with equality whenever mu > 0).  grad is the leakage
    gradient in bits (or None to drop the leakage term, which is the
    sum-rate specialization).  Returns (V, mu, bisection_steps).
    """
    K = len(aux_i.y)
    N = H[0].shape[1]
    D = np.zeros((N, N), dtype=complex)
    rhs = []
    for k in range(K):
        IG = np.eye(aux_i.gamma[k].shape[0], dtype=complex) + aux_i.gamma[k]
        W = H[aux_i.rx[k]].conj().T @ aux_i.y[k]
        D += W @ IG @ W.conj().T
        r = W @ IG
        if grad is not None:
            r = r - 0.5 * LN2 * grad[k]
        rhs.append(r)
    if p_max <= 0.0:
        return [np.zeros_like(r) for r in rhs], math.inf, 0

    D = 0.5 * (D + D.conj().T)
    lam, Q = np.linalg.eigh(D)
    lam = np.clip(lam, 0.0, None)
    coords = [Q.conj().T @ r for r in rhs]
    sq = np.zeros(N)
    for c in coords:
        sq += (np.abs(c) ** 2).sum(axis=1)

    def power_at(mu):
        den = (lam + mu) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = sq / den
        bad = ~np.isfinite(terms)
        if np.any(bad & (sq > 0)):
            return math.inf
        terms = np.where(bad, 0.0, terms)
        return float(terms.sum())

    nbs = 0
    if power_at(0.0) <= p_max:
        mu = 0.0
    else:
        hi = 1.0
        guard = 0
        while power_at(hi) > p_max:
            hi *= 2.0
            guard += 1
            if guard > 600:
                raise RuntimeError("could not bracket the power constraint")
        lo = hi / 2.0 if guard else 0.0
        p_lo, p_hi = power_at(lo), power_at(hi)
        if p_lo <= p_max:      # guard == 1 edge: lo may already be feasible
            lo = 0.0
            p_lo = power_at(0.0)
        while nbs < i_bs_max and (p_lo - p_hi) > power_rtol * p_max:
            mid = 0.5 * (lo + hi)
            p_mid = power_at(mid)
            if p_mid > p_max:
                lo, p_lo = mid, p_mid
            else:
                hi, p_hi = mid, p_mid
            nbs += 1
        mu = hi
    scale = 1.0 / (lam + mu)
    V = [Q @ (c * scale[:, None]) for c in coords]
    return V, mu, nbs


@dataclass
class FpState:
    """Solver state returned next to the beamformers, mostly for inspection."""
    gamma_i: list = None
    y_i: list = None
    m_i: list = None
    gamma_l: list = None
    y_l: list = None
    m_l: list = None
    e_tilde: list = field(default_factory=list)
    v_prev: list = None
    iter_fp: int = 0
    iter_ccp: int = 0          # total inner passes across all outer rounds
    bisect_total: int = 0
    mu_last: float = 0.0
    objective_trace: list = field(default_factory=list)
    iter_records: list = field(default_factory=list)
    converged: bool = False


def _max_delta(Va, Vb):
    return max(float(np.linalg.norm(a - b)) for a, b in zip(Va, Vb))


def _damped_step(V0, V_star, f0, H, sigma2, tries=9):
    """Longest step toward V_star that improves the relaxed objective.

    The linearized leakage term is only trustworthy near the expansion
    point, so the raw update can overshoot into higher-leakage territory
    and ping-pong there.  Walking back along the segment V0 -> V_star
    (which stays inside the power ball, the ball being convex) until the
    true relaxed objective improves restores monotone ascent; if even the
    shortest step fails, the iterate is kept and the caller stops.
    Returns (V, f, accepted).
    """
    step = 1.0
    for _ in range(tries):
        cand = [v0 + step * (vs - v0) for v0, vs in zip(V0, V_star)]
        f = relaxed_secrecy_objective(cand, H, sigma2)
        if f > f0 + 1e-12:
            return cand, f, True
        step *= 0.5
    return V0, f0, False


def run_seclm(cfg, channels, p_max=None):
    """Full nested solve from the MMSE start.

    Stops each loop once the largest per-user precoder change drops below
    eps * sqrt(p_max) (tolerances act on the unit-power scale) or at the
    iteration caps; a run that only hit the caps reports converged=False.
    Returns (BeamformerSet, FpState, MetricsRecord).
    """
    H = channels.eff if hasattr(channels, "eff") else channels
    sigma2 = cfg.sigma2_w
    P = cfg.p_max_ref_w if p_max is None else float(p_max)
    K = len(H)
    V = tx_mmse_init(H, sigma2, P)
    scale = math.sqrt(P) if P > 0 else 1.0

    state = FpState(v_prev=[v.copy() for v in V])
    obj_cur = relaxed_secrecy_objective(V, H, sigma2)
    state.objective_trace.append(obj_cur)
    aux_i = aux_l = None
    e_tilde = []
    for n in range(cfg.i_fp_max):
        v_outer = V
        if K > 1:
            F = [Vk @ Vk.conj().T for Vk in V]
            e_tilde = [worst_eavesdropper(k, H, F, sigma2)[0] for k in range(K)]
        aux_i = build_aux_i(V, H, sigma2)
        for _ in range(cfg.i_ccp_max):
            if K > 1:
                aux_l = build_aux_l(V, e_tilde, H, sigma2)
                grad = leakage_gradient(V, aux_l, H)
            else:
                grad = None
            V_star, mu, nbs = update_precoders(aux_i, grad, H, P, cfg.i_bs_max)
            state.iter_ccp += 1
            state.bisect_total += nbs
            V_new, obj_new, accepted = _damped_step(V, V_star, obj_cur,
                                                    H, sigma2)
            if not accepted:
                break
            state.mu_last = mu
            delta = _max_delta(V_new, V)
            V = V_new
            obj_cur = obj_new
            if delta <= cfg.eps_ccp * scale:
                break
        state.iter_fp = n + 1
        state.objective_trace.append(obj_cur)
        obj = obj_cur
        outer_delta = _max_delta(V, v_outer)
        state.iter_records.append({
            "iter": state.iter_fp,
            "objective": obj,
            "power": float(sum(np.linalg.norm(v) ** 2 for v in V)),
            "max_delta": outer_delta,
        })
        state.v_prev = v_outer
        if outer_delta <= cfg.eps_fp * scale:
            state.converged = True
            break

    state.e_tilde = e_tilde
    if aux_i is not None:
        state.gamma_i, state.y_i, state.m_i = aux_i.gamma, aux_i.y, aux_i.m
    if aux_l is not None:
        state.gamma_l, state.y_l, state.m_l = aux_l.gamma, aux_l.y, aux_l.m

    U = rx_mmse(H, V, sigma2)
    bf = BeamformerSet(V=V, U=U, p_max=P)
    if state.iter_ccp:
        flops = flops_proposed(1, state.iter_ccp,
                               state.bisect_total / state.iter_ccp,
                               K, H[0].shape[1], H[0].shape[0])
    else:
        flops = 0.0
    rec = evaluate(bf, H, sigma2, flops=flops)
    return bf, state, rec
