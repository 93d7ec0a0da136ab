import dataclasses

import numpy as np
import pytest

from cfsec.config import SystemConfig, place_nodes, snr_to_pmax
from cfsec.channel import build_channel_set
from cfsec.metrics import (LN2, intended_rate, leakage_rate,
                           relaxed_secrecy_objective)
from cfsec.mmse import tx_mmse_init
from cfsec.seclm import (build_aux_i, build_aux_l, ldt_surrogate,
                         leakage_gradient, qt_surrogate, run_seclm,
                         update_precoders)
from cfsec.simulate import drop_rng
from conftest import random_instance


def gramians(V):
    return [v @ v.conj().T for v in V]


def test_aux_i_scalar_hand_values():
    # one scalar user, H = V = sigma2 = 1: M = 2, Gamma = 1, Y = 1/2
    H = [np.array([[1.0 + 0j]])]
    V = [np.array([[1.0 + 0j]])]
    aux = build_aux_i(V, H, 1.0)
    assert aux.m[0][0, 0] == pytest.approx(2.0, abs=1e-14)
    assert aux.gamma[0][0, 0] == pytest.approx(1.0, abs=1e-14)
    assert aux.y[0][0, 0] == pytest.approx(0.5, abs=1e-14)


def test_aux_scalar_two_user_hand_values():
    h0, h1, v0, v1, s2 = 1.3, 0.8, 1.2, 0.9, 0.5
    H = [np.array([[h0 + 0j]]), np.array([[h1 + 0j]])]
    V = [np.array([[v0 + 0j]]), np.array([[v1 + 0j]])]
    aux_l = build_aux_l(V, [1, 0], H, s2)
    # eavesdropper 1 overhears user 0 with only noise left after SIC
    assert aux_l.m[0][0, 0] == pytest.approx(s2 + (h1 * v0) ** 2, abs=1e-12)
    assert aux_l.gamma[0][0, 0] == pytest.approx((h1 * v0) ** 2 / s2, abs=1e-12)
    assert aux_l.y[0][0, 0] == pytest.approx(
        h1 * v0 / (s2 + (h1 * v0) ** 2), abs=1e-12)
    aux_i = build_aux_i(V, H, s2)
    E0 = s2 + (h0 * v1) ** 2
    assert aux_i.m[0][0, 0] == pytest.approx(E0 + (h0 * v0) ** 2, abs=1e-12)
    assert aux_i.gamma[0][0, 0] == pytest.approx((h0 * v0) ** 2 / E0, abs=1e-12)


def test_aux_at_zero_precoders():
    H = [np.ones((2, 4), dtype=complex) for _ in range(2)]
    V = [np.zeros((4, 2), dtype=complex) for _ in range(2)]
    aux = build_aux_i(V, H, 0.7)
    for k in range(2):
        assert np.allclose(aux.m[k], 0.7 * np.eye(2))
        assert np.allclose(aux.gamma[k], 0.0)
        assert np.allclose(aux.y[k], 0.0)
    aux_l = build_aux_l(V, [1, 0], H, 0.7)
    assert np.allclose(aux_l.m[0], 0.7 * np.eye(2))
    assert np.allclose(leakage_gradient(V, aux_l, H)[0], 0.0)


def test_empty_leakage_head_gives_zero_gradient():
    # single user: the solver never builds a leakage head; the gradient
    # helper treats an empty aux as a zero term
    from cfsec.seclm import FpAux
    H = [np.ones((2, 4), dtype=complex)]
    V = [np.ones((4, 2), dtype=complex)]
    empty = FpAux(rx=[], skip=[], m=[], gamma=[], y=[])
    g = leakage_gradient(V, empty, H)
    assert np.allclose(g[0], 0.0)


def test_surrogate_tightness_at_expansion(rng):
    for _ in range(10):
        H, V = random_instance(rng, K=4, M=2, N=8)
        F = gramians(V)
        aux_i = build_aux_i(V, H, 1.0)
        for k in range(4):
            eta = intended_rate(k, H, F, 1.0)
            ldt = ldt_surrogate(k, V, aux_i, H, 1.0)
            qt = qt_surrogate(k, V, aux_i, H, 1.0)
            assert ldt == pytest.approx(eta, abs=1e-8)
            assert qt == pytest.approx(ldt, abs=1e-8)


def test_leakage_surrogate_tightness(rng):
    H, V = random_instance(rng, K=3, M=2, N=6)
    F = gramians(V)
    et = [1, 2, 0]
    aux_l = build_aux_l(V, et, H, 1.0)
    for k in range(3):
        eta = leakage_rate(k, et[k], H, F, 1.0)
        assert ldt_surrogate(k, V, aux_l, H, 1.0) == pytest.approx(eta, abs=1e-8)
        assert qt_surrogate(k, V, aux_l, H, 1.0) == pytest.approx(eta, abs=1e-8)


def test_surrogates_lower_bound_everywhere(rng):
    """Frozen-multiplier surrogates stay below the true rate at any V,
    and the quadratic stage stays below the first stage."""
    H, V0 = random_instance(rng, K=3, M=2, N=6)
    aux = build_aux_i(V0, H, 1.0)
    for _ in range(300):
        Vp = [v + rng.uniform(0.1, 3.0)
              * (rng.standard_normal(v.shape) + 1j * rng.standard_normal(v.shape))
              for v in V0]
        F = gramians(Vp)
        for k in range(3):
            eta = intended_rate(k, H, F, 1.0)
            ldt = ldt_surrogate(k, Vp, aux, H, 1.0)
            qt = qt_surrogate(k, Vp, aux, H, 1.0)
            assert ldt <= eta + 1e-8
            assert qt <= ldt + 1e-8


def fd_gradient(f, V, step=1e-6):
    """Central differences d f / d Re + j d f / d Im, entry by entry."""
    grads = []
    for k, Vk in enumerate(V):
        g = np.zeros_like(Vk)
        for idx in np.ndindex(Vk.shape):
            for unit, sign in ((1.0, 1.0), (1j, 1j)):
                Vp = [v.copy() for v in V]
                Vm = [v.copy() for v in V]
                Vp[k][idx] += step * unit
                Vm[k][idx] -= step * unit
                g[idx] += sign * (f(Vp) - f(Vm)) / (2 * step)
        grads.append(g)
    return grads


def test_leakage_gradient_matches_finite_differences(rng):
    for _ in range(5):
        H, V = random_instance(rng, K=4, M=2, N=8)
        et = [int(e) for e in rng.permutation(4)]
        while any(et[k] == k for k in range(4)):
            et = [int(e) for e in rng.permutation(4)]
        aux_l = build_aux_l(V, et, H, 1.0)

        def leak_sum(Vc):
            return sum(qt_surrogate(k, Vc, aux_l, H, 1.0) for k in range(4))

        want = fd_gradient(leak_sum, V)
        got = leakage_gradient(V, aux_l, H)
        for k in range(4):
            rel = (np.linalg.norm(got[k] - want[k])
                   / max(np.linalg.norm(want[k]), 1e-12))
            assert rel < 1e-5


def test_leakage_gradient_scalar_symbolic():
    """K=2 real scalars: d/dv0 of user 0's frozen surrogate is
    2 (1+g) (h1 y - h1^2 y^2 v0) / ln2 and user 1's term has no v0 in it."""
    h0, h1, v0, v1, s2 = 1.1, 0.7, 0.9, 1.4, 0.3
    H = [np.array([[h0 + 0j]]), np.array([[h1 + 0j]])]
    V = [np.array([[v0 + 0j]]), np.array([[v1 + 0j]])]
    aux_l = build_aux_l(V, [1, 0], H, s2)
    g0 = float(aux_l.gamma[0][0, 0].real)
    y0 = float(aux_l.y[0][0, 0].real)
    want = 2.0 * (1.0 + g0) * (h1 * y0 - h1 ** 2 * y0 ** 2 * v0) / LN2
    got = leakage_gradient(V, aux_l, H)
    assert got[0][0, 0] == pytest.approx(want, rel=1e-12)


def test_update_precoders_stationarity(rng):
    """The returned precoders must solve (D + mu I) V_k = rhs_k."""
    H, V0 = random_instance(rng, K=3, M=2, N=6)
    aux = build_aux_i(V0, H, 1.0)
    et = [1, 2, 0]
    grad = leakage_gradient(V0, build_aux_l(V0, et, H, 1.0), H)
    P = 2.5
    V, mu, _ = update_precoders(aux, grad, H, P, 60)
    D = np.zeros((6, 6), dtype=complex)
    for k in range(3):
        IG = np.eye(2) + aux.gamma[k]
        W = H[k].conj().T @ aux.y[k]
        D += W @ IG @ W.conj().T
    for k in range(3):
        IG = np.eye(2) + aux.gamma[k]
        rhs = H[k].conj().T @ aux.y[k] @ IG - 0.5 * LN2 * grad[k]
        lhs = (D + mu * np.eye(6)) @ V[k]
        assert np.allclose(lhs, rhs, atol=1e-8 * np.linalg.norm(rhs))


def test_update_precoders_power_window(rng):
    for trial in range(20):
        H, V0 = random_instance(rng, K=3, M=2, N=6)
        aux = build_aux_i(V0, H, 1.0)
        P = float(rng.uniform(0.1, 5.0))
        V, mu, nbs = update_precoders(aux, None, H, P, 60)
        power = sum(float(np.linalg.norm(v) ** 2) for v in V)
        assert power <= P * (1 + 1e-9)
        if mu > 0:
            assert power >= P * (1 - 1e-5)


def test_update_precoders_inactive_constraint(rng):
    H, V0 = random_instance(rng, K=2, M=2, N=4)
    aux = build_aux_i(V0, H, 1.0)
    V, mu, nbs = update_precoders(aux, None, H, 1e12, 60)
    assert mu == 0.0
    assert nbs == 0
    assert sum(np.linalg.norm(v) ** 2 for v in V) < 1e12


def test_update_precoders_zero_budget(rng):
    H, V0 = random_instance(rng, K=2, M=2, N=4)
    aux = build_aux_i(V0, H, 1.0)
    V, mu, _ = update_precoders(aux, None, H, 0.0, 60)
    assert all(np.all(v == 0) for v in V)


def _desk(drop, **overrides):
    cfg = dataclasses.replace(SystemConfig(), **overrides) if overrides else SystemConfig()
    rng = drop_rng(31, drop)
    topo = place_nodes(cfg, rng)
    return cfg, build_channel_set(cfg, topo, rng)


def test_run_seclm_zero_iterations_returns_init():
    cfg, ch = _desk(0, i_fp_max=0)
    P = float(snr_to_pmax(cfg, 10.0))
    bf, state, rec = run_seclm(cfg, ch, P)
    V0 = tx_mmse_init(ch.eff, cfg.sigma2_w, P)
    for a, b in zip(bf.V, V0):
        assert np.array_equal(a, b)
    assert state.iter_fp == 0
    assert not state.converged
    assert len(state.objective_trace) == 1


def test_run_seclm_objective_trace_monotone():
    for drop in range(3):
        cfg, ch = _desk(drop)
        P = float(snr_to_pmax(cfg, 10.0))
        bf, state, rec = run_seclm(cfg, ch, P)
        tr = np.asarray(state.objective_trace)
        assert np.all(np.diff(tr) >= -1e-9)
        assert tr[-1] >= tr[0]
        assert bf.power <= P * (1 + 1e-9)
        # recorded trace end matches a fresh evaluation of the iterate
        assert tr[-1] == pytest.approx(
            relaxed_secrecy_objective(bf.V, ch.eff, cfg.sigma2_w), abs=1e-9)


def test_run_seclm_converges_at_desk_scale():
    cfg, ch = _desk(1)
    bf, state, rec = run_seclm(cfg, ch, float(snr_to_pmax(cfg, 10.0)))
    assert state.converged
    assert state.iter_fp < cfg.i_fp_max
    assert len(state.e_tilde) == cfg.K
    assert rec.flops > 0


def test_run_seclm_single_user_is_rate_maximization():
    cfg, ch = _desk(2, K=1)
    P = float(snr_to_pmax(cfg, 10.0))
    bf, state, rec = run_seclm(cfg, ch, P)
    assert np.all(rec.e_worst == -1)
    assert rec.sum_leakage == 0.0
    assert rec.sum_secrecy == pytest.approx(rec.sum_rate, abs=1e-12)
    V0 = tx_mmse_init(ch.eff, cfg.sigma2_w, P)
    from cfsec.metrics import BeamformerSet, evaluate
    rec0 = evaluate(BeamformerSet(V=V0), ch.eff, cfg.sigma2_w)
    assert rec.sum_rate >= rec0.sum_rate - 1e-9


def test_run_seclm_deterministic():
    cfg, ch = _desk(0)
    P = float(snr_to_pmax(cfg, 10.0))
    bf1, _, _ = run_seclm(cfg, ch, P)
    bf2, _, _ = run_seclm(cfg, ch, P)
    for a, b in zip(bf1.V, bf2.V):
        assert np.array_equal(a, b)
