"""Per-user rate, leakage, and secrecy bookkeeping.

Every other terminal is treated as a potential eavesdropper on user k's
stream; the eavesdropper is assumed to have already decoded and removed its
own intended signal, which is why its interference floor excludes both k's
and its own precoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LN2 = float(np.log(2.0))


def _hfh(H_rx, F):
    """H F H^H for one receiver, kept Hermitian."""
    A = H_rx @ F @ H_rx.conj().T
    return 0.5 * (A + A.conj().T)


def interference_cov(k, H, F, sigma2):
    """E_k = sum_{k' != k} H_k F_{k'} H_k^H + sigma2 I at user k's receiver."""
    M = H[k].shape[0]
    E = sigma2 * np.eye(M, dtype=complex)
    for kp in range(len(F)):
        if kp != k:
            E += _hfh(H[k], F[kp])
    return E


def eav_interference_cov(k, e, H, F, sigma2):
    """Interference floor at eavesdropper e overhearing user k's stream.

    Excludes k' = k (the overheard signal itself) and k' = e (the
    eavesdropper's own, already-decoded stream).
    """
    if e == k:
        raise ValueError(f"eavesdropper index e={e} must differ from user k={k}")
    M = H[e].shape[0]
    E = sigma2 * np.eye(M, dtype=complex)
    for kp in range(len(F)):
        if kp != k and kp != e:
            E += _hfh(H[e], F[kp])
    return E


def _logdet_ratio_bits(E, A):
    """log2 det(E + A) - log2 det(E) for Hermitian PD E and PSD A."""
    _, ld1 = np.linalg.slogdet(E + A)
    _, ld0 = np.linalg.slogdet(E)
    return (ld1 - ld0) / LN2


def intended_rate(k, H, F, sigma2):
    """Achievable rate of user k in bits: log2|I + H_k F_k H_k^H E_k^-1|."""
    E = interference_cov(k, H, F, sigma2)
    return _logdet_ratio_bits(E, _hfh(H[k], F[k]))


def leakage_rate(k, e, H, F, sigma2):
    """Rate at which eavesdropper e decodes user k's stream, in bits."""
    E = eav_interference_cov(k, e, H, F, sigma2)
    return _logdet_ratio_bits(E, _hfh(H[e], F[k]))


def worst_eavesdropper(k, H, F, sigma2):
    """(index, rate) of the strongest eavesdropper on user k.

    Ties go to the smaller index.  With a single user there is nobody to
    overhear, so the sentinel (-1, 0.0) comes back.
    """
    K = len(F)
    best_e, best_rate = -1, 0.0
    for e in range(K):
        if e == k:
            continue
        r = leakage_rate(k, e, H, F, sigma2)
        if best_e < 0 or r > best_rate:
            best_e, best_rate = e, r
    return best_e, best_rate


@dataclass
class BeamformerSet:
    """Precoders (and optionally combiners) for all users under one budget."""
    V: list                      # K entries, (N, M) precoders
    U: list = None               # K entries, (M, M) RX combiners, optional
    p_max: float = None

    @property
    def F(self):
        """Transmit Gramians V_k V_k^H."""
        return [Vk @ Vk.conj().T for Vk in self.V]

    @property
    def power(self):
        return float(sum(np.linalg.norm(Vk) ** 2 for Vk in self.V))


@dataclass
class MetricsRecord:
    eta_i: np.ndarray            # (K,) intended rates, bits
    eta_l_worst: np.ndarray      # (K,) worst-eavesdropper leakage, bits
    e_worst: np.ndarray          # (K,) eavesdropper index, -1 when K == 1
    secrecy: np.ndarray          # (K,) max(eta_i - eta_l_worst, 0)
    sum_rate: float
    sum_leakage: float
    sum_secrecy: float
    power_used: float
    flops: float = 0.0


def evaluate(bf: BeamformerSet, H, sigma2, flops=0.0) -> MetricsRecord:
    """Score a beamformer set on one channel realization.

    The secrecy clamp at zero happens here, at reporting time only; the
    solvers track the unclamped objective internally.
    """
    F = bf.F
    K = len(F)
    eta_i = np.empty(K)
    eta_l = np.empty(K)
    e_idx = np.empty(K, dtype=int)
    for k in range(K):
        eta_i[k] = intended_rate(k, H, F, sigma2)
        e_idx[k], eta_l[k] = worst_eavesdropper(k, H, F, sigma2)
    secrecy = np.maximum(eta_i - eta_l, 0.0)
    return MetricsRecord(
        eta_i=eta_i,
        eta_l_worst=eta_l,
        e_worst=e_idx,
        secrecy=secrecy,
        sum_rate=float(eta_i.sum()),
        sum_leakage=float(eta_l.sum()),
        sum_secrecy=float(secrecy.sum()),
        power_used=bf.power,
        flops=float(flops),
    )


def relaxed_secrecy_objective(V, H, sigma2):
    """Unclamped sum of (intended - worst leakage), the solver's objective."""
    F = [Vk @ Vk.conj().T for Vk in V]
    total = 0.0
    for k in range(len(V)):
        _, lk = worst_eavesdropper(k, H, F, sigma2)
        total += intended_rate(k, H, F, sigma2) - lk
    return total
