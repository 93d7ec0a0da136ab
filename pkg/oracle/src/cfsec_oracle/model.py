"""Channel-dump ingestion and Gramian-based rate bookkeeping.

The simulator dumps one text record per (drop, AP, terminal) fading block.
This side re-reads those records, rebuilds the per-user effective channels,
and scores transmit Gramians F_k directly: every rate in play depends on
the precoder V_k only through F_k = V_k V_k^H, so no factorization is ever
needed on this end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN2 = float(np.log(2.0))


class ScenarioError(ValueError):
    """Unusable scenario file or channel dump."""


@dataclass
class Scenario:
    """The subset of the simulator's scenario knobs a dump reader needs."""
    L: int = 4
    K: int = 4
    M: int = 2
    N_t: int = 2
    sigma2_dbm: float = -96.0

    @property
    def N(self) -> int:
        return self.L * self.N_t

    @property
    def sigma2_w(self) -> float:
        return 10.0 ** (self.sigma2_dbm / 10.0) * 1e-3

    def validate(self):
        for name in ("L", "K", "M", "N_t"):
            if getattr(self, name) < 1:
                raise ScenarioError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not np.isfinite(self.sigma2_dbm):
            raise ScenarioError("sigma2_dbm must be finite")
        return self


def read_scenario(path) -> Scenario:
    """Parse a flat key=value scenario file, ignoring simulator-only keys.

    Accepts either N_t or the total antenna count N (then N_t = N / L);
    giving both inconsistently is an error, mirroring the simulator.
    """
    scen = Scenario()
    n_total = None
    nt_given = False
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ScenarioError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, raw = (s.strip() for s in line.split("=", 1))
            try:
                if key in ("L", "K", "M"):
                    setattr(scen, key, int(raw))
                elif key == "N_t":
                    scen.N_t = int(raw)
                    nt_given = True
                elif key == "N":
                    n_total = int(raw)
                elif key == "sigma2_dbm":
                    scen.sigma2_dbm = float(raw)
                # anything else is the simulator's business
            except ValueError as exc:
                raise ScenarioError(f"{path}:{ln}: bad value for {key}: {raw!r}") from exc
    if n_total is not None:
        if n_total % scen.L:
            raise ScenarioError(f"N={n_total} is not divisible by L={scen.L}")
        derived = n_total // scen.L
        if nt_given and derived != scen.N_t:
            raise ScenarioError(
                f"inconsistent antenna counts: N={n_total} vs N_t={scen.N_t} with L={scen.L}")
        scen.N_t = derived
    return scen.validate()


def snr_to_pmax(scen: Scenario, snr_db) -> float:
    """Total TX power realizing transmit SNR = P / sigma^2."""
    return scen.sigma2_w * 10.0 ** (float(snr_db) / 10.0)


def load_dump(path, scen: Scenario):
    """Read a channel dump into {drop: (L, K, M, N_t) complex array}.

    Record format: drop,l,k then the (M x N_t) block row-major as re,im
    pairs.  Header and comment lines are skipped.
    """
    want = 3 + 2 * scen.M * scen.N_t
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("drop,"):
                continue
            toks = line.split(",")
            if len(toks) != want:
                raise ScenarioError(
                    f"{path}:{ln}: expected {want} fields for an "
                    f"{scen.M}x{scen.N_t} block, got {len(toks)}")
            try:
                drop, l, k = int(toks[0]), int(toks[1]), int(toks[2])
                vals = np.array([float(t) for t in toks[3:]])
            except ValueError as exc:
                raise ScenarioError(f"{path}:{ln}: unparsable record") from exc
            if not (0 <= l < scen.L and 0 <= k < scen.K):
                raise ScenarioError(f"{path}:{ln}: block index ({l},{k}) out of range")
            blocks = out.setdefault(
                drop, np.zeros((scen.L, scen.K, scen.M, scen.N_t), dtype=complex))
            blocks[l, k] = (vals[0::2] + 1j * vals[1::2]).reshape(scen.M, scen.N_t)
    return out


def effective(blocks):
    """Per-user effective channels: concatenate AP blocks along columns."""
    L, K, M, Nt = blocks.shape
    return blocks.transpose(1, 2, 0, 3).reshape(K, M, L * Nt)


def _herm(A):
    return 0.5 * (A + A.conj().T)


def _floor_cov(rx, skip, H, F, sigma2):
    """sigma2 I plus every H_rx F_j H_rx^H with j outside `skip`."""
    E = sigma2 * np.eye(H[rx].shape[0], dtype=complex)
    for j in range(len(F)):
        if j not in skip:
            E += _herm(H[rx] @ F[j] @ H[rx].conj().T)
    return E


def _gram_rate_bits(E, S):
    # log2 det(E + S) - log2 det(E), E Hermitian PD, S PSD
    return float((np.linalg.slogdet(E + S)[1] - np.linalg.slogdet(E)[1]) / LN2)


def intended_rate(k, H, F, sigma2):
    E = _floor_cov(k, {k}, H, F, sigma2)
    return _gram_rate_bits(E, _herm(H[k] @ F[k] @ H[k].conj().T))


def leakage_rate(k, e, H, F, sigma2):
    """Rate of terminal e decoding stream k; e's own stream is pre-cancelled."""
    if e == k:
        raise ValueError(f"eavesdropper e={e} must differ from user k={k}")
    E = _floor_cov(e, {k, e}, H, F, sigma2)
    return _gram_rate_bits(E, _herm(H[e] @ F[k] @ H[e].conj().T))


def worst_eavesdropper(k, H, F, sigma2):
    """(index, rate) of the strongest eavesdropper; (-1, 0.0) when alone.

    Ties resolve to the smaller index, matching the simulator.
    """
    best_e, best_r = -1, 0.0
    for e in range(len(F)):
        if e == k:
            continue
        r = leakage_rate(k, e, H, F, sigma2)
        if best_e < 0 or r > best_r:
            best_e, best_r = e, r
    return best_e, best_r


def score(F, H, sigma2):
    """Per-user and summed rate metrics for a set of transmit Gramians.

    Same reporting convention as the simulator: secrecy is clamped at zero
    per user, leakage and rate sums are raw.
    """
    K = len(F)
    eta_i = np.empty(K)
    eta_l = np.empty(K)
    e_idx = np.empty(K, dtype=int)
    for k in range(K):
        eta_i[k] = intended_rate(k, H, F, sigma2)
        e_idx[k], eta_l[k] = worst_eavesdropper(k, H, F, sigma2)
    secrecy = np.maximum(eta_i - eta_l, 0.0)
    return {
        "eta_i": eta_i, "eta_l": eta_l, "e_worst": e_idx, "secrecy": secrecy,
        "sum_rate": float(eta_i.sum()),
        "sum_leakage": float(eta_l.sum()),
        "sum_secrecy": float(secrecy.sum()),
        "power": float(sum(np.trace(Fk).real for Fk in F)),
    }


def relaxed_objective(F, H, sigma2):
    """Unclamped sum of (intended - worst leakage), in bits."""
    total = 0.0
    for k in range(len(F)):
        total += intended_rate(k, H, F, sigma2)
        total -= worst_eavesdropper(k, H, F, sigma2)[1]
    return total


def mmse_gramians(H, sigma2, p_max):
    """Rank-one Gramians of the simulator's regularized MMSE start.

    Directions A^-1 H_k^H with A = sigma2 I + sum H^H H, unit Frobenius
    norm, each user spending exactly p_max / K.
    """
    K = len(H)
    N = H[0].shape[1]
    A = sigma2 * np.eye(N, dtype=complex)
    for Hk in H:
        A += Hk.conj().T @ Hk
    F = []
    for k in range(K):
        d = np.linalg.solve(A, H[k].conj().T)
        nrm = np.linalg.norm(d)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise np.linalg.LinAlgError(
                "MMSE direction is degenerate for this channel")
        d = d / nrm
        F.append((p_max / K) * _herm(d @ d.conj().T))
    return F
