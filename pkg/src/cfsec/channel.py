"""Spatially correlated Rayleigh fading between multi-antenna APs and terminals.

Each AP-terminal pair gets a local-scattering correlation model: the antenna
correlation for a uniform linear array seen under a Gaussian angular spread
sigma_phi around the nominal bearing.  The per-pair block is

    H = sqrt(R) @ G @ sqrt(T)^T,    G iid CN(0, 1),

so the RX side carries the link gain beta (diag(R) = beta) and the TX side is
normalized (diag(T) = 1), making E|H[q, m]|^2 = beta exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import SystemConfig, Topology, large_scale_gain


def conjT(A):
    return A.conj().T


def psd_sqrt(A, tol=1e-10):
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues are allowed to dip to -tol * max(eig) from roundoff and are
    clipped; anything more negative means the input is not a correlation
    matrix and raises.
    """
    w, Q = np.linalg.eigh(A)
    floor = -tol * max(w[-1], 1.0)
    if w[0] < floor:
        raise np.linalg.LinAlgError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (Q * np.sqrt(w)) @ conjT(Q)


@lru_cache(maxsize=8)
def _hermgauss(npts):
    t, w = np.polynomial.hermite.hermgauss(npts)
    return t, w


def correlation_matrix(n, mu, sigma_phi, d, beta, method="closed", quad_points=64):
    """n x n ULA correlation under a Gaussian angular density N(mu, sigma_phi^2).

    Entry (q, m) is beta * E[exp(j 2 pi d (q - m) sin(phi))] with d in
    wavelengths.  method="closed" uses the small-spread expansion

        beta * exp(j 2 pi d (q-m) sin mu) * exp(-(sigma_phi 2 pi d (q-m) cos mu)^2 / 2)

    which linearizes sin(phi) around mu; method="gauss-hermite" evaluates the
    expectation by quad_points-point Gauss-Hermite quadrature and serves as
    the reference (the closed form drifts from it as sigma_phi and the
    antenna separation grow).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma_phi < 0:
        raise ValueError("sigma_phi must be >= 0")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    idx = np.arange(n)
    c = 2.0 * np.pi * d * (idx[:, None] - idx[None, :])
    if method == "closed":
        out = np.exp(1j * c * np.sin(mu)) * np.exp(-0.5 * (sigma_phi * c * np.cos(mu)) ** 2)
    elif method == "gauss-hermite":
        t, w = _hermgauss(quad_points)
        phi = mu + np.sqrt(2.0) * sigma_phi * t
        out = np.exp(1j * c[..., None] * np.sin(phi)) @ w / np.sqrt(np.pi)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = beta * out
    # enforce exact Hermitian symmetry against roundoff in the exponentials
    return 0.5 * (out + conjT(out))


@dataclass
class CorrelationPair:
    """Second-order statistics of one AP-terminal link."""
    R: np.ndarray        # (M, M) RX-side correlation, diag = beta
    T: np.ndarray        # (N_t, N_t) TX-side correlation, diag = 1
    beta: float          # large-scale gain
    mu_tx: float         # departure bearing AP -> terminal, radians
    mu_rx: float         # arrival bearing terminal -> AP (reverse), radians


def synth_channel(pair: CorrelationPair, rng: np.random.Generator, n_draws=None):
    """Draw H = sqrt(R) G sqrt(T)^T with iid unit-variance CN entries in G.

    Returns (M, N_t) for n_draws=None, else (n_draws, M, N_t).
    """
    Rh = psd_sqrt(pair.R)
    Th = psd_sqrt(pair.T)
    m, nt = pair.R.shape[0], pair.T.shape[0]
    shape = (m, nt) if n_draws is None else (n_draws, m, nt)
    G = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return Rh @ G @ Th.T


@dataclass
class ChannelSet:
    """One fading realization for every AP-terminal pair.

    blocks[l, k] is the (M, N_t) channel from AP l to terminal k; eff[k] is
    the (M, N) concatenation [H_{1,k} ... H_{L,k}] across APs.
    """
    blocks: np.ndarray                      # (L, K, M, N_t)
    pairs: list                             # L*K CorrelationPair, row-major (l, k)
    seed_info: object = None

    @property
    def eff(self):
        L, K, M, Nt = self.blocks.shape
        return self.blocks.transpose(1, 2, 0, 3).reshape(K, M, L * Nt)


def build_channel_set(cfg: SystemConfig, topo: Topology,
                      rng: np.random.Generator) -> ChannelSet:
    """Correlation pairs plus one channel draw for the whole topology.

    Each pair (l, k) consumes its own child stream spawned from rng in
    row-major order, so draws are reproducible even if pairs are later
    synthesized in parallel.
    """
    L, K = cfg.L, cfg.K
    betas = large_scale_gain(cfg, topo.d_m)
    sig = cfg.angular_std_rad
    d_wl = cfg.antenna_spacing_wl
    streams = rng.spawn(L * K)
    blocks = np.empty((L, K, cfg.M, cfg.N_t), dtype=complex)
    pairs = []
    for l in range(L):
        for k in range(K):
            dx = topo.ue_xyz[k, 0] - topo.ap_xyz[l, 0]
            dy = topo.ue_xyz[k, 1] - topo.ap_xyz[l, 1]
            mu_tx = float(np.arctan2(dy, dx))
            mu_rx = float(np.arctan2(-dy, -dx))
            pair = CorrelationPair(
                R=correlation_matrix(cfg.M, mu_rx, sig, d_wl, float(betas[l, k])),
                T=correlation_matrix(cfg.N_t, mu_tx, sig, d_wl, 1.0),
                beta=float(betas[l, k]),
                mu_tx=mu_tx,
                mu_rx=mu_rx,
            )
            pairs.append(pair)
            blocks[l, k] = synth_channel(pair, streams[l * K + k])
    return ChannelSet(blocks=blocks, pairs=pairs, seed_info=rng.bit_generator.seed_seq)


def dump_channels(fh, drop_idx: int, chans: ChannelSet):
    """Append one dump record per (drop, l, k) block to an open text file.

    Row format: drop,l,k followed by the block entries row-major as
    re,im pairs, printed with enough digits to round-trip float64.
    """
    L, K, M, Nt = chans.blocks.shape
    for l in range(L):
        for k in range(K):
            flat = chans.blocks[l, k].reshape(-1)
            nums = []
            for z in flat:
                nums.append(f"{z.real:.17g}")
                nums.append(f"{z.imag:.17g}")
            fh.write(f"{drop_idx},{l},{k}," + ",".join(nums) + "\n")


def load_channel_dump(path, L, K, M, N_t):
    """Read a dump file back into {drop: (L, K, M, N_t) complex array}."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("drop,"):
                continue
            toks = line.split(",")
            drop, l, k = int(toks[0]), int(toks[1]), int(toks[2])
            vals = np.array([float(t) for t in toks[3:]])
            block = (vals[0::2] + 1j * vals[1::2]).reshape(M, N_t)
            out.setdefault(drop, np.zeros((L, K, M, N_t), dtype=complex))[l, k] = block
    return out
