"""Scenario configuration, node placement, and large-scale link gains.

A scenario is a flat ``key = value`` text file mirroring the usual symbol
names (L, K, M, N_t, sigma2_dbm, ...).  Anything not given falls back to
the reference desk-scale scenario: 4 APs on the corners of a 300 m square,
4 users dropped uniformly in a 500 m square, 2 RX antennas each, 2 TX
antennas per AP, -96 dBm noise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields

import numpy as np


class ConfigError(ValueError):
    """A scenario file or field failed validation."""


def dbm_to_watt(x_dbm):
    """10^(x/10) milliwatts, in watts."""
    return 10.0 ** (x_dbm / 10.0) * 1e-3


@dataclass
class SystemConfig:
    L: int = 4                      # number of access points
    K: int = 4                      # number of user terminals
    M: int = 2                      # RX antennas per terminal
    N_t: int = 2                    # TX antennas per AP
    h_AP_m: float = 10.0            # AP height
    h_UE_m: float = 1.5             # terminal height
    f_c_hz: float = 2.0e9           # carrier frequency
    D_UE_m: float = 500.0           # side of the terminal drop square
    D_AP_m: float = 300.0           # side of the AP square
    sigma2_dbm: float = -96.0       # noise power at every receiver
    p_max_ref_w: float = 1.0        # TX budget when not sweeping SNR
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    eps_fp: float = 1e-3            # outer-loop stop, relative to sqrt(P_max)
    eps_ccp: float = 1e-3           # inner-loop stop, relative to sqrt(P_max)
    i_fp_max: int = 100
    i_ccp_max: int = 10
    i_bs_max: int = 60              # power-search bisection cap
    angular_std_deg: float = 10.0   # scattering spread around the nominal angle
    antenna_spacing_wl: float = 0.5
    pathloss_mode: str = "normalized"   # "normalized" (unit gain) or "geometric"
    seed: int = 0

    @property
    def N(self) -> int:
        """Total TX antennas across all APs."""
        return self.L * self.N_t

    @property
    def sigma2_w(self) -> float:
        return dbm_to_watt(self.sigma2_dbm)

    @property
    def angular_std_rad(self) -> float:
        return float(np.deg2rad(self.angular_std_deg))

    def validate(self):
        for name in ("L", "K", "M", "N_t"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        for name in ("h_AP_m", "h_UE_m", "f_c_hz", "D_UE_m", "D_AP_m"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("eps_fp", "eps_ccp", "antenna_spacing_wl", "p_max_ref_w"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("i_fp_max", "i_ccp_max", "i_bs_max"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v!r}")
        if self.angular_std_deg < 0:
            raise ConfigError(f"angular_std_deg must be >= 0, got {self.angular_std_deg!r}")
        if self.pathloss_mode not in ("normalized", "geometric"):
            raise ConfigError(
                f"pathloss_mode must be 'normalized' or 'geometric', got {self.pathloss_mode!r}")
        return self


_INT_KEYS = {"L", "K", "M", "N_t", "N", "i_fp_max", "i_ccp_max", "i_bs_max", "seed"}
_FLOAT_KEYS = {"h_AP_m", "h_UE_m", "f_c_hz", "D_UE_m", "D_AP_m", "sigma2_dbm",
               "p_max_ref_w", "eps_fp", "eps_ccp", "angular_std_deg",
               "antenna_spacing_wl"}
_STR_KEYS = {"pathloss_mode"}
_LIST_KEYS = {"snr_grid_db"}


def _convert(key, raw):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _LIST_KEYS:
            return tuple(float(tok) for tok in raw.replace(",", " ").split())
        return raw
    except ValueError as exc:
        raise ConfigError(f"could not parse value for key '{key}': {raw!r}") from exc


def load_config(path) -> SystemConfig:
    """Parse a flat key=value scenario file into a validated SystemConfig.

    Either N_t (per-AP antennas) or N (total) may be given; when both are
    present they must agree with N = L * N_t.  Unknown keys only warn so
    that scenario files can carry annotations for other tools.
    """
    known = {f.name for f in fields(SystemConfig)}
    seen = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {body!r}")
            key, raw = (tok.strip() for tok in body.split("=", 1))
            if not key or not raw:
                raise ConfigError(f"{path}:{lineno}: missing key or value in {body!r}")
            if key not in known and key != "N":
                warnings.warn(f"{path}:{lineno}: unknown config key '{key}' ignored")
                continue
            seen[key] = _convert(key, raw)

    n_total = seen.pop("N", None)
    cfg = SystemConfig(**seen)
    if n_total is not None:
        if "N_t" in seen:
            if cfg.N != n_total:
                raise ConfigError(
                    f"inconsistent antenna counts: N={n_total} but L*N_t={cfg.N}")
        else:
            if n_total % cfg.L:
                raise ConfigError(
                    f"N={n_total} is not divisible by L={cfg.L}; cannot infer N_t")
            cfg.N_t = n_total // cfg.L
    return cfg.validate()


@dataclass
class Topology:
    ap_xyz: np.ndarray      # (L, 3) AP positions
    ue_xyz: np.ndarray      # (K, 3) terminal positions
    d_m: np.ndarray = field(init=False)  # (L, K) 3-D distances

    def __post_init__(self):
        diff = self.ap_xyz[:, None, :] - self.ue_xyz[None, :, :]
        self.d_m = np.linalg.norm(diff, axis=-1)


def place_nodes(cfg: SystemConfig, rng: np.random.Generator) -> Topology:
    """Fixed APs on the AP-square perimeter, terminals uniform in their square.

    APs are spaced evenly along the perimeter starting from the corner
    (-D_AP/2, -D_AP/2) and walking counterclockwise; for L=4 this lands
    exactly on the four corners.
    """
    s = cfg.D_AP_m
    half = s / 2.0
    corners = np.array([(-half, -half), (half, -half), (half, half), (-half, half)])
    ap_xy = np.empty((cfg.L, 2))
    for i in range(cfg.L):
        t = 4.0 * s * i / cfg.L
        edge = int(t // s) % 4
        frac = t - s * (t // s)
        a, b = corners[edge], corners[(edge + 1) % 4]
        ap_xy[i] = a + (b - a) * (frac / s)
    ap_xyz = np.column_stack([ap_xy, np.full(cfg.L, cfg.h_AP_m)])

    ue_xy = rng.uniform(-cfg.D_UE_m / 2.0, cfg.D_UE_m / 2.0, size=(cfg.K, 2))
    ue_xyz = np.column_stack([ue_xy, np.full(cfg.K, cfg.h_UE_m)])
    return Topology(ap_xyz=ap_xyz, ue_xyz=ue_xyz)


def large_scale_gain(cfg: SystemConfig, d_m):
    """Linear link gain for a 3-D distance (scalar or array).

    normalized: unit gain everywhere, so transmit SNR fully controls the
    operating point.  geometric: 10^((-30.5 - 36.7 log10 d)/10), an urban
    NLOS-style power law.
    """
    d = np.asarray(d_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    if cfg.pathloss_mode == "normalized":
        return np.ones_like(d)
    beta_db = -30.5 - 36.7 * np.log10(d)
    return 10.0 ** (beta_db / 10.0)


def snr_to_pmax(cfg: SystemConfig, snr_db) -> float:
    """Total TX power that realizes a given transmit SNR = P / sigma^2."""
    return cfg.sigma2_w * 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
