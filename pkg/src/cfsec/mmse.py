"""Regularized MMSE transmit initialization and per-user MMSE combining."""

from __future__ import annotations

import numpy as np


def tx_mmse_init(H, sigma2, p_max):
    """Power-normalized MMSE transmit directions.

    A_k = (sum_k' H_k'^H H_k' + sigma2 I)^-1 H_k^H, scaled so every user
    spends exactly p_max / K.  Returns K precoders of shape (N, M).
    """
    K = len(H)
    N = H[0].shape[1]
    A = sigma2 * np.eye(N, dtype=complex)
    for Hk in H:
        A += Hk.conj().T @ Hk
    V = []
    for k in range(K):
        Ak = np.linalg.solve(A, H[k].conj().T)
        nrm = np.linalg.norm(Ak)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise np.linalg.LinAlgError(
                "MMSE direction is degenerate; channel matrix is rank deficient "
                "and sigma2 gives no regularization")
        V.append(np.sqrt(p_max / K) * Ak / nrm)
    return V


def rx_mmse(H, V, sigma2):
    """MMSE combiners U_k = V_k^H H_k^H (H_k F H_k^H + sigma2 I)^-1.

    F is the Gramian of the full stacked precoder, so the combiner whitens
    both the intended stream and all inter-user interference.
    """
    K = len(V)
    F_tot = sum(Vk @ Vk.conj().T for Vk in V)
    U = []
    for k in range(K):
        M = H[k].shape[0]
        C = H[k] @ F_tot @ H[k].conj().T + sigma2 * np.eye(M, dtype=complex)
        C = 0.5 * (C + C.conj().T)
        S = H[k] @ V[k]
        U.append(np.linalg.solve(C, S).conj().T)
    return U
