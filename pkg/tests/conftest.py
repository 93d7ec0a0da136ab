import numpy as np
import pytest


def random_instance(rng, K=4, M=2, N=8, scale=1.0):
    """Random channels H (K of M x N) and precoders V (K of N x M)."""
    H = [(rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N)))
         / np.sqrt(2.0) for _ in range(K)]
    V = [scale * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
         / np.sqrt(2.0) for _ in range(K)]
    return H, V


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
