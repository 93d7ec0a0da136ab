import numpy as np
import pytest


def random_channels(rng, K=2, M=1, N=4):
    """K random effective channels of shape (M, N), unit entry variance."""
    return [(rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N)))
            / np.sqrt(2.0) for _ in range(K)]


def random_gramians(rng, K=2, N=4, budget=4.0):
    """Random PSD Gramians with trace sum exactly `budget`."""
    F = []
    for _ in range(K):
        A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        F.append(A @ A.conj().T)
    total = sum(np.trace(Fk).real for Fk in F)
    return [budget * Fk / total for Fk in F]


def write_dump(path, blocks_by_drop):
    """Write {drop: (L, K, M, N_t)} arrays in the simulator's dump format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# drop,l,k then re,im pairs of the (M x N_t) block, row-major\n")
        for d in sorted(blocks_by_drop):
            blocks = blocks_by_drop[d]
            L, K, M, Nt = blocks.shape
            for l in range(L):
                for k in range(K):
                    nums = []
                    for z in blocks[l, k].reshape(-1):
                        nums.append(f"{z.real:.17g}")
                        nums.append(f"{z.imag:.17g}")
                    fh.write(f"{d},{l},{k}," + ",".join(nums) + "\n")


@pytest.fixture
def rng():
    return np.random.default_rng(321)
