"""Leading-order flop counts for the three solver families.

These are the Big-O leading terms with unit constants, meant for relative
comparisons across problem sizes, not instruction-accurate counts.
"""


def flops_proposed(i_fp, i_ccp, i_bs, K, N, M):
    """Nested FP solver: per-pass surrogate algebra plus bisection solves."""
    core = K * K * (N * N * M + N * M * M + N ** 3)
    return float(i_fp * i_ccp * core + i_fp * i_ccp * i_bs * K * N ** 3)


def flops_srm(i_fp, i_bs, K, N, M):
    """Sum-rate specialization: one FP loop, bisection on every pass."""
    return float(i_fp * i_bs * K * K * (N * N * M + N * M * M + N ** 3))


def flops_sdp(i_sdp, K, N, M):
    """Interior-point semidefinite rounds over K Gramians of size N."""
    return float(i_sdp * K ** 4.5 * N ** 7 * M * M)
