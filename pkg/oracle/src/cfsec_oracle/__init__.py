"""Reference secrecy beamformer for cross-checking cfsec simulator output.

Reads the simulator's channel-dump files, rebuilds the effective per-user
channels, and maximizes the same relaxed secrecy objective by successive
convex bounding, with each bounded problem handed to an interior-point
determinant-maximization solver.  Intended for tiny instances only; the
point is an independent, solver-verified answer, not speed.
"""

from .model import (Scenario, ScenarioError, read_scenario, load_dump,
                    effective, snr_to_pmax, mmse_gramians, score,
                    relaxed_objective, intended_rate, leakage_rate,
                    worst_eavesdropper)
from .detmax import (SolverFailure, taylor_point, solve_sdp_iteration,
                     solve_drop, run_detmax)

__all__ = [
    "Scenario", "ScenarioError", "read_scenario", "load_dump", "effective",
    "snr_to_pmax", "mmse_gramians", "score", "relaxed_objective",
    "intended_rate", "leakage_rate", "worst_eavesdropper",
    "SolverFailure", "taylor_point", "solve_sdp_iteration", "solve_drop",
    "run_detmax",
]
