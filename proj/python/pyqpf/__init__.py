"""Canonical partition functions of bosons and fermions on a torus."""

from ._core import (
    ConfigError,
    DualPotential,
    EvaluationResult,
    InternalError,
    Statistics,
    SystemParams,
    TruncationPolicy,
    bridge_edges,
    constraint_rank,
    cycle_types,
    evaluate_G,
    evaluate_Q,
    exact_Q2,
    ideal_gas_Q,
    is_valid_merger,
    matrix_A_check,
    mean_field_Q,
    nonzero_solution,
    theta_sum,
    theta_sum_shifted,
    unity_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
