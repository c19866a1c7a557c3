"""Continuous-state power-system model."""

from .constraints import (
    ConstraintReport,
    Violation,
    check_constraints,
    feasible_mask,
    is_feasible,
    line_flows,
)
from .dynamics import (
    BatchStep,
    equilibrium_state,
    node_power_balance,
    step_batch,
    step_dynamics,
    swing_residual,
)
from .schedule import DayAheadSchedule, day_ahead_schedule, distribute_profiles

__all__ = [
    "BatchStep",
    "ConstraintReport",
    "DayAheadSchedule",
    "Violation",
    "check_constraints",
    "day_ahead_schedule",
    "distribute_profiles",
    "equilibrium_state",
    "feasible_mask",
    "is_feasible",
    "line_flows",
    "node_power_balance",
    "step_batch",
    "step_dynamics",
    "swing_residual",
]
