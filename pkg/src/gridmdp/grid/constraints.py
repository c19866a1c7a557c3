"""Operational constraint checks on grid states."""

from typing import List, Literal

import numpy as np
from pydantic import BaseModel, Field

from ..models.grid import GridSpec, GridState
from .dynamics import check_dimensions

ConstraintKind = Literal["frequency", "line", "generator_capacity", "soc"]


class Violation(BaseModel):
    """One violated constraint; ``margin`` is negative by how much it is exceeded."""

    kind: ConstraintKind
    index: int = Field(description="Node, line, generator or battery index")
    value: float
    limit: float
    margin: float

    def describe(self) -> str:
        return f"{self.kind}[{self.index}] value={self.value:.6g} limit={self.limit:.6g}"


class ConstraintReport(BaseModel):
    feasible: bool
    violations: List[Violation] = Field(default_factory=list)

    def describe(self) -> List[str]:
        return [v.describe() for v in self.violations]


def line_flows(spec: GridSpec, delta: np.ndarray) -> np.ndarray:
    """Flow on every line, ``b sin(delta_from - delta_to)``; works on batches."""
    a = spec.arrays
    delta = np.asarray(delta, dtype=float)
    return a.line_b * np.sin(delta[..., a.line_from] - delta[..., a.line_to])


def check_constraints(spec: GridSpec, state: GridState) -> ConstraintReport:
    """Evaluate every hard constraint and list all violations."""
    check_dimensions(spec, state)
    a = spec.arrays
    violations: List[Violation] = []

    for node, omega in enumerate(state.omega):
        margin = spec.freq_limit - abs(omega)
        if margin < 0:
            violations.append(
                Violation(kind="frequency", index=node, value=omega, limit=spec.freq_limit, margin=margin)
            )

    for line, flow in enumerate(line_flows(spec, state.delta)):
        limit = a.line_capacity[line]
        margin = limit - abs(flow)
        if margin < 0:
            violations.append(Violation(kind="line", index=line, value=flow, limit=limit, margin=margin))

    for gen, p in enumerate(state.p_gen):
        if p < a.gen_p_min[gen]:
            violations.append(
                Violation(
                    kind="generator_capacity",
                    index=gen,
                    value=p,
                    limit=a.gen_p_min[gen],
                    margin=p - a.gen_p_min[gen],
                )
            )
        elif p > a.gen_p_max[gen]:
            violations.append(
                Violation(
                    kind="generator_capacity",
                    index=gen,
                    value=p,
                    limit=a.gen_p_max[gen],
                    margin=a.gen_p_max[gen] - p,
                )
            )

    for battery, q in enumerate(state.soc):
        if q < 0.0:
            violations.append(Violation(kind="soc", index=battery, value=q, limit=0.0, margin=q))
        elif q > 1.0:
            violations.append(Violation(kind="soc", index=battery, value=q, limit=1.0, margin=1.0 - q))

    return ConstraintReport(feasible=not violations, violations=violations)


def feasible_mask(
    spec: GridSpec,
    delta: np.ndarray,
    omega: np.ndarray,
    p_gen: np.ndarray,
    soc: np.ndarray,
) -> np.ndarray:
    """Vectorised feasibility over batch rows, consistent with check_constraints."""
    a = spec.arrays
    ok = np.all(np.abs(omega) <= spec.freq_limit, axis=-1)
    if spec.lines:
        ok &= np.all(np.abs(line_flows(spec, delta)) <= a.line_capacity, axis=-1)
    ok &= np.all((p_gen >= a.gen_p_min) & (p_gen <= a.gen_p_max), axis=-1)
    if spec.n_s:
        ok &= np.all((soc >= 0.0) & (soc <= 1.0), axis=-1)
    return ok


def is_feasible(spec: GridSpec, state: GridState) -> bool:
    return bool(feasible_mask(spec, state.delta, state.omega, state.p_gen, state.soc))
