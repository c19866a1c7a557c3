"""Simulation run and campaign result models."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ActionRecord(BaseModel):
    """Executed discrete action, flattened for reporting."""

    grid_index: List[int]
    coordinates: List[float]
    dp_gen: List[float]
    r_gen: List[float]
    r_stor: List[float]


class StepRecord(BaseModel):
    """Trajectory sample at time index k."""

    k: int
    s_w: List[int]
    delta: List[float]
    omega: List[float]
    p_gen: List[float]
    soc: List[float]
    cost: float
    action: Optional[ActionRecord] = None
    realized_sw: Optional[List[int]] = None


class FailureInfo(BaseModel):
    """Why and where a run stopped early."""

    step: int
    reason: str
    violations: List[str] = Field(default_factory=list)


class RunRecord(BaseModel):
    """One receding-horizon trajectory."""

    seed: int
    steps: List[StepRecord] = Field(default_factory=list)
    j_metric: float = 0.0
    failed: bool = False
    failure: Optional[FailureInfo] = None
    timing: List[float] = Field(default_factory=list, description="Per-iteration solve time (s)")
    model_size: List[Tuple[int, int]] = Field(
        default_factory=list, description="Per-iteration (states, actions)"
    )

    @property
    def iterations(self) -> int:
        return len(self.timing)

    def deterministic_payload(self) -> dict:
        """Payload without wall-clock fields."""
        return self.model_dump(mode="json", exclude={"timing"})


class ScenarioSummary(BaseModel):
    """Identifying parameters of the scenario a campaign ran."""

    name: str
    grid: str
    lambda_: int = Field(alias="lambda")
    horizon_s: float
    dt_control: float
    simulation_hours: float
    n_bins: int

    model_config = ConfigDict(populate_by_name=True)


class CampaignAggregate(BaseModel):
    """Statistics over the completed (non-failed) runs of a campaign."""

    completed_runs: int
    mean_j: float
    ci_half_width: Optional[float] = Field(
        default=None, description="Student-t 95% half-width; None with fewer than two runs"
    )
    mean_states: float
    mean_actions: float
    mean_iteration_time: float


class Campaign(BaseModel):
    """Monte Carlo evaluation of one scenario."""

    scenario: ScenarioSummary
    n_runs: int
    base_seed: int
    results: List[RunRecord] = Field(default_factory=list)
    failure_rate: float = Field(default=0.0, description="Percentage of failed runs")
    degenerate: bool = False
    aggregate: Optional[CampaignAggregate] = None

    def summary_row(self) -> dict:
        """One CSV summary row."""
        agg = self.aggregate
        return {
            "scenario": self.scenario.name,
            "grid": self.scenario.grid,
            "lambda": self.scenario.lambda_,
            "horizon_s": self.scenario.horizon_s,
            "n_runs": self.n_runs,
            "mean_J": agg.mean_j if agg else None,
            "ci_half_width": agg.ci_half_width if agg else None,
            "failure_pct": self.failure_rate,
            "mean_states": agg.mean_states if agg else None,
            "mean_actions": agg.mean_actions if agg else None,
            "mean_iter_time_s": agg.mean_iteration_time if agg else None,
        }
