"""Data models for gridmdp."""

from .grid import (
    BatterySpec,
    ControlInput,
    Disturbance,
    GeneratorSpec,
    GridSpec,
    GridState,
    KnownInput,
    LineSpec,
    NodeSpec,
    WindFarmSpec,
)
from .mdp import AugmentedState, DiscreteAction, Strategy, WindState
from .results import (
    ActionRecord,
    Campaign,
    CampaignAggregate,
    FailureInfo,
    RunRecord,
    ScenarioSummary,
    StepRecord,
)
from .scenario import ScenarioConfig, SyntheticProfileParams, SyntheticWindParams
from .wind import ErrorSeries, WindDtmc

__all__ = [
    "ActionRecord",
    "AugmentedState",
    "BatterySpec",
    "Campaign",
    "CampaignAggregate",
    "ControlInput",
    "DiscreteAction",
    "Disturbance",
    "ErrorSeries",
    "FailureInfo",
    "GeneratorSpec",
    "GridSpec",
    "GridState",
    "KnownInput",
    "LineSpec",
    "NodeSpec",
    "RunRecord",
    "ScenarioConfig",
    "ScenarioSummary",
    "StepRecord",
    "Strategy",
    "SyntheticProfileParams",
    "SyntheticWindParams",
    "WindDtmc",
    "WindFarmSpec",
    "WindState",
]
