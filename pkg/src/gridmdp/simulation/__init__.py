"""Receding-horizon simulation and Monte Carlo campaigns."""

from .campaign import aggregate, confidence_half_width, run_campaign
from .runner import evaluate_J, initial_state, run_once
from .scenario import Scenario, load_scenario, prepare_spec, scenario_from_data

__all__ = [
    "Scenario",
    "aggregate",
    "confidence_half_width",
    "evaluate_J",
    "initial_state",
    "load_scenario",
    "prepare_spec",
    "run_campaign",
    "run_once",
    "scenario_from_data",
]
