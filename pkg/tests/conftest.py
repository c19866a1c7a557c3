"""Shared fixtures for gridmdp tests."""

import json
from typing import Optional

import hypothesis
import numpy as np
import pytest

from gridmdp.models import GridSpec, KnownInput, ScenarioConfig, SyntheticWindParams, WindDtmc
from gridmdp.simulation import Scenario, scenario_from_data
from gridmdp.storage import GRID_DIR
from gridmdp.wind import estimate_dtmc, identity_dtmc, interpolate, synthetic_error_series, synthetic_profiles

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")


def load_builtin(name: str) -> GridSpec:
    return GridSpec.model_validate(json.loads((GRID_DIR / f"{name}.json").read_text()))


@pytest.fixture
def three_node() -> GridSpec:
    return load_builtin("three_node")


@pytest.fixture
def one_node() -> GridSpec:
    return load_builtin("one_node")


@pytest.fixture
def two_batteries() -> GridSpec:
    return load_builtin("three_node_two_batteries")


@pytest.fixture(scope="session")
def ar1_dtmc() -> WindDtmc:
    series = synthetic_error_series(SyntheticWindParams(history_days=30, seed=3))
    return estimate_dtmc(interpolate(series, 300.0), 41)


@pytest.fixture
def zero_dtmc() -> WindDtmc:
    return identity_dtmc(41, 1.0)


def known_input(spec: GridSpec, load_total: float, forecast_total: float) -> KnownInput:
    a = spec.arrays
    return KnownInput(
        p_load=load_total * a.load_share,
        p_wind_fc=forecast_total * a.farm_share,
        p_stor=np.zeros(spec.n_s),
    )


def make_scenario(
    grid: str = "three_node",
    dtmc: Optional[WindDtmc] = None,
    hours: float = 2.0,
    lam: int = 5,
    horizon_s: float = 300.0,
    **overrides,
) -> Scenario:
    """Scenario on a shipped grid with synthetic profiles."""
    config = ScenarioConfig.model_validate(
        {"grid": grid, "simulation_hours": hours, "lambda": lam, "horizon_s": horizon_s, **overrides}
    )
    if dtmc is None:
        series = synthetic_error_series(config.synthetic_wind)
        dtmc = estimate_dtmc(interpolate(series, config.dt_control), config.n_bins)
    profiles = synthetic_profiles(config.synthetic_profiles, hours, config.dt_control)
    return scenario_from_data(config, load_builtin(grid), dtmc, profiles.load_mw, profiles.forecast_mw)
