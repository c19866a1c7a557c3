"""Assembly of everything a run needs from a ScenarioConfig."""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from .. import storage
from ..errors import ConfigurationError
from ..grid.schedule import DayAheadSchedule, day_ahead_schedule, distribute_profiles
from ..models.grid import GridSpec
from ..models.results import ScenarioSummary
from ..models.scenario import ScenarioConfig
from ..models.wind import WindDtmc
from ..wind.chain import estimate_dtmc, interpolate
from ..wind.synth import synthetic_error_series, synthetic_profiles

logger = logging.getLogger(__name__)


class Scenario(BaseModel):
    """Resolved grid, wind chain and day-ahead schedule of one experiment cell."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ScenarioConfig
    spec: GridSpec
    dtmc: WindDtmc
    schedule: DayAheadSchedule

    def summary(self) -> ScenarioSummary:
        cfg = self.config
        return ScenarioSummary(
            name=cfg.name,
            grid=self.spec.name,
            lambda_=cfg.lambda_,
            horizon_s=cfg.horizon_s,
            dt_control=cfg.dt_control,
            simulation_hours=cfg.simulation_hours,
            n_bins=self.dtmc.n_bins,
        )

    def with_overrides(self, **changes) -> "Scenario":
        """Same data under a modified config (e.g. another lambda or horizon)."""
        config = ScenarioConfig.model_validate({**self.config.model_dump(), **changes})
        return Scenario(config=config, spec=self.spec, dtmc=self.dtmc, schedule=self.schedule)


def prepare_spec(config: ScenarioConfig, spec: GridSpec) -> GridSpec:
    """Apply the control step and any battery efficiency override to a grid."""
    data = spec.model_dump(by_alias=True)
    data["dt"] = config.dt_control
    if config.battery_efficiency is not None:
        for battery in data["batteries"]:
            battery["efficiency"] = config.battery_efficiency
    return GridSpec.model_validate(data)


def scenario_from_data(
    config: ScenarioConfig,
    spec: GridSpec,
    dtmc: WindDtmc,
    total_load: np.ndarray,
    total_forecast: np.ndarray,
) -> Scenario:
    """Build a scenario from in-memory system-total profiles."""
    spec = prepare_spec(config, spec)
    needed = config.total_steps + 1
    if len(total_load) < needed:
        logger.warning(
            f"Profiles cover {len(total_load)} steps, run needs {needed}; holding the last value"
        )
    node_load, farm_forecast = distribute_profiles(spec, total_load, total_forecast)
    schedule = day_ahead_schedule(spec, node_load, farm_forecast)
    return Scenario(config=config, spec=spec, dtmc=dtmc, schedule=schedule)


async def load_dtmc_for(config: ScenarioConfig) -> WindDtmc:
    """Stored chain, chain estimated from a history CSV, or from synthetic history."""
    if config.dtmc is not None:
        return await storage.load_dtmc(config.dtmc)
    if config.wind_errors is not None:
        series = await storage.load_error_series(config.wind_errors)
    else:
        series = synthetic_error_series(config.synthetic_wind)
    if series.spacing != config.dt_control:
        series = interpolate(series, config.dt_control)
    return estimate_dtmc(series, config.n_bins)


async def load_scenario(config: ScenarioConfig) -> Scenario:
    """Resolve every file or synthetic source a config refers to."""
    spec = await storage.load_grid(config.grid)
    dtmc = await load_dtmc_for(config)

    if config.load_profile is not None or config.forecast_profile is not None:
        if config.load_profile is None or config.forecast_profile is None:
            raise ConfigurationError("load_profile and forecast_profile must be given together")
        total_load = await storage.load_profile(config.load_profile, "load_mw", config.dt_control)
        total_forecast = await storage.load_profile(config.forecast_profile, "forecast_mw", config.dt_control)
    else:
        profiles = synthetic_profiles(config.synthetic_profiles, config.simulation_hours, config.dt_control)
        total_load, total_forecast = profiles.load_mw, profiles.forecast_mw

    scenario = scenario_from_data(config, spec, dtmc, total_load, total_forecast)
    logger.info(
        f"Scenario {config.name}: grid {scenario.spec.name}, {dtmc.n_bins} wind bins, "
        f"{len(scenario.schedule)} scheduled steps"
    )
    return scenario
