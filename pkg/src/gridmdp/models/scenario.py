"""Scenario configuration for receding-horizon experiments."""

from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SyntheticWindParams(BaseModel):
    """AR(1) forecast-error generator used when no historical data is given."""

    autocorrelation: float = Field(default=0.9, ge=0.0, lt=1.0)
    noise_std: float = Field(default=0.4, gt=0, description="Stationary error std (MW)")
    history_days: float = Field(default=60.0, gt=0)
    history_dt: float = Field(default=900.0, gt=0, description="Spacing of the raw history (s)")
    forecast_mean_mw: float = Field(default=2.5, ge=0)
    forecast_swing_mw: float = Field(default=1.0, ge=0)
    seed: int = 0


class SyntheticProfileParams(BaseModel):
    """Smooth daily load and wind forecast profiles (system totals)."""

    base_load_mw: float = Field(default=7.0, gt=0)
    load_swing_mw: float = Field(default=1.5, ge=0)
    forecast_mean_mw: float = Field(default=2.5, ge=0)
    forecast_swing_mw: float = Field(default=1.0, ge=0)
    noise_mw: float = Field(default=0.02, ge=0)
    seed: int = 0


class ScenarioConfig(BaseModel):
    """Everything needed to reproduce one experiment cell."""

    model_config = ConfigDict(populate_by_name=True)

    name: str = "default"
    grid: str = Field(default="three_node", description="Built-in grid name or path to a grid JSON")
    load_profile: Optional[Path] = None
    forecast_profile: Optional[Path] = None
    wind_errors: Optional[Path] = None
    dtmc: Optional[Path] = None
    synthetic_wind: SyntheticWindParams = Field(default_factory=SyntheticWindParams)
    synthetic_profiles: SyntheticProfileParams = Field(default_factory=SyntheticProfileParams)

    dt_control: float = Field(default=300.0, gt=0)
    simulation_hours: float = Field(default=24.0, gt=0)
    horizon_s: float = Field(default=300.0, gt=0)
    lambda_: int = Field(default=5, ge=2, alias="lambda")
    n_bins: int = Field(default=41, ge=2)
    violation_penalty: float = Field(default=1e6, gt=0)
    battery_efficiency: Optional[float] = Field(default=None, gt=0, le=1.0)
    wind_jitter: bool = False
    output_dir: Path = Path("results")

    @model_validator(mode="after")
    def _check_ranges(self) -> "ScenarioConfig":
        steps = self.horizon_s / self.dt_control
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ValueError(
                f"horizon_s={self.horizon_s} must be a positive multiple of dt_control={self.dt_control}"
            )
        total = self.simulation_hours * 3600.0 / self.dt_control
        if abs(total - round(total)) > 1e-9:
            raise ValueError("simulation_hours must span a whole number of control steps")
        for label in ("load_profile", "forecast_profile", "wind_errors", "dtmc"):
            path = getattr(self, label)
            if path is not None and not Path(path).is_file():
                raise ValueError(f"{label} file not found: {path}")
        return self

    @property
    def horizon_steps(self) -> int:
        return int(round(self.horizon_s / self.dt_control))

    @property
    def total_steps(self) -> int:
        return int(round(self.simulation_hours * 3600.0 / self.dt_control))
