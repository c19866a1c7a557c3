"""``gridmdp synth``: write synthetic wind history and daily profiles."""

import argparse
import logging
from pathlib import Path

from .. import storage
from ..models.scenario import SyntheticProfileParams, SyntheticWindParams
from ..wind.synth import synthetic_error_series, synthetic_profiles
from .base import BaseCommand

logger = logging.getLogger(__name__)

WIND_FILE = "wind_errors.csv"
LOAD_FILE = "load_profile.csv"
FORECAST_FILE = "forecast_profile.csv"


class SynthCommand(BaseCommand):
    @property
    def name(self) -> str:
        return "synth"

    @property
    def description(self) -> str:
        return "Generate a seeded AR(1) wind error history and load/forecast profiles"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        wind = SyntheticWindParams()
        profile = SyntheticProfileParams()
        parser.add_argument("--out", type=Path, default=None, help="Output directory")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--hours", type=float, default=24.0, help="Profile length (h)")
        parser.add_argument("--dt", type=float, default=300.0, help="Profile spacing (s)")
        parser.add_argument("--autocorrelation", type=float, default=wind.autocorrelation)
        parser.add_argument("--noise-std", type=float, default=wind.noise_std, help="Error std (MW)")
        parser.add_argument("--history-days", type=float, default=wind.history_days)
        parser.add_argument("--history-dt", type=float, default=wind.history_dt, help="History spacing (s)")
        parser.add_argument("--base-load", type=float, default=profile.base_load_mw, help="Mean load (MW)")
        parser.add_argument("--forecast-mean", type=float, default=profile.forecast_mean_mw, help="Mean forecast (MW)")

    async def execute(self, args: argparse.Namespace) -> int:
        out: Path = args.out or self.settings.output_dir
        wind = SyntheticWindParams(
            autocorrelation=args.autocorrelation,
            noise_std=args.noise_std,
            history_days=args.history_days,
            history_dt=args.history_dt,
            forecast_mean_mw=args.forecast_mean,
            seed=args.seed,
        )
        profile = SyntheticProfileParams(
            base_load_mw=args.base_load, forecast_mean_mw=args.forecast_mean, seed=args.seed
        )

        series = synthetic_error_series(wind)
        profiles = synthetic_profiles(profile, args.hours, args.dt)

        await storage.save_error_series(out / WIND_FILE, series)
        await storage.save_profile(out / LOAD_FILE, profiles.timestamps, "load_mw", profiles.load_mw)
        await storage.save_profile(out / FORECAST_FILE, profiles.timestamps, "forecast_mw", profiles.forecast_mw)

        self.emit(f"wrote {out / WIND_FILE} ({len(series)} rows)")
        self.emit(f"wrote {out / LOAD_FILE} and {out / FORECAST_FILE} ({len(profiles.timestamps)} rows)")
        return 0
