"""Synthetic wind-error history and daily load/forecast profiles."""

import logging
from typing import NamedTuple

import numpy as np

from ..models.scenario import SyntheticProfileParams, SyntheticWindParams
from ..models.wind import ErrorSeries
from .chain import make_rng

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400.0


class Profiles(NamedTuple):
    """System-total load and wind forecast at the control resolution."""

    timestamps: np.ndarray
    load_mw: np.ndarray
    forecast_mw: np.ndarray


def ar1_path(n: int, autocorrelation: float, noise_std: float, rng: np.random.Generator) -> np.ndarray:
    """Stationary AR(1) path with marginal standard deviation ``noise_std``."""
    shocks = rng.standard_normal(n)
    innovation = noise_std * np.sqrt(1.0 - autocorrelation**2)
    path = np.empty(n)
    path[0] = noise_std * shocks[0]
    for k in range(1, n):
        path[k] = autocorrelation * path[k - 1] + innovation * shocks[k]
    return path


def _daily_wave(timestamps: np.ndarray, mean: float, swing: float, phase: float = 0.0) -> np.ndarray:
    return mean + swing * np.sin(2.0 * np.pi * timestamps / SECONDS_PER_DAY + phase)


def synthetic_error_series(params: SyntheticWindParams) -> ErrorSeries:
    """Forecast/actual history whose error follows an AR(1) process."""
    n = int(round(params.history_days * SECONDS_PER_DAY / params.history_dt)) + 1
    rng = make_rng(params.seed)
    timestamps = np.arange(n) * params.history_dt
    forecast = _daily_wave(timestamps, params.forecast_mean_mw, params.forecast_swing_mw)
    error = ar1_path(n, params.autocorrelation, params.noise_std, rng)
    logger.debug(f"Generated {n} synthetic wind samples at {params.history_dt}s spacing")
    return ErrorSeries(timestamps=timestamps, forecast=forecast, actual=forecast + error)


def synthetic_profiles(params: SyntheticProfileParams, hours: float, dt: float) -> Profiles:
    """Smooth daily load and forecast with ``hours * 3600 / dt + 1`` samples.

    Load peaks in the evening and the forecast peaks at night; a small
    smoothed noise term keeps consecutive steps well inside ramp limits.
    """
    n = int(round(hours * 3600.0 / dt)) + 1
    rng = make_rng(params.seed)
    timestamps = np.arange(n) * dt
    noise = ar1_path(n, 0.9, params.noise_mw, rng) if params.noise_mw > 0 else np.zeros(n)
    load = _daily_wave(timestamps, params.base_load_mw, params.load_swing_mw, phase=-0.75 * np.pi)
    load = load + noise
    forecast = _daily_wave(timestamps, params.forecast_mean_mw, params.forecast_swing_mw, phase=0.5 * np.pi)
    forecast = np.clip(forecast, 0.0, None)
    return Profiles(timestamps, load, forecast)
