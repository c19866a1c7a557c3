"""Day-ahead dispatch and profile distribution."""

import logging

import numpy as np

from ..errors import DimensionMismatchError, InfeasibleScheduleError
from ..models.base import ArrayModel, Matrix
from ..models.grid import GridSpec, KnownInput

logger = logging.getLogger(__name__)

RAMP_TOLERANCE = 1e-9


class DayAheadSchedule(ArrayModel):
    """Known inputs and generator dispatch per control step.

    Rows are time steps k = 0..T-1. Steps past the end hold the last row.
    """

    dt: float
    p_load: Matrix
    p_wind_fc: Matrix
    p_stor: Matrix
    p_gen: Matrix

    def __len__(self) -> int:
        return self.p_load.shape[0]

    def _row(self, k: int) -> int:
        if k < 0:
            raise IndexError(f"negative time index {k}")
        return min(k, len(self) - 1)

    def known_input(self, k: int) -> KnownInput:
        row = self._row(k)
        return KnownInput.model_construct(
            p_load=self.p_load[row], p_wind_fc=self.p_wind_fc[row], p_stor=self.p_stor[row]
        )

    def window(self, start: int, length: int) -> list:
        """Known inputs for steps start..start+length-1."""
        return [self.known_input(start + i) for i in range(length)]

    def dispatch(self, k: int) -> np.ndarray:
        return self.p_gen[self._row(k)]


def distribute_profiles(spec: GridSpec, total_load, total_forecast):
    """Split system-total profiles into per-node load and per-farm forecast."""
    total_load = np.asarray(total_load, dtype=float).reshape(-1)
    total_forecast = np.asarray(total_forecast, dtype=float).reshape(-1)
    if total_load.shape != total_forecast.shape:
        raise DimensionMismatchError(
            f"load profile has {total_load.size} steps, forecast has {total_forecast.size}"
        )
    a = spec.arrays
    if spec.n_f == 0 and np.any(total_forecast != 0):
        logger.warning(f"Grid {spec.name} has no wind farm; the wind forecast profile is ignored")
    return np.outer(total_load, a.load_share), np.outer(total_forecast, a.farm_share)


def day_ahead_schedule(spec: GridSpec, load_profile, wind_fc_profile) -> DayAheadSchedule:
    """Dispatch generators so that generation plus forecast meets load at every step.

    The residual demand is split proportionally to each generator's capacity
    range above its minimum output.
    """
    load = np.atleast_2d(np.asarray(load_profile, dtype=float))
    forecast = np.asarray(wind_fc_profile, dtype=float)
    if forecast.ndim == 1:
        forecast = forecast.reshape(-1, spec.n_f) if spec.n_f else forecast.reshape(-1, 0)
    if load.shape[1] != spec.n_t:
        raise DimensionMismatchError(f"load profile has {load.shape[1]} columns, grid has {spec.n_t} nodes")
    if forecast.shape[1] != spec.n_f:
        raise DimensionMismatchError(
            f"forecast profile has {forecast.shape[1]} columns, grid has {spec.n_f} wind farms"
        )
    if load.shape[0] != forecast.shape[0] or load.shape[0] == 0:
        raise DimensionMismatchError("load and forecast profiles must cover the same non-empty horizon")

    a = spec.arrays
    steps = load.shape[0]
    required = load.sum(axis=1) - forecast.sum(axis=1)

    short = np.flatnonzero(required < 0)
    if short.size:
        k = int(short[0])
        raise InfeasibleScheduleError(
            f"wind forecast exceeds load at step {k}", step=k, reason="forecast_exceeds_load"
        )

    if spec.n_g == 1:
        p_gen = required[:, None].copy()
    else:
        span = a.gen_p_max - a.gen_p_min
        shares = span / span.sum()
        p_gen = a.gen_p_min + np.outer(required - a.gen_p_min.sum(), shares)

    for k in range(steps):
        low = p_gen[k] < a.gen_p_min
        high = p_gen[k] > a.gen_p_max
        if low.any() or high.any():
            gen = int(np.flatnonzero(low | high)[0])
            reason = "below_minimum" if low[gen] else "above_maximum"
            logger.error(f"Day-ahead dispatch of generator {gen} infeasible at step {k}: {reason}")
            raise InfeasibleScheduleError(
                f"generator {gen} dispatch {p_gen[k, gen]:.4f} MW outside capacity at step {k}",
                step=k,
                reason=reason,
            )
        if k > 0:
            rate = np.abs(p_gen[k] - p_gen[k - 1]) / spec.dt
            over = rate > a.gen_ramp * (1.0 + RAMP_TOLERANCE)
            if over.any():
                gen = int(np.flatnonzero(over)[0])
                logger.error(f"Day-ahead dispatch of generator {gen} exceeds ramp limit at step {k}")
                raise InfeasibleScheduleError(
                    f"generator {gen} ramps {rate[gen]:.5f} MW/s at step {k}",
                    step=k,
                    reason="ramp_limit",
                )

    logger.debug(f"Day-ahead schedule built for {steps} steps on grid {spec.name}")
    return DayAheadSchedule(
        dt=spec.dt,
        p_load=load,
        p_wind_fc=forecast,
        p_stor=np.zeros((steps, spec.n_s)),
        p_gen=p_gen,
    )
