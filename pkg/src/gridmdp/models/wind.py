"""Wind forecast error data and Markov chain models."""

import numpy as np
from pydantic import model_validator

from .base import ArrayModel, Matrix, Vector

ROW_SUM_TOLERANCE = 1e-12


class ErrorSeries(ArrayModel):
    """Uniformly spaced wind forecast/actual series (MW)."""

    timestamps: Vector
    forecast: Vector
    actual: Vector

    @model_validator(mode="after")
    def _check_shape(self) -> "ErrorSeries":
        n = len(self.timestamps)
        if n == 0:
            raise ValueError("series is empty")
        if len(self.forecast) != n or len(self.actual) != n:
            raise ValueError(
                f"length mismatch: timestamps={n}, forecast={len(self.forecast)}, "
                f"actual={len(self.actual)}"
            )
        if n > 1:
            steps = np.diff(self.timestamps)
            if steps[0] <= 0:
                raise ValueError("timestamps must be increasing")
            if not np.allclose(steps, steps[0], rtol=0.0, atol=1e-9 * steps[0]):
                raise ValueError("timestamps are not uniformly spaced")
        return self

    @property
    def error(self) -> np.ndarray:
        """Forecast error actual - forecast."""
        return self.actual - self.forecast

    @property
    def spacing(self) -> float:
        if len(self.timestamps) < 2:
            return 0.0
        return float(self.timestamps[1] - self.timestamps[0])

    def __len__(self) -> int:
        return len(self.timestamps)


class WindDtmc(ArrayModel):
    """Discrete-time Markov chain over uniform forecast-error bins."""

    bins: Vector
    rep_value: Vector
    trans: Matrix
    counts: Matrix

    @model_validator(mode="after")
    def _check_chain(self) -> "WindDtmc":
        n = len(self.rep_value)
        if n < 1 or len(self.bins) != n + 1:
            raise ValueError(f"expected {n + 1} bin edges for {n} bins, got {len(self.bins)}")
        if self.trans.shape != (n, n) or self.counts.shape != (n, n):
            raise ValueError(f"transition and count matrices must be {n}x{n}")
        widths = np.diff(self.bins)
        if np.any(widths <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if not np.allclose(widths, widths[0], rtol=1e-9, atol=0.0):
            raise ValueError("bins must have uniform width")
        if np.any(self.rep_value <= self.bins[:-1]) or np.any(self.rep_value >= self.bins[1:]):
            raise ValueError("representative values must lie strictly inside their bins")
        if np.any(self.trans < 0.0) or np.any(self.trans > 1.0):
            raise ValueError("transition probabilities must lie in [0, 1]")
        row_sums = self.trans.sum(axis=1)
        worst = float(np.max(np.abs(row_sums - 1.0)))
        if worst > ROW_SUM_TOLERANCE:
            raise ValueError(f"transition matrix is not row-stochastic (max deviation {worst:.3e})")
        return self

    @property
    def n_bins(self) -> int:
        return len(self.rep_value)

    @property
    def width(self) -> float:
        return float(self.bins[1] - self.bins[0])
