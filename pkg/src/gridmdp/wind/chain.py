"""Estimation, lookup and sampling of the wind forecast-error chain."""

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import DegenerateDataError
from ..models.mdp import WindState
from ..models.wind import ErrorSeries, WindDtmc

logger = logging.getLogger(__name__)

DEFAULT_BINS = 41
PRNG_ALGORITHM = "PCG64"


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Seeded PCG64 generator used for every stochastic draw in the package.

    Non-zero ``stream`` values give independent generators for the same seed.
    """
    return np.random.Generator(np.random.PCG64(seed if stream == 0 else [seed, stream]))


def interpolate(series: ErrorSeries, target_dt: float) -> ErrorSeries:
    """Linearly refine a series to ``target_dt``; forecast and actual independently."""
    if target_dt <= 0:
        raise ValueError(f"target_dt must be positive, got {target_dt}")
    if len(series) < 2:
        return series
    spacing = series.spacing
    ratio = spacing / target_dt
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"target_dt={target_dt} does not divide the series spacing {spacing}")
    if factor == 1:
        return series

    n = len(series)
    j = np.arange((n - 1) * factor + 1)
    base = np.minimum(j // factor, n - 2)
    frac = (j - base * factor) / factor

    def blend(values: np.ndarray) -> np.ndarray:
        lo, hi = values[base], values[base + 1]
        return np.where(frac == 1.0, hi, lo + frac * (hi - lo))

    timestamps = series.timestamps[0] + j * target_dt
    return ErrorSeries(
        timestamps=timestamps, forecast=blend(series.forecast), actual=blend(series.actual)
    )


def _bin_index(edges: np.ndarray, values: np.ndarray) -> np.ndarray:
    # Half-open [lo, hi) bins; the top edge and anything beyond clamp to the last bin.
    return np.clip(np.searchsorted(edges, values, side="right") - 1, 0, len(edges) - 2)


def estimate_dtmc(series: ErrorSeries, n_bins: int = DEFAULT_BINS) -> WindDtmc:
    """Maximum-likelihood transition matrix over uniform bins of the observed error range."""
    if n_bins < 2:
        raise ValueError(f"n_bins must be at least 2, got {n_bins}")
    if len(series) < 2:
        raise DegenerateDataError("need at least two samples to count transitions")

    error = series.error
    low, high = float(error.min()), float(error.max())
    if not high > low:
        raise DegenerateDataError(f"error series is constant ({low} MW); cannot discretise")

    edges = np.linspace(low, high, n_bins + 1)
    rep_value = 0.5 * (edges[:-1] + edges[1:])
    states = _bin_index(edges, error)

    counts = np.zeros((n_bins, n_bins))
    np.add.at(counts, (states[:-1], states[1:]), 1.0)

    row_sums = counts.sum(axis=1)
    empty = row_sums == 0
    trans = np.zeros_like(counts)
    trans[~empty] = counts[~empty] / row_sums[~empty, None]
    if empty.any():
        logger.warning(f"{int(empty.sum())} of {n_bins} bins never observed; using self-loops")
        idx = np.flatnonzero(empty)
        trans[idx, idx] = 1.0

    logger.info(f"Estimated {n_bins}-bin wind DTMC from {len(series)} samples")
    return WindDtmc(bins=edges, rep_value=rep_value, trans=trans, counts=counts)


def identity_dtmc(n_bins: int = DEFAULT_BINS, half_range: float = 1.0) -> WindDtmc:
    """Zero-noise chain on bins symmetric around 0 MW; every state is absorbing.

    The bin count must be odd so that the middle bin represents exactly 0 MW.
    """
    if n_bins < 3 or n_bins % 2 == 0:
        raise ValueError(f"n_bins must be odd and at least 3, got {n_bins}")
    edges = np.linspace(-half_range, half_range, n_bins + 1)
    rep_value = 0.5 * (edges[:-1] + edges[1:])
    rep_value[n_bins // 2] = 0.0
    return WindDtmc(
        bins=edges, rep_value=rep_value, trans=np.eye(n_bins), counts=np.zeros((n_bins, n_bins))
    )


def map_error(dtmc: WindDtmc, error: float) -> int:
    """Index of the bin containing ``error``; out-of-range values clamp."""
    return int(_bin_index(dtmc.bins, np.asarray([error], dtype=float))[0])


def successors(dtmc: WindDtmc, s_w: int) -> List[Tuple[int, float]]:
    """Positive-probability successors of ``s_w`` in ascending index order."""
    if not 0 <= s_w < dtmc.n_bins:
        raise IndexError(f"wind state {s_w} outside 0..{dtmc.n_bins - 1}")
    row = dtmc.trans[s_w]
    return [(int(j), float(row[j])) for j in np.flatnonzero(row > 0.0)]


def joint_successors(dtmc: WindDtmc, s_w: WindState) -> List[Tuple[WindState, float]]:
    """Successors of a multi-farm wind state under independent identical chains.

    Ordered lexicographically by successor tuple; an empty state (no farms)
    has the single successor ``()`` with probability 1.
    """
    per_farm = [successors(dtmc, s) for s in s_w]
    result = []
    for combo in itertools.product(*per_farm):
        prob = 1.0
        for _, p in combo:
            prob *= p
        result.append((tuple(s for s, _ in combo), prob))
    return result


def _step_table(dtmc: WindDtmc):
    cdf = np.cumsum(dtmc.trans, axis=1)
    last_positive = np.array([np.flatnonzero(row > 0.0)[-1] for row in dtmc.trans])
    return cdf, last_positive


def _advance(cdf: np.ndarray, last_positive: np.ndarray, state: int, draw: float) -> int:
    nxt = int(np.searchsorted(cdf[state], draw, side="right"))
    return min(nxt, int(last_positive[state]))


def sample_trajectory(dtmc: WindDtmc, s0: int, steps: int, seed: int) -> List[int]:
    """Seeded wind-state path of length ``steps + 1`` starting at ``s0``."""
    if not 0 <= s0 < dtmc.n_bins:
        raise IndexError(f"wind state {s0} outside 0..{dtmc.n_bins - 1}")
    cdf, last_positive = _step_table(dtmc)
    draws = make_rng(seed).random(steps)
    path = [int(s0)]
    for u in draws:
        path.append(_advance(cdf, last_positive, path[-1], u))
    return path


def sample_joint_trajectory(
    dtmc: WindDtmc, s0: Sequence[int], steps: int, seed: int
) -> List[WindState]:
    """Independent paths for several farms, zipped into wind-state tuples."""
    if len(s0) == 1:
        return [(s,) for s in sample_trajectory(dtmc, s0[0], steps, seed)]
    cdf, last_positive = _step_table(dtmc)
    draws = make_rng(seed).random((steps, len(s0)))
    path: List[WindState] = [tuple(int(s) for s in s0)]
    for row in draws:
        path.append(
            tuple(_advance(cdf, last_positive, s, u) for s, u in zip(path[-1], row))
        )
    return path


def diagonal_dominance(dtmc: WindDtmc) -> float:
    """Share of observed rows whose self-transition beats every other entry."""
    populated = np.flatnonzero(dtmc.counts.sum(axis=1) > 0)
    if populated.size == 0:
        return 0.0
    dominant = 0
    for i in populated:
        row = dtmc.trans[i]
        others = np.delete(row, i)
        if others.size == 0 or row[i] > others.max():
            dominant += 1
    return dominant / populated.size
