"""File persistence for grids, data series, wind chains and campaign results."""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

import aiofiles
import numpy as np
import pandas as pd
from pydantic import ValidationError

from .errors import ConfigurationError, DataFormatError
from .models.grid import GridSpec
from .models.results import Campaign
from .models.wind import ErrorSeries, WindDtmc

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

GRID_DIR = Path(__file__).parent / "data" / "grids"

ERROR_SERIES_COLUMNS = ["timestamp", "forecast_mw", "actual_mw"]
SUMMARY_COLUMNS = [
    "scenario",
    "grid",
    "lambda",
    "horizon_s",
    "n_runs",
    "mean_J",
    "ci_half_width",
    "failure_pct",
    "mean_states",
    "mean_actions",
    "mean_iter_time_s",
]
# Wall-clock fields left out of campaign JSON so identical runs give identical files.
CAMPAIGN_TIMING_FIELDS = {"results": {"__all__": {"timing"}}, "aggregate": {"mean_iteration_time"}}


async def _read_text(path: PathLike) -> str:
    async with aiofiles.open(path, "r") as f:
        return await f.read()


async def _write_text(path: PathLike, content: str, mode: str = "w") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, mode) as f:
        await f.write(content)


def builtin_grids() -> List[str]:
    return sorted(p.stem for p in GRID_DIR.glob("*.json"))


def resolve_grid_path(name_or_path: PathLike) -> Path:
    """A grid JSON path, or the shipped grid of that name."""
    candidate = Path(name_or_path)
    if candidate.is_file():
        return candidate
    builtin = GRID_DIR / f"{name_or_path}.json"
    if builtin.is_file():
        return builtin
    raise ConfigurationError(
        f"grid '{name_or_path}' is neither a file nor a built-in grid ({', '.join(builtin_grids())})"
    )


async def load_grid(name_or_path: PathLike) -> GridSpec:
    path = resolve_grid_path(name_or_path)
    try:
        spec = GridSpec.model_validate(json.loads(await _read_text(path)))
    except (json.JSONDecodeError, ValidationError) as e:
        logger.error(f"Invalid grid file {path}: {e}")
        raise ConfigurationError(f"invalid grid file {path}: {e}")
    logger.info(f"Loaded grid {spec.name} from {path}")
    return spec


def _parse_csv(content: str, path: PathLike, columns: List[str]) -> pd.DataFrame:
    """Parse a CSV with an exact header and numeric cells, collecting every problem."""
    lines = content.splitlines()
    if not lines:
        raise DataFormatError(f"{path} is empty", str(path), ["line 1: missing header"])
    header = [c.strip() for c in lines[0].split(",")]
    if header != columns:
        raise DataFormatError(
            f"{path} has an unexpected header",
            str(path),
            [f"line 1: expected '{','.join(columns)}', got '{lines[0].strip()}'"],
        )

    try:
        frame = pd.read_csv(io.StringIO(content), dtype=str, skip_blank_lines=True)
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path} is not valid CSV", str(path), [str(e)])

    diagnostics: List[str] = []
    numeric = pd.DataFrame(index=frame.index)
    for column in columns:
        values = pd.to_numeric(frame[column], errors="coerce")
        for row in np.flatnonzero(values.isna().to_numpy()):
            diagnostics.append(
                f"line {row + 2}: column '{column}' is not a number ({frame[column].iloc[row]!r})"
            )
        numeric[column] = values
    if frame.empty:
        diagnostics.append("line 2: no data rows")
    if diagnostics:
        logger.error(f"Malformed CSV {path}: {len(diagnostics)} problems")
        raise DataFormatError(f"{path} has malformed rows", str(path), diagnostics)
    return numeric


def _check_spacing(timestamps: np.ndarray, path: PathLike, expected: float) -> None:
    if len(timestamps) < 2:
        return
    steps = np.diff(timestamps)
    bad = np.flatnonzero(np.abs(steps - expected) > 1e-9 * expected)
    if bad.size:
        raise DataFormatError(
            f"{path} is not sampled every {expected} s",
            str(path),
            [f"line {i + 3}: spacing {steps[i]} s" for i in bad[:20]],
        )


async def load_error_series(path: PathLike) -> ErrorSeries:
    """Read a ``timestamp,forecast_mw,actual_mw`` CSV."""
    frame = _parse_csv(await _read_text(path), path, ERROR_SERIES_COLUMNS)
    timestamps = frame["timestamp"].to_numpy(dtype=float)
    if len(timestamps) >= 2:
        _check_spacing(timestamps, path, float(timestamps[1] - timestamps[0]))
    try:
        series = ErrorSeries(
            timestamps=timestamps,
            forecast=frame["forecast_mw"].to_numpy(dtype=float),
            actual=frame["actual_mw"].to_numpy(dtype=float),
        )
    except ValidationError as e:
        raise DataFormatError(f"{path} is not a valid error series", str(path), [str(e)])
    logger.info(f"Loaded {len(series)} wind samples from {path}")
    return series


async def load_profile(path: PathLike, column: str, dt: float) -> np.ndarray:
    """Read a ``timestamp,<column>`` CSV sampled every ``dt`` seconds."""
    frame = _parse_csv(await _read_text(path), path, ["timestamp", column])
    _check_spacing(frame["timestamp"].to_numpy(dtype=float), path, dt)
    return frame[column].to_numpy(dtype=float)


def _frame_to_csv(frame: pd.DataFrame, header: bool = True) -> str:
    return frame.to_csv(index=False, header=header, lineterminator="\n")


async def save_error_series(path: PathLike, series: ErrorSeries) -> None:
    frame = pd.DataFrame(
        {"timestamp": series.timestamps, "forecast_mw": series.forecast, "actual_mw": series.actual}
    )
    await _write_text(path, _frame_to_csv(frame))


async def save_profile(path: PathLike, timestamps: np.ndarray, column: str, values: np.ndarray) -> None:
    await _write_text(path, _frame_to_csv(pd.DataFrame({"timestamp": timestamps, column: values})))


def dtmc_payload(dtmc: WindDtmc) -> Dict[str, Any]:
    return {
        "bins": dtmc.bins.tolist(),
        "rep_value": dtmc.rep_value.tolist(),
        "trans": dtmc.trans.tolist(),
        "counts": dtmc.counts.tolist(),
    }


async def save_dtmc(path: PathLike, dtmc: WindDtmc) -> None:
    await _write_text(path, json.dumps(dtmc_payload(dtmc), indent=2))
    logger.info(f"Saved {dtmc.n_bins}-bin wind DTMC to {path}")


async def load_dtmc(path: PathLike) -> WindDtmc:
    try:
        data = json.loads(await _read_text(path))
        if "counts" not in data:
            n = len(data["rep_value"])
            data["counts"] = np.zeros((n, n))
        return WindDtmc.model_validate(data)
    except FileNotFoundError:
        raise ConfigurationError(f"DTMC file not found: {path}")
    except (json.JSONDecodeError, KeyError, ValidationError) as e:
        logger.error(f"Invalid DTMC file {path}: {e}")
        raise ConfigurationError(f"invalid DTMC file {path}: {e}")


def campaign_payload(campaign: Campaign) -> Dict[str, Any]:
    return campaign.model_dump(mode="json", by_alias=True, exclude=CAMPAIGN_TIMING_FIELDS)


async def save_campaign(path: PathLike, campaign: Campaign) -> None:
    await _write_text(path, json.dumps(campaign_payload(campaign), indent=2))
    logger.info(f"Saved campaign with {campaign.n_runs} runs to {path}")


async def append_summary_rows(path: PathLike, rows: Iterable[Dict[str, Any]]) -> None:
    """Append summary rows, writing the header when the file is new."""
    path = Path(path)
    frame = pd.DataFrame(list(rows), columns=SUMMARY_COLUMNS)
    write_header = not path.exists() or path.stat().st_size == 0
    await _write_text(path, _frame_to_csv(frame, header=write_header), mode="a")


async def load_summary(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(await _read_text(path)))


async def save_tree_dump(path: PathLike, records: List[Dict[str, Any]]) -> None:
    await _write_text(path, "".join(json.dumps(r) + "\n" for r in records))
    logger.info(f"Wrote {len(records)} tree nodes to {path}")
