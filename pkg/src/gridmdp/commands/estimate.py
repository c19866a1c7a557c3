"""``gridmdp estimate``: learn the wind-error chain from a history CSV."""

import argparse
import logging
from pathlib import Path

from .. import storage
from ..wind.chain import DEFAULT_BINS, diagonal_dominance, estimate_dtmc, interpolate
from .base import BaseCommand

logger = logging.getLogger(__name__)


class EstimateCommand(BaseCommand):
    @property
    def name(self) -> str:
        return "estimate"

    @property
    def description(self) -> str:
        return "Estimate the wind forecast-error DTMC from a timestamp,forecast_mw,actual_mw CSV"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--input", required=True, type=Path, help="Wind error history CSV")
        parser.add_argument("--bins", type=int, default=DEFAULT_BINS, help="Number of error bins")
        parser.add_argument("--dt", type=float, default=None, help="Interpolate to this spacing (s) first")
        parser.add_argument("--out", type=Path, default=None, help="Output DTMC JSON")

    async def execute(self, args: argparse.Namespace) -> int:
        series = await storage.load_error_series(args.input)
        if args.dt is not None and args.dt != series.spacing:
            series = interpolate(series, args.dt)
        dtmc = estimate_dtmc(series, args.bins)

        out = args.out or self.settings.output_dir / "dtmc.json"
        await storage.save_dtmc(out, dtmc)

        populated = int((dtmc.counts.sum(axis=1) > 0).sum())
        self.emit(f"wrote {out}")
        self.emit(f"bins: {dtmc.n_bins}, populated rows: {populated}, bin width: {dtmc.width:.6g} MW")
        self.emit(f"diagonally dominant rows: {100.0 * diagonal_dominance(dtmc):.1f}%")
        return 0
