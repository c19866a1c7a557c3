"""``gridmdp run``: Monte Carlo campaigns over a (lambda, horizon) matrix."""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import aiofiles

from .. import storage
from ..errors import ConfigurationError
from ..mdp.tree import build_tree
from ..models.scenario import ScenarioConfig
from ..simulation import Scenario, initial_state, load_scenario, run_campaign
from ..wind.chain import map_error
from .base import BaseCommand

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"


def _float_list(raw: str) -> List[float]:
    try:
        return [float(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}")


def _int_list(raw: str) -> List[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")


def campaign_filename(scenario: Scenario) -> str:
    cfg = scenario.config
    return f"campaign_{cfg.name}_lambda{cfg.lambda_}_h{int(cfg.horizon_s)}.json"


class RunCommand(BaseCommand):
    @property
    def name(self) -> str:
        return "run"

    @property
    def description(self) -> str:
        return "Run receding-horizon campaigns and write campaign JSON plus CSV summary rows"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--config", type=Path, default=None, help="ScenarioConfig JSON")
        parser.add_argument("--grid", default=None, help="Built-in grid name or grid JSON path")
        parser.add_argument("--lambda", dest="lambdas", type=_int_list, default=None,
                            help="Grid points per control dimension; comma list for a sweep")
        parser.add_argument("--horizon-s", dest="horizons", type=_float_list, default=None,
                            help="Exploration horizon (s); comma list for a sweep")
        parser.add_argument("--runs", type=int, default=1, help="Runs per campaign")
        parser.add_argument("--seed", type=int, default=0, help="Base seed")
        parser.add_argument("--hours", type=float, default=None, help="Simulated hours")
        parser.add_argument("--bins", type=int, default=None, help="Wind error bins")
        parser.add_argument("--dtmc", type=Path, default=None, help="Precomputed DTMC JSON")
        parser.add_argument("--wind-errors", type=Path, default=None, help="Wind error history CSV")
        parser.add_argument("--load-profile", type=Path, default=None)
        parser.add_argument("--forecast-profile", type=Path, default=None)
        parser.add_argument("--jitter", action="store_true", help="Jitter the realised error inside its bin")
        parser.add_argument("--workers", type=int, default=None, help="Parallel worker processes")
        parser.add_argument("--out", type=Path, default=None, help="Output directory")
        parser.add_argument("--dump-tree", type=Path, default=None,
                            help="Write the first MDP of the first run as JSON lines")

    async def _load_config(self, args: argparse.Namespace) -> ScenarioConfig:
        data: Dict[str, Any] = {}
        if args.config is not None:
            async with aiofiles.open(args.config, "r") as f:
                data = json.loads(await f.read())
        overrides = {
            "grid": args.grid,
            "simulation_hours": args.hours,
            "n_bins": args.bins,
            "dtmc": args.dtmc,
            "wind_errors": args.wind_errors,
            "load_profile": args.load_profile,
            "forecast_profile": args.forecast_profile,
            "lambda": args.lambdas[0] if args.lambdas else None,
            "horizon_s": args.horizons[0] if args.horizons else None,
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        if "lambda_" in data:
            data["lambda"] = data.pop("lambda_")
        if args.jitter:
            data["wind_jitter"] = True
        data["output_dir"] = args.out or data.get("output_dir") or self.settings.output_dir
        return ScenarioConfig.model_validate(data)

    async def _dump_tree(self, scenario: Scenario, path: Path) -> None:
        cfg = scenario.config
        x0 = initial_state(scenario)
        s0 = tuple(map_error(scenario.dtmc, 0.0) for _ in range(scenario.spec.n_f))
        tree = build_tree(
            scenario.spec,
            x0,
            s0,
            scenario.schedule.window(1, cfg.horizon_steps),
            scenario.dtmc,
            cfg.horizon_steps,
            cfg.lambda_,
            cfg.violation_penalty,
        )
        await storage.save_tree_dump(path, tree.to_records(self.settings.tree_dump_max_nodes))
        self.emit(f"wrote {path}")

    async def execute(self, args: argparse.Namespace) -> int:
        if args.runs < 1:
            raise ConfigurationError("--runs must be at least 1")
        config = await self._load_config(args)
        base = await load_scenario(config)
        out = Path(config.output_dir)
        workers = args.workers or self.settings.workers

        lambdas = args.lambdas or [config.lambda_]
        horizons = args.horizons or [config.horizon_s]

        exit_code = 0
        rows = []
        for horizon_s in horizons:
            for lam in lambdas:
                scenario = base.with_overrides(lambda_=lam, horizon_s=horizon_s)
                if args.dump_tree is not None and not rows:
                    await self._dump_tree(scenario, args.dump_tree)
                campaign = run_campaign(scenario, args.runs, args.seed, workers=workers)
                path = out / campaign_filename(scenario)
                await storage.save_campaign(path, campaign)
                rows.append(campaign.summary_row())
                self.emit(f"wrote {path}")
                if campaign.degenerate:
                    logger.error(f"Campaign lambda={lam} horizon={horizon_s}s is degenerate")
                    exit_code = 1

        summary = out / SUMMARY_FILE
        await storage.append_summary_rows(summary, rows)
        self.emit(f"appended {len(rows)} rows to {summary}")
        return exit_code
