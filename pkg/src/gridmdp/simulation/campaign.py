"""Monte Carlo evaluation over seeded runs."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np
from scipy import stats

from ..models.results import Campaign, CampaignAggregate, RunRecord
from .runner import run_once
from .scenario import Scenario

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95


def confidence_half_width(values: List[float], confidence: float = CONFIDENCE) -> Optional[float]:
    """Student-t half-width of the mean; None with fewer than two values."""
    n = len(values)
    if n < 2:
        return None
    sem = float(np.std(values, ddof=1)) / np.sqrt(n)
    return float(sem * stats.t.ppf((1.0 + confidence) / 2.0, n - 1))


def aggregate(results: List[RunRecord]) -> Optional[CampaignAggregate]:
    """Statistics over the runs that did not fail."""
    completed = [r for r in results if not r.failed]
    if not completed:
        return None
    j_values = [r.j_metric for r in completed]
    sizes = [size for r in completed for size in r.model_size]
    timings = [t for r in completed for t in r.timing]
    return CampaignAggregate(
        completed_runs=len(completed),
        mean_j=float(np.mean(j_values)),
        ci_half_width=confidence_half_width(j_values),
        mean_states=float(np.mean([s for s, _ in sizes])) if sizes else 0.0,
        mean_actions=float(np.mean([a for _, a in sizes])) if sizes else 0.0,
        mean_iteration_time=float(np.mean(timings)) if timings else 0.0,
    )


def run_campaign(scenario: Scenario, n_runs: int, base_seed: int, workers: int = 1) -> Campaign:
    """Run seeds ``base_seed .. base_seed + n_runs - 1`` and aggregate.

    With ``workers > 1`` runs execute in a process pool; results are ordered
    by seed either way.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be at least 1, got {n_runs}")
    seeds = list(range(base_seed, base_seed + n_runs))
    logger.info(
        f"Campaign {scenario.config.name}: {n_runs} runs, lambda={scenario.config.lambda_}, "
        f"horizon={scenario.config.horizon_s}s, workers={workers}"
    )

    if workers > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_runs)) as pool:
            results = list(pool.map(run_once, [scenario] * n_runs, seeds))
    else:
        results = [run_once(scenario, seed) for seed in seeds]
    results.sort(key=lambda r: r.seed)

    failed = sum(r.failed for r in results)
    summary = aggregate(results)
    campaign = Campaign(
        scenario=scenario.summary(),
        n_runs=n_runs,
        base_seed=base_seed,
        results=results,
        failure_rate=100.0 * failed / n_runs,
        degenerate=summary is None,
        aggregate=summary,
    )
    if summary is None:
        logger.warning(f"Campaign {scenario.config.name}: all {n_runs} runs failed")
    else:
        logger.info(
            f"Campaign {scenario.config.name}: mean J={summary.mean_j:.6g} Hz*h, "
            f"failures {campaign.failure_rate:.1f}%"
        )
    return campaign
