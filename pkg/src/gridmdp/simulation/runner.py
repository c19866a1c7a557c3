"""Receding-horizon control loop and the J quality metric."""

import logging
import time
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from ..errors import ActionExhaustedError
from ..grid.constraints import check_constraints
from ..grid.dynamics import equilibrium_state, step_dynamics
from ..mdp.solver import solve
from ..mdp.tree import MdpTree, build_tree, node_cost, shift_horizon
from ..models.grid import Disturbance, GridState
from ..models.mdp import DiscreteAction, WindState
from ..models.results import ActionRecord, FailureInfo, RunRecord, StepRecord
from ..wind.chain import make_rng, map_error, sample_joint_trajectory
from .scenario import Scenario

logger = logging.getLogger(__name__)

JITTER_STREAM = 1


def evaluate_J(record: RunRecord, dt_control: float) -> float:
    """Trapezoidal integral of |sum_n omega_n| over the trajectory, in Hz*h."""
    if len(record.steps) < 2:
        raise ValueError("J needs a trajectory with at least two samples")
    total = np.array([abs(sum(step.omega)) for step in record.steps])
    return float(trapezoid(total, dx=dt_control / 3600.0))


def _step_record(x: GridState, s_w: WindState) -> StepRecord:
    return StepRecord(
        k=x.k,
        s_w=list(s_w),
        delta=x.delta.tolist(),
        omega=x.omega.tolist(),
        p_gen=x.p_gen.tolist(),
        soc=x.soc.tolist(),
        cost=node_cost(x),
    )


def _action_record(action: DiscreteAction) -> ActionRecord:
    return ActionRecord(
        grid_index=list(action.grid_index),
        coordinates=list(action.coordinates),
        dp_gen=action.control.dp_gen.tolist(),
        r_gen=action.control.r_gen.tolist(),
        r_stor=action.control.r_stor.tolist(),
    )


def _tree_child(tree: MdpTree, action: DiscreteAction, s_w: WindState) -> GridState:
    for edge in tree.root_node.edges:
        if edge.action.grid_index == action.grid_index:
            for child, _ in edge.children:
                if tree.nodes[child].aug.s_w == s_w:
                    return tree.nodes[child].aug.x
    raise KeyError(f"no child for action {action.grid_index} and wind state {s_w}")


def initial_state(scenario: Scenario) -> GridState:
    """Day-ahead operating point at k = 0."""
    schedule = scenario.schedule
    return equilibrium_state(
        scenario.spec, schedule.known_input(0), schedule.dispatch(0), scenario.spec.arrays.initial_soc
    )


def run_once(scenario: Scenario, seed: int) -> RunRecord:
    """Simulate one full receding-horizon trajectory for ``seed``."""
    cfg = scenario.config
    spec, dtmc, schedule = scenario.spec, scenario.dtmc, scenario.schedule
    total_steps, horizon = cfg.total_steps, cfg.horizon_steps

    s0: WindState = tuple(map_error(dtmc, 0.0) for _ in range(spec.n_f))
    wind_path = (
        sample_joint_trajectory(dtmc, s0, total_steps, seed)
        if spec.n_f
        else [()] * (total_steps + 1)
    )
    jitter_rng = make_rng(seed, JITTER_STREAM) if cfg.wind_jitter else None

    x = initial_state(scenario)
    record = RunRecord(seed=seed, steps=[_step_record(x, s0)])

    def fail(step: int, reason: str, violations: Optional[List[str]] = None) -> RunRecord:
        record.failed = True
        record.failure = FailureInfo(step=step, reason=reason, violations=violations or [])
        logger.info(f"Run seed={seed} failed at step {step}: {reason}")
        return _finish(record, cfg.dt_control)

    report = check_constraints(spec, x)
    if not report.feasible:
        return fail(0, "constraint_violation", report.describe())

    try:
        tree = build_tree(
            spec, x, s0, schedule.window(1, horizon), dtmc, horizon, cfg.lambda_, cfg.violation_penalty
        )
    except ActionExhaustedError:
        return fail(0, "action_exhaustion")

    for k in range(total_steps):
        started = time.perf_counter()
        strategy = solve(tree)
        action = strategy.action_for(tree.root)
        realized = wind_path[k + 1]

        if jitter_rng is None:
            x_next = _tree_child(tree, action, realized)
        else:
            error = np.array([dtmc.rep_value[s] for s in realized])
            error = error + jitter_rng.uniform(-0.5, 0.5, size=error.size) * dtmc.width
            x_next = step_dynamics(
                spec, x, action.control, schedule.known_input(k + 1), Disturbance(dp_wind=error)
            )

        record.model_size.append(tree.size())
        last = record.steps[-1]
        last.action = _action_record(action)
        last.realized_sw = list(realized)
        record.steps.append(_step_record(x_next, realized))
        x = x_next

        report = check_constraints(spec, x)
        if not report.feasible:
            record.timing.append(time.perf_counter() - started)
            return fail(k + 1, "constraint_violation", report.describe())
        if k + 1 == total_steps:
            record.timing.append(time.perf_counter() - started)
            break

        try:
            if jitter_rng is None:
                tree = shift_horizon(tree, action, realized, schedule.known_input(k + 1 + horizon))
            else:
                tree = build_tree(
                    spec,
                    x,
                    realized,
                    schedule.window(k + 2, horizon),
                    dtmc,
                    horizon,
                    cfg.lambda_,
                    cfg.violation_penalty,
                )
        except ActionExhaustedError:
            record.timing.append(time.perf_counter() - started)
            return fail(k + 1, "action_exhaustion")
        record.timing.append(time.perf_counter() - started)
        logger.debug(f"seed={seed} k={k} states={record.model_size[-1][0]} t={record.timing[-1]:.4f}s")

    result = _finish(record, cfg.dt_control)
    logger.info(f"Run seed={seed} finished: J={result.j_metric:.6g} Hz*h")
    return result


def _finish(record: RunRecord, dt_control: float) -> RunRecord:
    record.j_metric = evaluate_J(record, dt_control) if len(record.steps) >= 2 else 0.0
    return record
