"""Discretisation of the feasible control space and a-priori action elimination.

The reduced control space has ``2 n_g + n_s - 2`` free coordinates, ordered as
dP/dt of generators ``0..n_g-2``, R_gen of every generator and R_stor of
batteries ``0..n_s-2``. The remaining two variables follow from the balance
constraints:

* dP/dt of the last generator keeps scheduled generation equal to load minus
  wind forecast at the next step;
* R_stor of the last battery makes reserves and storage cover the
  representative error of the current wind bin exactly. Without batteries the
  last generator's R_gen takes that role.

A grid point whose dependent variable falls outside its own bounds is not an
action.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..errors import ActionExhaustedError
from ..grid.constraints import feasible_mask
from ..grid.dynamics import SECONDS_PER_HOUR, step_batch
from ..models.base import freeze
from ..models.grid import ControlInput, GridSpec, GridState, KnownInput
from ..models.mdp import AugmentedState, DiscreteAction, WindState
from ..models.wind import WindDtmc
from ..wind.chain import joint_successors

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-9
COLLAPSE_TOLERANCE = 1e-12


@dataclass
class Child:
    """One wind successor of an action."""

    s_w: WindState
    probability: float
    state: GridState
    feasible: bool


@dataclass
class Expansion:
    """Surviving actions of a state and the successors of each."""

    actions: List[DiscreteAction] = field(default_factory=list)
    children: List[List[Child]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.actions)


def reduced_dimension(spec: GridSpec) -> int:
    return 2 * spec.n_g + spec.n_s - 2


def storage_box(spec: GridSpec, x: GridState, v: KnownInput) -> Tuple[np.ndarray, np.ndarray]:
    """Bounds of R_stor for every battery: flexibility, rate and SoC headroom."""
    a = spec.arrays
    # Power (MW) that would empty or fill each battery within one step.
    to_empty = x.soc * SECONDS_PER_HOUR * a.battery_capacity / spec.dt
    to_fill = (1.0 - x.soc) * SECONDS_PER_HOUR * a.battery_capacity / spec.dt
    low = np.max(
        [-a.flex_down, -a.battery_rate - v.p_stor, -to_empty * a.battery_efficiency - v.p_stor],
        axis=0,
    )
    high = np.min(
        [a.flex_up, a.battery_rate - v.p_stor, to_fill / a.battery_efficiency - v.p_stor],
        axis=0,
    )
    return low, high


def action_box(spec: GridSpec, x: GridState, v: KnownInput) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper bounds of every free coordinate at state ``x``."""
    a = spec.arrays
    free = spec.n_g - 1
    n_reserve = spec.n_g if spec.n_s else free

    ramp_low = np.maximum(-a.gen_ramp[:free], (a.gen_p_min[:free] - x.p_gen[:free]) / spec.dt)
    ramp_high = np.minimum(a.gen_ramp[:free], (a.gen_p_max[:free] - x.p_gen[:free]) / spec.dt)

    stor_low, stor_high = storage_box(spec, x, v)
    low = np.concatenate([ramp_low, -a.reserve_down[:n_reserve], stor_low[: spec.n_s - 1]])
    high = np.concatenate([ramp_high, a.reserve_up[:n_reserve], stor_high[: spec.n_s - 1]])
    return low, high


def grid_axes(low: np.ndarray, high: np.ndarray, lam: int) -> List[np.ndarray]:
    """λ evenly spaced points per dimension, endpoints included.

    A dimension whose interval has collapsed yields its single point; an
    empty interval yields no points.
    """
    axes = []
    for lo, hi in zip(low, high):
        width = hi - lo
        scale = COLLAPSE_TOLERANCE * max(1.0, abs(lo), abs(hi))
        if width < -scale:
            axes.append(np.zeros(0))
        elif width <= scale:
            axes.append(np.array([lo]))
        else:
            axes.append(np.linspace(lo, hi, lam))
    return axes


def _wind_error(dtmc: WindDtmc, s_w: WindState) -> np.ndarray:
    return np.array([dtmc.rep_value[s] for s in s_w], dtype=float)


def _within(values: np.ndarray, low: float, high: float) -> np.ndarray:
    scale = BOUND_TOLERANCE * max(1.0, abs(low), abs(high))
    return (values >= low - scale) & (values <= high + scale)


def _candidates(spec: GridSpec, aug: AugmentedState, v: KnownInput, dtmc: WindDtmc, lam: int):
    """Full control inputs for every grid point whose dependent variables are admissible."""
    a = spec.arrays
    x = aug.x
    free = spec.n_g - 1
    n_reserve = spec.n_g if spec.n_s else free
    low, high = action_box(spec, x, v)
    axes = grid_axes(low, high, lam)
    if any(axis.size == 0 for axis in axes):
        return [], np.zeros((0, spec.n_g)), np.zeros((0, spec.n_g)), np.zeros((0, spec.n_s)), []

    indices = list(itertools.product(*(range(axis.size) for axis in axes)))
    coords = np.array(
        [[axes[d][i] for d, i in enumerate(index)] for index in indices], dtype=float
    ).reshape(len(indices), len(axes))

    dp_free = coords[:, :free]
    r_gen_free = coords[:, free : free + n_reserve]
    r_stor_free = coords[:, free + n_reserve :]

    required = (v.p_load.sum() - v.p_wind_fc.sum() - x.p_gen.sum()) / spec.dt
    dp_last = required - dp_free.sum(axis=1)
    ramp = a.gen_ramp[-1]
    admissible = np.abs(dp_last) <= ramp * (1.0 + BOUND_TOLERANCE)
    dp_last = np.clip(dp_last, -ramp, ramp)

    # sum R_gen + error = sum R_stor
    error = _wind_error(dtmc, aug.s_w).sum()
    if spec.n_s:
        r_gen = r_gen_free
        stor_low, stor_high = storage_box(spec, x, v)
        r_stor_last = r_gen.sum(axis=1) + error - r_stor_free.sum(axis=1)
        admissible &= _within(r_stor_last, stor_low[-1], stor_high[-1])
        r_stor = np.column_stack([r_stor_free, r_stor_last])
    else:
        r_gen_last = -error - r_gen_free.sum(axis=1)
        admissible &= _within(r_gen_last, -a.reserve_down[-1], a.reserve_up[-1])
        r_gen = np.column_stack([r_gen_free, r_gen_last])
        r_stor = r_stor_free

    dp_gen = np.column_stack([dp_free, dp_last])

    keep = np.flatnonzero(admissible)
    return (
        [indices[i] for i in keep],
        dp_gen[keep],
        r_gen[keep],
        r_stor[keep],
        [coords[i] for i in keep],
    )


def expand(
    spec: GridSpec, aug: AugmentedState, v: KnownInput, dtmc: WindDtmc, lam: int
) -> Expansion:
    """Surviving actions of ``aug`` together with all of their wind successors.

    ``v`` is the known input at the next time step. Every candidate is stepped
    under every wind successor in one batch; a candidate is dropped only when
    all of its successors violate a hard constraint.
    """
    indices, dp_gen, r_gen, r_stor, extra = _candidates(spec, aug, v, dtmc, lam)
    if not indices:
        return Expansion()

    succ = joint_successors(dtmc, aug.s_w)
    n_cand, n_succ = len(indices), len(succ)
    errors = np.array([_wind_error(dtmc, s) for s, _ in succ]).reshape(n_succ, spec.n_f)

    batch = step_batch(
        spec,
        aug.x,
        np.repeat(dp_gen, n_succ, axis=0),
        np.repeat(r_gen, n_succ, axis=0),
        np.repeat(r_stor, n_succ, axis=0),
        v,
        np.tile(errors, (n_cand, 1)),
    )
    ok = feasible_mask(spec, batch.delta, batch.omega, batch.p_gen, batch.soc).reshape(n_cand, n_succ)

    result = Expansion()
    k_next = aug.x.k + 1
    for c in np.flatnonzero(ok.any(axis=1)):
        coords = extra[c]
        control = ControlInput.model_construct(
            dp_gen=freeze(dp_gen[c].copy()),
            r_gen=freeze(r_gen[c].copy()),
            r_stor=freeze(r_stor[c].copy()),
        )
        result.actions.append(
            DiscreteAction.model_construct(
                grid_index=tuple(int(i) for i in indices[c]),
                coordinates=tuple(float(q) for q in coords),
                control=control,
            )
        )
        row = c * n_succ
        result.children.append(
            [
                Child(s_w, prob, batch.state(row + j, k_next), bool(ok[c, j]))
                for j, (s_w, prob) in enumerate(succ)
            ]
        )

    logger.debug(
        f"k={aug.x.k} s_w={aug.s_w}: {len(result)} of {n_cand} candidate actions survive elimination"
    )
    return result


def feasible_actions(
    spec: GridSpec, aug: AugmentedState, v: KnownInput, dtmc: WindDtmc, lam: int
) -> List[DiscreteAction]:
    """Discrete actions of ``aug`` with at least one feasible wind successor.

    Raises ActionExhaustedError when none survive.
    """
    if lam < 2:
        raise ValueError(f"lambda must be at least 2, got {lam}")
    actions = expand(spec, aug, v, dtmc, lam).actions
    if not actions:
        raise ActionExhaustedError(f"no feasible action at k={aug.x.k}", k=aug.x.k)
    return actions
