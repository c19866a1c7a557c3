"""Swing-equation dynamics discretised with backward Euler."""

import logging
from typing import NamedTuple, Optional

import numpy as np

from ..errors import DimensionMismatchError
from ..models.grid import ControlInput, Disturbance, GridSpec, GridState, KnownInput
from .newton import damped_newton

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SECONDS_PER_HOUR = 3600.0


class BatchStep(NamedTuple):
    """Next states of a batch of members, one row per member."""

    delta: np.ndarray
    omega: np.ndarray
    p_gen: np.ndarray
    soc: np.ndarray

    @property
    def size(self) -> int:
        return self.delta.shape[0]

    def state(self, row: int, k: int) -> GridState:
        return GridState.from_arrays(
            self.delta[row].copy(),
            self.omega[row].copy(),
            self.p_gen[row].copy(),
            self.soc[row].copy(),
            k,
        )


def _expect(label: str, vector: np.ndarray, size: int) -> None:
    if vector.shape[-1] != size:
        raise DimensionMismatchError(
            f"{label} has length {vector.shape[-1]}, grid expects {size}",
            {"field": label, "got": int(vector.shape[-1]), "expected": size},
        )


def check_dimensions(
    spec: GridSpec,
    state: Optional[GridState] = None,
    u: Optional[ControlInput] = None,
    v: Optional[KnownInput] = None,
    w: Optional[Disturbance] = None,
) -> None:
    """Raise DimensionMismatchError if any given vector disagrees with the spec."""
    if state is not None:
        _expect("delta", state.delta, spec.n_t)
        _expect("omega", state.omega, spec.n_t)
        _expect("p_gen", state.p_gen, spec.n_g)
        _expect("soc", state.soc, spec.n_s)
    if u is not None:
        _expect("dp_gen", u.dp_gen, spec.n_g)
        _expect("r_gen", u.r_gen, spec.n_g)
        _expect("r_stor", u.r_stor, spec.n_s)
    if v is not None:
        _expect("p_load", v.p_load, spec.n_t)
        _expect("p_wind_fc", v.p_wind_fc, spec.n_f)
        _expect("p_stor", v.p_stor, spec.n_s)
    if w is not None:
        _expect("dp_wind", w.dp_wind, spec.n_f)


def injection_batch(
    spec: GridSpec,
    p_gen: np.ndarray,
    r_gen: np.ndarray,
    r_stor: np.ndarray,
    v: KnownInput,
    dp_wind: np.ndarray,
) -> np.ndarray:
    """Net injection per node for every batch row (MW, shape ``(B, n_t)``)."""
    a = spec.arrays
    generation = (p_gen + r_gen) @ a.gen_incidence.T
    wind = (v.p_wind_fc + dp_wind) @ a.farm_incidence.T
    storage = (v.p_stor + r_stor) @ a.battery_incidence.T
    return generation + wind - v.p_load - storage


def node_power_balance(
    spec: GridSpec, state: GridState, u: ControlInput, v: KnownInput, w: Disturbance
) -> np.ndarray:
    """Net power injected at each node.

    Generators contribute ``P_gen + R_gen``, wind farms ``P_wind_fc + dP_wind``;
    loads and battery charging ``P_stor + R_stor`` are withdrawals.
    """
    check_dimensions(spec, state, u, v, w)
    return injection_batch(
        spec,
        state.p_gen[None, :],
        u.r_gen[None, :],
        u.r_stor[None, :],
        v,
        w.dp_wind[None, :],
    )[0]


def _line_terms(susceptance: np.ndarray, delta: np.ndarray):
    diff = delta[:, :, None] - delta[:, None, :]
    return susceptance * np.sin(diff), susceptance * np.cos(diff)


def _swing_residual_batch(
    spec: GridSpec,
    delta_next: np.ndarray,
    omega_next: np.ndarray,
    delta: np.ndarray,
    omega: np.ndarray,
    pbar_next: np.ndarray,
) -> np.ndarray:
    a = spec.arrays
    dt = spec.dt
    flows, _ = _line_terms(a.susceptance, delta_next)
    r_delta = delta_next - delta - dt * TWO_PI * omega_next
    r_omega = (
        TWO_PI * a.inertia * (omega_next - omega) / dt
        + TWO_PI * a.damping * omega_next
        - pbar_next
        + flows.sum(axis=-1)
    )
    return np.concatenate([r_delta, r_omega], axis=-1)


def swing_residual(
    spec: GridSpec, state_next: GridState, state: GridState, pbar_next: np.ndarray
) -> np.ndarray:
    """Backward-Euler residual of the coupled angle/frequency equations.

    The first ``n_t`` entries are the angle equations, the last ``n_t`` the
    frequency equations in MW. A zero residual means ``state_next`` satisfies
    the implicit step from ``state``.
    """
    pbar_next = np.asarray(pbar_next, dtype=float)
    _expect("pbar_next", pbar_next, spec.n_t)
    for label, st in (("state_next", state_next), ("state", state)):
        _expect(f"{label}.delta", st.delta, spec.n_t)
        _expect(f"{label}.omega", st.omega, spec.n_t)
    return _swing_residual_batch(
        spec,
        state_next.delta[None, :],
        state_next.omega[None, :],
        state.delta[None, :],
        state.omega[None, :],
        pbar_next[None, :],
    )[0]


def _solve_swing(
    spec: GridSpec, delta: np.ndarray, omega: np.ndarray, pbar_next: np.ndarray
):
    """Solve the implicit step for a batch, starting from the previous state."""
    a = spec.arrays
    n = spec.n_t
    dt = spec.dt
    batch = pbar_next.shape[0]
    delta0 = np.broadcast_to(delta, (batch, n))
    omega0 = np.broadcast_to(omega, (batch, n))
    freq_diag = np.diag(TWO_PI * (a.inertia / dt + a.damping))
    coupling = -dt * TWO_PI * np.eye(n)

    def residual(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
        return _swing_residual_batch(
            spec, z[:, :n], z[:, n:], delta0[rows], omega0[rows], pbar_next[rows]
        )

    def jacobian(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
        _, cos_terms = _line_terms(a.susceptance, z[:, :n])
        laplacian = -cos_terms
        idx = np.arange(n)
        laplacian[:, idx, idx] = cos_terms.sum(axis=-1)
        jac = np.zeros((z.shape[0], 2 * n, 2 * n))
        jac[:, :n, :n] = np.eye(n)
        jac[:, :n, n:] = coupling
        jac[:, n:, :n] = laplacian
        jac[:, n:, n:] = freq_diag
        return jac

    z0 = np.concatenate([delta0, omega0], axis=1)
    z, iterations = damped_newton(residual, jacobian, z0)
    logger.debug(f"Swing step for {batch} members converged in {iterations} Newton iterations")
    return z[:, :n], z[:, n:]


def soc_update(spec: GridSpec, soc: np.ndarray, storage_power: np.ndarray) -> np.ndarray:
    """Integrate battery SoC over one step; positive power charges."""
    a = spec.arrays
    eta = a.battery_efficiency
    effective = np.where(storage_power >= 0, eta * storage_power, storage_power / eta)
    return soc + spec.dt * effective / (SECONDS_PER_HOUR * a.battery_capacity)


def step_batch(
    spec: GridSpec,
    state: GridState,
    dp_gen: np.ndarray,
    r_gen: np.ndarray,
    r_stor: np.ndarray,
    v: KnownInput,
    dp_wind: np.ndarray,
) -> BatchStep:
    """Advance one state under a batch of (control, disturbance) rows.

    ``v`` and ``dp_wind`` are the known input and wind error at k+1, where the
    implicit step evaluates the injection.
    """
    p_gen_next = state.p_gen + spec.dt * dp_gen
    storage_power = v.p_stor + r_stor
    soc_next = soc_update(spec, state.soc, storage_power)
    pbar_next = injection_batch(spec, p_gen_next, r_gen, r_stor, v, dp_wind)
    delta_next, omega_next = _solve_swing(spec, state.delta, state.omega, pbar_next)
    return BatchStep(delta_next, omega_next, p_gen_next, soc_next)


def step_dynamics(
    spec: GridSpec, state: GridState, u: ControlInput, v: KnownInput, w: Disturbance
) -> GridState:
    """x(k+1) = f(x(k), u(k), v, w) with backward Euler on the swing equation."""
    check_dimensions(spec, state, u, v, w)
    result = step_batch(
        spec,
        state,
        u.dp_gen[None, :],
        u.r_gen[None, :],
        u.r_stor[None, :],
        v,
        w.dp_wind[None, :],
    )
    return result.state(0, state.k + 1)


def equilibrium_state(
    spec: GridSpec,
    v: KnownInput,
    p_gen: np.ndarray,
    soc: Optional[np.ndarray] = None,
    k: int = 0,
) -> GridState:
    """Steady operating point with zero frequency deviation and delta_0 = 0.

    Solves ``P_n = sum_p b_np sin(delta_n - delta_p)`` for the angles given the
    scheduled generation and no deployed reserves. The injections must sum to
    zero.
    """
    p_gen = np.asarray(p_gen, dtype=float)
    soc = spec.arrays.initial_soc.copy() if soc is None else np.asarray(soc, dtype=float)
    _expect("p_gen", p_gen, spec.n_g)
    _expect("soc", soc, spec.n_s)
    check_dimensions(spec, v=v)

    pbar = injection_batch(
        spec,
        p_gen[None, :],
        np.zeros((1, spec.n_g)),
        np.zeros((1, spec.n_s)),
        v,
        np.zeros((1, spec.n_f)),
    )[0]
    imbalance = float(pbar.sum())
    scale = max(1.0, float(np.abs(pbar).max()))
    if abs(imbalance) > 1e-9 * scale:
        raise ValueError(f"injections do not balance (net {imbalance:.3e} MW)")

    n = spec.n_t
    delta = np.zeros(n)
    if n > 1:
        susceptance = spec.arrays.susceptance
        target = pbar[1:]

        def residual(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
            full = np.concatenate([np.zeros((z.shape[0], 1)), z], axis=1)
            flows, _ = _line_terms(susceptance, full)
            return target - flows.sum(axis=-1)[:, 1:]

        def jacobian(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
            full = np.concatenate([np.zeros((z.shape[0], 1)), z], axis=1)
            _, cos_terms = _line_terms(susceptance, full)
            laplacian = -cos_terms
            idx = np.arange(n)
            laplacian[:, idx, idx] = cos_terms.sum(axis=-1)
            return -laplacian[:, 1:, 1:]

        z, _ = damped_newton(residual, jacobian, np.zeros((1, n - 1)))
        delta[1:] = z[0]

    return GridState.from_arrays(delta, np.zeros(n), p_gen.copy(), soc.copy(), k)
