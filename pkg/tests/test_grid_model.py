"""Tests for the continuous grid model."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.integrate import solve_ivp

from gridmdp.errors import DimensionMismatchError, InfeasibleScheduleError
from gridmdp.grid import (
    check_constraints,
    day_ahead_schedule,
    distribute_profiles,
    equilibrium_state,
    feasible_mask,
    line_flows,
    node_power_balance,
    step_dynamics,
    swing_residual,
)
from gridmdp.models import ControlInput, Disturbance, GridSpec, GridState, KnownInput
from gridmdp.models import SyntheticProfileParams
from gridmdp.wind import synthetic_profiles

from .conftest import known_input, load_builtin


def grid_data(n_gen=1, n_nodes=2, **overrides):
    nodes = [{"inertia": 0.1, "damping": 0.75, "load_share": 1.0 / n_nodes} for _ in range(n_nodes)]
    lines = [
        {"from": i, "to": i + 1, "susceptance": 10.0, "capacity": 5.0} for i in range(n_nodes - 1)
    ]
    data = {
        "name": "test",
        "nodes": nodes,
        "lines": lines,
        "generators": [
            {"node": 0, "p_min": 0.0, "p_max": 10.0, "ramp": 0.01, "reserve_down": 0.25, "reserve_up": 0.25}
            for _ in range(n_gen)
        ],
        "wind_farms": [{"node": n_nodes - 1, "share": 1.0}],
        "batteries": [
            {"node": 0, "capacity_mwh": 1.0, "rate_mw": 2.5, "flex_down": 2.0, "flex_up": 2.0}
        ],
        "dt": 300.0,
    }
    data.update(overrides)
    return data


def make_spec(**kwargs) -> GridSpec:
    return GridSpec.model_validate(grid_data(**kwargs))


def state_of(spec, delta=None, omega=None, p_gen=None, soc=None, k=0) -> GridState:
    return GridState(
        delta=np.zeros(spec.n_t) if delta is None else delta,
        omega=np.zeros(spec.n_t) if omega is None else omega,
        p_gen=np.zeros(spec.n_g) if p_gen is None else p_gen,
        soc=np.zeros(spec.n_s) if soc is None else soc,
        k=k,
    )


def zero_input(spec) -> KnownInput:
    return KnownInput(p_load=np.zeros(spec.n_t), p_wind_fc=np.zeros(spec.n_f), p_stor=np.zeros(spec.n_s))


class TestGridSpec:
    def test_shipped_grids_are_valid(self, three_node, one_node, two_batteries):
        assert (three_node.n_t, three_node.n_g, three_node.n_f, three_node.n_s) == (3, 1, 1, 1)
        assert one_node.n_t == 1 and one_node.lines == []
        assert two_batteries.n_s == 2

    def test_susceptance_is_symmetric_with_zero_diagonal(self, three_node):
        b = three_node.arrays.susceptance
        np.testing.assert_array_equal(b, b.T)
        assert np.all(np.diag(b) == 0)
        assert three_node.susceptance_map()[(2, 0)] == 150.0

    def test_disconnected_grid_rejected(self):
        with pytest.raises(ValidationError, match="not connected"):
            make_spec(n_nodes=3, lines=[{"from": 0, "to": 1, "susceptance": 1.0, "capacity": 1.0}])

    def test_asset_on_missing_node_rejected(self):
        data = grid_data()
        data["batteries"][0]["node"] = 7
        with pytest.raises(ValidationError, match="node 7"):
            GridSpec.model_validate(data)

    def test_non_positive_limits_rejected(self):
        data = grid_data()
        data["generators"][0]["ramp"] = 0.0
        with pytest.raises(ValidationError):
            GridSpec.model_validate(data)
        with pytest.raises(ValidationError):
            make_spec(freq_limit=0.0)

    def test_load_shares_must_sum_to_one(self):
        data = grid_data()
        data["nodes"][0]["load_share"] = 0.9
        with pytest.raises(ValidationError, match="load shares"):
            GridSpec.model_validate(data)


class TestNodePowerBalance:
    def test_injection_by_asset_placement(self, three_node):
        state = state_of(three_node, p_gen=[4.0], soc=[0.5])
        u = ControlInput(dp_gen=[0.0], r_gen=[0.1], r_stor=[0.5])
        v = KnownInput(p_load=[1.0, 2.0, 3.0], p_wind_fc=[2.0], p_stor=[0.0])
        w = Disturbance(dp_wind=[-0.3])
        pbar = node_power_balance(three_node, state, u, v, w)
        np.testing.assert_allclose(pbar, [2.0 - 0.3 - 1.0, 4.1 - 2.0, -3.0 - 0.5])

    def test_dimension_mismatch(self, three_node):
        state = state_of(three_node, soc=[0.5])
        u = ControlInput(dp_gen=[0.0, 0.0], r_gen=[0.0], r_stor=[0.0])
        with pytest.raises(DimensionMismatchError):
            node_power_balance(three_node, state, u, zero_input(three_node), Disturbance.zeros(three_node))


class TestSwingResidual:
    def test_zero_at_equilibrium(self, three_node):
        state = state_of(three_node, soc=[0.5])
        np.testing.assert_array_equal(swing_residual(three_node, state, state, np.zeros(3)), np.zeros(6))

    def test_angle_perturbation_couples_through_sine(self):
        spec = make_spec()
        eps = 0.01
        state = state_of(spec, delta=[eps, 0.0], soc=[0.5])
        r = swing_residual(spec, state, state, np.zeros(2))
        np.testing.assert_allclose(r[:2], 0.0)
        np.testing.assert_allclose(r[2:], [10.0 * np.sin(eps), -10.0 * np.sin(eps)])

    @given(
        st.lists(st.floats(-0.5, 0.5), min_size=12, max_size=12),
        st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=3),
    )
    def test_matches_implicit_euler_reconstruction(self, values, pbar):
        spec = load_builtin("three_node")
        v = np.array(values)
        before = state_of(spec, delta=v[0:3], omega=v[3:6], p_gen=[1.0], soc=[0.5])
        after = state_of(spec, delta=v[6:9], omega=v[9:12], p_gen=[1.0], soc=[0.5])
        a = spec.arrays
        dt = spec.dt

        expected_delta = after.delta - before.delta - dt * 2 * np.pi * after.omega
        # backward difference of omega
        omega_dot = (after.omega - before.omega) / dt
        flows = np.array(
            [
                sum(a.susceptance[n, p] * np.sin(after.delta[n] - after.delta[p]) for p in range(3))
                for n in range(3)
            ]
        )
        expected_omega = (
            2 * np.pi * a.inertia * omega_dot + 2 * np.pi * a.damping * after.omega - np.array(pbar) + flows
        )
        r = swing_residual(spec, after, before, np.array(pbar))
        np.testing.assert_allclose(r, np.concatenate([expected_delta, expected_omega]), atol=1e-9)


class TestStepDynamics:
    def test_equilibrium_is_fixed_point(self, three_node):
        state = state_of(three_node, soc=[0.5], k=4)
        nxt = step_dynamics(
            three_node, state, ControlInput.zeros(three_node), zero_input(three_node), Disturbance.zeros(three_node)
        )
        assert nxt.k == 5
        for field in ("delta", "omega", "p_gen", "soc"):
            np.testing.assert_array_equal(getattr(nxt, field), getattr(state, field))

    def test_soc_integrates_storage_power(self):
        spec = make_spec()
        state = state_of(spec, soc=[0.5])
        u = ControlInput(dp_gen=[0.0], r_gen=[0.0], r_stor=[1.5])
        v = KnownInput(p_load=[0.0, 0.0], p_wind_fc=[0.0], p_stor=[0.5])
        nxt = step_dynamics(spec, state, u, v, Disturbance.zeros(spec))
        assert nxt.soc[0] == pytest.approx(0.5 + 300 * 2 / 3600)

    def test_discharge_efficiency_draws_more_energy(self):
        data = grid_data()
        data["batteries"][0]["efficiency"] = 0.8
        spec = GridSpec.model_validate(data)
        state = state_of(spec, soc=[0.5])
        u = ControlInput(dp_gen=[0.0], r_gen=[0.0], r_stor=[-1.0])
        nxt = step_dynamics(spec, state, u, zero_input(spec), Disturbance.zeros(spec))
        assert nxt.soc[0] == pytest.approx(0.5 - 300 / 0.8 / 3600)

    def test_generator_output_integrates_ramp(self, three_node):
        state = state_of(three_node, p_gen=[3.0], soc=[0.5])
        u = ControlInput(dp_gen=[0.002], r_gen=[0.0], r_stor=[0.0])
        v = KnownInput(p_load=[0.3 * 3.6, 0.3 * 3.6, 0.4 * 3.6], p_wind_fc=[0.0], p_stor=[0.0])
        nxt = step_dynamics(three_node, state, u, v, Disturbance.zeros(three_node))
        assert nxt.p_gen[0] == pytest.approx(3.6)

    def test_newton_solution_has_small_residual(self, three_node):
        state = state_of(three_node, soc=[0.5])
        u = ControlInput(dp_gen=[0.0], r_gen=[0.2], r_stor=[0.0])
        v, w = zero_input(three_node), Disturbance(dp_wind=[0.1])
        nxt = step_dynamics(three_node, state, u, v, w)
        pbar = node_power_balance(three_node, nxt, u, v, w)
        assert np.max(np.abs(swing_residual(three_node, nxt, state, pbar))) <= 1e-9

    def test_step_injection_matches_reference_integrator(self, three_node):
        a = three_node.arrays
        state = state_of(three_node, soc=[0.5])
        u = ControlInput(dp_gen=[0.0], r_gen=[0.2], r_stor=[0.0])
        pbar = np.array([0.0, 0.2, 0.0])
        nxt = step_dynamics(three_node, state, u, zero_input(three_node), Disturbance.zeros(three_node))

        def rhs(_t, z):
            delta, omega = z[:3], z[3:]
            flows = (a.susceptance * np.sin(delta[:, None] - delta[None, :])).sum(axis=1)
            omega_dot = (pbar - 2 * np.pi * a.damping * omega - flows) / (2 * np.pi * a.inertia)
            return np.concatenate([2 * np.pi * omega, omega_dot])

        reference = solve_ivp(rhs, (0.0, three_node.dt), np.zeros(6), method="Radau", rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(nxt.omega, reference.y[3:, -1], atol=1e-4)

    def test_balanced_schedule_keeps_frequency_flat(self, three_node):
        profiles = synthetic_profiles(SyntheticProfileParams(), 24.0, three_node.dt)
        load, forecast = distribute_profiles(three_node, profiles.load_mw, profiles.forecast_mw)
        schedule = day_ahead_schedule(three_node, load, forecast)
        x = equilibrium_state(three_node, schedule.known_input(0), schedule.dispatch(0))
        worst = 0.0
        for k in range(288):
            dp = (schedule.dispatch(k + 1) - x.p_gen) / three_node.dt
            u = ControlInput(dp_gen=dp, r_gen=[0.0], r_stor=[0.0])
            x = step_dynamics(three_node, x, u, schedule.known_input(k + 1), Disturbance.zeros(three_node))
            worst = max(worst, float(np.max(np.abs(x.omega))))
        assert x.k == 288
        assert worst < 1e-6

    def test_soc_conserves_energy(self, three_node):
        x = state_of(three_node, p_gen=[0.0], soc=[0.5])
        start = x.soc[0]
        energy = 0.0
        for r in [1.0, 2.0, 0.5, 1.5, 2.0, 0.25, 1.0, 1.75]:
            u = ControlInput(dp_gen=[0.0], r_gen=[0.0], r_stor=[r])
            x = step_dynamics(three_node, x, u, zero_input(three_node), Disturbance.zeros(three_node))
            energy += three_node.dt * r
        assert energy == pytest.approx(20.0 * 3600 * (x.soc[0] - start), rel=1e-12)


class TestEquilibrium:
    def test_flows_balance_injections(self, three_node):
        v = known_input(three_node, 6.0, 2.0)
        x = equilibrium_state(three_node, v, [4.0])
        assert x.delta[0] == 0.0
        np.testing.assert_array_equal(x.omega, 0.0)
        pbar = node_power_balance(three_node, x, ControlInput.zeros(three_node), v, Disturbance.zeros(three_node))
        np.testing.assert_allclose(np.abs(swing_residual(three_node, x, x, pbar)).max(), 0.0, atol=1e-8)
        np.testing.assert_array_equal(x.soc, [0.5])

    def test_unbalanced_injection_rejected(self, three_node):
        with pytest.raises(ValueError, match="balance"):
            equilibrium_state(three_node, known_input(three_node, 6.0, 2.0), [3.0])


class TestDayAheadSchedule:
    def test_single_generator_covers_residual_exactly(self, three_node):
        load, forecast = distribute_profiles(three_node, [5.0, 6.0, 7.5], [1.0, 2.0, 2.5])
        schedule = day_ahead_schedule(three_node, load, forecast)
        np.testing.assert_allclose(schedule.p_gen[:, 0], load.sum(axis=1) - forecast.sum(axis=1), rtol=0, atol=0)
        np.testing.assert_array_equal(schedule.p_stor, 0.0)

    def test_identical_generators_split_evenly(self):
        spec = make_spec(n_gen=2)
        load, forecast = distribute_profiles(spec, [6.0, 7.0], [2.0, 1.0])
        schedule = day_ahead_schedule(spec, load, forecast)
        np.testing.assert_allclose(schedule.p_gen, [[2.0, 2.0], [3.0, 3.0]])

    def test_flat_profile_gives_flat_dispatch(self):
        spec = make_spec()
        load, forecast = distribute_profiles(spec, [3.0] * 5, [1.0] * 5)
        schedule = day_ahead_schedule(spec, load, forecast)
        np.testing.assert_allclose(schedule.p_gen[:, 0], 2.0)
        assert np.all(np.diff(schedule.p_gen[:, 0]) == 0)

    def test_balance_holds_at_every_step(self):
        spec = make_spec(n_gen=3)
        profiles = synthetic_profiles(SyntheticProfileParams(seed=5), 24.0, spec.dt)
        load, forecast = distribute_profiles(spec, profiles.load_mw, profiles.forecast_mw)
        schedule = day_ahead_schedule(spec, load, forecast)
        supplied = schedule.p_gen.sum(axis=1) + schedule.p_wind_fc.sum(axis=1)
        np.testing.assert_allclose(supplied, schedule.p_load.sum(axis=1), rtol=1e-12)

    def test_forecast_above_load_is_infeasible(self):
        spec = make_spec()
        load, forecast = distribute_profiles(spec, [3.0, 3.0, 3.0], [1.0, 4.0, 1.0])
        with pytest.raises(InfeasibleScheduleError) as excinfo:
            day_ahead_schedule(spec, load, forecast)
        assert excinfo.value.step == 1

    def test_capacity_violation_reports_first_step(self):
        spec = make_spec()
        load, forecast = distribute_profiles(spec, [5.0, 7.0, 9.5, 11.0], [0.0] * 4)
        with pytest.raises(InfeasibleScheduleError) as excinfo:
            day_ahead_schedule(spec, load, forecast)
        assert excinfo.value.step == 3
        assert excinfo.value.reason == "above_maximum"

    def test_ramp_violation(self):
        spec = make_spec()
        load, forecast = distribute_profiles(spec, [2.0, 6.0], [0.0, 0.0])
        with pytest.raises(InfeasibleScheduleError) as excinfo:
            day_ahead_schedule(spec, load, forecast)
        assert excinfo.value.reason == "ramp_limit"

    def test_known_inputs_hold_after_end(self, three_node):
        load, forecast = distribute_profiles(three_node, [5.0, 6.0], [1.0, 1.5])
        schedule = day_ahead_schedule(three_node, load, forecast)
        assert schedule.known_input(10) == schedule.known_input(1)
        np.testing.assert_array_equal(schedule.dispatch(7), [4.5])


class TestCheckConstraints:
    def test_zero_state_is_feasible(self, three_node):
        report = check_constraints(three_node, GridState.zeros(three_node))
        assert report.feasible
        assert report.violations == []

    def test_frequency_violation(self, three_node):
        report = check_constraints(three_node, state_of(three_node, omega=[0.0, 0.11, 0.0], soc=[0.5]))
        assert not report.feasible
        (violation,) = report.violations
        assert (violation.kind, violation.index) == ("frequency", 1)
        assert violation.margin == pytest.approx(-0.01)

    def test_line_violation(self, three_node):
        angle = np.arcsin(1.01 * 10.0 / 150.0)
        report = check_constraints(three_node, state_of(three_node, delta=[0.0, angle, 0.0], soc=[0.5]))
        assert not report.feasible
        assert {(v.kind, v.index) for v in report.violations} == {("line", 0), ("line", 1)}
        np.testing.assert_allclose(abs(line_flows(three_node, [0.0, angle, 0.0])[0]), 10.1)

    def test_generator_and_soc_bounds(self, three_node):
        report = check_constraints(three_node, state_of(three_node, p_gen=[10.5], soc=[-0.01]))
        assert {v.kind for v in report.violations} == {"generator_capacity", "soc"}

    @given(
        st.lists(st.floats(-0.2, 0.2), min_size=3, max_size=3),
        st.lists(st.floats(-0.1, 0.1), min_size=3, max_size=3),
        st.floats(0.0, 1.2),
        st.floats(0.1, 1.0),
    )
    def test_shrinking_limits_never_restores_feasibility(self, omega, delta, soc, factor):
        spec = load_builtin("three_node")
        data = spec.model_dump(by_alias=True)
        data["freq_limit"] = spec.freq_limit * factor
        for line in data["lines"]:
            line["capacity"] *= factor
        tighter = GridSpec.model_validate(data)
        state = state_of(spec, delta=delta, omega=omega, p_gen=[5.0], soc=[soc])
        if not check_constraints(spec, state).feasible:
            assert not check_constraints(tighter, state).feasible

    @given(
        st.lists(st.floats(-0.15, 0.15), min_size=3, max_size=3),
        st.lists(st.floats(-0.1, 0.1), min_size=3, max_size=3),
        st.floats(-1.0, 11.0),
        st.floats(-0.1, 1.1),
    )
    def test_batch_mask_agrees_with_report(self, omega, delta, p_gen, soc):
        spec = load_builtin("three_node")
        state = state_of(spec, delta=delta, omega=omega, p_gen=[p_gen], soc=[soc])
        mask = feasible_mask(spec, state.delta[None], state.omega[None], state.p_gen[None], state.soc[None])
        assert bool(mask[0]) == check_constraints(spec, state).feasible
