"""Tests for the wind forecast-error Markov chain."""

import logging

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gridmdp.errors import DegenerateDataError
from gridmdp.models import ErrorSeries, SyntheticWindParams, WindDtmc
from gridmdp.wind import (
    ar1_path,
    diagonal_dominance,
    estimate_dtmc,
    identity_dtmc,
    interpolate,
    joint_successors,
    make_rng,
    map_error,
    sample_joint_trajectory,
    sample_trajectory,
    successors,
    synthetic_error_series,
)


def series_of(error, spacing=300.0) -> ErrorSeries:
    error = np.asarray(error, dtype=float)
    return ErrorSeries(
        timestamps=np.arange(error.size) * spacing, forecast=np.zeros(error.size), actual=error
    )


def chain_of(trans) -> WindDtmc:
    trans = np.asarray(trans, dtype=float)
    n = trans.shape[0]
    edges = np.arange(n + 1, dtype=float)
    return WindDtmc(bins=edges, rep_value=edges[:-1] + 0.5, trans=trans, counts=np.zeros((n, n)))


class TestInterpolate:
    def test_same_spacing_returns_series(self):
        series = series_of([0.0, 1.0, -1.0], spacing=300.0)
        assert interpolate(series, 300.0) == series

    def test_linear_blend_of_forecast_and_actual(self):
        series = ErrorSeries(timestamps=[0.0, 900.0], forecast=[0.0, 3.0], actual=[3.0, 0.0])
        fine = interpolate(series, 300.0)
        np.testing.assert_array_equal(fine.timestamps, [0.0, 300.0, 600.0, 900.0])
        np.testing.assert_allclose(fine.forecast, [0.0, 1.0, 2.0, 3.0])
        np.testing.assert_allclose(fine.actual, [3.0, 2.0, 1.0, 0.0])

    def test_constant_series_stays_constant(self):
        series = ErrorSeries(timestamps=np.arange(5) * 900.0, forecast=[2.0] * 5, actual=[2.5] * 5)
        fine = interpolate(series, 300.0)
        assert len(fine) == 3 * 5 - 2
        np.testing.assert_array_equal(fine.error, 0.5)

    def test_endpoints_are_exact(self):
        series = series_of([0.1, 0.7, -0.3], spacing=900.0)
        fine = interpolate(series, 300.0)
        np.testing.assert_array_equal(fine.actual[::3], series.actual)

    def test_non_divisible_target_rejected(self):
        with pytest.raises(ValueError, match="does not divide"):
            interpolate(series_of([0.0, 1.0], spacing=900.0), 400.0)


class TestEstimateDtmc:
    def test_alternating_series_is_a_permutation(self):
        dtmc = estimate_dtmc(series_of([0.0, 1.0] * 50), 2)
        np.testing.assert_array_equal(dtmc.trans, [[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(dtmc.bins, [0.0, 0.5, 1.0])

    def test_bins_span_observed_range(self, ar1_dtmc):
        assert ar1_dtmc.n_bins == 41
        widths = np.diff(ar1_dtmc.bins)
        np.testing.assert_allclose(widths, widths[0])
        assert np.all((ar1_dtmc.rep_value > ar1_dtmc.bins[:-1]) & (ar1_dtmc.rep_value < ar1_dtmc.bins[1:]))

    def test_iid_rows_match_occupancy(self):
        rng = make_rng(11)
        error = rng.uniform(-1.0, 1.0, 100_000)
        dtmc = estimate_dtmc(series_of(error), 5)
        occupancy = dtmc.counts.sum(axis=0) / dtmc.counts.sum()
        for row in dtmc.trans:
            np.testing.assert_allclose(row, occupancy, atol=0.02)

    def test_autocorrelated_series_is_diagonally_dominant(self):
        error = ar1_path(50_000, 0.999, 1.0, make_rng(5))
        dtmc = estimate_dtmc(series_of(error), 41)
        assert diagonal_dominance(dtmc) >= 0.9

    @given(st.lists(st.floats(-50.0, 50.0, allow_nan=False), min_size=2, max_size=300), st.integers(2, 60))
    def test_rows_are_stochastic(self, values, n_bins):
        assume(max(values) - min(values) > 1.0)
        dtmc = estimate_dtmc(series_of(values), n_bins)
        np.testing.assert_allclose(dtmc.trans.sum(axis=1), 1.0, rtol=0, atol=1e-12)
        assert np.all(dtmc.trans >= 0)

    def test_doubling_counts_keeps_transitions(self):
        error = ar1_path(2000, 0.95, 0.5, make_rng(2))
        error[-1] = error[0]
        once = estimate_dtmc(series_of(error), 21)
        twice = estimate_dtmc(series_of(np.concatenate([error, error[1:]])), 21)
        np.testing.assert_array_equal(twice.counts, 2 * once.counts)
        np.testing.assert_array_equal(twice.trans, once.trans)

    def test_unobserved_rows_become_self_loops(self, caplog):
        with caplog.at_level(logging.WARNING):
            dtmc = estimate_dtmc(series_of([0.0, 0.5, 1.0]), 3)
        np.testing.assert_array_equal(dtmc.trans, [[0, 1, 0], [0, 0, 1], [0, 0, 1]])
        assert "never observed" in caplog.text

    def test_constant_series_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            estimate_dtmc(series_of([0.2] * 100), 41)

    def test_single_sample_is_degenerate(self):
        with pytest.raises(DegenerateDataError):
            estimate_dtmc(series_of([0.2]), 41)

    def test_synthetic_history_length(self):
        series = synthetic_error_series(SyntheticWindParams(history_days=2, history_dt=900.0))
        assert len(series) == 2 * 96 + 1
        assert series.spacing == 900.0


class TestMapError:
    def test_zero_maps_to_central_bin(self, zero_dtmc):
        s = map_error(zero_dtmc, 0.0)
        assert s == 20
        assert zero_dtmc.rep_value[s] == 0.0

    def test_out_of_range_clamps(self, zero_dtmc):
        assert map_error(zero_dtmc, -7.0) == 0
        assert map_error(zero_dtmc, 7.0) == 40

    def test_bins_are_half_open(self, zero_dtmc):
        assert map_error(zero_dtmc, zero_dtmc.bins[3]) == 3
        assert map_error(zero_dtmc, zero_dtmc.bins[-1]) == 40

    def test_representative_values_map_to_own_bin(self, ar1_dtmc):
        assert [map_error(ar1_dtmc, r) for r in ar1_dtmc.rep_value] == list(range(41))


class TestIdentityDtmc:
    @pytest.mark.parametrize("n_bins", [3, 5, 41])
    def test_zero_error_has_an_exact_bin(self, n_bins):
        dtmc = identity_dtmc(n_bins, 2.0)
        assert dtmc.rep_value[map_error(dtmc, 0.0)] == 0.0
        np.testing.assert_array_equal(dtmc.trans, np.eye(n_bins))

    @pytest.mark.parametrize("n_bins", [0, 1, 2, 40])
    def test_even_or_tiny_counts_are_rejected(self, n_bins):
        with pytest.raises(ValueError, match="odd"):
            identity_dtmc(n_bins)


class TestSuccessors:
    def test_identity_chain(self, zero_dtmc):
        assert successors(zero_dtmc, 12) == [(12, 1.0)]

    def test_only_positive_entries(self):
        dtmc = chain_of([[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.2, 0.3, 0.5]])
        assert successors(dtmc, 0) == [(0, 0.5), (1, 0.5)]

    def test_state_out_of_range(self, zero_dtmc):
        with pytest.raises(IndexError):
            successors(zero_dtmc, 41)

    def test_joint_successors_multiply(self):
        dtmc = chain_of([[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.2, 0.3, 0.5]])
        joint = joint_successors(dtmc, (0, 0))
        assert [s for s, _ in joint] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert [p for _, p in joint] == [0.25] * 4

    def test_no_farms_has_single_successor(self, zero_dtmc):
        assert joint_successors(zero_dtmc, ()) == [((), 1.0)]


class TestSampleTrajectory:
    def test_same_seed_same_path(self, ar1_dtmc):
        first = sample_trajectory(ar1_dtmc, 20, 300, seed=7)
        assert first == sample_trajectory(ar1_dtmc, 20, 300, seed=7)
        assert len(first) == 301
        assert first != sample_trajectory(ar1_dtmc, 20, 300, seed=8)

    def test_identity_chain_never_moves(self, zero_dtmc):
        assert set(sample_trajectory(zero_dtmc, 9, 100, seed=1)) == {9}

    def test_empirical_frequencies_match_transitions(self):
        trans = np.array([[0.5, 0.3, 0.2], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4]])
        path = np.array(sample_trajectory(chain_of(trans), 0, 100_000, seed=2024))
        counts = np.zeros((3, 3))
        np.add.at(counts, (path[:-1], path[1:]), 1.0)
        visits = counts.sum(axis=1, keepdims=True)
        sigma = np.sqrt(trans * (1 - trans) / visits)
        assert np.all(np.abs(counts / visits - trans) <= 4 * sigma)

    def test_only_reachable_states_are_visited(self):
        dtmc = chain_of(
            [[0.6, 0.4, 0, 0], [0.3, 0.7, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0, 1.0]]
        )
        assert set(sample_trajectory(dtmc, 0, 5000, seed=3)) <= {0, 1}
        assert set(sample_trajectory(dtmc, 2, 5000, seed=3)) <= {2, 3}

    def test_joint_paths_are_independent_per_farm(self, ar1_dtmc):
        path = sample_joint_trajectory(ar1_dtmc, (20, 20), 200, seed=4)
        assert len(path) == 201
        assert all(len(s) == 2 for s in path)
        assert [s[0] for s in path] != [s[1] for s in path]

    def test_single_farm_joint_path_matches_scalar(self, ar1_dtmc):
        joint = sample_joint_trajectory(ar1_dtmc, (15,), 50, seed=9)
        assert [s[0] for s in joint] == sample_trajectory(ar1_dtmc, 15, 50, seed=9)

    def test_streams_are_independent(self):
        assert make_rng(1).random() != make_rng(1, stream=1).random()
        assert make_rng(1).random() == make_rng(1).random()
