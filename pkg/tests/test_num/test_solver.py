# tests/test_num/test_solver.py
# Tests for the utility maximization solver and integral rounding

import math

import numpy as np
import pytest

from infoflow.estimation.model import SensingModel, estimation_utilities, make_sensing_matrix
from infoflow.network.flow import max_flow
from infoflow.network.generator import LayeredGraphSpec, generate_layered
from infoflow.network.graph import Edge, Network, RateAssignment
from infoflow.num.solver import fill_residual, round_rates, solve, solve_relaxation, total_utility
from infoflow.num.utility import ExponentialUtility, LinearUtility, PiecewiseLinearUtility
from infoflow.utils.config_loader import SolverConfig
from infoflow.utils.validation import ConfigurationError, NonConcaveUtilityError


@pytest.fixture
def settings() -> SolverConfig:
    return SolverConfig(tol=1e-9, max_iterations=5000, check_feasibility=True)


class TestFrankWolfe:
    def test_linear_utilities_reach_max_flow(self, diamond, settings):
        utilities = {s: LinearUtility(slope=1.0) for s in diamond.sensors}
        result = solve_relaxation(diamond, utilities, settings=settings)
        assert result.method == "frank_wolfe"
        assert result.converged
        assert result.objective == pytest.approx(5.0)

    def test_exponential_optimum_on_diamond(self, diamond, settings):
        utilities = {0: ExponentialUtility(1.0), 1: ExponentialUtility(4.0)}
        result = solve_relaxation(diamond, utilities, settings=settings)
        assert result.converged
        assert result.objective == pytest.approx(-0.125, abs=1e-7)
        assert result.rates.sensor_rates[0] == pytest.approx(2.0, abs=1e-3)
        assert result.rates.sensor_rates[1] == pytest.approx(3.0, abs=1e-3)
        assert result.rates.check(diamond, tol=1e-7) == []

    def test_fractional_optimum(self, diamond, settings):
        utilities = {0: ExponentialUtility(1.0), 1: ExponentialUtility(2.0)}
        result = solve_relaxation(diamond, utilities, settings=settings)
        assert result.rates.sensor_rates[0] == pytest.approx(2.25, abs=1e-3)
        assert result.rates.sensor_rates[1] == pytest.approx(2.75, abs=1e-3)

    def test_beats_max_flow_baseline(self, settings):
        network = generate_layered(LayeredGraphSpec(layer_sizes=(4, 4, 3, 2), fanout=2, capacity_range=(1, 6), seed=5))
        utilities = {s: ExponentialUtility(scale=1.0 + i) for i, s in enumerate(network.sensors)}
        result = solve_relaxation(network, utilities, settings=settings)
        baseline = total_utility(utilities, max_flow(network).sensor_rates)
        assert result.objective >= baseline - 1e-9
        assert result.rates.check(network, tol=1e-7) == []

    def test_iteration_cap_reports_unconverged(self, diamond):
        utilities = {0: ExponentialUtility(1.0), 1: ExponentialUtility(2.0)}
        result = solve_relaxation(diamond, utilities, tol=1e-15, max_iterations=2, settings=SolverConfig())
        assert not result.converged
        assert result.iterations == 2


class TestSegmentGreedy:
    def test_auto_selects_greedy_for_piecewise(self, diamond, settings):
        utilities = {
            0: PiecewiseLinearUtility([0, 1, 2, 4], [0, 1, 1.5, 2]),
            1: PiecewiseLinearUtility([0, 2, 3], [0, 3, 3.5]),
        }
        result = solve_relaxation(diamond, utilities, settings=settings)
        assert result.method == "segment_greedy"
        assert result.rates.sensor_rates == {0: 2, 1: 3}
        assert result.objective == pytest.approx(5.0)
        assert result.rates.is_integral

    def test_greedy_rejects_smooth_utilities(self, diamond, settings):
        utilities = {s: ExponentialUtility(1.0) for s in diamond.sensors}
        with pytest.raises(ConfigurationError):
            solve_relaxation(diamond, utilities, method="segment_greedy", settings=settings)


class TestInputChecks:
    def test_missing_utility(self, diamond, settings):
        with pytest.raises(ConfigurationError):
            solve_relaxation(diamond, {0: LinearUtility()}, settings=settings)

    def test_non_concave_utility(self, diamond, settings):
        utilities = {0: LinearUtility(slope=-1.0), 1: LinearUtility()}
        with pytest.raises(NonConcaveUtilityError):
            solve_relaxation(diamond, utilities, settings=settings)

    def test_nonpositive_tolerance(self, diamond, settings):
        utilities = {s: LinearUtility() for s in diamond.sensors}
        with pytest.raises(ConfigurationError):
            solve_relaxation(diamond, utilities, tol=0.0, settings=settings)


class TestRounding:
    def test_floors_then_fills_leftover_bit(self, diamond, settings):
        utilities = {0: ExponentialUtility(1.0), 1: ExponentialUtility(2.0)}
        solution = solve(diamond, utilities, settings=settings)
        # floor of (2.25, 2.75) is (2, 2); the freed bit goes to the steeper sensor
        assert solution.diagnostics["floored_total"] == 4
        assert solution.integral_rates.sensor_rates == {0: 2, 1: 3}
        assert solution.integral_rates.is_integral
        assert solution.integral_rates.check(diamond) == []
        assert solution.real_rates.total == pytest.approx(5.0, abs=1e-6)
        assert solution.integral_rates.total == solution.floor_of_real_total
        assert solution.objective_integral <= solution.objective_real + 1e-6

    def test_floor_only_when_fill_disabled(self, diamond):
        settings = SolverConfig(tol=1e-9, max_iterations=5000, fill_residual=False)
        utilities = {0: ExponentialUtility(1.0), 1: ExponentialUtility(2.0)}
        solution = solve(diamond, utilities, settings=settings)
        assert solution.integral_rates.sensor_rates == {0: 2, 1: 2}
        assert solution.integral_rates.total <= solution.floor_of_real_total

    def test_round_rates_rejects_infeasible(self, diamond):
        bad = RateAssignment.from_edge_rates(diamond, {(0, 3): 2.5})
        with pytest.raises(ValueError):
            round_rates(diamond, bad)

    def test_integral_input_is_unchanged(self, diamond):
        flow = max_flow(diamond)
        rounded = round_rates(diamond, flow)
        assert rounded.sensor_rates == flow.sensor_rates

    def test_solution_dict(self, diamond, settings):
        utilities = {s: LinearUtility() for s in diamond.sensors}
        data = solve(diamond, utilities, settings=settings).to_dict()
        assert data["total_integral"] == 5
        assert math.isclose(data["total_real"], 5.0)
        assert data["converged"] is True
        assert [row["sensor"] for row in data["sensors"]] == [0, 1]
        assert sum(row["integral_rate"] for row in data["sensors"]) == 5


class TestResidualFill:
    def test_fills_empty_assignment_up_to_min_cut(self, diamond):
        empty = RateAssignment.zero(diamond)
        utilities = {s: LinearUtility() for s in diamond.sensors}
        filled = fill_residual(diamond, empty, utilities)
        assert filled.total == 5
        assert filled.check(diamond) == []

    def test_saturated_assignment_is_returned_as_is(self, diamond):
        flow = max_flow(diamond)
        utilities = {s: LinearUtility() for s in diamond.sensors}
        assert fill_residual(diamond, flow, utilities) is flow

    def test_flat_utilities_get_no_bits(self, diamond):
        empty = RateAssignment.zero(diamond)
        utilities = {0: PiecewiseLinearUtility([0, 10], [0, 0]), 1: LinearUtility()}
        filled = fill_residual(diamond, empty, utilities)
        assert filled.sensor_rates[0] == 0
        assert filled.sensor_rates[1] == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_fill_dominates_floor_on_generated_networks(self, seed, settings):
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(10, 6, 4, 2), fanout=2, capacity_range=(1, 6), seed=seed)
        )
        scales = np.random.default_rng(seed).uniform(0.1, 5.0, size=len(network.sensors))
        utilities = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
        solution = solve(network, utilities, settings=settings)
        assert solution.integral_rates.check(network) == []
        assert solution.integral_rates.total >= solution.diagnostics["floored_total"]
        assert solution.integral_rates.total >= solution.floor_of_real_total
        assert solution.objective_integral <= solution.objective_real + 1e-6


def _grid_optimum(network, utilities, min_cut, step=0.01):
    """Best objective over a grid of the two-sensor rate region r0 <= m0, r1 <= m1, r0 + r1 <= m01."""
    s0, s1 = network.sensors
    m0, m1, m01 = min_cut(network, [s0]), min_cut(network, [s1]), min_cut(network)
    r0 = np.arange(0.0, m0 + step / 2, step)
    r1 = np.minimum(m1, m01 - r0)
    return float(np.max(utilities[s0].value(r0) + utilities[s1].value(r1)))


class TestOptimalityOracle:
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_grid_search(self, seed, settings, min_cut_oracle):
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(2, 3, 2, 2), fanout=2, capacity_range=(1, 4), seed=seed)
        )
        scales = np.random.default_rng(seed).uniform(0.5, 4.0, size=2)
        utilities = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
        result = solve_relaxation(network, utilities, settings=settings)
        assert result.objective == pytest.approx(_grid_optimum(network, utilities, min_cut_oracle), abs=1e-3)
        assert result.objective >= _grid_optimum(network, utilities, min_cut_oracle) - 1e-9

    @pytest.mark.parametrize("seed", range(4))
    def test_linear_matches_max_flow_total(self, seed, settings):
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(3, 3, 2, 2), fanout=2, capacity_range=(1, 3), seed=seed)
        )
        utilities = {s: LinearUtility() for s in network.sensors}
        result = solve_relaxation(network, utilities, settings=settings)
        assert result.objective == pytest.approx(max_flow(network).total, abs=1e-9)


def _with_extra_capacity(network, index):
    edges = tuple(
        Edge(e.u, e.v, e.capacity + 1) if i == index else e for i, e in enumerate(network.edges)
    )
    return Network(nodes=network.nodes, edges=edges, sensors=network.sensors, fusion_center=network.fusion_center)


class TestOptimumProperties:
    @pytest.mark.parametrize("seed", range(8))
    def test_extra_capacity_never_lowers_optimum(self, seed, settings):
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(4, 3, 3, 2), fanout=2, capacity_range=(1, 4), seed=seed)
        )
        rng = np.random.default_rng(seed)
        scales = rng.uniform(0.5, 4.0, size=len(network.sensors))
        utilities = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
        before = solve_relaxation(network, utilities, settings=settings).objective
        grown = _with_extra_capacity(network, int(rng.integers(len(network.edges))))
        after = solve_relaxation(grown, utilities, settings=settings).objective
        assert after >= before - 2 * settings.tol

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("factor", [0.5, 7.0])
    def test_scaling_utilities_keeps_argmax(self, seed, factor, settings):
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(2, 3, 2, 2), fanout=2, capacity_range=(1, 4), seed=seed)
        )
        scales = np.random.default_rng(seed).uniform(0.5, 4.0, size=2)
        base = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
        scaled = {s: ExponentialUtility(float(c) * factor) for s, c in zip(network.sensors, scales)}
        first = solve_relaxation(network, base, settings=settings)
        second = solve_relaxation(network, scaled, settings=settings)
        assert second.objective == pytest.approx(factor * first.objective, rel=1e-6, abs=1e-9)
        for s in network.sensors:
            assert second.rates.sensor_rates[s] == pytest.approx(first.rates.sensor_rates[s], abs=5e-3)

    def test_estimation_weights_converge_at_tight_tolerance(self):
        # a value-based line search stalled near gap 2.6e-7 here
        network = generate_layered(
            LayeredGraphSpec(layer_sizes=(4, 4, 3, 2), fanout=2, capacity_range=(1, 6), seed=3)
        )
        model = SensingModel.with_uniform_noise(make_sensing_matrix(4, 2, 2, 0.2, 4), 0.1, (-5.0, 5.0))
        by_row = estimation_utilities(model)
        utilities = {s: by_row[i] for i, s in enumerate(network.sensors)}
        result = solve_relaxation(
            network, utilities, settings=SolverConfig(tol=1e-8, max_iterations=10000)
        )
        assert result.converged
        assert result.gap <= 1e-8
        assert result.rates.check(network, tol=1e-7) == []


@pytest.mark.slow
class TestRandomNetworks:
    def test_thousand_networks_stay_feasible(self):
        settings = SolverConfig(tol=1e-6, max_iterations=5000)
        rng = np.random.default_rng(2024)
        for seed in range(1000):
            sizes = tuple(int(v) for v in rng.integers(2, 7, size=4))
            fanout = int(rng.integers(1, min(sizes[1:]) + 1))
            network = generate_layered(
                LayeredGraphSpec(layer_sizes=sizes, fanout=fanout, capacity_range=(1, 10), seed=seed)
            )
            assert max_flow(network).check(network) == [], seed
            scales = rng.uniform(0.1, 10.0, size=len(network.sensors))
            utilities = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
            solution = solve(network, utilities, settings=settings)
            assert solution.real_rates.check(network, tol=1e-6) == [], seed
            assert solution.integral_rates.is_integral, seed
            assert solution.integral_rates.check(network) == [], seed

    def test_fifty_small_networks_match_grid_search(self, settings, min_cut_oracle):
        checked = 0
        for seed in range(400):
            network = generate_layered(
                LayeredGraphSpec(layer_sizes=(2, 2, 2, 2), fanout=2, capacity_range=(1, 3), seed=seed)
            )
            if min_cut_oracle(network) > 9:
                continue
            scales = np.random.default_rng(seed).uniform(0.2, 5.0, size=2)
            utilities = {s: ExponentialUtility(float(c)) for s, c in zip(network.sensors, scales)}
            result = solve_relaxation(network, utilities, settings=settings)
            grid = _grid_optimum(network, utilities, min_cut_oracle)
            assert result.objective == pytest.approx(grid, abs=1e-3), seed
            linear = {s: LinearUtility() for s in network.sensors}
            assert solve_relaxation(network, linear, settings=settings).objective == pytest.approx(
                max_flow(network).total, abs=1e-9
            ), seed
            checked += 1
            if checked == 50:
                break
        assert checked == 50
