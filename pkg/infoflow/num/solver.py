# infoflow/num/solver.py
# This file contains the network utility maximization solver and the integral rounding step
# Purpose: Maximize the sum of concave sensor utilities over the flow polytope (capacity, antisymmetry, relay conservation, nonnegative sensor rates), then floor to an integral feasible assignment and top it up with leftover whole bits. This is NOT for building utilities (see utility.py, estimation/, detection/).

"""
Network Utility Maximization over the flow polytope.

Two exact-oracle methods share one feasible set:

* frank_wolfe - away-step Frank-Wolfe. The linear subproblem
  max sum_s w_s r_s over the flow polytope is solved exactly by a priority
  max flow that serves sensors in decreasing weight order.
* segment_greedy - for piecewise-linear utilities with integral breakpoints.
  Segments are filled in decreasing slope order, each by as much as the
  network still admits. Exact, and the result is integral.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .utility import PiecewiseLinearUtility, UtilityFunction
from ..network.flow import feasible_rates, headroom, priority_flow
from ..network.graph import Network, NodeId, RateAssignment
from ..utils.config_loader import SolverConfig, get_config
from ..utils.logger import get_logger, log_solver_progress
from ..utils.validation import ConfigurationError, require_positive, require_valid

logger = get_logger("num.solver")

ROUNDING_SLACK = 1e-9
DROP_TOL = 1e-15


@dataclass
class RelaxationResult:
    """Real-valued optimum of the relaxed problem."""
    rates: RateAssignment
    objective: float
    gap: float
    iterations: int
    converged: bool
    method: str


@dataclass
class NumSolution:
    """Relaxed and rounded solutions with both objectives."""
    real_rates: RateAssignment
    integral_rates: RateAssignment
    objective_real: float
    objective_integral: float
    iterations: int
    converged: bool
    method: str = "frank_wolfe"
    gap: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def floor_of_real_total(self) -> int:
        """Total the integral-rounding theorem would guarantee."""
        return math.floor(self.real_rates.total + ROUNDING_SLACK)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "gap": float(self.gap),
            "objective_real": float(self.objective_real),
            "objective_integral": float(self.objective_integral),
            "total_real": float(self.real_rates.total),
            "total_integral": int(self.integral_rates.total),
            "floor_of_real_total": int(self.floor_of_real_total),
            "sensors": [
                {
                    "sensor": s,
                    "real_rate": float(self.real_rates.sensor_rates[s]),
                    "integral_rate": int(self.integral_rates.sensor_rates[s]),
                }
                for s in self.real_rates.sensor_rates
            ],
            **self.diagnostics,
        }


def total_utility(utilities: Mapping[NodeId, UtilityFunction], sensor_rates: Mapping[NodeId, float]) -> float:
    """Objective sum_s g_s(r_s)."""
    return float(sum(utilities[s].value(sensor_rates[s]) for s in utilities))


def _check_inputs(network: Network, utilities: Mapping[NodeId, UtilityFunction], tol: float) -> None:
    require_valid(network.validate())
    if set(utilities) != set(network.sensors):
        raise ConfigurationError(
            f"Need exactly one utility per sensor; sensors={sorted(network.sensors)}, utilities={sorted(utilities)}"
        )
    require_positive("tol", tol)
    for s, utility in utilities.items():
        utility.validate(rate_bound=network.incident_capacity(s))


class FrankWolfeSolver:
    """Away-step Frank-Wolfe with an exact priority-flow vertex oracle."""

    def __init__(self, network: Network, utilities: Mapping[NodeId, UtilityFunction], settings: SolverConfig):
        self.network = network
        self.sensors: List[NodeId] = list(network.sensors)
        self.utilities = [utilities[s] for s in self.sensors]
        self.settings = settings
        self.edge_keys = [edge.key for edge in network.edges]
        self._vertices: Dict[Tuple[NodeId, ...], Tuple[np.ndarray, np.ndarray]] = {
            (): (np.zeros(len(self.sensors)), np.zeros(len(self.edge_keys)))
        }

    def objective(self, x: np.ndarray) -> float:
        return float(sum(u.value(xi) for u, xi in zip(self.utilities, x)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.array([u.supergradient(xi) for u, xi in zip(self.utilities, x)], dtype=float)

    def vertex(self, weights: np.ndarray) -> Tuple[Tuple[NodeId, ...], np.ndarray, np.ndarray]:
        """Maximizer of weights . r over the polytope (cached per sensor ordering)."""
        order = tuple(
            self.sensors[i] for i in sorted(range(len(self.sensors)), key=lambda i: (-weights[i], self.sensors[i]))
        )
        if order not in self._vertices:
            assignment = priority_flow(self.network, order)
            x = np.array([assignment.sensor_rates[s] for s in self.sensors], dtype=float)
            e = np.array([assignment.rates[k] for k in self.edge_keys], dtype=float)
            self._vertices[order] = (x, e)
        x, e = self._vertices[order]
        return order, x, e

    def _line_search(self, x: np.ndarray, d: np.ndarray, gamma_max: float) -> float:
        """
        Exact step on the concave 1-D restriction phi(gamma) = g(x + gamma d).

        Finds the root of phi'(gamma) = grad g(x + gamma d) . d. A nonnegative
        slope at gamma_max takes the full step.
        """
        def slope(gamma: float) -> float:
            return float(self.gradient(x + gamma * d) @ d)

        if slope(gamma_max) >= 0.0:
            return gamma_max
        if slope(0.0) <= 0.0:
            return 0.0
        return float(brentq(slope, 0.0, gamma_max, xtol=self.settings.line_search_xtol))

    def _combine(self, active: Dict[Tuple[NodeId, ...], float]) -> Tuple[np.ndarray, np.ndarray]:
        total = sum(active.values())
        x = sum(w * self._vertices[k][0] for k, w in active.items()) / total
        e = sum(w * self._vertices[k][1] for k, w in active.items()) / total
        return np.asarray(x, dtype=float), np.asarray(e, dtype=float)

    def _assignment(self, edge_rates: np.ndarray) -> RateAssignment:
        caps = np.array([self.network.capacity(*k) for k in self.edge_keys], dtype=float)
        clipped = np.clip(edge_rates, -caps, caps)
        return RateAssignment.from_edge_rates(self.network, dict(zip(self.edge_keys, clipped.tolist())))

    def solve(self, tol: float, max_iterations: int) -> RelaxationResult:
        active: Dict[Tuple[NodeId, ...], float] = {(): 1.0}
        x, e = self._combine(active)
        gap = math.inf
        converged = False
        iteration = 0

        for iteration in range(1, max_iterations + 1):
            grad = self.gradient(x)
            v_key, v_x, _ = self.vertex(grad)
            gap = float(grad @ (v_x - x))
            if gap <= tol:
                converged = True
                break

            a_key = min(active, key=lambda k: float(grad @ self._vertices[k][0]))
            a_x = self._vertices[a_key][0]
            away_gap = float(grad @ (x - a_x))

            if gap >= away_gap or len(active) == 1:
                gamma = self._line_search(x, v_x - x, 1.0)
                active = {k: (1.0 - gamma) * w for k, w in active.items()}
                active[v_key] = active.get(v_key, 0.0) + gamma
            else:
                weight = active[a_key]
                gamma_max = weight / (1.0 - weight)
                gamma = self._line_search(x, x - a_x, gamma_max)
                active = {k: (1.0 + gamma) * w for k, w in active.items()}
                active[a_key] -= gamma
                if gamma >= gamma_max:
                    active.pop(a_key)

            active = {k: w for k, w in active.items() if w > DROP_TOL}
            x, e = self._combine(active)

            if iteration % 100 == 0:
                log_solver_progress("frank_wolfe", iteration, self.objective(x), gap)
            if self.settings.check_feasibility:
                violations = self._assignment(e).check(self.network)
                assert not violations, f"Infeasible iterate at iteration {iteration}: {violations}"

        rates = self._assignment(e)
        objective = self.objective(np.array([rates.sensor_rates[s] for s in self.sensors]))
        return RelaxationResult(rates, objective, max(gap, 0.0), iteration, converged, "frank_wolfe")


def _segment_greedy(network: Network, utilities: Mapping[NodeId, PiecewiseLinearUtility]) -> RelaxationResult:
    items = []
    for position, s in enumerate(network.sensors):
        for k, (length, slope) in enumerate(utilities[s].segments()):
            if slope > 0:
                items.append((-slope, position, k, s, length))
    items.sort()

    current: Dict[NodeId, float] = {s: 0.0 for s in network.sensors}
    saturated = set()
    for _, _, _, s, length in items:
        if s in saturated:
            continue
        room = headroom(network, current, s)
        step = min(length, room)
        if step < length:
            saturated.add(s)
        current[s] += step

    result = feasible_rates(network, current)
    if not result.feasible:
        raise RuntimeError("Segment greedy produced an infeasible allocation")
    rates = result.witness
    return RelaxationResult(rates, total_utility(utilities, rates.sensor_rates), 0.0, len(items), True, "segment_greedy")


def solve_relaxation(
    network: Network,
    utilities: Mapping[NodeId, UtilityFunction],
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
    method: Optional[str] = None,
    settings: Optional[SolverConfig] = None,
) -> RelaxationResult:
    """
    Maximize sum_s g_s(r_s) over real-valued feasible rates.

    Args:
        network: Valid network
        utilities: One concave nondecreasing utility per sensor
        tol: Frank-Wolfe gap tolerance (defaults from config)
        max_iterations: Iteration cap (defaults from config)
        method: 'auto', 'frank_wolfe' or 'segment_greedy'
        settings: Solver settings (defaults from config)

    Returns:
        RelaxationResult with the best iterate; converged=False when the cap was hit

    Raises:
        NonConcaveUtilityError: if a utility is not concave nondecreasing
    """
    settings = settings or get_config().solver
    tol = settings.tol if tol is None else tol
    max_iterations = settings.max_iterations if max_iterations is None else max_iterations
    method = method or settings.method
    _check_inputs(network, utilities, tol)

    all_piecewise = all(
        isinstance(u, PiecewiseLinearUtility) and np.allclose(u.xs, np.round(u.xs))
        for u in utilities.values()
    )
    if method == "auto":
        method = "segment_greedy" if all_piecewise else "frank_wolfe"
    if method == "segment_greedy" and not all_piecewise:
        raise ConfigurationError("segment_greedy needs piecewise-linear utilities with integral breakpoints")

    if method == "segment_greedy":
        result = _segment_greedy(network, utilities)
    else:
        result = FrankWolfeSolver(network, utilities, settings).solve(tol, max_iterations)

    logger.debug(
        f"🧮 Relaxation solved: method={result.method} objective={result.objective:.9g} "
        f"iterations={result.iterations} gap={result.gap:.3e}"
    )
    if not result.converged:
        logger.warning(f"⚠️ Solver hit the iteration cap ({max_iterations}) with gap {result.gap:.3e}")
    return result


def round_rates(network: Network, real: RateAssignment) -> RateAssignment:
    """
    Floor every sensor rate and re-derive an integral flow carrying exactly those rates.

    Args:
        network: Valid network
        real: Feasible real-valued assignment

    Returns:
        Integral RateAssignment with sensor_rates[s] = floor(real.sensor_rates[s])
    """
    violations = real.check(network)
    if violations:
        raise ValueError(f"Cannot round an infeasible assignment: {violations}")

    demands = {s: max(0, math.floor(r + ROUNDING_SLACK)) for s, r in real.sensor_rates.items()}
    result = feasible_rates(network, demands)
    if not result.feasible:
        raise RuntimeError(f"Floored demands {demands} are not feasible")
    return result.witness


def fill_residual(
    network: Network,
    integral: RateAssignment,
    utilities: Mapping[NodeId, UtilityFunction],
) -> RateAssignment:
    """
    Top up a feasible integral assignment with whole bits the network still carries.

    Each round gives one bit to the sensor with the largest marginal gain
    g_s(r_s + 1) - g_s(r_s) among those with a whole bit of headroom. A sensor
    without headroom never regains it, since the other rates only grow.

    Args:
        network: Valid network
        integral: Feasible integral assignment (typically the floored optimum)
        utilities: One utility per sensor

    Returns:
        Integral RateAssignment whose sensor rates dominate the input's
    """
    current = {s: int(round(integral.sensor_rates[s])) for s in network.sensors}
    blocked = set()
    added = 0
    while True:
        candidates = []
        for position, s in enumerate(network.sensors):
            if s in blocked:
                continue
            gain = utilities[s].value(current[s] + 1) - utilities[s].value(current[s])
            if gain > 0:
                candidates.append((-gain, position, s))
        if not candidates:
            break
        grown = False
        for _, _, s in sorted(candidates):
            if headroom(network, current, s) >= 1.0 - ROUNDING_SLACK:
                current[s] += 1
                added += 1
                grown = True
                break
            blocked.add(s)
        if not grown:
            break

    if added == 0:
        return integral
    result = feasible_rates(network, current)
    if not result.feasible:
        raise RuntimeError(f"Residual fill produced infeasible rates {current}")
    logger.debug(f"🧩 Residual fill added {added} bits")
    return result.witness


def solve(
    network: Network,
    utilities: Mapping[NodeId, UtilityFunction],
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
    method: Optional[str] = None,
    settings: Optional[SolverConfig] = None,
) -> NumSolution:
    """
    Solve the relaxation, round it, and record both objectives.

    With `fill_residual` on (the default), the floored rates are topped up
    with the whole bits flooring left unused; `diagnostics["floored_total"]`
    keeps the plain floored total.
    """
    settings = settings or get_config().solver
    relaxed = solve_relaxation(network, utilities, tol, max_iterations, method, settings)
    floored = round_rates(network, relaxed.rates)
    integral = fill_residual(network, floored, utilities) if settings.fill_residual else floored
    solution = NumSolution(
        real_rates=relaxed.rates,
        integral_rates=integral,
        objective_real=relaxed.objective,
        objective_integral=total_utility(utilities, integral.sensor_rates),
        iterations=relaxed.iterations,
        converged=relaxed.converged,
        method=relaxed.method,
        gap=relaxed.gap,
        diagnostics={"floored_total": int(floored.total)},
    )
    if solution.integral_rates.total < solution.floor_of_real_total:
        logger.info(
            f"📉 Flooring delivered {int(solution.integral_rates.total)} bits; "
            f"floor of relaxed total is {solution.floor_of_real_total}"
        )
    return solution
