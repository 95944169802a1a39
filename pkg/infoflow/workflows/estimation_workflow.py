# infoflow/workflows/estimation_workflow.py
# This file contains the parameter-estimation experiment pipeline
# Purpose: Generate the network and sensing matrices, allocate bits by utility maximization and by max flow for every alpha, score both allocations by predicted and Monte Carlo MSE, and emit the comparison report. This is NOT for the estimation math itself (see infoflow/estimation/).

from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

from .base_workflow import ExperimentWorkflow
from .experiment_config import ExperimentConfig
from .report import ComparisonReport, ReportRow
from ..estimation.model import SensingModel, estimation_utilities, make_sensing_matrix, predict_mse
from ..estimation.monte_carlo import monte_carlo_mse
from ..network.flow import max_flow
from ..network.graph import Network, RateAssignment
from ..num.solver import solve, total_utility


class EstimationWorkflow(ExperimentWorkflow):
    """Proposed versus max-flow bit allocation for least-squares estimation."""

    name = "estimation"
    description = "MSE of quantized least squares under both allocations, per alpha"

    def execute(self, config: ExperimentConfig) -> ComparisonReport:
        task = config.estimation
        network = config.network.build(config.seeds.graph)
        config.check_sensor_count(network)
        baseline = max_flow(network)
        self.step("network", details={
            "sensors": len(network.sensors),
            "edges": len(network.edges),
            "max_flow": int(baseline.total),
        })

        report = ComparisonReport(
            task="estimation",
            network=network,
            label_column="alpha",
            metric_columns=["predicted_mse", "empirical_mse", "stderr"],
            labels=task.alphas,
            extra_columns=["stderr_reliable", "iterations", "converged"],
            dominance_tol=self.settings.solver.tol,
        )
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as pool:
            results = list(pool.map(lambda alpha: self._run_alpha(config, network, baseline, alpha), task.alphas))

        unconverged = []
        for alpha, rows in zip(task.alphas, results):
            for row in rows:
                report.add_row(row)
            if not report.row("proposed", alpha).metrics["converged"]:
                unconverged.append(alpha)

        report.write(config.output_path)
        self.step("report", details={"rows": len(report.rows), "output": config.output_path})
        self.require_converged(unconverged, config.output_path)
        return report

    def _run_alpha(
        self,
        config: ExperimentConfig,
        network: Network,
        baseline: RateAssignment,
        alpha: float,
    ) -> List[ReportRow]:
        task = config.estimation
        A = make_sensing_matrix(len(network.sensors), task.dimension, task.weak_count, alpha, config.seeds.matrix)
        model = SensingModel.with_uniform_noise(A, task.noise_half_width, task.quantizer_range)
        by_row = estimation_utilities(model)
        utilities = {s: by_row[i] for i, s in enumerate(network.sensors)}

        solution = solve(network, utilities, settings=self.settings.solver)
        self.step("solve", details={
            "alpha": alpha,
            "method": solution.method,
            "iterations": solution.iterations,
            "total_real": f"{solution.real_rates.total:.6g}",
            "total_integral": int(solution.integral_rates.total),
        })

        rows = []
        for method, rates, relaxed, iterations, converged in (
            ("max_flow", baseline, None, 0, True),
            ("proposed", solution.integral_rates, solution.objective_real, solution.iterations, solution.converged),
        ):
            vector = [int(round(rates.sensor_rates[s])) for s in network.sensors]
            mse, stderr, reliable = self._score(config, model, vector)
            objective = total_utility(utilities, rates.sensor_rates)
            rows.append(ReportRow(
                method=method,
                label=alpha,
                rates=rates,
                objective_relaxed=objective if relaxed is None else relaxed,
                objective_integral=objective,
                metrics={
                    "predicted_mse": predict_mse(model, vector),
                    "empirical_mse": mse,
                    "stderr": stderr,
                    "stderr_reliable": reliable,
                    "iterations": iterations,
                    "converged": converged,
                },
            ))
        self.step("monte_carlo", details={
            "alpha": alpha,
            "runs": config.runs,
            "max_flow_mse": f"{rows[0].metrics['empirical_mse']:.6g}",
            "proposed_mse": f"{rows[1].metrics['empirical_mse']:.6g}",
        })
        return rows

    def _score(self, config: ExperimentConfig, model: SensingModel, vector: List[int]) -> Tuple[float, float, bool]:
        # both methods see the same draws
        result = monte_carlo_mse(
            model,
            vector,
            runs=config.runs,
            seed=config.seeds.mc,
            chunk_size=self.settings.monte_carlo.chunk_size,
            max_workers=self.settings.max_workers,
        )
        return result.mse, result.stderr, result.reliable
