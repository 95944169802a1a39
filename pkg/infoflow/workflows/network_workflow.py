# infoflow/workflows/network_workflow.py
# This file contains the network-level pipelines: writing a generated network and solving one allocation problem
# Purpose: Back the generate and solve verbs (network to YAML; utility maximization on a network with configured utilities, reported next to max flow). This is NOT for the estimation or detection experiments.

from pathlib import Path

from .base_workflow import ExperimentWorkflow
from .experiment_config import ExperimentConfig
from .report import ComparisonReport, ReportRow, write_yaml
from ..network.flow import max_flow
from ..num.solver import solve, total_utility
from ..utils.validation import ConfigurationError, require_valid


def solution_report_path(output_path: str) -> Path:
    """Per-sensor solution report written next to the CSV: `solve.csv` -> `solve.solution.yml`."""
    return Path(output_path).with_suffix(".solution.yml")


class GenerateWorkflow(ExperimentWorkflow):
    """Build the configured network and save it as YAML."""

    name = "generate"
    description = "Generate or load a network and write it to the output path"

    def execute(self, config: ExperimentConfig) -> Path:
        if config.network is None:
            raise ConfigurationError("generate needs a 'network' block")
        network = config.network.build(config.seeds.graph)
        require_valid(network.validate())
        network.save(config.output_path)
        self.step("save", details={
            "nodes": len(network.nodes),
            "edges": len(network.edges),
            "output": config.output_path,
        })
        return Path(config.output_path)


class SolveWorkflow(ExperimentWorkflow):
    """Maximize configured utilities on one network and compare with max flow."""

    name = "solve"
    description = "Utility maximization with configured per-sensor utilities"

    def execute(self, config: ExperimentConfig) -> ComparisonReport:
        network = config.network.build(config.seeds.graph)
        utilities = config.utilities.build(network)
        baseline = max_flow(network)
        solution = solve(network, utilities, settings=self.settings.solver)
        self.step("solve", details={
            "method": solution.method,
            "iterations": solution.iterations,
            "objective_real": f"{solution.objective_real:.9g}",
            "total_integral": int(solution.integral_rates.total),
            "floor_of_real_total": solution.floor_of_real_total,
        })

        label = "network"
        report = ComparisonReport(
            task="solve",
            network=network,
            label_column="instance",
            metric_columns=["gap", "total_real", "floor_of_real_total"],
            labels=[label],
            extra_columns=["iterations", "converged"],
            dominance_tol=self.settings.solver.tol,
        )
        baseline_objective = total_utility(utilities, baseline.sensor_rates)
        report.add_row(ReportRow(
            method="max_flow",
            label=label,
            rates=baseline,
            objective_relaxed=baseline_objective,
            objective_integral=baseline_objective,
            metrics={
                "gap": 0.0,
                "total_real": float(baseline.total),
                "floor_of_real_total": int(baseline.total),
                "iterations": 0,
                "converged": True,
            },
        ))
        report.add_row(ReportRow(
            method="proposed",
            label=label,
            rates=solution.integral_rates,
            objective_relaxed=solution.objective_real,
            objective_integral=solution.objective_integral,
            metrics={
                "gap": solution.gap,
                "total_real": float(solution.real_rates.total),
                "floor_of_real_total": solution.floor_of_real_total,
                "iterations": solution.iterations,
                "converged": solution.converged,
            },
        ))
        report.write(config.output_path)
        sidecar = write_yaml(solution_report_path(config.output_path), solution.to_dict())
        self.step("write_solution", details={"output": str(sidecar)})
        self.require_converged([] if solution.converged else [label], config.output_path)
        return report
