# infoflow/workflows/curves_workflow.py
# This file contains the divergence-curve export pipeline
# Purpose: Tabulate f(n) for n = 1, 2, 4, ..., 2^r_max for each configured density pair and write one CSV per pair. This is NOT for plotting.

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List

from .base_workflow import ExperimentWorkflow
from .experiment_config import CurvePair, ExperimentConfig
from .report import write_csv
from ..detection.densities import DensityFactory
from ..detection.utility import f_table

CURVE_COLUMNS = ["n", "f"]


class CurvesWorkflow(ExperimentWorkflow):
    """Export f(n) curves, one CSV per pair, into the output directory."""

    name = "curves"
    description = "Maximal quantized KL divergence as a function of the number of levels"

    def __init__(self, settings=None):
        super().__init__(settings)
        self.density_factory = DensityFactory()

    def execute(self, config: ExperimentConfig) -> List[Path]:
        task = config.curves
        output_dir = Path(config.output_path)
        with ThreadPoolExecutor(max_workers=self.settings.max_workers) as pool:
            paths = list(pool.map(lambda p: self._export(p, task.r_max, output_dir), task.pairs))
        self.step("export", details={"pairs": len(paths), "output": str(output_dir)})
        return paths

    def _export(self, curve: CurvePair, r_max: int, output_dir: Path) -> Path:
        pair = self.density_factory.create_pair(curve)
        table = f_table(pair, r_max, self.settings.threshold_search)
        rows = [{"n": 2 ** r, "f": value} for r, value in enumerate(table)]
        path = write_csv(output_dir / f"{curve.name}.csv", CURVE_COLUMNS, rows)
        self.step("curve", details={
            "pair": curve.name,
            "f_max": f"{table[-1]:.9g}",
            "ceiling": f"{pair.kl_divergence():.9g}",
        })
        return path
