# main.py
# This file is the command-line entry point for infoflow
# Purpose: Parse the verb and flags, load the experiment config, run the matching workflow, print a summary and map failures to exit codes. This is NOT for experiment logic or configuration models.

"""
infoflow - rate allocation for inference over capacitated sensor networks.

Usage:
    python main.py estimate --config configs/estimation.yml [--seed N] [--runs N] [--output PATH]
    python main.py detect   --config configs/detection.yml
    python main.py curves   --config configs/curves.yml
    python main.py solve    --config configs/solve.yml
    python main.py generate --config configs/estimation.yml --output results/network.yml

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 solver non-convergence (output still written), 4 I/O failure,
5 report consistency failure.
"""
import argparse
import logging
import signal
import sys
from pathlib import Path
from typing import Any, List, Optional

# Ensure infoflow is importable when run from a checkout
sys.path.insert(0, str(Path(__file__).parent))

from infoflow.utils.config_loader import get_config
from infoflow.utils.logger import get_logger, setup_logging
from infoflow.utils.validation import InfoflowError
from infoflow.workflows.experiment_config import ExperimentConfig
from infoflow.workflows.registry import default_registry
from infoflow.workflows.report import ComparisonReport, format_value

# Module-level logger
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_IO = 4


class InfoflowApp:
    """Main application class for the infoflow CLI."""

    def __init__(self):
        self.logger = None
        self.ui_logger = None
        self.config = None
        self.registry = None

    def setup(self) -> None:
        """Initialize configuration, logging and the workflow registry."""
        self.config = get_config()
        setup_logging()
        self.logger = get_logger("main")
        self.ui_logger = get_logger("ui")
        self.registry = default_registry()
        self.logger.debug(f"✅ Registered commands: {self.registry.discover()}")

    def run_command(self, args: argparse.Namespace) -> Any:
        """Load the experiment, apply overrides and run the verb's workflow."""
        experiment = ExperimentConfig.load(args.config).with_overrides(
            seed=args.seed, runs=args.runs, output=args.output
        )
        workflow = self.registry.create(args.command, experiment.task, self.config)
        self.logger.info(f"🎯 Running '{args.command}' from {args.config}")
        result = workflow.run(experiment)
        self._display_result(args.command, experiment, result)
        return result

    def _display_result(self, command: str, experiment: ExperimentConfig, result: Any) -> None:
        """Print a short summary on the ui logger."""
        self.ui_logger.info("=" * 60)
        self.ui_logger.info(f"📊 {command}: {experiment.output_path}")
        if isinstance(result, ComparisonReport):
            for record in result.to_records():
                cells = [f"{col}={format_value(record.get(col, ''))}" for col in result.columns if col != "sensor_rates"]
                self.ui_logger.info("  " + "  ".join(cells))
        elif isinstance(result, list):
            for path in result:
                self.ui_logger.info(f"  💾 {path}")
        else:
            self.ui_logger.info(f"  💾 {result}")
        self.ui_logger.info("=" * 60)

    def shutdown(self) -> None:
        if self.logger:
            self.logger.debug("👋 Shutdown complete")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infoflow",
        description="Rate allocation for inference over capacitated sensor networks",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    verbs = {
        "generate": "write the configured network to --output as YAML",
        "solve": "utility maximization on a network with configured utilities",
        "estimate": "parameter-estimation comparison (MSE per alpha)",
        "detect": "hypothesis-testing comparison (total KL per setting)",
        "curves": "export f(n) curves, one CSV per density pair",
    }
    for verb, help_text in verbs.items():
        sub = subparsers.add_parser(verb, help=help_text)
        sub.add_argument("--config", required=True, help="experiment YAML")
        sub.add_argument("--seed", type=int, default=None, help="base seed: graph=N, matrix=N+1, mc=N+2")
        sub.add_argument("--output", default=None, help="override output_path")
        sub.add_argument("--runs", type=int, default=None, help="override Monte Carlo runs")
    return parser


def exit_code_for(error: BaseException) -> int:
    """Exit code of a failure: the error's own code, 4 for other I/O errors, else 1."""
    if isinstance(error, InfoflowError):
        return error.exit_code
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_UNEXPECTED


def signal_handler(signum, frame):
    """Handle interrupt signals gracefully."""
    get_logger("ui").info("\n⚡ Received interrupt signal. Shutting down...")
    sys.exit(130)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)

    app = InfoflowApp()
    try:
        app.setup()
        app.run_command(args)
        return EXIT_OK
    except Exception as e:
        code = exit_code_for(e)
        ui_logger = get_logger("ui")
        ui_logger.error(f"❌ {type(e).__name__}: {str(e)}")
        if code == EXIT_UNEXPECTED:
            logger.exception("Unexpected failure")
        return code
    finally:
        app.shutdown()


if __name__ == "__main__":
    sys.exit(main())
