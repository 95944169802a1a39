# infoflow/workflows/base_workflow.py
# This file contains the abstract base class for experiment workflows
# Purpose: Provide state management, step logging, execution history and error handling shared by the estimation, detection, curves and solve pipelines. This is NOT for the pipelines themselves.

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, List, Optional

from .experiment_config import ExperimentConfig
from ..utils.config_loader import AppConfig, get_config
from ..utils.logger import get_logger, log_workflow_step
from ..utils.validation import SolverConvergenceError


class WorkflowState(Enum):
    """Workflow execution states."""
    IDLE = "idle"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class ExperimentWorkflow(ABC):
    """Abstract base class for experiment pipelines."""

    name: str = "experiment"
    description: str = ""

    def __init__(self, settings: Optional[AppConfig] = None):
        """
        Initialize workflow.

        Args:
            settings: Application settings (defaults to the loaded config)
        """
        self.settings = settings or get_config()
        self.logger = get_logger(f"workflow.{self.name}")

        self._state = WorkflowState.IDLE
        self._current_step = 0
        self._execution_history: List[Dict[str, Any]] = []

    @property
    def state(self) -> WorkflowState:
        """Get current workflow state."""
        return self._state

    @abstractmethod
    def execute(self, config: ExperimentConfig) -> Any:
        """
        Execute the pipeline.

        Args:
            config: Validated experiment config

        Returns:
            Pipeline result (a report, or the written paths)
        """

    def run(self, config: ExperimentConfig) -> Any:
        """
        Run the pipeline with state management; failures are recorded and re-raised.

        Args:
            config: Validated experiment config

        Returns:
            Result of execute()
        """
        self._set_state(WorkflowState.RUNNING)
        self._current_step = 0
        self.logger.info(f"▶️ Starting {self.name} workflow -> {config.output_path}")
        try:
            result = self.execute(config)
        except Exception as e:
            self.logger.error(f"❌ Workflow {self.name} failed: {str(e)}")
            self._record_execution(config, "failed", str(e))
            self._set_state(WorkflowState.FAILED)
            raise

        self._record_execution(config, "completed")
        self._set_state(WorkflowState.COMPLETED)
        return result

    def step(self, step: str, status: str = "completed", details: Optional[Dict[str, Any]] = None) -> None:
        """Log one pipeline step and advance the step counter."""
        self._current_step += 1
        log_workflow_step(self.name, step, status, details)

    def require_converged(self, unconverged: List[Any], output_path: str) -> None:
        """
        Fail after output was written if any solve hit its iteration cap.

        Raises:
            SolverConvergenceError: Naming the unconverged labels
        """
        if unconverged:
            raise SolverConvergenceError(
                f"Solver did not converge for {unconverged}; partial results were written to {output_path}"
            )

    def _set_state(self, state: WorkflowState) -> None:
        """Update workflow state."""
        self._state = state
        self.logger.debug(f"🔄 State changed to: {state.value}")

    def _record_execution(self, config: ExperimentConfig, status: str, error: Optional[str] = None) -> None:
        """Record execution in history."""
        self._execution_history.append({
            "task": config.task,
            "output_path": config.output_path,
            "status": status,
            "error": error,
            "steps": self._current_step,
        })

    def get_execution_history(self) -> List[Dict[str, Any]]:
        """Get workflow execution history."""
        return self._execution_history.copy()

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: {self.name}>"
