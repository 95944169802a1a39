# infoflow/utils/logger.py
# This file contains the logging system with Rich formatting and file logging support
# Purpose: Provide centralized logging with console and file output and structured context lines for solvers and workflows. This is NOT for configuration management or numerical logic.

"""
Rich console logging for infoflow.

Every logger writes to one shared stderr console (stdout stays free for
piped CSV). The `ui` logger prints bare summary lines for the CLI; all
others carry time and level. When `logging.file_path` is set, each logger
also appends to a rotating file.
"""
import logging
import logging.handlers
import threading
from pathlib import Path
from typing import Any, Dict, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from rich.traceback import install as install_rich_traceback

from .config_loader import AppConfig, get_config

UI_LOGGER = "ui"
FILE_DATEFMT = "%Y-%m-%d %H:%M:%S"

LEVEL_THEME = Theme({
    "logging.level.debug": "dim blue",
    "logging.level.info": "green",
    "logging.level.warning": "yellow",
    "logging.level.error": "red bold",
    "logging.level.critical": "red bold reverse",
    "logging.timestamp": "dim",
    "logging.logger": "blue",
})


def format_context(context: Dict[str, Any]) -> str:
    """Render `k=v | k=v`; floats use 6 significant digits."""
    parts = []
    for key, value in context.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        parts.append(f"{key}={value}")
    return " | ".join(parts)


class Logger:
    """
    Process-wide registry of configured loggers.

    Workers of the Monte Carlo and per-setting thread pools may ask for a
    logger concurrently, so creation is serialized.
    """

    _loggers: Dict[str, logging.Logger] = {}
    _console: Optional[Console] = None
    _lock = threading.Lock()

    @classmethod
    def get_logger(cls, name: str = "infoflow") -> logging.Logger:
        """Get or create a logger instance."""
        with cls._lock:
            if name not in cls._loggers:
                config = get_config()
                if cls._console is None:
                    cls._console = cls._make_console(config)
                cls._loggers[name] = cls._create_logger(name, config)
            return cls._loggers[name]

    @staticmethod
    def _make_console(config: AppConfig) -> Console:
        install_rich_traceback(show_locals=config.debug)
        if config.logging.file_path:
            Path(config.logging.file_path).parent.mkdir(parents=True, exist_ok=True)
        return Console(stderr=True, theme=LEVEL_THEME)

    @classmethod
    def _console_handler(cls, name: str, config: AppConfig) -> RichHandler:
        if name == UI_LOGGER:
            return RichHandler(
                console=cls._console,
                show_time=False,
                show_level=False,
                show_path=False,
                markup=False,
            )
        return RichHandler(
            console=cls._console,
            show_path=config.debug,
            markup=False,
            rich_tracebacks=True,
            tracebacks_show_locals=config.debug,
        )

    @staticmethod
    def _file_handler(config: AppConfig) -> logging.Handler:
        settings = config.logging
        handler = logging.handlers.RotatingFileHandler(
            filename=settings.file_path,
            maxBytes=settings.max_file_size,
            backupCount=settings.backup_count,
            encoding="utf-8",
        )
        handler.setFormatter(logging.Formatter(fmt=settings.format, datefmt=FILE_DATEFMT))
        return handler

    @classmethod
    def _create_logger(cls, name: str, config: AppConfig) -> logging.Logger:
        logger = logging.getLogger(name)
        logger.handlers.clear()
        logger.propagate = False
        level = logging.INFO if name == UI_LOGGER else logging.getLevelName(config.logging.level.upper())
        if not isinstance(level, int):
            level = logging.INFO

        handlers = [cls._console_handler(name, config)]
        file_error = None
        if config.logging.file_path:
            try:
                handlers.append(cls._file_handler(config))
            except OSError as e:
                file_error = e

        for handler in handlers:
            handler.setLevel(level)
            logger.addHandler(handler)
        logger.setLevel(level)
        if file_error is not None:
            logger.warning(f"⚠️ Log file {config.logging.file_path} unavailable, console only: {file_error}")
        return logger

    @classmethod
    def log_context(cls, logger: logging.Logger, context: Dict[str, Any], level: str = "INFO") -> None:
        """Log structured context information."""
        logger.log(logging.getLevelName(level.upper()), format_context(context))

    @classmethod
    def log_workflow_step(cls, workflow_name: str, step: str, status: str, details: Optional[Dict[str, Any]] = None) -> None:
        """Log one workflow step; failed steps go out at ERROR."""
        context = {"workflow": workflow_name, "step": step, "status": status, **(details or {})}
        level = "ERROR" if status == "failed" else "INFO"
        cls.log_context(cls.get_logger(f"workflow.{workflow_name}"), context, level)

    @classmethod
    def log_solver_progress(cls, solver: str, iteration: int, objective: float, gap: float) -> None:
        """Log one solver progress line at DEBUG level."""
        logger = cls.get_logger(f"num.{solver}")
        if logger.isEnabledFor(logging.DEBUG):
            cls.log_context(
                logger,
                {"iteration": iteration, "objective": f"{objective:.9g}", "gap": f"{gap:.3e}"},
                "DEBUG",
            )


def get_logger(name: str = "infoflow") -> logging.Logger:
    """Get a logger instance."""
    return Logger.get_logger(name)


def setup_logging() -> None:
    """Create the root infoflow logger so handler problems surface at startup."""
    get_logger().debug("🚀 infoflow logging system initialized")


def log_workflow_step(workflow_name: str, step: str, status: str, details: Optional[Dict[str, Any]] = None) -> None:
    Logger.log_workflow_step(workflow_name, step, status, details)


def log_solver_progress(solver: str, iteration: int, objective: float, gap: float) -> None:
    Logger.log_solver_progress(solver, iteration, objective, gap)
