# infoflow/utils/config_loader.py
# This file contains the configuration management system with YAML loading and environment variable substitution
# Purpose: Load, validate, and manage application settings (logging, solver, threshold search, Monte Carlo) from YAML files with environment variable support. This is NOT for experiment definitions (see workflows/experiment_config.py).

"""
Configuration management system with YAML loading and environment variable substitution.
"""
import os
import re
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .validation import ConfigurationError

CONFIG_ENV_VAR = "INFOFLOW_CONFIG"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config.yml"


class LoggingConfig(BaseModel):
    """Logging configuration model."""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file_path: Optional[str] = None
    max_file_size: int = 10485760  # 10MB
    backup_count: int = 5


class SolverConfig(BaseModel):
    """Defaults for the network utility maximization solver."""
    method: Literal["auto", "frank_wolfe", "segment_greedy"] = "auto"
    tol: float = Field(default=1e-6, gt=0)
    max_iterations: int = Field(default=10000, ge=1)
    line_search_xtol: float = Field(default=1e-12, gt=0)
    check_feasibility: bool = False
    fill_residual: bool = True


class ThresholdSearchConfig(BaseModel):
    """Defaults for likelihood-ratio threshold optimization."""
    starts: int = Field(default=8, ge=1)
    sweep_tol: float = Field(default=1e-7, gt=0)
    max_sweeps: int = Field(default=500, ge=1)
    tail_mass: float = Field(default=1e-8, gt=0, lt=1)
    seed: int = 0
    multistart_max_levels: int = Field(default=16, ge=1)


class MonteCarloConfig(BaseModel):
    """Defaults for Monte Carlo MSE estimation."""
    chunk_size: int = Field(default=10000, ge=1)


class AppConfig(BaseModel):
    """Main application configuration model."""
    app_name: str = "infoflow"
    version: str = "1.0.0"
    environment: str = "development"
    debug: bool = False

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    threshold_search: ThresholdSearchConfig = Field(default_factory=ThresholdSearchConfig)
    monte_carlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)

    # Worker threads for Monte Carlo chunks and per-alpha / per-setting runs
    max_workers: int = Field(default=4, ge=1)


def load_yaml_file(file_path: Path, required: bool = True) -> Dict[str, Any]:
    """Load YAML file and return parsed data."""
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            return yaml.safe_load(file) or {}
    except FileNotFoundError:
        if required:
            raise ConfigurationError(f"Required configuration file '{file_path}' not found")
        return {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in '{file_path}': {str(e)}")


def merge_configs(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge two configuration dictionaries recursively."""
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_configs(result[key], value)
        else:
            result[key] = value

    return result


def substitute_env_vars(data: Any) -> Any:
    """Recursively substitute environment variables in configuration data."""
    if isinstance(data, dict):
        return {key: substitute_env_vars(value) for key, value in data.items()}
    elif isinstance(data, list):
        return [substitute_env_vars(item) for item in data]
    elif isinstance(data, str):
        return _replace_env_vars_in_string(data)
    else:
        return data


def _replace_env_vars_in_string(text: str) -> Any:
    """Replace environment variables in string using ${VAR_NAME} syntax."""
    pattern = r'\$\{([^}]+)\}'

    def replace_var(match):
        var_name = match.group(1)
        # Support default values with syntax ${VAR_NAME:default_value}
        if ':' in var_name:
            var_name, default_value = var_name.split(':', 1)
            return os.getenv(var_name, default_value)
        value = os.getenv(var_name)
        if value is None:
            raise ConfigurationError(f"Environment variable '{var_name}' is not set")
        return value

    replaced = re.sub(pattern, replace_var, text)
    if replaced != text:
        # A whole-value substitution like "${SEED:3}" should come back as a number
        return yaml.safe_load(replaced) if re.fullmatch(pattern, text) else replaced
    return text


class ConfigLoader:
    """
    Singleton configuration loader with YAML support and environment variable substitution.
    """
    _instance: Optional['ConfigLoader'] = None
    _config: Optional[AppConfig] = None

    def __new__(cls) -> 'ConfigLoader':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if self._config is None:
            load_dotenv()
            self._load_config()

    @staticmethod
    def config_path() -> Path:
        """Resolve the application config path (env override first)."""
        return Path(os.getenv(CONFIG_ENV_VAR, str(DEFAULT_CONFIG_PATH)))

    def _load_config(self) -> None:
        """Load configuration from YAML files with environment variable substitution."""
        path = self.config_path()
        config_data = load_yaml_file(path, required=False)

        # Local overrides sit next to the main file
        local_path = path.with_name("config_local.yml")
        if local_path.exists():
            config_data = merge_configs(config_data, load_yaml_file(local_path))

        config_data = substitute_env_vars(config_data)

        try:
            self._config = AppConfig(**config_data)
        except ValidationError as e:
            raise ConfigurationError(f"Failed to load configuration from '{path}': {str(e)}")

    @property
    def config(self) -> AppConfig:
        """Get the loaded configuration."""
        if self._config is None:
            raise RuntimeError("Configuration not loaded")
        return self._config

    def reload(self) -> None:
        """Reload configuration from files."""
        self._config = None
        self._load_config()


def get_config() -> AppConfig:
    """Get the global configuration instance."""
    return ConfigLoader().config
