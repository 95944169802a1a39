# infoflow/workflows/experiment_config.py
# This file contains the pydantic models of an experiment document and its loader
# Purpose: Parse and validate experiment YAML (network source, seeds, runs, output path and exactly one task block) and apply CLI overrides. This is NOT for application settings (see utils/config_loader.py).

"""
Experiment configuration models.
"""
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..detection.densities import DensityPairSpec
from ..network.generator import LayeredGraphSpec, generate_layered
from ..network.graph import Network
from ..num.utility import ExponentialUtility, LinearUtility, PiecewiseLinearUtility, UtilityFunction
from ..utils.config_loader import load_yaml_file, substitute_env_vars
from ..utils.validation import ConfigurationError

TASK_BLOCKS = {
    "estimation": "estimation",
    "detection": "detection",
    "curves": "curves",
    "solve": "utilities",
}


class SeedsConfig(BaseModel):
    """Independent seeds per concern."""
    graph: int = Field(default=0, ge=0)
    matrix: int = Field(default=1, ge=0)
    mc: int = Field(default=2, ge=0)

    @classmethod
    def from_base(cls, seed: int) -> "SeedsConfig":
        """Seeds derived from one CLI seed: graph=N, matrix=N+1, mc=N+2."""
        return cls(graph=seed, matrix=seed + 1, mc=seed + 2)


class NetworkSource(BaseModel):
    """Exactly one of a layered generator spec or a path to a saved network."""
    layered: Optional[LayeredGraphSpec] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "NetworkSource":
        if (self.layered is None) == (self.path is None):
            raise ValueError("network needs exactly one of 'layered' or 'path'")
        return self

    def build(self, graph_seed: int) -> Network:
        """Generate (seeded by graph_seed) or load the network."""
        if self.layered is not None:
            return generate_layered(self.layered.model_copy(update={"seed": graph_seed}))
        return Network.load(self.path)


class EstimationTaskConfig(BaseModel):
    """Sensing matrix generator and quantizer parameters."""
    dimension: int = Field(default=3, ge=1)
    weak_count: int = Field(default=4, ge=0)
    alphas: List[float] = Field(default_factory=lambda: [1.0])
    noise_half_width: float = Field(default=0.1, ge=0)
    quantizer_range: Tuple[float, float] = (-5.0, 5.0)

    @field_validator("alphas")
    @classmethod
    def _check_alphas(cls, alphas: List[float]) -> List[float]:
        if not alphas:
            raise ValueError("alphas must not be empty")
        if len(set(alphas)) != len(alphas):
            raise ValueError(f"alphas must be distinct, got {alphas}")
        return alphas

    @field_validator("quantizer_range")
    @classmethod
    def _check_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not value[1] > value[0]:
            raise ValueError(f"quantizer_range must satisfy lo < hi, got {value}")
        return value


class DetectionSetting(BaseModel):
    """One named assignment of H0/H1 densities to the sensors (in sensor order)."""
    name: str
    sensors: List[DensityPairSpec]


class DetectionTaskConfig(BaseModel):
    """Detection settings; r_max defaults to each sensor's incident capacity."""
    settings: List[DetectionSetting]
    r_max: Optional[int] = Field(default=None, ge=0)

    @field_validator("settings")
    @classmethod
    def _check_settings(cls, settings: List[DetectionSetting]) -> List[DetectionSetting]:
        if not settings:
            raise ValueError("detection needs at least one setting")
        names = [s.name for s in settings]
        if len(set(names)) != len(names):
            raise ValueError(f"setting names must be unique, got {names}")
        return settings


class CurvePair(DensityPairSpec):
    """Named density pair whose f(n) curve is exported."""
    name: str


class CurvesTaskConfig(BaseModel):
    """Density pairs and largest rate for divergence curves."""
    pairs: List[CurvePair]
    r_max: int = Field(default=8, ge=0)

    @field_validator("pairs")
    @classmethod
    def _check_pairs(cls, pairs: List[CurvePair]) -> List[CurvePair]:
        if not pairs:
            raise ValueError("curves needs at least one pair")
        names = [p.name for p in pairs]
        if len(set(names)) != len(names):
            raise ValueError(f"pair names must be unique, got {names}")
        return pairs


class UtilitySpec(BaseModel):
    """One sensor utility: linear, exponential (-scale * 4^-r) or piecewise-linear."""
    kind: Literal["linear", "exponential", "piecewise"]
    slope: float = 1.0
    intercept: float = 0.0
    scale: float = Field(default=1.0, ge=0)
    xs: Optional[List[float]] = None
    ys: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_points(self) -> "UtilitySpec":
        if self.kind == "piecewise" and (self.xs is None or self.ys is None):
            raise ValueError("piecewise utility needs 'xs' and 'ys'")
        return self

    def build(self) -> UtilityFunction:
        if self.kind == "linear":
            return LinearUtility(self.slope, self.intercept)
        if self.kind == "exponential":
            return ExponentialUtility(self.scale)
        return PiecewiseLinearUtility(self.xs, self.ys)


class UtilitiesTaskConfig(BaseModel):
    """Per-sensor utilities for the solve verb; `default` covers sensors not listed."""
    sensors: Dict[int, UtilitySpec] = Field(default_factory=dict)
    default: Optional[UtilitySpec] = None

    def build(self, network: Network) -> Dict[int, UtilityFunction]:
        utilities = {}
        for s in network.sensors:
            spec = self.sensors.get(s, self.default)
            if spec is None:
                raise ConfigurationError(f"No utility given for sensor {s} and no default")
            utilities[s] = spec.build()
        unknown = set(self.sensors) - set(network.sensors)
        if unknown:
            raise ConfigurationError(f"Utilities given for unknown sensors {sorted(unknown)}")
        return utilities


class ExperimentConfig(BaseModel):
    """A complete experiment document."""
    model_config = ConfigDict(extra="forbid")

    task: Literal["estimation", "detection", "curves", "solve"]
    network: Optional[NetworkSource] = None
    seeds: SeedsConfig = Field(default_factory=SeedsConfig)
    runs: int = Field(default=100000, ge=1)
    output_path: str = "results/output.csv"

    estimation: Optional[EstimationTaskConfig] = None
    detection: Optional[DetectionTaskConfig] = None
    curves: Optional[CurvesTaskConfig] = None
    utilities: Optional[UtilitiesTaskConfig] = None

    @model_validator(mode="after")
    def _check_task_block(self) -> "ExperimentConfig":
        present = [name for name in TASK_BLOCKS.values() if getattr(self, name) is not None]
        expected = TASK_BLOCKS[self.task]
        if present != [expected]:
            raise ValueError(f"task '{self.task}' needs exactly one task block '{expected}', found {present or 'none'}")
        if self.task != "curves" and self.network is None:
            raise ValueError(f"task '{self.task}' needs a 'network' block")
        return self

    @property
    def task_block(self) -> BaseModel:
        return getattr(self, TASK_BLOCKS[self.task])

    def check_sensor_count(self, network: Network) -> None:
        """
        Check the task block against the built network.

        Raises:
            ConfigurationError: If a per-sensor list has the wrong length
        """
        n = len(network.sensors)
        if self.estimation is not None and not self.estimation.weak_count <= n:
            raise ConfigurationError(f"weak_count={self.estimation.weak_count} exceeds the {n} sensors")
        if self.estimation is not None and n < self.estimation.dimension:
            raise ConfigurationError(f"{n} sensors cannot estimate a {self.estimation.dimension}-dimensional parameter")
        if self.detection is not None:
            for setting in self.detection.settings:
                if len(setting.sensors) != n:
                    raise ConfigurationError(
                        f"Setting '{setting.name}' lists {len(setting.sensors)} sensors; the network has {n}"
                    )

    def with_overrides(
        self,
        seed: Optional[int] = None,
        runs: Optional[int] = None,
        output: Optional[str] = None,
    ) -> "ExperimentConfig":
        """Copy with CLI overrides applied."""
        update = {}
        if seed is not None:
            update["seeds"] = SeedsConfig.from_base(seed)
        if runs is not None:
            if runs < 1:
                raise ConfigurationError(f"--runs must be at least 1, got {runs}")
            update["runs"] = runs
        if output is not None:
            update["output_path"] = output
        return self.model_copy(update=update)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        Load an experiment document with ${VAR:default} substitution.

        Raises:
            ConfigurationError: If the file is missing, malformed or invalid
        """
        data = substitute_env_vars(load_yaml_file(Path(path), required=True))
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid experiment config '{path}': {e}")
        except TypeError as e:
            raise ConfigurationError(f"Experiment config '{path}' must be a mapping: {e}")
