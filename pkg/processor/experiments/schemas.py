"""
Pydantic models describing the parameters of every experiment.

A configuration is validated in full before any computation starts. Values come
from a JSON document (``--config``) with command-line flags layered on top.
"""

# Standard library imports
import json
import math
from pathlib import Path
from typing import Any, ClassVar, Dict, Literal, Optional, Type, Union

# Third-party imports
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Local application imports
from processor.errors import ConfigError
from utils.common import parse_theta

SUITES = (
    "automaton",
    "margolus",
    "hamiltonian",
    "exponential-map",
    "jw1d",
    "sector-equivalence",
    "vacuum",
    "spin-model",
    "jw2d",
    "oracle",
)


class ExperimentConfig(BaseModel):
    """Fields shared by every experiment."""

    model_config = ConfigDict(extra="forbid")

    out: Optional[str] = Field(None, description="Output path; stdout when omitted")
    format: Literal["csv", "json"] = Field("csv", description="Output format")
    threads: Optional[int] = Field(None, ge=1, description="Worker cap for parallel sections")


class LatticeExperimentConfig(ExperimentConfig):
    theta: Optional[Union[float, str]] = Field(None, description="Mass angle in radians or an expression like pi/8")
    m_ratio: Optional[float] = Field(None, ge=0.0, le=1.0, description="Mass in Planck units")
    sites: int = Field(64, ge=2, le=4096, description="Number of field sites N")
    steps: int = Field(180, ge=0, le=100000)

    default_theta: ClassVar[str] = "pi/8"

    @field_validator("theta")
    @classmethod
    def _parse_theta(cls, value):
        if value is None:
            return None
        angle = parse_theta(value)
        if angle < 0 or angle > math.pi / 2 + 1e-12:
            raise ValueError(f"theta must lie in [0, pi/2], got {angle}")
        return min(angle, math.pi / 2)

    @model_validator(mode="after")
    def _mass_or_angle(self):
        if self.theta is not None and self.m_ratio is not None:
            raise ValueError("theta and m_ratio are mutually exclusive")
        return self

    @property
    def resolved_theta(self) -> float:
        if self.m_ratio is not None:
            return math.acos(self.m_ratio)
        if self.theta is not None:
            return float(self.theta)
        return parse_theta(self.default_theta)


class RefractionCurveConfig(ExperimentConfig):
    samples: int = Field(101, ge=2, le=10_000_000)


class PacketConfig(LatticeExperimentConfig):
    n0: float = 0.0
    delta: float = Field(2.0, gt=0.0)
    k: float = 8.0
    sign: Literal["+", "-"] = "+"

    @field_validator("k")
    @classmethod
    def _nonzero_period(cls, value: float) -> float:
        if value == 0:
            raise ValueError("k must be nonzero")
        return value


class PacketDetailConfig(PacketConfig):
    sites: int = Field(32, ge=2, le=4096)
    steps: int = Field(20, ge=0, le=100000)


class PlanckHaltConfig(PacketConfig):
    m_ratio: Optional[float] = Field(1.0, ge=0.0, le=1.0)


class DoubleSlitConfig(LatticeExperimentConfig):
    steps: int = Field(80, ge=0, le=100000)
    slit_n: int = Field(10, ge=1)

    default_theta: ClassVar[str] = "pi/10"

    @model_validator(mode="after")
    def _slit_inside(self):
        if not 0 < self.slit_n < self.sites / 2:
            raise ValueError(f"slit_n must satisfy 0 < n < sites/2, got {self.slit_n}")
        return self


class CollisionConfig(LatticeExperimentConfig):
    steps: int = Field(60, ge=0, le=100000)
    x0: float = Field(10.0, description="Packets start at -x0 and +x0")
    delta: float = Field(2.0, gt=0.0)
    k: float = 8.0
    sign: Literal["+", "-"] = "+"
    dump_every: int = Field(1, ge=1)

    @field_validator("k")
    @classmethod
    def _nonzero_period(cls, value: float) -> float:
        if value == 0:
            raise ValueError("k must be nonzero")
        return value


class DispersionConfig(LatticeExperimentConfig):
    samples: int = Field(256, ge=2, le=10_000_000)


class VerifyConfig(ExperimentConfig):
    format: Literal["csv", "json"] = "json"
    suite: Literal[SUITES] = Field(..., description="Name of the verification suite")  # type: ignore[valid-type]
    seed: int = Field(7, ge=0)


EXPERIMENT_SCHEMAS: Dict[str, Type[ExperimentConfig]] = {
    "refraction-curve": RefractionCurveConfig,
    "packet": PacketConfig,
    "packet-detail": PacketDetailConfig,
    "planck-halt": PlanckHaltConfig,
    "double-slit": DoubleSlitConfig,
    "collide": CollisionConfig,
    "dispersion": DispersionConfig,
    "verify": VerifyConfig,
}


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Load a JSON configuration document.

    Raises:
        ConfigError: If the file is missing, unreadable or not a JSON object.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read configuration {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration {path} must hold a JSON object")
    return data


def build_config(experiment: str, file_values: Optional[Dict[str, Any]] = None,
                 overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Merge file values with overrides (None overrides are ignored) and validate.

    Raises:
        ConfigError: For an unknown experiment name.
        pydantic.ValidationError: For invalid values.
    """
    schema = EXPERIMENT_SCHEMAS.get(experiment)
    if schema is None:
        raise ConfigError(f"Unknown experiment: {experiment}")
    values: Dict[str, Any] = dict(file_values or {})
    values.pop("experiment", None)
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return schema.model_validate(values)
