"""Configuration loading and settings for cavityq.

Process-level settings come from the environment. Command options come from
an optional ``key = value`` file merged under the command-line flags, and are
validated by the pydantic models below.
"""

from collections.abc import Mapping
from enum import Enum
from pathlib import Path
from typing import Any

from typing_extensions import Self

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from cavityq.errors import MalformedInputError
from cavityq.models import Observable, SystemParams


# Options of which at most one may be set; a flag replaces the others from a file
EXCLUSIVE_OPTIONS: tuple[frozenset[str], ...] = (frozenset({"time", "steady"}),)


class OutputFormat(str, Enum):
    """Report formats for the stats command."""

    TEXT = "text"
    CSV = "csv"


def load_config_file(path: Path) -> dict[str, str]:
    """Read a ``key = value`` options file.

    Keys are normalized to snake_case (``gamma-min`` becomes ``gamma_min``);
    blank lines and ``#`` comments are ignored.

    Raises:
        MalformedInputError: If the file does not exist.
    """
    if not path.is_file():
        raise MalformedInputError(f"config file not found: {path}")
    raw = dotenv_values(path)
    return {
        key.strip().replace("-", "_"): value.strip()
        for key, value in raw.items()
        if value is not None
    }


def merge_options(config_path: Path | None, flags: Mapping[str, Any]) -> dict[str, Any]:
    """Merge file values with command-line flags; flags that were given win.

    A given flag also drops file values of the options it excludes, so
    ``--time`` overrides ``steady = true`` from the file.
    """
    merged: dict[str, Any] = load_config_file(config_path) if config_path else {}
    given = {key: value for key, value in flags.items() if value is not None}
    for group in EXCLUSIVE_OPTIONS:
        if group & set(given):
            for key in group - set(given):
                merged.pop(key, None)
    merged.update(given)
    return merged


def split_list(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(item.strip() for item in value.split(",") if item.strip())
    return value


class CommandOptions(BaseModel):
    """Physical parameters common to every command."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    kappa: float
    gamma: float = 0.0
    epsilon: float = 0.0

    @property
    def params(self) -> SystemParams:
        """Parameter triple for the physics modules (validated there)."""
        return SystemParams(kappa=self.kappa, gamma=self.gamma, epsilon=self.epsilon)


class StatsOptions(CommandOptions):
    """Options of ``cavityq stats``."""

    time: float | None = None
    steady: bool = False
    format: OutputFormat = OutputFormat.TEXT
    only: tuple[Observable, ...] | None = None

    @field_validator("only", mode="before")
    @classmethod
    def split_only(cls, value: Any) -> Any:
        """Accept comma-separated observable names."""
        return split_list(value)

    @model_validator(mode="after")
    def check_time_choice(self) -> Self:
        """Exactly one of --time and --steady."""
        if (self.time is None) == (not self.steady):
            raise ValueError("give exactly one of --time T or --steady")
        return self


class GridSpec(BaseModel):
    """Axis sampling ``min:max:count`` applied to real and imaginary parts."""

    model_config = ConfigDict(frozen=True)

    minimum: float = Field(allow_inf_nan=False)
    maximum: float = Field(allow_inf_nan=False)
    count: int = Field(ge=2)

    @model_validator(mode="before")
    @classmethod
    def parse_text(cls, value: Any) -> Any:
        """Accept the ``min:max:count`` string form."""
        if isinstance(value, str):
            parts = value.split(":")
            if len(parts) != 3:
                raise ValueError(f"grid must be min:max:count, got {value!r}")
            return {"minimum": parts[0], "maximum": parts[1], "count": parts[2]}
        return value

    @model_validator(mode="after")
    def check_order(self) -> Self:
        """Require min < max."""
        if not self.minimum < self.maximum:
            raise ValueError("grid min must be < max")
        return self


class QFuncOptions(CommandOptions):
    """Options of ``cavityq qfunc``."""

    grid: GridSpec
    marginal: bool = False
    time: float | None = Field(default=None, ge=0.0)
    out: Path | None = None


class VerifyOptions(CommandOptions):
    """Options of ``cavityq verify``."""

    fock_dim: int | None = Field(default=None, ge=2)
    tol: float | None = Field(default=None, gt=0.0)


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="",
        case_sensitive=True,
    )

    # Logging settings
    log_level: str = Field(
        default="INFO",
        validation_alias="LOG_LEVEL",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )
    log_format: str = Field(
        default="text",
        validation_alias="LOG_FORMAT",
        description="Log output format (json or text)",
    )

    # Oracle settings
    fock_dim: int = Field(
        default=15,
        ge=2,
        le=60,
        validation_alias="CAVITYQ_FOCK_DIM",
        description="Starting Fock cutoff per mode when --fock-dim is not given",
    )
    tol: float = Field(
        default=1e-4,
        gt=0.0,
        validation_alias="CAVITYQ_TOL",
        description="Default tolerance for oracle comparisons",
    )

    # Metrics settings
    metrics_file: Path | None = Field(
        default=None,
        validation_alias="CAVITYQ_METRICS_FILE",
        description="Write Prometheus text-format metrics here when a command ends",
    )
