"""
harness/config.py

Runtime settings. Values come from the environment (a `.env` file is loaded
by the CLI entry point) and can be overridden by command-line flags.

    QCPU_TOLERANCE      absolute elementwise tolerance (default 1e-12)
    QCPU_MAX_DENSE_DIM  largest dense operator dimension (default 4096)
    LOG_LEVEL           logging level for the CLI (default WARNING)
"""

import os
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from operators.dense import DEFAULT_TOLERANCE, MAX_DENSE_DIM

ENV_TOLERANCE = "QCPU_TOLERANCE"
ENV_MAX_DENSE_DIM = "QCPU_MAX_DENSE_DIM"
ENV_LOG_LEVEL = "LOG_LEVEL"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)
    max_dense_dim: int = Field(MAX_DENSE_DIM, ge=2)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _upper(cls, v: str) -> str:
        return v.upper()

    @property
    def tolerance_scale(self) -> float:
        return self.tolerance / DEFAULT_TOLERANCE

    def scaled(self, declared: float) -> float:
        """A check's declared tolerance, scaled by the configured one."""
        return declared * self.tolerance_scale


def load_settings(
    tolerance: Optional[float] = None,
    max_dense_dim: Optional[int] = None,
    log_level: Optional[str] = None,
) -> Settings:
    """Environment first, explicit arguments win. Raises pydantic ValidationError."""
    values: dict = {}
    if os.environ.get(ENV_TOLERANCE, "").strip():
        values["tolerance"] = os.environ[ENV_TOLERANCE].strip()
    if os.environ.get(ENV_MAX_DENSE_DIM, "").strip():
        values["max_dense_dim"] = os.environ[ENV_MAX_DENSE_DIM].strip()
    if os.environ.get(ENV_LOG_LEVEL, "").strip():
        values["log_level"] = os.environ[ENV_LOG_LEVEL].strip()

    overrides = {"tolerance": tolerance, "max_dense_dim": max_dense_dim, "log_level": log_level}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Settings(**values)
