"""
algorithms/base_algorithm.py

Base class for the algorithm runners behind the CLI.
Builds the network for a validated config, runs it with a seeded stream,
and packages the result as a RunReport.
"""

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Optional

import numpy as np
from pydantic import BaseModel

from harness.config import Settings
from harness.report import RunReport
from harness.rng import make_rng
from operators.dense import DEFAULT_TOLERANCE

logger = logging.getLogger(__name__)


class BaseAlgorithm(ABC):
    """
    Every algorithm:
    1. Validates its parameters into CONFIG_MODEL
    2. Builds its QCPU network (also used by `export`)
    3. Executes with an RNG stream derived from (seed, NAME)
    4. Reports residuals, checked against TOLERANCES scaled by the settings
    """

    # Override in subclasses
    NAME: ClassVar[str] = "base"
    CONFIG_MODEL: ClassVar[type[BaseModel]]
    # residual name → declared tolerance; unlisted residuals use DEFAULT_TOLERANCE
    TOLERANCES: ClassVar[dict[str, float]] = {}

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    @property
    def cap(self) -> int:
        return self.settings.max_dense_dim

    def parse_config(self, **params: Any) -> BaseModel:
        return self.CONFIG_MODEL(**{k: v for k, v in params.items() if v is not None})

    def run(self, config: BaseModel, seed: int = 0) -> RunReport:
        logger.info(f"[{self.NAME}] Starting run (seed={seed})")
        t0 = time.monotonic()
        try:
            fields = self._execute(config, make_rng(seed, self.NAME))
        except Exception as e:
            logger.error(f"[{self.NAME}] Run failed: {e}")
            raise
        elapsed_ms = (time.monotonic() - t0) * 1000.0

        report = RunReport(
            algorithm=self.NAME,
            params=config.model_dump(mode="json"),
            seed=seed,
            wall_time_ms=elapsed_ms,
            **fields,
        )
        failing = self.failing_residuals(report)
        for name, (value, tol) in failing.items():
            logger.warning(f"[{self.NAME}] Residual {name}={value:.3e} exceeds tolerance {tol:.1e}")
        logger.info(f"[{self.NAME}] Run finished in {elapsed_ms:.1f} ms")
        return report

    def tolerance_for(self, name: str) -> float:
        return self.settings.scaled(self.TOLERANCES.get(name, DEFAULT_TOLERANCE))

    def failing_residuals(self, report: RunReport) -> dict[str, tuple[float, float]]:
        out = {}
        for name, value in report.residuals.items():
            tol = self.tolerance_for(name)
            if not np.isfinite(value) or value > tol:
                out[name] = (value, tol)
        return out

    @abstractmethod
    def build_network(self, config: BaseModel):
        """The network `export` draws for this algorithm."""

    @abstractmethod
    def _execute(self, config: BaseModel, rng: np.random.Generator) -> dict:
        """
        Subclasses implement this.
        Returns RunReport fields: amplitudes, probabilities, outcome, factors, residuals, details.
        """
