"""
harness/report.py

Run reports and verification-suite results, serialized as canonical JSON:
compact separators, sorted keys, floats rounded to 15 significant digits, absent
fields omitted.
Two runs with the same seed produce byte-identical files; wall-clock timing
is left out unless explicitly requested.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, Field
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from operators.errors import ReportWriteError

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 15


class RunReport(BaseModel):
    algorithm: str
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    amplitudes: Optional[list[tuple[float, float]]] = None
    probabilities: Optional[dict[int, float]] = None
    outcome: Optional[Union[int, str]] = None
    factors: Optional[list[int]] = None
    residuals: dict[str, float] = Field(default_factory=dict)
    details: dict[str, Any] = Field(default_factory=dict)
    wall_time_ms: Optional[float] = None

    def probability_total(self) -> float:
        return float(sum(self.probabilities.values())) if self.probabilities else 0.0


class CaseFailure(BaseModel):
    case_id: str
    residual: float
    tolerance: float


class SuiteResult(BaseModel):
    suite: str
    cases_run: int = 0
    failures: list[CaseFailure] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


# ─── Helpers for building reports ────────────────────────────────────────────

def amplitude_pairs(amplitudes) -> list[tuple[float, float]]:
    return [(float(a.real), float(a.imag)) for a in np.asarray(amplitudes, dtype=np.complex128)]


def probability_map(probabilities, cutoff: float = 0.0) -> dict[int, float]:
    """Basis index → probability, keeping entries strictly above `cutoff`."""
    return {int(i): float(p) for i, p in enumerate(probabilities) if p > cutoff}


# ─── Canonical JSON ──────────────────────────────────────────────────────────

def _reject_non_finite(value) -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"Cannot serialize non-finite value {value}")
    if isinstance(value, dict):
        value = list(value.values())
    if isinstance(value, (list, tuple)):
        for v in value:
            _reject_non_finite(v)


def _round_floats(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def canonical_json(model: BaseModel, include_timings: bool = False) -> str:
    exclude = None if include_timings else {"wall_time_ms"}
    _reject_non_finite(model.model_dump(exclude=exclude))
    data = model.model_dump(mode="json", exclude_none=True, exclude=exclude)
    return json.dumps(_round_floats(data), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


@retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(min=0.05, max=0.5),
    retry=retry_if_exception_type(OSError),
    reraise=True,
)
def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def write_text_artifact(path: Union[str, Path], text: str) -> Path:
    """Write UTF-8 text; I/O failures surface as ReportWriteError naming the path."""
    target = Path(path)
    try:
        _write_text(target, text)
    except OSError as e:
        logger.error(f"Write failed for {target}: {e}")
        raise ReportWriteError(target, e) from e
    logger.info(f"Wrote {target}")
    return target


def write_report(report: BaseModel, path: Union[str, Path], include_timings: bool = False) -> Path:
    return write_text_artifact(path, canonical_json(report, include_timings))
