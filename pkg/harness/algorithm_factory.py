"""
harness/algorithm_factory.py

Instantiates the algorithm runner for a CLI subcommand or export request.
"""

import logging
from typing import Optional

from algorithms.base_algorithm import BaseAlgorithm
from algorithms.deutsch import DeutschAlgorithm
from algorithms.grover import GroverAlgorithm
from algorithms.qft import QftAlgorithm
from algorithms.shor import ShorAlgorithm
from harness.config import Settings

logger = logging.getLogger(__name__)

ALGORITHM_CLASS_MAP = {
    "deutsch": DeutschAlgorithm,
    "qft":     QftAlgorithm,
    "shor":    ShorAlgorithm,
    "grover":  GroverAlgorithm,
}


def create_algorithm(name: str, settings: Optional[Settings] = None) -> Optional[BaseAlgorithm]:
    """
    Instantiate an algorithm by name.

    Returns:
        BaseAlgorithm subclass instance, or None if the name is unknown
    """
    klass = ALGORITHM_CLASS_MAP.get((name or "").lower())
    if not klass:
        logger.warning(f"Unknown algorithm '{name}' (choose from {', '.join(ALGORITHM_CLASS_MAP)})")
        return None
    return klass(settings)
