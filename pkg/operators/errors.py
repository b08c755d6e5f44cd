"""
operators/errors.py

Exception hierarchy shared by every package.
Configuration problems are raised by pydantic as ValidationError instead.
"""


class QcpuError(Exception):
    """Base class for all errors raised by this project."""


class DimensionMismatchError(QcpuError, ValueError):
    pass


class BasisIndexError(QcpuError, IndexError):
    pass


class DenseCapExceededError(QcpuError):
    def __init__(
        self,
        requested: int,
        cap: int,
        what: str = "operator",
        hint: str = "raise QCPU_MAX_DENSE_DIM or use the structured pipeline",
    ):
        self.requested = requested
        self.cap = cap
        super().__init__(f"Dense {what} of dimension {requested} exceeds the cap of {cap} ({hint})")


class ZeroProbabilityError(QcpuError):
    pass


class UnknownFormatError(QcpuError, ValueError):
    pass


class ReportWriteError(QcpuError, OSError):
    def __init__(self, path, cause: Exception):
        self.path = str(path)
        super().__init__(f"Could not write {self.path}: {cause}")


class ConsistencyError(QcpuError, AssertionError):
    """A constructed network disagrees with the operator it must reproduce."""


class UnknownSuiteError(QcpuError, ValueError):
    pass
