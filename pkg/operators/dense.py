"""
operators/dense.py

Dense complex linear algebra over small Hilbert spaces.

Matrices are plain complex128 numpy arrays, returned read-only so that a value
handed to another module cannot be mutated behind its back. Basis index n of a
k-qubit register is binary with qubit 1 as the most significant bit.

Usage:
    psi = StateVector.basis(1, 2)
    out = apply(tensor(pauli_x(), identity(2)), psi.tensor(psi))
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from operators.errors import BasisIndexError, DenseCapExceededError, DimensionMismatchError

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray

DEFAULT_TOLERANCE = 1e-12
MAX_DENSE_DIM = 2 ** 12


def freeze(a) -> np.ndarray:
    """Return a read-only complex128 copy-or-view of `a`."""
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def check_dense_cap(dim: int, cap: Optional[int] = None, what: str = "operator", hint: Optional[str] = None) -> None:
    limit = MAX_DENSE_DIM if cap is None else cap
    if dim > limit:
        logger.warning(f"Refusing dense {what} of dimension {dim} (cap {limit})")
        if hint is None:
            raise DenseCapExceededError(dim, limit, what)
        raise DenseCapExceededError(dim, limit, what, hint)


def _require_square(a: ComplexMatrix, name: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    return a.shape[0]


# ─── Register shape ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class RegisterShape:
    """A k-qubit register of dimension 2^k."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"Qubit count must be non-negative, got {self.k}")

    @property
    def dim(self) -> int:
        return 1 << self.k

    @classmethod
    def from_dim(cls, dim: int) -> "RegisterShape":
        if dim < 1 or dim & (dim - 1):
            raise DimensionMismatchError(f"Dimension {dim} is not a power of two")
        return cls(dim.bit_length() - 1)

    def check_index(self, index: int) -> int:
        if not 0 <= index < self.dim:
            raise BasisIndexError(f"Basis index {index} out of range for dimension {self.dim}")
        return index


# ─── State vectors ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size == 0:
            raise DimensionMismatchError("State vector must have at least one amplitude")
        object.__setattr__(self, "amplitudes", freeze(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        if not 0 <= index < dim:
            raise BasisIndexError(f"Basis index {index} out of range for dimension {dim}")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= tol

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("Cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes))

    def distance(self, other: "StateVector") -> float:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"State dims differ: {self.dim} vs {other.dim}")
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))


# ─── Constructors ────────────────────────────────────────────────────────────

def identity(dim: int) -> ComplexMatrix:
    return freeze(np.eye(dim))


def zeros(dim: int) -> ComplexMatrix:
    return freeze(np.zeros((dim, dim)))


def outer(m: int, n: int, dim: int) -> ComplexMatrix:
    """|m⟩⟨n| in a space of dimension `dim`."""
    if not (0 <= m < dim and 0 <= n < dim):
        raise BasisIndexError(f"Outer product indices ({m}, {n}) out of range for dimension {dim}")
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[m, n] = 1.0
    return freeze(out)


def projector(index: int, dim: int) -> ComplexMatrix:
    return outer(index, index, dim)


# ─── Operations ──────────────────────────────────────────────────────────────

def tensor(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product; block (i, j) equals a[i, j] * b."""
    return freeze(np.kron(a, b))


def tensor_all(*ms: ComplexMatrix) -> ComplexMatrix:
    if not ms:
        return identity(1)
    return freeze(reduce(np.kron, ms))


def matmul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"Cannot multiply {a.shape} by {b.shape}")
    return freeze(a @ b)


def matmul_chain(ms: list[ComplexMatrix]) -> ComplexMatrix:
    """Left-to-right product ms[0] @ ms[1] @ ... ; the last factor acts first."""
    if not ms:
        raise ValueError("Empty matrix chain")
    return reduce(matmul, ms)


def matadd(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Cannot add {a.shape} and {b.shape}")
    return freeze(a + b)


def scale(a: ComplexMatrix, factor: complex) -> ComplexMatrix:
    return freeze(factor * a)


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return freeze(a.conj().T)


def apply(a: ComplexMatrix, state: StateVector) -> StateVector:
    if a.ndim != 2 or a.shape[1] != state.dim:
        raise DimensionMismatchError(f"Cannot apply {a.shape} operator to a state of dim {state.dim}")
    return StateVector(a @ state.amplitudes)


def frobenius_distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Cannot compare {a.shape} with {b.shape}")
    return float(np.linalg.norm(a - b))


def max_abs_difference(a: ComplexMatrix, b: ComplexMatrix) -> float:
    """Elementwise residual used for every tolerance comparison."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Cannot compare {a.shape} with {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def allclose(a: ComplexMatrix, b: ComplexMatrix, tol: float = DEFAULT_TOLERANCE) -> bool:
    return max_abs_difference(a, b) <= tol


def unitarity_defect(a: ComplexMatrix) -> float:
    dim = _require_square(a)
    return max_abs_difference(a.conj().T @ a, np.eye(dim))


def is_unitary(a: ComplexMatrix, tol: float = DEFAULT_TOLERANCE) -> bool:
    return unitarity_defect(a) <= tol


def register_shape_of(a: ComplexMatrix) -> RegisterShape:
    return RegisterShape.from_dim(_require_square(a))
