"""
qcpu/network.py

QCPU factor networks: Q(U) = ∏_{m,n} exp{(U_mn |m⟩⟨n| ⊗ I_A)·C_A†}.

Every exponent is nilpotent of order 2 and any two exponents multiply to zero
(c†² = 0), so all factors commute and the product collapses to the closed
form I⊗I_A + U⊗c†. `factor_product` evaluates the literal product and is the
oracle the closed form is checked against.

Usage:
    net = qcpu_of(hadamard())
    q = closed_form(net)            # 4×4, I + H⊗c†
    both = sum_compose([qcpu_of(a), qcpu_of(b)])   # Q(a + b)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from operators.dense import (
    ComplexMatrix,
    RegisterShape,
    check_dense_cap,
    freeze,
    outer,
    register_shape_of,
    unitarity_defect,
)
from operators.errors import BasisIndexError, DimensionMismatchError
from qcpu.algebra import lift_raise, nilpotent_exp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QcpuFactor:
    m: int
    n: int
    coeff: complex

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise ValueError(f"Factor ({self.m}, {self.n}) has a non-finite coefficient")

    @property
    def node_id(self) -> str:
        return f"f_{self.m}_{self.n}"


def _readonly(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QcpuNetwork:
    """Register shape plus an ordered factor list, stored column-wise as arrays."""

    shape: RegisterShape
    rows: np.ndarray
    cols: np.ndarray
    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        rows = _readonly(self.rows, np.int64)
        cols = _readonly(self.cols, np.int64)
        coeffs = _readonly(self.coeffs, np.complex128)
        if not (rows.size == cols.size == coeffs.size):
            raise DimensionMismatchError("Factor rows, cols and coeffs differ in length")
        dim = self.shape.dim
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= dim or cols.max() >= dim):
            raise BasisIndexError(f"Factor index out of range for register dimension {dim}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Factor coefficients must be finite")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_factors(cls, shape: RegisterShape, factors: Iterable[QcpuFactor], label: str = "") -> "QcpuNetwork":
        factors = list(factors)
        return cls(
            shape,
            [f.m for f in factors],
            [f.n for f in factors],
            [f.coeff for f in factors],
            label,
        )

    @property
    def factors(self) -> tuple[QcpuFactor, ...]:
        return tuple(
            QcpuFactor(int(m), int(n), complex(c)) for m, n, c in zip(self.rows, self.cols, self.coeffs)
        )

    def __len__(self) -> int:
        return int(self.coeffs.size)

    @property
    def register_dim(self) -> int:
        return self.shape.dim

    def matrix(self) -> ComplexMatrix:
        """Reassemble U from the factor coefficients (duplicates add)."""
        u = np.zeros((self.register_dim, self.register_dim), dtype=np.complex128)
        np.add.at(u, (self.rows, self.cols), self.coeffs)
        return freeze(u)

    def canonical(self) -> "QcpuNetwork":
        """One factor per (m, n), zero coefficients dropped, row-major order."""
        return _network_from_matrix(self.matrix(), self.label)

    def unitarity_defect(self) -> float:
        return unitarity_defect(self.matrix())

    def with_coeff(self, index: int, coeff: complex) -> "QcpuNetwork":
        coeffs = np.array(self.coeffs)
        coeffs[index] = coeff
        return QcpuNetwork(self.shape, self.rows, self.cols, coeffs, self.label)

    def with_label(self, label: str) -> "QcpuNetwork":
        return QcpuNetwork(self.shape, self.rows, self.cols, self.coeffs, label)


def _network_from_matrix(u: ComplexMatrix, label: str) -> QcpuNetwork:
    shape = register_shape_of(u)
    rows, cols = np.nonzero(u)
    return QcpuNetwork(shape, rows, cols, u[rows, cols], label)


# ─── Factor networks ─────────────────────────────────────────────────────────

def factor_matrix(f: QcpuFactor, shape: RegisterShape) -> ComplexMatrix:
    """exp{(coeff |m⟩⟨n| ⊗ I_A)·C†} = I_{2N} + coeff (|m⟩⟨n| ⊗ c†)."""
    shape.check_index(f.m)
    shape.check_index(f.n)
    return nilpotent_exp(lift_raise(f.coeff * outer(f.m, f.n, shape.dim)))


def qcpu_of(u: ComplexMatrix, label: str = "") -> QcpuNetwork:
    """Q(U): one factor per nonzero U_mn. U may be non-unitary."""
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatchError(f"Q(U) needs a square matrix, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("Q(U) needs finite matrix entries")
    net = _network_from_matrix(u, label)
    logger.debug(f"Built Q({label or 'U'}) with {len(net)} factor(s) on dim {net.register_dim}")
    return net


def closed_form(network: QcpuNetwork, cap: Optional[int] = None) -> ComplexMatrix:
    """I_{2N} + U⊗c†; on |ψ⟩⊗|0⟩_A it yields |ψ⟩⊗|0⟩_A + (U|ψ⟩)⊗|1⟩_A."""
    dim = 2 * network.register_dim
    check_dense_cap(dim, cap)
    return freeze(np.eye(dim) + lift_raise(network.matrix()))


def factor_product(
    network: QcpuNetwork,
    order: Optional[Sequence[int]] = None,
    cap: Optional[int] = None,
) -> ComplexMatrix:
    """The literal ordered product of the exponential factors; `order` permutes them."""
    dim = 2 * network.register_dim
    check_dense_cap(dim, cap)
    factors = network.factors
    if order is not None:
        factors = [factors[i] for i in order]
    out = np.eye(dim, dtype=np.complex128)
    for f in factors:
        out = out @ factor_matrix(f, network.shape)
    return freeze(out)


# ─── Sum rule ────────────────────────────────────────────────────────────────

def sum_compose(networks: Iterable[QcpuNetwork], label: str = "") -> QcpuNetwork:
    """Q(U_1 + ⋯ + U_r) = Q(U_1)⋯Q(U_r)."""
    networks = list(networks)
    if not networks:
        raise ValueError("sum_compose needs at least one network")
    shape = networks[0].shape
    total = np.zeros((shape.dim, shape.dim), dtype=np.complex128)
    for net in networks:
        if net.shape != shape:
            raise DimensionMismatchError(
                f"Cannot sum networks on dimensions {shape.dim} and {net.shape.dim}"
            )
        np.add.at(total, (net.rows, net.cols), net.coeffs)
    name = label or " + ".join(net.label or "U" for net in networks)
    return qcpu_of(total, name)


def closed_form_product(networks: Sequence[QcpuNetwork], cap: Optional[int] = None) -> ComplexMatrix:
    """Q(U_1)·Q(U_2)⋯ as dense matrices; the right-hand side of the sum rule."""
    out = closed_form(networks[0], cap)
    for net in networks[1:]:
        out = out @ closed_form(net, cap)
    return freeze(out)
