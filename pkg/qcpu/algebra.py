"""
qcpu/algebra.py

The auxiliary-qubit algebra: ladder operators c = |0⟩⟨1| and c† = |1⟩⟨0|,
the projectors P₀/P₁, and their lifts C = I_R⊗c, C† = I_R⊗c† (the Connector).

The auxiliary qubit is always the least significant tensor factor, so an
operator on register⊗aux is laid out as tensor(register_op, aux_op).
"""

from dataclasses import dataclass

import numpy as np

from operators.dense import ComplexMatrix, freeze, identity, tensor


@dataclass(frozen=True)
class AuxiliaryAlgebra:
    c: ComplexMatrix
    c_dag: ComplexMatrix
    p0: ComplexMatrix
    p1: ComplexMatrix

    @classmethod
    def standard(cls) -> "AuxiliaryAlgebra":
        return cls(
            c=freeze([[0, 1], [0, 0]]),
            c_dag=freeze([[0, 0], [1, 0]]),
            p0=freeze([[1, 0], [0, 0]]),
            p1=freeze([[0, 0], [0, 1]]),
        )

    def anticommutator(self) -> ComplexMatrix:
        return freeze(self.c @ self.c_dag + self.c_dag @ self.c)

    def relations_hold(self) -> bool:
        """c² = c†² = 0 and cc† + c†c = I, compared exactly."""
        zero = np.zeros((2, 2))
        return (
            np.array_equal(self.c @ self.c, zero)
            and np.array_equal(self.c_dag @ self.c_dag, zero)
            and np.array_equal(self.anticommutator(), np.eye(2))
        )


AUX = AuxiliaryAlgebra.standard()


@dataclass(frozen=True)
class Connector:
    """C_A = I_R⊗c_A and C_A† = I_R⊗c_A† for a register of dimension `register_dim`."""

    register_dim: int

    def __post_init__(self):
        if self.register_dim < 1:
            raise ValueError(f"Register dimension must be positive, got {self.register_dim}")

    @property
    def dim(self) -> int:
        return 2 * self.register_dim

    def lower(self) -> ComplexMatrix:
        return tensor(identity(self.register_dim), AUX.c)

    def raise_(self) -> ComplexMatrix:
        return tensor(identity(self.register_dim), AUX.c_dag)


def nilpotent_exp(x: ComplexMatrix) -> ComplexMatrix:
    """exp(X) = I + X for X with X² = 0; the series stops after the linear term."""
    # only indices that are both a nonzero column and a nonzero row contribute to X²
    inner = np.flatnonzero(np.any(x, axis=0) & np.any(x, axis=1))
    if inner.size and np.any(x[:, inner] @ x[inner, :]):
        raise ValueError("Exponent is not nilpotent of order 2")
    return freeze(np.eye(x.shape[0]) + x)


def lift_raise(register_op: ComplexMatrix) -> ComplexMatrix:
    """(A⊗I_A)·C† = A⊗c†, the exponent shape shared by every QCPU factor."""
    return tensor(register_op, AUX.c_dag)
