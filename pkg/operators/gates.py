"""
operators/gates.py

Elementary gates used by the algorithm networks: Pauli σ₁/σ₃, Hadamard,
single-qubit phase B(θ), the k-qubit uniform-superposition layer and the
discrete Fourier matrix F.
"""

import numpy as np

from operators.dense import ComplexMatrix, RegisterShape, freeze, tensor_all

SQRT_HALF = 1.0 / np.sqrt(2.0)


def pauli_x() -> ComplexMatrix:
    return freeze([[0, 1], [1, 0]])


def pauli_z() -> ComplexMatrix:
    return freeze([[1, 0], [0, -1]])


def hadamard() -> ComplexMatrix:
    """H = (σ₁ + σ₃) / √2."""
    return freeze((pauli_x() + pauli_z()) * SQRT_HALF)


def phase_gate(theta: float) -> ComplexMatrix:
    """diag(1, e^{iθ})."""
    if not np.isfinite(theta):
        raise ValueError(f"Phase angle must be finite, got {theta}")
    return freeze([[1, 0], [0, np.exp(1j * theta)]])


def hadamard_all(k: int) -> ComplexMatrix:
    """H^{⊗k}; maps |0…0⟩ to the normalized uniform superposition."""
    return tensor_all(*([hadamard()] * k))


def fourier_matrix(shape: RegisterShape, inverse: bool = False) -> ComplexMatrix:
    """F with entry (m, n) = e^{2πi mn/N}/√N; the inverse conjugates every entry."""
    if shape.k < 1:
        raise ValueError("The Fourier matrix needs at least one qubit")
    n = shape.dim
    idx = np.arange(n)
    # reduce mn mod N first so large k keeps full phase accuracy
    turns = np.outer(idx, idx) % n
    sign = -1.0 if inverse else 1.0
    return freeze(np.exp(sign * 2j * np.pi * turns / n) / np.sqrt(n))
