"""
algorithms/qft.py

Quantum Fourier transform as a sum of rank-one terms.

Column n of F is the product state ⊗_j (|0⟩ + e^{iθ_j(n)}|1⟩)/√2, so

    F = Σ_n B(n)·H^{⊗k}·|0⟩⟨n|,   B(n) = ⊗_j diag(1, e^{iθ_j(n)})

and Q(F) is the sum composition of the N term networks. The qubit carrying
binary weight 2^{j−1} (j = 1 for the least significant qubit, i.e. the last
tensor position) gets θ_j(n) = 2π·n·2^{j−1}/2^k. `literal_phases` switches to
θ_j(n) = 2^j·π·n/(2^k − 1), which does not sum to F; it is kept so the
mismatch can be measured.
"""

import logging
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from algorithms.base_algorithm import BaseAlgorithm
from harness.report import amplitude_pairs, probability_map
from operators.dense import (
    ComplexMatrix,
    RegisterShape,
    StateVector,
    apply,
    check_dense_cap,
    freeze,
    max_abs_difference,
    outer,
    tensor_all,
    unitarity_defect,
)
from operators.gates import fourier_matrix, hadamard, hadamard_all, phase_gate
from qcpu.composition import postselect_aux
from qcpu.network import QcpuNetwork, closed_form, qcpu_of, sum_compose

logger = logging.getLogger(__name__)


class QftConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    inverse: bool = False
    literal_phases: bool = False
    input_index: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _input_in_range(self):
        if self.input_index >= 1 << self.k:
            raise ValueError(f"input_index {self.input_index} out of range for k={self.k}")
        return self

    @property
    def shape(self) -> RegisterShape:
        return RegisterShape(self.k)


def qubit_angle(n: int, weight_exp: int, k: int, literal: bool = False) -> float:
    """Phase for the qubit of binary weight 2^{weight_exp − 1} in column n."""
    if literal:
        return (2 ** weight_exp) * np.pi * n / ((1 << k) - 1)
    # reduce before scaling so large n keep full precision
    turns = (n << (weight_exp - 1)) % (1 << k)
    return 2.0 * np.pi * turns / (1 << k)


def b_layer(cfg: QftConfig, n: int) -> list[ComplexMatrix]:
    """Per-qubit phase gates B_j for column n, most significant qubit first."""
    sign = -1.0 if cfg.inverse else 1.0
    return [
        phase_gate(sign * qubit_angle(n, cfg.k - position, cfg.k, cfg.literal_phases))
        for position in range(cfg.k)
    ]


def qft_column(cfg: QftConfig, n: int) -> np.ndarray:
    """B(n)·H^{⊗k}|0⟩, evaluated qubit by qubit."""
    zero = np.array([1.0, 0.0], dtype=np.complex128)
    qubits = [b @ hadamard() @ zero for b in b_layer(cfg, n)]
    return tensor_all(*[q.reshape(2, 1) for q in qubits]).reshape(-1)


def qft_term(cfg: QftConfig, n: int) -> ComplexMatrix:
    """The rank-one term B(n)·H^{⊗k}·M_{0n}, M_{0n} = |0⟩⟨n|."""
    row = np.zeros(cfg.shape.dim)
    row[n] = 1.0
    return freeze(np.outer(qft_column(cfg, n), row))


def iter_qft_terms(cfg: QftConfig) -> Iterator[tuple[int, ComplexMatrix]]:
    for n in range(cfg.shape.dim):
        yield n, qft_term(cfg, n)


def qft_factorization(cfg: QftConfig, cap: Optional[int] = None) -> list[tuple[int, ComplexMatrix]]:
    check_dense_cap(cfg.shape.dim, cap)
    return list(iter_qft_terms(cfg))


def qft_term_product(cfg: QftConfig, n: int) -> ComplexMatrix:
    """The same term as a literal matrix product B(n) @ H^{⊗k} @ M_{0n}."""
    dim = cfg.shape.dim
    return freeze(tensor_all(*b_layer(cfg, n)) @ hadamard_all(cfg.k) @ outer(0, n, dim))


def qft_network(cfg: QftConfig, cap: Optional[int] = None) -> QcpuNetwork:
    """Q(F) = ∏_n Q[B(n) H M_{0n}]."""
    check_dense_cap(2 * cfg.shape.dim, cap)
    label = "F⁻¹" if cfg.inverse else "F"
    return sum_compose((qcpu_of(term, f"B({n})HM_0{n}") for n, term in iter_qft_terms(cfg)), label)


def reference_matrix(cfg: QftConfig) -> ComplexMatrix:
    return fourier_matrix(cfg.shape, inverse=cfg.inverse)


def factorization_residual(cfg: QftConfig) -> float:
    total = sum(term for _, term in iter_qft_terms(cfg))
    return max_abs_difference(total, reference_matrix(cfg))


class QftAlgorithm(BaseAlgorithm):
    NAME = "qft"
    CONFIG_MODEL = QftConfig

    def build_network(self, config: QftConfig) -> QcpuNetwork:
        return qft_network(config, self.cap)

    def _execute(self, config: QftConfig, rng: np.random.Generator) -> dict:
        network = qft_network(config, self.cap)
        f = reference_matrix(config)
        literal = config.model_copy(update={"literal_phases": True})
        literal_residual = factorization_residual(literal)
        logger.info(f"[{self.NAME}] 2^k−1 phase variant misses F by {literal_residual:.3e}")

        q = closed_form(network, self.cap)
        start = StateVector.basis(config.input_index, config.shape.dim)
        out = apply(q, start.tensor(StateVector.basis(0, 2)))
        register, _ = postselect_aux(out, 1)

        residuals = {
            "network_block": max_abs_difference(network.matrix(), f),
            "closed_form": max_abs_difference(q, closed_form(qcpu_of(f), self.cap)),
            "unitarity": unitarity_defect(network.matrix()),
            "output_norm": abs(register.norm() - 1.0),
        }
        if not config.literal_phases:
            residuals["factorization_sum"] = factorization_residual(config)

        return {
            "amplitudes": amplitude_pairs(register.amplitudes),
            "probabilities": probability_map(register.probabilities()),
            "residuals": residuals,
            "details": {
                "factors": len(network),
                "literal_phase_residual": literal_residual,
            },
        }
