"""
algorithms/grover.py

Grover search for a single marked index j as one composed QCPU network:

    Q(G) = Q( (F⁻¹R₀F·R₂)^t · H^{⊗k} ),   R₀ = 2|0⟩⟨0| − I,  R₂ = I − 2|j⟩⟨j|

R₁ = F⁻¹R₀F is the reflection about the uniform superposition. The QCPU forms
of the diagonal reflections are built from two nilpotent exponentials each:

    Q(R₀) = exp{2|0⟩⟨0|⊗c†}·exp{−I⊗c†}
    Q(R₂) = exp{−2|j⟩⟨j|⊗c†}·exp{I⊗c†}

The variant with an extra leading Q(I) evaluates to Q(2I − 2|j⟩⟨j|); it is
kept as `literal=True` so the shift can be reported.
"""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from algorithms.base_algorithm import BaseAlgorithm
from harness.report import amplitude_pairs, probability_map
from harness.rng import sample_index
from operators.dense import (
    ComplexMatrix,
    RegisterShape,
    StateVector,
    apply,
    check_dense_cap,
    freeze,
    identity,
    max_abs_difference,
    projector,
)
from operators.gates import fourier_matrix, hadamard_all
from qcpu.algebra import lift_raise, nilpotent_exp
from qcpu.composition import ComposedNetwork, postselect_aux, product_compose
from qcpu.network import closed_form, qcpu_of

logger = logging.getLogger(__name__)


def default_iterations(k: int) -> int:
    """⌊(π/4)·√N⌋ for N = 2^k."""
    return int(np.floor(np.pi / 4.0 * np.sqrt(1 << k)))


class GroverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    target: int = Field(ge=0)
    iterations: int = Field(ge=0)

    @model_validator(mode="before")
    @classmethod
    def _default_iterations(cls, data):
        if isinstance(data, dict) and data.get("iterations") is None and data.get("k") is not None:
            data = {**data, "iterations": default_iterations(int(data["k"]))}
        return data

    @model_validator(mode="after")
    def _target_in_range(self):
        if self.target >= 1 << self.k:
            raise ValueError(f"target {self.target} out of range for k={self.k}")
        return self

    @property
    def shape(self) -> RegisterShape:
        return RegisterShape(self.k)


# ─── Reflections ─────────────────────────────────────────────────────────────

def grover_r0(shape: RegisterShape) -> ComplexMatrix:
    return freeze(2 * projector(0, shape.dim) - identity(shape.dim))


def grover_r2(shape: RegisterShape, target: int) -> ComplexMatrix:
    shape.check_index(target)
    return freeze(identity(shape.dim) - 2 * projector(target, shape.dim))


def grover_r1(shape: RegisterShape) -> ComplexMatrix:
    """F⁻¹R₀F = 2|s⟩⟨s| − I."""
    f = fourier_matrix(shape)
    return freeze(fourier_matrix(shape, inverse=True) @ grover_r0(shape) @ f)


def grover_qcpu_r0(shape: RegisterShape) -> ComplexMatrix:
    dim = shape.dim
    return freeze(
        nilpotent_exp(lift_raise(2 * projector(0, dim)))
        @ nilpotent_exp(lift_raise(-identity(dim)))
    )


def grover_qcpu_r2(shape: RegisterShape, target: int, literal: bool = False) -> ComplexMatrix:
    dim = shape.dim
    shape.check_index(target)
    out = (
        nilpotent_exp(lift_raise(-2 * projector(target, dim)))
        @ nilpotent_exp(lift_raise(identity(dim)))
    )
    if literal:
        out = closed_form(qcpu_of(identity(dim), "I")) @ out
    return freeze(out)


# ─── Network ─────────────────────────────────────────────────────────────────

def grover_operands(
    cfg: GroverConfig,
    qcpu_r0: Optional[ComplexMatrix] = None,
    qcpu_r2: Optional[ComplexMatrix] = None,
) -> tuple[list[ComplexMatrix], list[str]]:
    """[F⁻¹, R₀, F, R₂] × t followed by H^{⊗k}; the last operand acts first.

    R₀ and R₂ are the register blocks of their QCPU forms, which the caller
    may pass in when it has built them already.
    """
    shape = cfg.shape
    r0 = (grover_qcpu_r0(shape) if qcpu_r0 is None else qcpu_r0)[1::2, ::2]
    r2 = (grover_qcpu_r2(shape, cfg.target) if qcpu_r2 is None else qcpu_r2)[1::2, ::2]
    f = fourier_matrix(shape)
    f_inv = fourier_matrix(shape, inverse=True)
    ops: list[ComplexMatrix] = []
    labels: list[str] = []
    for i in range(1, cfg.iterations + 1):
        ops += [f_inv, r0, f, r2]
        labels += [f"F⁻¹#{i}", f"R0#{i}", f"F#{i}", f"R2#{i}"]
    ops.append(hadamard_all(cfg.k))
    labels.append("H")
    return ops, labels


def grover_network(
    cfg: GroverConfig,
    cap: Optional[int] = None,
    qcpu_r0: Optional[ComplexMatrix] = None,
    qcpu_r2: Optional[ComplexMatrix] = None,
) -> ComposedNetwork:
    check_dense_cap(2 * cfg.shape.dim, cap)
    ops, labels = grover_operands(cfg, qcpu_r0, qcpu_r2)
    logger.debug(f"Composing Grover network: k={cfg.k}, target={cfg.target}, t={cfg.iterations}")
    return product_compose(ops, labels, cap)


def grover_reference(cfg: GroverConfig) -> ComplexMatrix:
    """(R₁R₂)^t·H^{⊗k} from dense matrices."""
    step = grover_r1(cfg.shape) @ grover_r2(cfg.shape, cfg.target)
    return freeze(np.linalg.matrix_power(step, cfg.iterations) @ hadamard_all(cfg.k))


def grover_oracle_probability(k: int, iterations: int) -> float:
    """sin²((2t+1)θ) with θ = arcsin(1/√N)."""
    theta = np.arcsin(1.0 / np.sqrt(1 << k))
    return float(np.sin((2 * iterations + 1) * theta) ** 2)


def grover_final_state(network: ComposedNetwork) -> StateVector:
    start = StateVector.basis(0, network.register_dim).tensor(StateVector.basis(0, 2))
    register, _ = postselect_aux(apply(network.operator, start), 1)
    return register


def grover_success_probability(cfg: GroverConfig, cap: Optional[int] = None) -> float:
    return float(grover_final_state(grover_network(cfg, cap)).probabilities()[cfg.target])


class GroverAlgorithm(BaseAlgorithm):
    NAME = "grover"
    CONFIG_MODEL = GroverConfig
    TOLERANCES = {
        "network_block": 1e-10,
        "success_formula": 1e-9,
        "distribution_total": 1e-10,
        "r0_qcpu": 0.0,
        "r2_qcpu": 0.0,
    }

    def build_network(self, config: GroverConfig) -> ComposedNetwork:
        return grover_network(config, self.cap)

    def _execute(self, config: GroverConfig, rng: np.random.Generator) -> dict:
        shape = config.shape
        check_dense_cap(2 * shape.dim, self.cap)
        r0_qcpu = grover_qcpu_r0(shape)
        r2_corrected = grover_qcpu_r2(shape, config.target)
        r2_literal = grover_qcpu_r2(shape, config.target, literal=True)

        network = grover_network(config, self.cap, r0_qcpu, r2_corrected)
        register = grover_final_state(network)
        probs = register.probabilities()
        outcome = sample_index(rng, probs)
        shift = max_abs_difference(r2_literal[1::2, ::2] - r2_corrected[1::2, ::2], identity(shape.dim))
        expected = grover_oracle_probability(config.k, config.iterations)

        return {
            "amplitudes": amplitude_pairs(register.amplitudes),
            "probabilities": probability_map(probs),
            "outcome": outcome,
            "residuals": {
                "network_block": max_abs_difference(network.register_block(), grover_reference(config)),
                "success_formula": abs(float(probs[config.target]) - expected),
                "distribution_total": abs(float(probs.sum()) - 1.0),
                "r0_qcpu": max_abs_difference(r0_qcpu, closed_form(qcpu_of(grover_r0(shape)))),
                "r2_qcpu": max_abs_difference(r2_corrected, closed_form(qcpu_of(grover_r2(shape, config.target)))),
            },
            "details": {
                "iterations": config.iterations,
                "success_probability": float(probs[config.target]),
                "expected_success_probability": expected,
                "literal_r2_discrepancy": max_abs_difference(r2_literal, r2_corrected),
                "literal_r2_identity_shift_residual": shift,
                "qcpu_blocks": len(network.qcpu_blocks()),
            },
        }


def run_grover(cfg: GroverConfig, seed: int = 0, settings=None):
    return GroverAlgorithm(settings).run(cfg, seed)
