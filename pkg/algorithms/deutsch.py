"""
algorithms/deutsch.py

Deutsch's problem: decide whether f: {0,1} → {0,1} is constant or balanced
with a single evaluation.

The QCPU route folds the whole protocol into the single-qubit matrix
V = [[(−)^{f(0)}δ, ε], [ε, (−)^{f(0)}δ]], builds Q(V), acts on |1⟩⊗|0⟩_A and
reads V|1⟩ off the auxiliary |1⟩ branch: register |1⟩ means constant,
register |0⟩ means balanced. δ = 1 when f(0) = f(1); ε_{01} = −ε_{10} = 1.

The textbook route (H⊗H, oracle |i,j⟩→|i,j⊕f(i)⟩, H⊗H on |01⟩) is run
alongside as a cross-check; the two-qubit matrix U equals (H⊗H)·U_f·(H⊗H).
"""

import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from algorithms.base_algorithm import BaseAlgorithm
from harness.report import amplitude_pairs, probability_map
from operators.dense import (
    ComplexMatrix,
    StateVector,
    apply,
    freeze,
    identity,
    max_abs_difference,
    tensor,
)
from operators.gates import hadamard, pauli_x
from qcpu.composition import postselect_aux
from qcpu.network import QcpuNetwork, closed_form, qcpu_of

logger = logging.getLogger(__name__)

NAMED_FUNCTIONS = {
    "f1": (0, 0),
    "f2": (1, 1),
    "f3": (0, 1),
    "f4": (1, 0),
}


class Classification(str, Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"

    @property
    def output_bit(self) -> int:
        return 0 if self is Classification.CONSTANT else 1

    def describe(self) -> str:
        return f"{self.value} (output {self.output_bit})"


class DeutschFunction(BaseModel):
    model_config = ConfigDict(frozen=True)

    f0: int = Field(ge=0, le=1)
    f1: int = Field(ge=0, le=1)

    @classmethod
    def named(cls, name: str) -> "DeutschFunction":
        try:
            f0, f1 = NAMED_FUNCTIONS[name]
        except KeyError:
            raise ValueError(f"Unknown function '{name}' (choose from {', '.join(NAMED_FUNCTIONS)})")
        return cls(f0=f0, f1=f1)

    @property
    def name(self) -> str:
        return next(k for k, v in NAMED_FUNCTIONS.items() if v == (self.f0, self.f1))

    @property
    def delta(self) -> int:
        return 1 if self.f0 == self.f1 else 0

    @property
    def epsilon(self) -> int:
        return {(0, 1): 1, (1, 0): -1}.get((self.f0, self.f1), 0)

    @property
    def sign(self) -> int:
        return -1 if self.f0 else 1

    @property
    def expected(self) -> Classification:
        return Classification.CONSTANT if self.delta else Classification.BALANCED


# ─── Matrices ────────────────────────────────────────────────────────────────

def deutsch_u(f: DeutschFunction) -> ComplexMatrix:
    d = f.sign * f.delta
    e = f.epsilon
    return freeze([
        [1, 0, 0, 0],
        [0, d, 0, e],
        [0, 0, 1, 0],
        [0, e, 0, d],
    ])


def deutsch_u_tensor_sum(f: DeutschFunction) -> ComplexMatrix:
    """I⊗diag(1, (−)^{f(0)}δ) + σ₁⊗diag(0, ε)."""
    return freeze(
        tensor(identity(2), np.diag([1, f.sign * f.delta]))
        + tensor(pauli_x(), np.diag([0, f.epsilon]))
    )


def deutsch_v(f: DeutschFunction) -> ComplexMatrix:
    d = f.sign * f.delta
    e = f.epsilon
    return freeze([[d, e], [e, d]])


def deutsch_oracle(f: DeutschFunction) -> ComplexMatrix:
    """U_f |i, j⟩ = |i, j ⊕ f(i)⟩."""
    u = np.zeros((4, 4))
    values = (f.f0, f.f1)
    for i in (0, 1):
        for j in (0, 1):
            u[2 * i + (j ^ values[i]), 2 * i + j] = 1
    return freeze(u)


# ─── Routes ──────────────────────────────────────────────────────────────────

def textbook_final_state(f: DeutschFunction) -> StateVector:
    hh = tensor(hadamard(), hadamard())
    start = StateVector.basis(1, 4)  # |01⟩
    return apply(hh @ deutsch_oracle(f) @ hh, start)


def classify_textbook(f: DeutschFunction) -> tuple[Classification, float]:
    """Measure the first qubit of the textbook final state."""
    p = textbook_final_state(f).probabilities()
    p_one = float(p[2] + p[3])
    if p_one > 0.5:
        return Classification.BALANCED, p_one
    return Classification.CONSTANT, 1.0 - p_one


def deutsch_network(f: DeutschFunction) -> QcpuNetwork:
    return qcpu_of(deutsch_v(f), f"V({f.name})")


def classify_qcpu(f: DeutschFunction) -> tuple[Classification, StateVector, float]:
    """Classification, postselected register state and its probability."""
    q = closed_form(deutsch_network(f))
    out = apply(q, StateVector.basis(1, 2).tensor(StateVector.basis(0, 2)))
    register, _ = postselect_aux(out, 1)
    p = register.probabilities()
    index = int(np.argmax(p))
    classification = Classification.CONSTANT if index == 1 else Classification.BALANCED
    return classification, register, float(p[index])


class DeutschAlgorithm(BaseAlgorithm):
    NAME = "deutsch"
    CONFIG_MODEL = DeutschFunction
    TOLERANCES = {
        "routes_disagree": 0.0,
        "tensor_sum_form": 0.0,
    }

    def build_network(self, config: DeutschFunction) -> QcpuNetwork:
        return deutsch_network(config)

    def _execute(self, config: DeutschFunction, rng: np.random.Generator) -> dict:
        classification, register, probability = classify_qcpu(config)
        textbook, textbook_probability = classify_textbook(config)
        hh = tensor(hadamard(), hadamard())
        if textbook is not classification:
            logger.warning(f"[{self.NAME}] QCPU route says {classification.value}, textbook says {textbook.value}")

        return {
            "amplitudes": amplitude_pairs(register.amplitudes),
            "probabilities": probability_map(register.probabilities()),
            "outcome": classification.value,
            "residuals": {
                "qcpu_probability": abs(probability - 1.0),
                "textbook_probability": abs(textbook_probability - 1.0),
                "routes_disagree": 0.0 if textbook is classification else 1.0,
                "tensor_sum_form": max_abs_difference(deutsch_u(config), deutsch_u_tensor_sum(config)),
                "conjugated_oracle": max_abs_difference(deutsch_u(config), hh @ deutsch_oracle(config) @ hh),
            },
            "details": {
                "function": config.name,
                "output_bit": classification.output_bit,
                "textbook_outcome": textbook.value,
            },
        }


def run_deutsch(f: DeutschFunction, settings=None, seed: int = 0):
    """Classification plus the full report."""
    report = DeutschAlgorithm(settings).run(f, seed)
    return Classification(report.outcome), report
