"""
qcpu/composition.py

Product composition of QCPU blocks through the Connector:

    Q(U_1⋯U_r) = I⊗I_A + C†(∏_j C Q(U_j)) C C†

and its scalable form, which drops the identity term and runs next to an
untouched input copy of the register:

    Q̄(U_1⋯U_r) = (I_R)_input ⊗ [C†(∏_j C Q(U_j)) C C†]_out

The operand list [U_1, …, U_r] composes right-to-left: U_r acts first.
Operators are evaluated factor by factor from the connector chain, never from the
closed form, so tests can compare the two.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from operators.dense import (
    ComplexMatrix,
    StateVector,
    check_dense_cap,
    freeze,
)
from operators.errors import DimensionMismatchError, ZeroProbabilityError
from qcpu.algebra import Connector
from qcpu.network import QcpuNetwork, qcpu_of

logger = logging.getLogger(__name__)

StepKind = Literal["connector", "qcpu", "bypass"]


@dataclass(frozen=True)
class TraceStep:
    kind: StepKind
    label: str
    network: Optional[QcpuNetwork] = None


@dataclass(frozen=True)
class ComposedNetwork:
    """Dense 2N×2N operator plus the chain that produced it, in application order."""

    operator: ComplexMatrix
    construction_trace: tuple[TraceStep, ...]
    label: str = ""

    @property
    def register_dim(self) -> int:
        return self.operator.shape[0] // 2

    def register_block(self) -> ComplexMatrix:
        """U read back from I + U⊗c†: rows carry aux |1⟩, columns aux |0⟩."""
        return freeze(self.operator[1::2, ::2])

    def qcpu_blocks(self) -> list[TraceStep]:
        return [s for s in self.construction_trace if s.kind == "qcpu"]


@dataclass(frozen=True)
class ScalableNetwork:
    input_dim: int
    out_operator: ComplexMatrix
    construction_trace: tuple[TraceStep, ...] = ()
    label: str = ""

    @property
    def register_dim(self) -> int:
        return self.out_operator.shape[0] // 2

    def out_block(self) -> ComplexMatrix:
        return freeze(self.out_operator[1::2, ::2])

    def total_operator(self, cap: Optional[int] = None) -> ComplexMatrix:
        dim = self.input_dim * self.out_operator.shape[0]
        check_dense_cap(dim, cap, "scalable network")
        return freeze(np.kron(np.eye(self.input_dim), self.out_operator))

    def prepare(self, psi: StateVector) -> StateVector:
        """(|Ψ⟩)_input ⊗ (|Ψ⟩ ⊗ |0⟩_A)_out."""
        if psi.dim != self.input_dim or psi.dim != self.register_dim:
            raise DimensionMismatchError(
                f"Prepared state of dim {psi.dim} does not fit input {self.input_dim} / out {self.register_dim}"
            )
        return psi.tensor(psi.tensor(StateVector.basis(0, 2)))

    def readout(self, psi: StateVector) -> tuple[StateVector, StateVector]:
        """Input copy and out block after acting on the prepared state."""
        out_in = psi.tensor(StateVector.basis(0, 2))
        return psi, StateVector(self.out_operator @ out_in.amplitudes)

    def apply_prepared(self, psi: StateVector) -> StateVector:
        """The full output state, evaluated block-wise without the total operator."""
        kept, out = self.readout(psi)
        return kept.tensor(out)


# ─── Connector chains ────────────────────────────────────────────────────────

def _operand_networks(us: Sequence[ComplexMatrix], labels: Optional[Sequence[str]]) -> list[QcpuNetwork]:
    if not us:
        raise ValueError("Product composition needs at least one operand")
    if labels is not None and len(labels) != len(us):
        raise ValueError(f"Got {len(labels)} labels for {len(us)} operands")
    dim = None
    nets = []
    for j, u in enumerate(us):
        u = np.asarray(u)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(f"Operand {j} is not square: shape {u.shape}")
        if dim is None:
            dim = u.shape[0]
        elif u.shape[0] != dim:
            raise DimensionMismatchError(f"Operand {j} has dimension {u.shape[0]}, expected {dim}")
        nets.append(qcpu_of(u, labels[j] if labels else f"U{j + 1}"))
    return nets


# Columns are interleaved as 2m + a with the auxiliary bit a least significant.
# The chain starts with C†, whose auxiliary-0 rows are zero, and right
# multiplication keeps them zero, so only the auxiliary-1 rows are carried.

def _times_lower(rows: np.ndarray) -> np.ndarray:
    """rows · (I⊗c)"""
    out = np.zeros_like(rows)
    out[:, 1::2] = rows[:, 0::2]
    return out


def _times_raise(rows: np.ndarray) -> np.ndarray:
    """rows · (I⊗c†)"""
    out = np.zeros_like(rows)
    out[:, 0::2] = rows[:, 1::2]
    return out


def _times_qcpu(rows: np.ndarray, net: QcpuNetwork) -> np.ndarray:
    """rows · (I + U⊗c†), with U reassembled from the block's factors."""
    out = rows.copy()
    if np.array_equal(net.rows, net.cols):
        diagonal = np.zeros(net.register_dim, dtype=np.complex128)
        np.add.at(diagonal, net.rows, net.coeffs)
        out[:, 0::2] += rows[:, 1::2] * diagonal
    else:
        out[:, 0::2] += rows[:, 1::2] @ net.matrix()
    return out


def _connector_chain(
    nets: list[QcpuNetwork], cap: Optional[int]
) -> tuple[np.ndarray, tuple[TraceStep, ...]]:
    """C†(∏_j C Q(U_j)) C C† together with its steps in application order."""
    dim = 2 * nets[0].register_dim
    check_dense_cap(dim, cap)

    rows = np.array(Connector(nets[0].register_dim).raise_()[1::2, :])
    written: list[TraceStep] = [TraceStep("connector", "C†")]
    for net in nets:
        rows = _times_qcpu(_times_lower(rows), net)
        written += [TraceStep("connector", "C"), TraceStep("qcpu", f"Q({net.label})", net)]
    rows = _times_raise(_times_lower(rows))
    written += [TraceStep("connector", "C"), TraceStep("connector", "C†")]

    chain = np.zeros((dim, dim), dtype=np.complex128)
    chain[1::2, :] = rows
    return chain, tuple(reversed(written))


def product_compose(
    us: Sequence[ComplexMatrix],
    labels: Optional[Sequence[str]] = None,
    cap: Optional[int] = None,
) -> ComposedNetwork:
    """I + (U_1⋯U_r)⊗c†, built from the literal connector chain."""
    nets = _operand_networks(us, labels)
    chain, trace = _connector_chain(nets, cap)
    operator = np.eye(chain.shape[0]) + chain
    name = "·".join(net.label for net in nets)
    logger.debug(f"Composed {len(nets)} block(s) into {name} on dim {chain.shape[0]}")
    return ComposedNetwork(
        operator=freeze(operator),
        construction_trace=trace + (TraceStep("bypass", "I⊗I_A"),),
        label=name,
    )


def scalable_product(
    us: Sequence[ComplexMatrix],
    labels: Optional[Sequence[str]] = None,
    cap: Optional[int] = None,
) -> ScalableNetwork:
    """Connector chain without the identity term, next to an input register copy."""
    nets = _operand_networks(us, labels)
    chain, trace = _connector_chain(nets, cap)
    return ScalableNetwork(
        input_dim=nets[0].register_dim,
        out_operator=freeze(chain),
        construction_trace=trace,
        label="·".join(net.label for net in nets),
    )


# ─── Read-out ────────────────────────────────────────────────────────────────

def postselect_aux(state: StateVector, outcome: int) -> tuple[StateVector, float]:
    """Keep the auxiliary |outcome⟩ branch; returns the renormalized rest and its weight."""
    if outcome not in (0, 1):
        raise ValueError(f"Auxiliary outcome must be 0 or 1, got {outcome}")
    if state.dim % 2:
        raise DimensionMismatchError(f"State of odd dimension {state.dim} has no auxiliary qubit")
    branch = state.amplitudes.reshape(-1, 2)[:, outcome]
    weight = float(np.vdot(branch, branch).real)
    if weight == 0.0:
        raise ZeroProbabilityError(f"Auxiliary outcome {outcome} has zero weight")
    return StateVector(branch / np.sqrt(weight)), weight
