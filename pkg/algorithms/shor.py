"""
algorithms/shor.py

Shor's order finding, two ways.

Dense operators (small registers only):
    U(Shor) = (F⊗I₂)·M(u)·G·H,   M(u) = I₁⊗|u⟩⟨u|,
    G = Σ_n |n⟩|a^n mod N⟩⟨n|⟨0|   (annihilates |n⟩|s⟩ for s ≠ 0),
and the scalable network Q̄(Shor) built from the same four operands, with
Q(H) itself assembled as a connector chain over single-qubit Hadamards.

Structured pipeline (run_shor): the joint state is held as a 2^k × 2^{k2}
array, G is a permutation of amplitudes, the second-register measurement is
sampled, and the first-register transform is an orthonormal FFT.

The first register has k qubits, the second k2 = ⌈log₂ N⌉; joint basis index
is n·2^{k2} + s. H is the normalized uniform-superposition layer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from algorithms.base_algorithm import BaseAlgorithm
from algorithms.number_theory import (
    ShorFailure,
    continued_fraction_period,
    factors_from_period,
    power_residues,
)
from harness.report import probability_map
from harness.rng import make_rng, sample_index
from operators.dense import (
    ComplexMatrix,
    RegisterShape,
    StateVector,
    check_dense_cap,
    freeze,
    identity,
    max_abs_difference,
    projector,
    tensor,
    tensor_all,
)
from operators.errors import BasisIndexError, ConsistencyError, DimensionMismatchError, ZeroProbabilityError
from operators.gates import fourier_matrix, hadamard, hadamard_all
from qcpu.composition import ComposedNetwork, ScalableNetwork, product_compose, scalable_product

logger = logging.getLogger(__name__)

NEGLIGIBLE = 1e-15
# amplitudes the structured pipeline holds at once (64 MiB of complex128)
MAX_STATE_DIM = 1 << 22


class ShorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    composite: int = Field(ge=4)
    base: int = Field(ge=2)
    k: int = Field(ge=1)
    k2: int = Field(ge=1)
    max_attempts: int = Field(8, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_registers(cls, data):
        if isinstance(data, dict) and data.get("composite") is not None:
            n = int(data["composite"])
            data = dict(data)
            if data.get("k2") is None:
                data["k2"] = (n - 1).bit_length()
            if data.get("k") is None:
                data["k"] = (n * n - 1).bit_length()
        return data

    @model_validator(mode="after")
    def _check_ranges(self):
        if not 1 < self.base < self.composite:
            raise ValueError(f"base must satisfy 1 < a < N, got a={self.base}, N={self.composite}")
        if (1 << self.k2) < self.composite:
            raise ValueError(f"second register too small: 2^{self.k2} < {self.composite}")
        return self

    @property
    def first_dim(self) -> int:
        return 1 << self.k

    @property
    def second_dim(self) -> int:
        return 1 << self.k2

    @property
    def total_dim(self) -> int:
        return self.first_dim * self.second_dim

    @property
    def coprime(self) -> bool:
        return gcd(self.base, self.composite) == 1

    @property
    def meets_recommended_size(self) -> bool:
        return self.first_dim >= self.composite ** 2

    def check_state_size(self) -> None:
        check_dense_cap(
            self.total_dim,
            MAX_STATE_DIM,
            f"Shor register state (2^{self.k}·2^{self.k2})",
            "use smaller --k/--k2 or a smaller N",
        )

    def check_residue(self, residue: int) -> int:
        if not 0 <= residue < self.second_dim:
            raise BasisIndexError(f"Residue {residue} out of range for 2^{self.k2}")
        return residue


@dataclass(frozen=True, eq=False)
class ShorRun:
    config: ShorConfig
    measured_residue: Optional[int] = None
    residue_probability: Optional[float] = None
    post_measure_state: Optional[StateVector] = None
    dft_distribution: Optional[np.ndarray] = None
    sampled_y: Optional[int] = None
    period_candidate: Optional[int] = None
    factors: Optional[tuple[int, int]] = None
    failure: Optional[ShorFailure] = None
    classical_shortcut: bool = False

    @property
    def succeeded(self) -> bool:
        return self.factors is not None


# ─── Dense operators ─────────────────────────────────────────────────────────

def residue_table(cfg: ShorConfig) -> np.ndarray:
    cfg.check_state_size()
    return np.array(power_residues(cfg.base, cfg.composite, cfg.first_dim), dtype=np.int64)


def shor_hadamard_prep(cfg: ShorConfig, cap: Optional[int] = None) -> ComplexMatrix:
    """H^{⊗k} on the first register, identity on the second."""
    check_dense_cap(cfg.total_dim, cap)
    return tensor(hadamard_all(cfg.k), identity(cfg.second_dim))


def shor_g(cfg: ShorConfig, cap: Optional[int] = None) -> ComplexMatrix:
    check_dense_cap(cfg.total_dim, cap)
    s = cfg.second_dim
    g = np.zeros((cfg.total_dim, cfg.total_dim), dtype=np.complex128)
    for n, residue in enumerate(residue_table(cfg)):
        g[n * s + residue, n * s] = 1.0
    return freeze(g)


def shor_measurement(cfg: ShorConfig, residue: int, cap: Optional[int] = None) -> ComplexMatrix:
    """M(u) = I₁⊗|u⟩⟨u|."""
    check_dense_cap(cfg.total_dim, cap)
    cfg.check_residue(residue)
    return tensor(identity(cfg.first_dim), projector(residue, cfg.second_dim))


def shor_dft(cfg: ShorConfig, cap: Optional[int] = None) -> ComplexMatrix:
    check_dense_cap(cfg.total_dim, cap)
    return tensor(fourier_matrix(RegisterShape(cfg.k)), identity(cfg.second_dim))


def shor_u(cfg: ShorConfig, residue: int, cap: Optional[int] = None) -> ComplexMatrix:
    """(F⊗I₂)·M(u)·G·H as a literal product of the four matrices."""
    return freeze(
        shor_dft(cfg, cap) @ shor_measurement(cfg, residue, cap) @ shor_g(cfg, cap) @ shor_hadamard_prep(cfg, cap)
    )


def single_qubit_hadamard(cfg: ShorConfig, qubit: int) -> ComplexMatrix:
    """H_j ⊗ I₂: Hadamard on qubit j (1 = most significant) of the first register."""
    if not 1 <= qubit <= cfg.k:
        raise BasisIndexError(f"Qubit {qubit} out of range for a {cfg.k}-qubit register")
    return tensor_all(
        identity(1 << (qubit - 1)),
        hadamard(),
        identity(1 << (cfg.k - qubit)),
        identity(cfg.second_dim),
    )


def shor_hadamard_chain(cfg: ShorConfig, cap: Optional[int] = None) -> ComposedNetwork:
    """Q(H) as a connector chain over the single-qubit blocks Q(H_j⊗I₂)."""
    check_dense_cap(2 * cfg.total_dim, cap)
    blocks = [single_qubit_hadamard(cfg, j) for j in range(1, cfg.k + 1)]
    return product_compose(blocks, [f"H{j}⊗I₂" for j in range(1, cfg.k + 1)], cap)


def shor_network(cfg: ShorConfig, residue: int, cap: Optional[int] = None, tol: float = 1e-12) -> ScalableNetwork:
    """Q̄(Shor) for measured residue u; its out block must equal U(Shor)."""
    check_dense_cap(2 * cfg.total_dim, cap)
    chain = shor_hadamard_chain(cfg, cap)
    h_prep = chain.register_block()
    chain_residual = max_abs_difference(h_prep, shor_hadamard_prep(cfg, cap))
    if chain_residual > tol:
        raise ConsistencyError(f"Hadamard chain misses H^⊗k⊗I by {chain_residual:.3e}")

    network = scalable_product(
        [shor_dft(cfg, cap), shor_measurement(cfg, residue, cap), shor_g(cfg, cap), h_prep],
        ["F⊗I₂", f"M({residue})", "G", "H"],
        cap,
    )
    residual = max_abs_difference(network.out_block(), shor_u(cfg, residue, cap))
    if residual > tol:
        raise ConsistencyError(f"Q̄(Shor) out block misses U(Shor) by {residual:.3e}")
    logger.debug(f"Built Q̄(Shor) for u={residue}, out block residual {residual:.3e}")
    return network


# ─── Structured pipeline ─────────────────────────────────────────────────────

def _as_registers(state: StateVector, cfg: ShorConfig) -> np.ndarray:
    if state.dim != cfg.total_dim:
        raise DimensionMismatchError(f"State of dim {state.dim} does not match 2^{cfg.k}·2^{cfg.k2}")
    return state.amplitudes.reshape(cfg.first_dim, cfg.second_dim)


def prepared_state(cfg: ShorConfig) -> StateVector:
    """G·H|0⟩|0⟩ = (1/√2^k) Σ_n |n⟩|a^n mod N⟩."""
    amps = np.zeros((cfg.first_dim, cfg.second_dim), dtype=np.complex128)
    amps[np.arange(cfg.first_dim), residue_table(cfg)] = 1.0 / np.sqrt(cfg.first_dim)
    return StateVector(amps.reshape(-1))


def residue_distribution(cfg: ShorConfig) -> np.ndarray:
    """Probability of each second-register outcome u."""
    counts = np.bincount(residue_table(cfg), minlength=cfg.second_dim)
    return counts / cfg.first_dim


def shor_measure_second(state: StateVector, residue: int, cfg: ShorConfig) -> tuple[StateVector, float]:
    """Project the second register onto |u⟩ and renormalize."""
    cfg.check_residue(residue)
    amps = _as_registers(state, cfg)
    column = amps[:, residue]
    probability = float(np.vdot(column, column).real)
    if probability == 0.0:
        raise ZeroProbabilityError(f"Residue {residue} has zero probability")
    out = np.zeros_like(amps)
    out[:, residue] = column / np.sqrt(probability)
    return StateVector(out.reshape(-1)), probability


def apply_first_register_dft(state: StateVector, cfg: ShorConfig) -> StateVector:
    """F⊗I₂ with F[y, x] = e^{2πi xy/2^k}/√2^k, i.e. the orthonormal inverse FFT."""
    amps = _as_registers(state, cfg)
    return StateVector(np.fft.ifft(amps, axis=0, norm="ortho").reshape(-1))


def first_register_distribution(state: StateVector, cfg: ShorConfig) -> np.ndarray:
    return np.sum(np.abs(_as_registers(state, cfg)) ** 2, axis=1)


def first_register_support(state: StateVector, cfg: ShorConfig) -> np.ndarray:
    return np.nonzero(first_register_distribution(state, cfg) > NEGLIGIBLE)[0]


def _classical_outcome(cfg: ShorConfig, y: int) -> tuple[Optional[int], Optional[tuple[int, int]], Optional[ShorFailure]]:
    r = continued_fraction_period(y, cfg.first_dim, cfg.composite, cfg.base)
    if r is None:
        return None, None, ShorFailure.NO_INFORMATION if y == 0 else ShorFailure.NO_PERIOD
    result = factors_from_period(cfg.base, cfg.composite, r)
    if isinstance(result, ShorFailure):
        return r, None, result
    return r, result, None


def run_shor(cfg: ShorConfig, seed: int = 0, rng: Optional[np.random.Generator] = None) -> ShorRun:
    """One pass of the five steps with sampled measurements."""
    if not cfg.coprime:
        g = gcd(cfg.base, cfg.composite)
        logger.info(f"gcd({cfg.base}, {cfg.composite}) = {g}; factors found without simulation")
        return ShorRun(config=cfg, factors=tuple(sorted((g, cfg.composite // g))), classical_shortcut=True)

    rng = rng if rng is not None else make_rng(seed, "shor")
    state = prepared_state(cfg)
    residue = sample_index(rng, residue_distribution(cfg))
    post, probability = shor_measure_second(state, residue, cfg)
    final = apply_first_register_dft(post, cfg)
    distribution = first_register_distribution(final, cfg)
    y = sample_index(rng, distribution)
    r, factors, failure = _classical_outcome(cfg, y)
    logger.debug(f"Shor pass: u={residue} (p={probability:.4f}) y={y} r={r} -> {factors or failure}")
    return ShorRun(
        config=cfg,
        measured_residue=residue,
        residue_probability=probability,
        post_measure_state=post,
        dft_distribution=distribution,
        sampled_y=y,
        period_candidate=r,
        factors=factors,
        failure=failure,
    )


def run_shor_with_retries(
    cfg: ShorConfig, seed: int = 0, rng: Optional[np.random.Generator] = None
) -> tuple[ShorRun, int]:
    """Repeat the quantum part on one stream until factors appear; returns the last run and passes used."""
    rng = rng if rng is not None else make_rng(seed, "shor")
    run = None
    for attempt in range(1, cfg.max_attempts + 1):
        run = run_shor(cfg, rng=rng)
        if run.succeeded:
            return run, attempt
        logger.info(f"Shor attempt {attempt} failed: {run.failure.value}")
    return run, cfg.max_attempts


def shor_success_probability(cfg: ShorConfig) -> tuple[float, set[tuple[int, int]]]:
    """Exact single-pass success probability by enumerating every (u, y) branch."""
    if not cfg.coprime:
        g = gcd(cfg.base, cfg.composite)
        return 1.0, {tuple(sorted((g, cfg.composite // g)))}
    state = prepared_state(cfg)
    total = 0.0
    found: set[tuple[int, int]] = set()
    for residue, p_residue in enumerate(residue_distribution(cfg)):
        if p_residue == 0:
            continue
        post, _ = shor_measure_second(state, residue, cfg)
        distribution = first_register_distribution(apply_first_register_dft(post, cfg), cfg)
        for y in np.nonzero(distribution > NEGLIGIBLE)[0]:
            _, factors, _ = _classical_outcome(cfg, int(y))
            if factors is not None:
                total += p_residue * float(distribution[y])
                found.add(factors)
    return total, found


class ShorAlgorithm(BaseAlgorithm):
    NAME = "shor"
    CONFIG_MODEL = ShorConfig
    TOLERANCES = {
        "dft_normalization": 1e-10,
        "post_measure_norm": 1e-12,
        "factor_product": 0.0,
    }

    def build_network(self, config: ShorConfig) -> ScalableNetwork:
        residue = int(np.argmax(residue_distribution(config)))
        return shor_network(config, residue, self.cap, self.settings.tolerance)

    def _execute(self, config: ShorConfig, rng: np.random.Generator) -> dict:
        if not config.meets_recommended_size:
            logger.info(f"[{self.NAME}] 2^{config.k} < N²; peaks may be too coarse for continued fractions")
        run, attempts = run_shor_with_retries(config, rng=rng)
        success_probability, _ = shor_success_probability(config)

        residuals = {}
        details = {
            "attempts": attempts,
            "classical_shortcut": run.classical_shortcut,
            "success_probability": success_probability,
        }
        fields = {"residuals": residuals, "details": details}
        if run.factors is not None:
            fields["factors"] = list(run.factors)
            residuals["factor_product"] = float(abs(run.factors[0] * run.factors[1] - config.composite))
        if run.failure is not None:
            details["failure"] = run.failure.value
        if run.classical_shortcut:
            return fields

        fields["outcome"] = run.sampled_y
        fields["probabilities"] = probability_map(run.dft_distribution, NEGLIGIBLE)
        residuals["dft_normalization"] = abs(float(run.dft_distribution.sum()) - 1.0)
        residuals["post_measure_norm"] = abs(run.post_measure_state.norm() - 1.0)
        details.update({
            "measured_residue": run.measured_residue,
            "residue_probability": run.residue_probability,
            "period_candidate": run.period_candidate,
        })
        return fields
