"""
Tests for Grover search as a composed QCPU network.

Covers:
- R₀, R₂, R₁ = 2|s⟩⟨s| − I as dense matrices
- QCPU forms of R₀ and R₂ built from two exponentials, compared exactly
- The leading-Q(I) variant shifts the register block by exactly I
- Composed network vs (R₁R₂)^t·H, success probability vs sin²((2t+1)θ)
- GroverConfig defaults and GroverAlgorithm reports
"""

import numpy as np
import pytest
from pydantic import ValidationError

from algorithms.grover import (
    GroverAlgorithm,
    GroverConfig,
    default_iterations,
    grover_final_state,
    grover_network,
    grover_operands,
    grover_oracle_probability,
    grover_qcpu_r0,
    grover_qcpu_r2,
    grover_r0,
    grover_r1,
    grover_r2,
    grover_reference,
    grover_success_probability,
    run_grover,
)
from operators.dense import RegisterShape, identity, max_abs_difference
from operators.errors import BasisIndexError, DenseCapExceededError
from qcpu.network import closed_form, qcpu_of


class TestGroverConfig:

    @pytest.mark.parametrize("k, t", [(1, 1), (2, 1), (3, 2), (4, 3), (6, 6), (10, 25)])
    def test_default_iterations(self, k, t):
        assert default_iterations(k) == t
        assert GroverConfig(k=k, target=0).iterations == t

    def test_explicit_zero_iterations(self):
        assert GroverConfig(k=3, target=1, iterations=0).iterations == 0

    def test_target_range(self):
        with pytest.raises(ValidationError):
            GroverConfig(k=2, target=4)

    def test_negative_iterations(self):
        with pytest.raises(ValidationError):
            GroverConfig(k=2, target=0, iterations=-1)


# ═══════════════════════════════════════════════════════════════════
# Reflections
# ═══════════════════════════════════════════════════════════════════


class TestReflections:

    def test_r0(self):
        np.testing.assert_array_equal(grover_r0(RegisterShape(2)), np.diag([1, -1, -1, -1]))

    def test_r2(self):
        np.testing.assert_array_equal(grover_r2(RegisterShape(2), 2), np.diag([1, 1, -1, 1]))

    def test_r2_target_range(self):
        with pytest.raises(BasisIndexError):
            grover_r2(RegisterShape(2), 4)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_r1_reflects_about_uniform(self, k):
        dim = 1 << k
        s = np.full(dim, 1 / np.sqrt(dim))
        np.testing.assert_allclose(grover_r1(RegisterShape(k)), 2 * np.outer(s, s) - np.eye(dim), atol=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_qcpu_r0_exact(self, k):
        shape = RegisterShape(k)
        np.testing.assert_array_equal(grover_qcpu_r0(shape), closed_form(qcpu_of(grover_r0(shape))))

    @pytest.mark.parametrize("target", range(4))
    def test_qcpu_r2_exact(self, target):
        shape = RegisterShape(2)
        np.testing.assert_array_equal(grover_qcpu_r2(shape, target), closed_form(qcpu_of(grover_r2(shape, target))))

    def test_literal_r2_shifted_by_identity(self):
        shape = RegisterShape(3)
        literal = grover_qcpu_r2(shape, 5, literal=True)[1::2, ::2]
        corrected = grover_qcpu_r2(shape, 5)[1::2, ::2]
        np.testing.assert_array_equal(literal - corrected, identity(8))
        np.testing.assert_array_equal(literal, 2 * np.eye(8) - 2 * np.diag(np.eye(8)[5]))


# ═══════════════════════════════════════════════════════════════════
# Network
# ═══════════════════════════════════════════════════════════════════


class TestGroverNetwork:

    def test_operand_layout(self):
        ops, labels = grover_operands(GroverConfig(k=2, target=1, iterations=2))
        assert len(ops) == 9
        assert labels == ["F⁻¹#1", "R0#1", "F#1", "R2#1", "F⁻¹#2", "R0#2", "F#2", "R2#2", "H"]

    def test_k2_exact_hit(self):
        cfg = GroverConfig(k=2, target=3)
        assert cfg.iterations == 1
        probs = grover_final_state(grover_network(cfg)).probabilities()
        np.testing.assert_allclose(probs, [0, 0, 0, 1], atol=1e-12)

    def test_k3_two_iterations(self):
        p = grover_success_probability(GroverConfig(k=3, target=5, iterations=2))
        assert p == pytest.approx(0.9453125, abs=1e-9)

    @pytest.mark.parametrize("target", [0, 7, 15])
    def test_k4_formula(self, target):
        cfg = GroverConfig(k=4, target=target)
        assert grover_success_probability(cfg) == pytest.approx(grover_oracle_probability(4, 3), abs=1e-9)

    def test_zero_iterations_uniform(self):
        probs = grover_final_state(grover_network(GroverConfig(k=3, target=2, iterations=0))).probabilities()
        np.testing.assert_allclose(probs, np.full(8, 1 / 8), atol=1e-12)

    def test_block_matches_reference(self):
        cfg = GroverConfig(k=3, target=6)
        network = grover_network(cfg)
        assert max_abs_difference(network.register_block(), grover_reference(cfg)) <= 1e-12
        assert len(network.qcpu_blocks()) == 4 * cfg.iterations + 1

    def test_cap(self):
        with pytest.raises(DenseCapExceededError):
            grover_network(GroverConfig(k=12, target=0))

    def test_formula(self):
        assert grover_oracle_probability(2, 1) == pytest.approx(1.0)
        assert grover_oracle_probability(3, 0) == pytest.approx(1 / 8)


class TestGroverAlgorithm:

    def test_report(self):
        algorithm = GroverAlgorithm()
        report = algorithm.run(GroverConfig(k=3, target=5), seed=7)
        assert algorithm.failing_residuals(report) == {}
        assert report.details["iterations"] == 2
        assert report.details["qcpu_blocks"] == 9
        assert report.details["literal_r2_discrepancy"] == 1.0
        assert report.details["literal_r2_identity_shift_residual"] == 0.0
        assert report.probability_total() == pytest.approx(1.0, abs=1e-12)
        assert report.outcome in report.probabilities

    def test_seeded_outcome_deterministic(self):
        cfg = GroverConfig(k=4, target=9)
        assert run_grover(cfg, seed=1).outcome == run_grover(cfg, seed=1).outcome

    def test_k2_always_finds_target(self):
        for seed in range(5):
            assert run_grover(GroverConfig(k=2, target=2), seed=seed).outcome == 2
