"""
Tests for the QFT factorization into rank-one terms.

Covers:
- qubit_angle: exact reduction, literal 2^k−1 variant
- Terms: per-qubit form vs literal product, column contents
- Σ terms = F for k = 1..5; inverse; literal phases miss F
- Q(F) as a sum composition and its closed form
- QftAlgorithm residuals and the postselected output column
"""

import numpy as np
import pytest
from pydantic import ValidationError

from algorithms.qft import (
    QftAlgorithm,
    QftConfig,
    factorization_residual,
    qft_column,
    qft_factorization,
    qft_network,
    qft_term,
    qft_term_product,
    qubit_angle,
    reference_matrix,
)
from operators.dense import RegisterShape, max_abs_difference, unitarity_defect
from operators.errors import DenseCapExceededError
from operators.gates import fourier_matrix, hadamard
from qcpu.network import closed_form, qcpu_of


class TestConfig:

    def test_defaults(self):
        cfg = QftConfig(k=3)
        assert not cfg.inverse and not cfg.literal_phases
        assert cfg.input_index == 0
        assert cfg.shape.dim == 8

    def test_input_range(self):
        with pytest.raises(ValidationError):
            QftConfig(k=2, input_index=4)

    def test_k_positive(self):
        with pytest.raises(ValidationError):
            QftConfig(k=0)


class TestAngles:

    def test_least_significant_qubit(self):
        assert qubit_angle(1, 1, 1) == pytest.approx(np.pi)

    def test_reduced_modulo_register(self):
        """n·2^{j−1} is taken mod 2^k before scaling."""
        assert qubit_angle(3, 3, 3) == pytest.approx(2 * np.pi * 4 / 8)
        assert qubit_angle(4, 2, 2) == 0.0

    def test_literal_variant(self):
        assert qubit_angle(1, 2, 2, literal=True) == pytest.approx(4 * np.pi / 3)


# ═══════════════════════════════════════════════════════════════════
# Factorization
# ═══════════════════════════════════════════════════════════════════


class TestTerms:

    def test_k1_terms_sum_to_hadamard(self):
        cfg = QftConfig(k=1)
        total = sum(term for _, term in qft_factorization(cfg))
        np.testing.assert_allclose(total, hadamard(), atol=1e-15)

    def test_k2_column_one(self):
        np.testing.assert_allclose(qft_column(QftConfig(k=2), 1), [0.5, 0.5j, -0.5, -0.5j], atol=1e-15)

    def test_term_is_rank_one_in_column_n(self):
        cfg = QftConfig(k=2)
        term = qft_term(cfg, 2)
        assert np.count_nonzero(np.abs(term).sum(axis=0) > 0) == 1
        np.testing.assert_allclose(term[:, 2], fourier_matrix(cfg.shape)[:, 2], atol=1e-15)

    @pytest.mark.parametrize("n", range(8))
    def test_per_qubit_form_matches_product(self, n):
        cfg = QftConfig(k=3)
        np.testing.assert_allclose(qft_term(cfg, n), qft_term_product(cfg, n), atol=1e-14)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_sum_is_fourier(self, k):
        assert factorization_residual(QftConfig(k=k)) <= 1e-12

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_inverse(self, k):
        cfg = QftConfig(k=k, inverse=True)
        assert factorization_residual(cfg) <= 1e-12
        np.testing.assert_allclose(reference_matrix(cfg), fourier_matrix(cfg.shape).conj().T, atol=1e-14)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_literal_phases_miss_fourier(self, k):
        assert factorization_residual(QftConfig(k=k, literal_phases=True)) > 1e-3

    def test_cap(self):
        with pytest.raises(DenseCapExceededError):
            qft_factorization(QftConfig(k=4), cap=8)


# ═══════════════════════════════════════════════════════════════════
# Networks
# ═══════════════════════════════════════════════════════════════════


class TestNetwork:

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_block_is_fourier(self, k):
        cfg = QftConfig(k=k)
        net = qft_network(cfg)
        np.testing.assert_allclose(net.matrix(), fourier_matrix(cfg.shape), atol=1e-12)
        assert net.label == "F"

    def test_closed_form_matches_direct(self):
        cfg = QftConfig(k=3)
        direct = closed_form(qcpu_of(fourier_matrix(cfg.shape)))
        assert max_abs_difference(closed_form(qft_network(cfg)), direct) <= 1e-12

    def test_inverse_label(self):
        assert qft_network(QftConfig(k=2, inverse=True)).label == "F⁻¹"

    def test_cap_counts_auxiliary(self):
        with pytest.raises(DenseCapExceededError):
            qft_network(QftConfig(k=3), cap=8)

    def test_network_unitary_block(self):
        assert unitarity_defect(qft_network(QftConfig(k=4)).matrix()) <= 1e-12


class TestQftAlgorithm:

    def test_run_on_basis_input(self):
        algorithm = QftAlgorithm()
        report = algorithm.run(QftConfig(k=2, input_index=1))
        amplitudes = [complex(re, im) for re, im in report.amplitudes]
        np.testing.assert_allclose(amplitudes, [0.5, 0.5j, -0.5, -0.5j], atol=1e-12)
        assert report.probability_total() == pytest.approx(1.0, abs=1e-12)
        assert algorithm.failing_residuals(report) == {}
        assert report.details["factors"] == 16

    def test_zero_input_is_uniform(self):
        report = QftAlgorithm().run(QftConfig(k=3))
        assert set(report.probabilities) == set(range(8))
        for p in report.probabilities.values():
            assert p == pytest.approx(1 / 8, abs=1e-12)

    def test_literal_phases_reported_as_failing(self):
        algorithm = QftAlgorithm()
        report = algorithm.run(QftConfig(k=2, literal_phases=True))
        assert "network_block" in algorithm.failing_residuals(report)
        assert "factorization_sum" not in report.residuals
        assert report.details["literal_phase_residual"] > 1e-3

    def test_export_network(self):
        net = QftAlgorithm().build_network(QftConfig(k=1))
        np.testing.assert_allclose(net.matrix(), hadamard(), atol=1e-15)
        assert RegisterShape.from_dim(net.register_dim) == RegisterShape(1)
