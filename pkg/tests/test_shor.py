"""
Tests for Shor's order finding.

Covers:
- ShorConfig defaults and validation
- Dense operators: G on |n⟩|0⟩, M(u), the literal U(Shor) product
- Structured pipeline vs the dense operators
- Second-register measurement: support, probability, zero-probability residues
- First-register peaks after the DFT
- Q̄(Shor) and the Hadamard connector chain
- Exact success probability, retries, the classical gcd shortcut
- ShorAlgorithm report
"""

import numpy as np
import pytest
from pydantic import ValidationError

from algorithms.number_theory import ShorFailure
from algorithms.shor import (
    MAX_STATE_DIM,
    ShorAlgorithm,
    ShorConfig,
    apply_first_register_dft,
    first_register_distribution,
    first_register_support,
    prepared_state,
    residue_distribution,
    run_shor,
    run_shor_with_retries,
    shor_dft,
    shor_g,
    shor_hadamard_chain,
    shor_hadamard_prep,
    shor_measure_second,
    shor_network,
    shor_success_probability,
    shor_u,
    single_qubit_hadamard,
)
from harness.rng import make_rng
from operators.dense import StateVector
from operators.errors import BasisIndexError, DenseCapExceededError, ZeroProbabilityError


def _cfg(**kw) -> ShorConfig:
    return ShorConfig(**{"composite": 15, "base": 7, **kw})


# ═══════════════════════════════════════════════════════════════════
# Configuration
# ═══════════════════════════════════════════════════════════════════


class TestShorConfig:

    def test_default_registers(self):
        cfg = _cfg()
        assert (cfg.k, cfg.k2) == (8, 4)
        assert cfg.first_dim == 256 and cfg.second_dim == 16
        assert cfg.meets_recommended_size

    def test_explicit_small_first_register(self):
        cfg = _cfg(k=3)
        assert cfg.total_dim == 128
        assert not cfg.meets_recommended_size

    @pytest.mark.parametrize("base", [1, 15, 20])
    def test_base_range(self, base):
        with pytest.raises(ValidationError):
            _cfg(base=base)

    def test_second_register_too_small(self):
        with pytest.raises(ValidationError):
            _cfg(k2=3)

    def test_composite_too_small(self):
        with pytest.raises(ValidationError):
            ShorConfig(composite=3, base=2)

    def test_coprime(self):
        assert _cfg().coprime
        assert not _cfg(base=6).coprime

    def test_check_residue(self):
        with pytest.raises(BasisIndexError):
            _cfg().check_residue(16)


# ═══════════════════════════════════════════════════════════════════
# Dense operators
# ═══════════════════════════════════════════════════════════════════


class TestDenseOperators:

    def test_g_maps_to_power_residues(self):
        g = shor_g(_cfg(k=2))
        for n, residue in enumerate([1, 7, 4, 13]):
            assert g[n * 16 + residue, n * 16] == 1
        assert np.count_nonzero(g) == 4

    def test_g_annihilates_nonzero_second_register(self):
        g = shor_g(_cfg(k=2))
        np.testing.assert_array_equal(g[:, 1], np.zeros(64))

    def test_prepared_state_matches_dense(self):
        cfg = _cfg(k=3)
        start = StateVector.basis(0, cfg.total_dim).amplitudes
        dense = shor_g(cfg) @ shor_hadamard_prep(cfg) @ start
        np.testing.assert_allclose(prepared_state(cfg).amplitudes, dense, atol=1e-15)

    def test_fft_matches_dense_dft(self, rng):
        cfg = _cfg(k=3)
        v = rng.standard_normal(cfg.total_dim) + 1j * rng.standard_normal(cfg.total_dim)
        psi = StateVector(v / np.linalg.norm(v))
        np.testing.assert_allclose(
            apply_first_register_dft(psi, cfg).amplitudes, shor_dft(cfg) @ psi.amplitudes, atol=1e-12
        )

    def test_u_peaks(self):
        """k = k2 = 4, u = 1: the first register lands on {0, 4, 8, 12}, 1/16 each."""
        cfg = _cfg(k=4)
        column = shor_u(cfg, 1)[:, 0]
        distribution = np.sum(np.abs(column.reshape(16, 16)) ** 2, axis=1)
        np.testing.assert_array_equal(np.nonzero(distribution > 1e-15)[0], [0, 4, 8, 12])
        np.testing.assert_allclose(distribution[[0, 4, 8, 12]], 1 / 16, atol=1e-14)

    def test_cap(self):
        with pytest.raises(DenseCapExceededError):
            shor_g(_cfg(), cap=1024)

    def test_single_qubit_hadamard_range(self):
        with pytest.raises(BasisIndexError):
            single_qubit_hadamard(_cfg(k=2), 0)


# ═══════════════════════════════════════════════════════════════════
# Structured pipeline
# ═══════════════════════════════════════════════════════════════════


class TestMeasurement:

    def test_residue_distribution(self):
        p = residue_distribution(_cfg())
        assert set(np.nonzero(p)[0]) == {1, 4, 7, 13}
        np.testing.assert_allclose(p[[1, 4, 7, 13]], 0.25)

    def test_residue_seven_support(self):
        cfg = _cfg()
        post, probability = shor_measure_second(prepared_state(cfg), 7, cfg)
        assert probability == pytest.approx(0.25, abs=1e-15)
        amps = post.amplitudes.reshape(256, 16)
        np.testing.assert_array_equal(np.nonzero(amps[:, 7])[0], np.arange(1, 256, 4))
        assert post.is_normalized()

    def test_unreachable_residue(self):
        cfg = _cfg()
        with pytest.raises(ZeroProbabilityError):
            shor_measure_second(prepared_state(cfg), 6, cfg)

    def test_dft_peaks(self):
        cfg = _cfg()
        post, _ = shor_measure_second(prepared_state(cfg), 7, cfg)
        final = apply_first_register_dft(post, cfg)
        np.testing.assert_array_equal(first_register_support(final, cfg), [0, 64, 128, 192])
        assert first_register_distribution(final, cfg).sum() == pytest.approx(1.0, abs=1e-12)


class TestNetwork:

    def test_hadamard_chain(self):
        cfg = _cfg(k=3)
        chain = shor_hadamard_chain(cfg)
        np.testing.assert_allclose(chain.register_block(), shor_hadamard_prep(cfg), atol=1e-12)
        assert len(chain.qcpu_blocks()) == 3

    def test_out_block_is_u(self):
        cfg = _cfg(k=3)
        network = shor_network(cfg, 4)
        np.testing.assert_allclose(network.out_block(), shor_u(cfg, 4), atol=1e-12)
        labels = [s.label for s in network.construction_trace if s.kind == "qcpu"]
        assert set(labels) == {"Q(F⊗I₂)", "Q(M(4))", "Q(G)", "Q(H)"}

    def test_default_registers_exceed_cap(self):
        with pytest.raises(DenseCapExceededError):
            shor_network(_cfg(), 1)


# ═══════════════════════════════════════════════════════════════════
# Runs
# ═══════════════════════════════════════════════════════════════════


class TestSuccessProbability:

    def test_fifteen(self):
        p, found = shor_success_probability(_cfg())
        assert p == pytest.approx(0.75, abs=1e-9)
        assert found == {(3, 5)}

    def test_twenty_one(self):
        p, found = shor_success_probability(ShorConfig(composite=21, base=2))
        assert found == {(3, 7)}
        assert 0 < p < 1

    def test_trivial_root_never_succeeds(self):
        p, found = shor_success_probability(_cfg(base=14))
        assert p == 0.0
        assert found == set()

    def test_shortcut(self):
        assert shor_success_probability(_cfg(base=6)) == (1.0, {(3, 5)})


class TestRunShor:

    def test_shortcut(self):
        run = run_shor(_cfg(base=6))
        assert run.classical_shortcut
        assert run.factors == (3, 5)
        assert run.sampled_y is None

    def test_single_pass_fields(self):
        run = run_shor(_cfg(), seed=3)
        assert run.measured_residue in {1, 4, 7, 13}
        assert run.residue_probability == pytest.approx(0.25)
        assert run.sampled_y in {0, 64, 128, 192}
        assert run.succeeded == (run.sampled_y != 0)

    def test_deterministic(self):
        a, b = run_shor(_cfg(), seed=11), run_shor(_cfg(), seed=11)
        assert (a.measured_residue, a.sampled_y) == (b.measured_residue, b.sampled_y)

    def test_retries_factor_fifteen(self):
        run, attempts = run_shor_with_retries(_cfg(), seed=42)
        assert run.factors == (3, 5)
        assert 1 <= attempts <= 8

    def test_state_size_refused_before_allocation(self):
        cfg = _cfg(k=27)
        with pytest.raises(DenseCapExceededError) as exc:
            run_shor(cfg)
        assert exc.value.requested == 1 << 31
        assert exc.value.cap == MAX_STATE_DIM

    def test_default_registers_of_large_composite_refused(self):
        # N = 4097 = 17·241 defaults to k = 25, k2 = 13
        cfg = ShorConfig(composite=4097, base=3)
        with pytest.raises(DenseCapExceededError):
            residue_distribution(cfg)

    def test_shortcut_needs_no_state(self):
        assert run_shor(_cfg(base=6, k=40)).factors == (3, 5)

    def test_retries_exhausted(self):
        run, attempts = run_shor_with_retries(_cfg(base=14, max_attempts=3), rng=make_rng(0, "shor"))
        assert not run.succeeded
        assert attempts == 3
        assert run.failure in {ShorFailure.TRIVIAL_ROOT, ShorFailure.NO_INFORMATION}


class TestShorAlgorithm:

    def test_report(self):
        algorithm = ShorAlgorithm()
        report = algorithm.run(_cfg(), seed=42)
        assert report.factors == [3, 5]
        assert report.details["success_probability"] == pytest.approx(0.75, abs=1e-9)
        assert report.details["measured_residue"] in {1, 4, 7, 13}
        assert report.outcome in {64, 128, 192}
        assert algorithm.failing_residuals(report) == {}

    def test_shortcut_report(self):
        report = ShorAlgorithm().run(_cfg(base=6))
        assert report.factors == [3, 5]
        assert report.details["classical_shortcut"] is True
        assert report.outcome is None

    def test_failure_report(self):
        report = ShorAlgorithm().run(_cfg(base=14, max_attempts=2))
        assert report.factors is None
        assert report.details["failure"] in {"a^{r/2}≡−1", "no-information"}
        assert report.details["attempts"] == 2

    def test_build_network_uses_likeliest_residue(self):
        network = ShorAlgorithm().build_network(_cfg(k=3))
        np.testing.assert_allclose(network.out_block(), shor_u(_cfg(k=3), 1), atol=1e-12)
