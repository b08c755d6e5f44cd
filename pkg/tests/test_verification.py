"""
Tests for the invariant suites behind `verify`.

Covers:
- Each suite passes on the default build (small trial counts)
- --inject-fault makes qcpu-core and qft fail with named cases
- Expected-fail checks, non-finite residuals, tolerance scaling
- Argument validation and seed determinism
"""

import numpy as np
import pytest

from harness.config import Settings
from harness.verification import SUITE_NAMES, Check, evaluate, run_verification_suite
from operators.errors import UnknownSuiteError


class TestSuitesPass:

    def test_qcpu_core(self):
        result = run_verification_suite("qcpu-core", trials=2, seed=0)
        assert result.passed, result.failures
        assert result.cases_run == 72

    def test_deutsch(self):
        result = run_verification_suite("deutsch")
        assert result.passed
        assert result.cases_run == 4 * 7

    def test_qft_k_range(self):
        result = run_verification_suite("qft", k_range=(1, 2))
        assert result.passed
        assert result.cases_run == 2 * 5

    def test_grover_single_k(self):
        result = run_verification_suite("grover", trials=1, k_range=(3, 3))
        assert result.passed, result.failures

    def test_shor(self):
        result = run_verification_suite("shor", trials=2, seed=4)
        assert result.passed, result.failures

    def test_suite_names(self):
        assert SUITE_NAMES == ("qcpu-core", "deutsch", "qft", "shor", "grover", "all")


class TestFaultInjection:

    def test_qcpu_core_fails(self):
        result = run_verification_suite("qcpu-core", trials=1, k_range=(1, 1), inject_fault=True)
        ids = {f.case_id for f in result.failures}
        assert not result.passed
        assert "closed-form/k1/t0" in ids
        assert "action/k1/t0" in ids
        assert all(f.residual > f.tolerance for f in result.failures)

    def test_qft_fails(self):
        result = run_verification_suite("qft", k_range=(2, 2), inject_fault=True)
        assert "qft/k2/closed-form" in {f.case_id for f in result.failures}

    def test_fault_free_cases_untouched(self):
        result = run_verification_suite("qcpu-core", trials=1, k_range=(1, 1), inject_fault=True)
        ids = {f.case_id for f in result.failures}
        assert not any(i.startswith("product-rule/") for i in ids)


class TestEvaluate:

    def test_pass(self):
        assert evaluate(Check("c", 1e-13, 1e-12), Settings()) is None

    def test_fail(self):
        failure = evaluate(Check("c", 1e-3, 1e-12), Settings())
        assert failure.case_id == "c"
        assert failure.tolerance == 1e-12

    def test_exact_zero_tolerance(self):
        assert evaluate(Check("c", 0.0, 0.0), Settings()) is None
        assert evaluate(Check("c", 1e-300, 0.0), Settings()) is not None

    def test_expected_fail(self):
        assert evaluate(Check("c", 1.0, 1e-12, expect_fail=True), Settings()) is None
        assert evaluate(Check("c", 0.0, 1e-12, expect_fail=True), Settings()) is not None

    def test_non_finite_stored_as_max_double(self):
        failure = evaluate(Check("c", float("inf"), 1.0), Settings())
        assert failure.residual == np.finfo(np.float64).max

    def test_scaled_tolerance(self):
        loose = Settings(tolerance=1e-6)
        assert evaluate(Check("c", 1e-9, 1e-12), loose) is None
        assert evaluate(Check("c", 1e-9, 1e-12), Settings()) is not None


class TestArguments:

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuiteError):
            run_verification_suite("bogus")

    def test_unknown_suite_is_value_error(self):
        with pytest.raises(ValueError):
            run_verification_suite("bogus")

    def test_trials_positive(self):
        with pytest.raises(ValueError):
            run_verification_suite("deutsch", trials=0)

    def test_k_range_order(self):
        with pytest.raises(ValueError):
            run_verification_suite("qft", k_range=(3, 2))

    def test_deterministic(self):
        a = run_verification_suite("qcpu-core", trials=1, seed=7, k_range=(1, 1), inject_fault=True)
        b = run_verification_suite("qcpu-core", trials=1, seed=7, k_range=(1, 1), inject_fault=True)
        assert a.model_dump() == b.model_dump()
