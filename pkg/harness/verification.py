"""
harness/verification.py

Invariant suites behind `verify`.

Each suite yields Checks: a case id, a residual and the declared tolerance for
that check. The declared tolerance is scaled by Settings.tolerance / 1e-12.
A check fails when its residual exceeds the scaled tolerance; an expected-fail
check (a known-wrong variant kept for comparison) fails when it does NOT.

Every case draws from its own stream make_rng(seed, case_id), so results do
not depend on which suites or cases ran before.

Suites: qcpu-core, deutsch, qft, shor, grover, all.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from algorithms.deutsch import NAMED_FUNCTIONS, DeutschFunction, classify_qcpu, classify_textbook
from algorithms.deutsch import deutsch_oracle, deutsch_u, deutsch_u_tensor_sum, deutsch_v
from algorithms.grover import (
    GroverConfig,
    grover_final_state,
    grover_network,
    grover_oracle_probability,
    grover_qcpu_r0,
    grover_qcpu_r2,
    grover_r0,
    grover_r2,
    grover_reference,
)
from algorithms.number_theory import ShorFailure, factors_from_period, multiplicative_order
from algorithms.qft import QftConfig, factorization_residual, qft_network, reference_matrix
from algorithms.shor import (
    ShorConfig,
    apply_first_register_dft,
    first_register_distribution,
    first_register_support,
    prepared_state,
    residue_distribution,
    run_shor,
    shor_measure_second,
    shor_network,
    shor_u,
    shor_success_probability,
)
from harness.config import Settings
from harness.report import CaseFailure, SuiteResult
from harness.rng import make_rng, random_complex_matrix, random_state, random_unitary
from operators.dense import (
    StateVector,
    identity,
    matmul_chain,
    max_abs_difference,
    tensor,
    unitarity_defect,
)
from operators.errors import ConsistencyError, UnknownSuiteError
from operators.gates import hadamard
from qcpu.algebra import AUX, lift_raise
from qcpu.composition import product_compose, scalable_product
from qcpu.network import (
    QcpuNetwork,
    closed_form,
    closed_form_product,
    factor_matrix,
    factor_product,
    qcpu_of,
    sum_compose,
)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 20
# Grover networks are the costliest case; targets per k are capped at this
GROVER_TARGETS_PER_K = 4


@dataclass(frozen=True)
class Check:
    case_id: str
    residual: float
    tolerance: float
    expect_fail: bool = False


@dataclass
class SuiteContext:
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    settings: Settings = field(default_factory=Settings)
    k_range: Optional[tuple[int, int]] = None
    inject_fault: bool = False

    def rng(self, case_id: str) -> np.random.Generator:
        return make_rng(self.seed, case_id)

    def ks(self, default: tuple[int, int]) -> range:
        lo, hi = self.k_range or default
        return range(lo, hi + 1)

    def tamper(self, network: QcpuNetwork) -> QcpuNetwork:
        """Flip the sign of the first factor coefficient when fault injection is on."""
        if not self.inject_fault or len(network) == 0:
            return network
        return network.with_coeff(0, -network.coeffs[0])


def _flag(ok: bool) -> float:
    return 0.0 if ok else 1.0


# ─── qcpu-core ───────────────────────────────────────────────────────────────

def _qcpu_core(ctx: SuiteContext) -> Iterator[Check]:
    yield Check("aux/relations", _flag(AUX.relations_hold()), 0.0)

    for k in ctx.ks((1, 3)):
        dim = 1 << k
        for t in range(ctx.trials):
            cid = f"closed-form/k{k}/t{t}"
            rng = ctx.rng(cid)
            net = qcpu_of(random_complex_matrix(rng, dim))
            order = rng.permutation(len(net))
            yield Check(cid, max_abs_difference(factor_product(ctx.tamper(net), order), closed_form(net)), 1e-13)

            cid = f"factor-pair/k{k}/t{t}"
            rng = ctx.rng(cid)
            i, j = rng.choice(len(net), size=2, replace=False)
            f, g = net.factors[i], net.factors[j]
            pair = factor_matrix(f, net.shape) @ factor_matrix(g, net.shape)
            m = np.zeros((dim, dim), dtype=np.complex128)
            m[f.m, f.n] += f.coeff
            m[g.m, g.n] += g.coeff
            yield Check(cid, max_abs_difference(pair, np.eye(2 * dim) + lift_raise(m)), 1e-13)

            cid = f"sum-rule/k{k}/t{t}"
            rng = ctx.rng(cid)
            nets = [qcpu_of(random_complex_matrix(rng, dim), f"U{i + 1}") for i in range(3)]
            target = closed_form(sum_compose(nets))
            tampered = [ctx.tamper(nets[0])] + nets[1:]
            for o in range(3):
                perm = rng.permutation(3)
                got = closed_form_product([tampered[i] for i in perm])
                yield Check(f"{cid}/order{o}", max_abs_difference(got, target), 1e-12)

            cid = f"action/k{k}/t{t}"
            rng = ctx.rng(cid)
            u = random_unitary(rng, dim)
            psi = StateVector(random_state(rng, dim))
            zero, one = StateVector.basis(0, 2), StateVector.basis(1, 2)
            got = closed_form(ctx.tamper(qcpu_of(u))) @ psi.tensor(zero).amplitudes
            expected = psi.tensor(zero).amplitudes + StateVector(u @ psi.amplitudes).tensor(one).amplitudes
            yield Check(cid, float(np.max(np.abs(got - expected))), 1e-13)

    for k in ctx.ks((1, 2)):
        dim = 1 << k
        for r in range(1, 5):
            for t in range(ctx.trials):
                cid = f"product-rule/k{k}/r{r}/t{t}"
                rng = ctx.rng(cid)
                us = [random_unitary(rng, dim) for _ in range(r)]
                composed = product_compose(us, cap=ctx.settings.max_dense_dim)
                expected = np.eye(2 * dim) + lift_raise(matmul_chain(us))
                yield Check(cid, max_abs_difference(composed.operator, expected), 1e-12)

                cid = f"scalable/k{k}/r{r}/t{t}"
                rng = ctx.rng(cid)
                us = [random_unitary(rng, dim) for _ in range(r)]
                scalable = scalable_product(us, cap=ctx.settings.max_dense_dim)
                psi = StateVector(random_state(rng, dim))
                structured = scalable.apply_prepared(psi).amplitudes
                dense = scalable.total_operator(ctx.settings.max_dense_dim) @ scalable.prepare(psi).amplitudes
                residual = max(
                    max_abs_difference(scalable.out_block(), matmul_chain(us)),
                    float(np.max(np.abs(structured - dense))),
                )
                yield Check(cid, residual, 1e-12)

    for k in ctx.ks((1, 3)):
        defect = unitarity_defect(closed_form(qcpu_of(identity(1 << k))))
        yield Check(f"non-unitary/k{k}", _flag(defect > 0.5), 0.0)


# ─── deutsch ─────────────────────────────────────────────────────────────────

def _deutsch(ctx: SuiteContext) -> Iterator[Check]:
    hh = tensor(hadamard(), hadamard())
    for name in NAMED_FUNCTIONS:
        f = DeutschFunction.named(name)
        classification, _, probability = classify_qcpu(f)
        textbook, textbook_probability = classify_textbook(f)
        yield Check(f"deutsch/{name}/classification", _flag(classification is f.expected), 0.0)
        yield Check(f"deutsch/{name}/probability", abs(probability - 1.0), 1e-12)
        yield Check(f"deutsch/{name}/textbook-probability", abs(textbook_probability - 1.0), 1e-12)
        yield Check(f"deutsch/{name}/routes-agree", _flag(textbook is classification), 0.0)
        yield Check(f"deutsch/{name}/tensor-sum", max_abs_difference(deutsch_u(f), deutsch_u_tensor_sum(f)), 0.0)
        yield Check(f"deutsch/{name}/v-unitary", unitarity_defect(deutsch_v(f)), 1e-15)
        yield Check(
            f"deutsch/{name}/conjugated-oracle",
            max_abs_difference(deutsch_u(f), hh @ deutsch_oracle(f) @ hh),
            1e-14,
        )


# ─── qft ─────────────────────────────────────────────────────────────────────

def _qft(ctx: SuiteContext) -> Iterator[Check]:
    cap = ctx.settings.max_dense_dim
    for k in ctx.ks((1, 4)):
        cfg = QftConfig(k=k)
        f = reference_matrix(cfg)
        net = ctx.tamper(qft_network(cfg, cap))
        yield Check(f"qft/k{k}/factorization-sum", factorization_residual(cfg), 1e-12)
        yield Check(f"qft/k{k}/closed-form", max_abs_difference(closed_form(net, cap), closed_form(qcpu_of(f), cap)), 1e-12)
        yield Check(f"qft/k{k}/unitarity", unitarity_defect(net.matrix()), 1e-12)

        inverse = qft_network(QftConfig(k=k, inverse=True), cap)
        yield Check(f"qft/k{k}/inverse", max_abs_difference(inverse.matrix() @ f, identity(1 << k)), 1e-12)

        literal = QftConfig(k=k, literal_phases=True)
        yield Check(f"qft/k{k}/literal-phases", factorization_residual(literal), 1e-12, expect_fail=True)


# ─── shor ────────────────────────────────────────────────────────────────────

def _shor_peaks(cfg: ShorConfig, r: int) -> Iterator[Check]:
    """For r | 2^k every residue's y-distribution is uniform on the multiples of 2^k/r."""
    state = prepared_state(cfg)
    uniform = np.zeros(cfg.first_dim)
    uniform[:: cfg.first_dim // r] = 1.0 / r
    for residue, p in enumerate(residue_distribution(cfg)):
        if p == 0:
            continue
        post, _ = shor_measure_second(state, residue, cfg)
        support = first_register_support(post, cfg)
        progression = support[0] < r and np.all(np.diff(support) == r)
        cid = f"shor/{cfg.composite}/a{cfg.base}/u{residue}"
        yield Check(f"{cid}/progression", _flag(bool(progression)), 0.0)
        distribution = first_register_distribution(apply_first_register_dft(post, cfg), cfg)
        yield Check(f"{cid}/peaks", float(np.max(np.abs(distribution - uniform))), 1e-10)


def _shor(ctx: SuiteContext) -> Iterator[Check]:
    cap = ctx.settings.max_dense_dim

    for a in (2, 7, 8, 13):
        cfg = ShorConfig(composite=15, base=a, k=8)
        probability, found = shor_success_probability(cfg)
        cid = f"shor/15/a{a}"
        yield Check(f"{cid}/success", max(0.0, 0.5 - probability), 0.0)
        yield Check(f"{cid}/factors", _flag(found == {(3, 5)}), 0.0)
        yield from _shor_peaks(cfg, multiplicative_order(a, 15))

    cfg = ShorConfig(composite=21, base=2, k=9)
    probability, found = shor_success_probability(cfg)
    yield Check("shor/21/a2/factors", _flag(found == {(3, 7)} and probability > 0), 0.0)

    yield Check("shor/15/a14/trivial-root", _flag(factors_from_period(14, 15, 2) is ShorFailure.TRIVIAL_ROOT), 0.0)

    cfg = ShorConfig(composite=15, base=7, k=3, k2=4)
    for residue, p in enumerate(residue_distribution(cfg)):
        if p == 0:
            continue
        cid = f"shor/consistency/u{residue}"
        try:
            network = shor_network(cfg, residue, cap, ctx.settings.scaled(1e-12))
            residual = max_abs_difference(network.out_block(), shor_u(cfg, residue, cap))
        except ConsistencyError as e:
            logger.warning(f"{cid}: {e}")
            residual = 1.0
        yield Check(cid, residual, 1e-12)

    for k in (2, 3, 4):
        cfg = ShorConfig(composite=15, base=7, k=k, k2=4)
        state = prepared_state(cfg)
        start = np.zeros(cfg.total_dim, dtype=np.complex128)
        start[0] = 1.0
        for residue, p in enumerate(residue_distribution(cfg)):
            if p == 0:
                continue
            post, probability = shor_measure_second(state, residue, cfg)
            structured = apply_first_register_dft(post, cfg).amplitudes * np.sqrt(probability)
            dense = shor_u(cfg, residue, cap) @ start
            yield Check(f"shor/structured-vs-dense/k{k}/u{residue}", float(np.max(np.abs(structured - dense))), 1e-12)

    cfg = ShorConfig(composite=15, base=7, k=8)
    for t in range(ctx.trials):
        cid = f"shor/sampled/t{t}"
        run = run_shor(cfg, rng=ctx.rng(cid))
        yield Check(f"{cid}/dft-total", abs(float(run.dft_distribution.sum()) - 1.0), 1e-10)
        if run.factors is not None:
            yield Check(f"{cid}/product", float(abs(run.factors[0] * run.factors[1] - 15)), 0.0)


# ─── grover ──────────────────────────────────────────────────────────────────

def _grover(ctx: SuiteContext) -> Iterator[Check]:
    cap = ctx.settings.max_dense_dim

    for target in range(4):
        cfg = GroverConfig(k=2, target=target, iterations=1)
        register = grover_final_state(grover_network(cfg, cap))
        yield Check(f"grover/k2/j{target}/exact-hit", abs(register.probabilities()[target] - 1.0), 1e-12)

    for k in ctx.ks((3, 6)):
        n = 1 << k
        rng = ctx.rng(f"grover/k{k}/targets")
        targets = rng.choice(n, size=min(ctx.trials, GROVER_TARGETS_PER_K, n), replace=False)
        for target in sorted(int(j) for j in targets):
            cfg = GroverConfig(k=k, target=target)
            network = grover_network(cfg, cap)
            probs = grover_final_state(network).probabilities()
            cid = f"grover/k{k}/j{target}"
            expected = grover_oracle_probability(k, cfg.iterations)
            yield Check(f"{cid}/success-formula", abs(float(probs[target]) - expected), 1e-9)
            yield Check(f"{cid}/network-block", max_abs_difference(network.register_block(), grover_reference(cfg)), 1e-12)
            yield Check(f"{cid}/distribution-total", abs(float(probs.sum()) - 1.0), 1e-10)

    uniform = grover_final_state(grover_network(GroverConfig(k=3, target=0, iterations=0), cap))
    yield Check("grover/k3/t0/uniform", float(np.max(np.abs(uniform.probabilities() - 1 / 8))), 1e-12)

    for k in (1, 2, 3):
        cfg = GroverConfig(k=k, target=(1 << k) - 1)
        shape = cfg.shape
        corrected = grover_qcpu_r2(shape, cfg.target)
        literal = grover_qcpu_r2(shape, cfg.target, literal=True)
        yield Check(f"grover/k{k}/r0-qcpu", max_abs_difference(grover_qcpu_r0(shape), closed_form(qcpu_of(grover_r0(shape)))), 0.0)
        yield Check(f"grover/k{k}/r2-qcpu", max_abs_difference(corrected, closed_form(qcpu_of(grover_r2(shape, cfg.target)))), 0.0)
        shift = literal[1::2, ::2] - corrected[1::2, ::2]
        yield Check(f"grover/k{k}/literal-r2-shift", max_abs_difference(shift, identity(shape.dim)), 0.0)
        yield Check(f"grover/k{k}/literal-r2", max_abs_difference(literal, corrected), 0.0, expect_fail=True)


SUITES: dict[str, Callable[[SuiteContext], Iterator[Check]]] = {
    "qcpu-core": _qcpu_core,
    "deutsch":   _deutsch,
    "qft":       _qft,
    "shor":      _shor,
    "grover":    _grover,
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def evaluate(check: Check, settings: Settings) -> Optional[CaseFailure]:
    tol = settings.scaled(check.tolerance)
    finite = bool(np.isfinite(check.residual))
    passed = finite and check.residual <= tol
    if passed == check.expect_fail:
        # reports are strict JSON, so non-finite residuals are stored as the largest double
        residual = check.residual if finite else float(np.finfo(np.float64).max)
        return CaseFailure(case_id=check.case_id, residual=residual, tolerance=tol)
    return None


def run_verification_suite(
    name: str,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    settings: Optional[Settings] = None,
    k_range: Optional[tuple[int, int]] = None,
    inject_fault: bool = False,
) -> SuiteResult:
    """Run one named suite (or `all`) and collect every failing case."""
    if name not in SUITE_NAMES:
        raise UnknownSuiteError(f"Unknown suite '{name}' (choose from {', '.join(SUITE_NAMES)})")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if k_range is not None and not 1 <= k_range[0] <= k_range[1]:
        raise ValueError(f"Invalid k range {k_range[0]}..{k_range[1]}")

    ctx = SuiteContext(trials, seed, settings or Settings(), k_range, inject_fault)
    names = list(SUITES) if name == "all" else [name]
    result = SuiteResult(suite=name)
    for suite in names:
        logger.info(f"Running suite '{suite}' (trials={trials}, seed={seed})")
        before = len(result.failures)
        for check in SUITES[suite](ctx):
            result.cases_run += 1
            failure = evaluate(check, ctx.settings)
            if failure is not None:
                logger.warning(f"[{suite}] {failure.case_id}: residual {failure.residual:.3e} vs tolerance {failure.tolerance:.1e}")
                result.failures.append(failure)
        logger.info(f"Suite '{suite}' done: {len(result.failures) - before} failure(s)")
    return result
