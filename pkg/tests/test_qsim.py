import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giplab.arith import PhaseExp
from giplab.instances import PromiseColumn, PromiseInstance, enumerate_instances, gip_eval, random_instance
from giplab.qsim import (
    MemoryBudgetError,
    QuditRegister,
    analytic_class_distribution,
    apply_phase_map,
    apply_qft,
    dense_class_marginals,
    dense_postphase_state,
    digits_to_index,
    expected_postphase_coefficients,
    index_to_digits,
    make_entangled_state,
    measure_all,
    exact_support_after_qft,
    nth_root_sum_is_zero,
    phased_span_state,
    qft_all,
    postphase_coefficients,
    run_quantum_protocol,
    sample_outcome_analytic,
)

OMEGA3 = cmath.exp(2j * math.pi / 3)


def _random_register(n, k, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n**k) + 1j * rng.normal(size=n**k)
    return QuditRegister(n, k, v / np.linalg.norm(v))


def test_entangled_state():
    reg = make_entangled_state(3)
    expected = np.zeros(27, dtype=complex)
    for k in range(3):
        expected[digits_to_index((k, k, k), 3)] = 1 / math.sqrt(3)
    assert np.allclose(reg.amplitudes, expected, atol=1e-12)
    assert reg.norm() == pytest.approx(1, abs=1e-12)
    reg5 = make_entangled_state(5)
    nz = np.flatnonzero(np.abs(reg5.amplitudes) > 1e-12)
    assert [index_to_digits(i, 5, 5) for i in nz] == [(k,) * 5 for k in range(5)]
    assert np.allclose(reg5.amplitudes[nz], 1 / math.sqrt(5))


def test_index_digit_bijection():
    seen = {index_to_digits(i, 3, 4) for i in range(81)}
    assert len(seen) == 81
    assert all(digits_to_index(index_to_digits(i, 5, 3), 5) == i for i in range(125))


@pytest.mark.parametrize(
    "j,digit,phase",
    [
        (0, 0, cmath.exp(-2j * math.pi / 3)),
        (1, 1, cmath.exp(-2j * math.pi / 9)),
        (2, 2, cmath.exp(-2j * math.pi / 9)),
        (0, 1, 1.0),
        (1, 2, cmath.exp(-4j * math.pi / 9)),
    ],
)
def test_phase_map_examples(j, digit, phase):
    out = apply_phase_map(QuditRegister.basis(3, [digit]), 0, j)
    assert out.amplitudes[digit] == pytest.approx(phase, abs=1e-12)


def test_qft_examples():
    s = 1 / math.sqrt(3)
    out0 = apply_qft(QuditRegister.basis(3, [0]), 0)
    assert np.allclose(out0.amplitudes, [s, s, s], atol=1e-12)
    out1 = apply_qft(QuditRegister.basis(3, [1]), 0)
    assert np.allclose(out1.amplitudes, [s, s * OMEGA3, s * OMEGA3**2], atol=1e-12)


def test_qft_acts_on_chosen_qudit():
    reg = QuditRegister.basis(3, [2, 0, 1])
    out = apply_qft(reg, 1)
    for k in range(3):
        assert out.amplitudes[digits_to_index((2, k, 1), 3)] == pytest.approx(1 / math.sqrt(3))


def test_invalid_qudit_index():
    reg = make_entangled_state(3)
    with pytest.raises(IndexError):
        apply_qft(reg, 3)
    with pytest.raises(IndexError):
        apply_phase_map(reg, -1, 1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(0, 2**32), st.integers(0, 4), st.integers(0, 2))
def test_unitarity(n, k, seed, j, q):
    q = q % k
    reg = _random_register(n, k, seed)
    assert apply_qft(reg, q).norm() == pytest.approx(1, abs=1e-9)
    assert apply_phase_map(reg, q, j % n).norm() == pytest.approx(1, abs=1e-9)
    back = apply_qft(apply_qft(reg, q), q, inverse=True)
    assert np.allclose(back.amplitudes, reg.amplitudes, atol=1e-9)


def test_measure_examples():
    rng = np.random.default_rng(0)
    assert measure_all(QuditRegister.basis(3, [0, 0, 0]), rng).digits == (0, 0, 0)

    amps = np.zeros(9, dtype=complex)
    amps[[0, 4, 8]] = 1 / math.sqrt(3)
    reg = QuditRegister(3, 2, amps)
    rng = np.random.default_rng(11)
    draws = [measure_all(reg, rng).digits for _ in range(10_000)]
    sigma = math.sqrt(10_000 * (1 / 3) * (2 / 3))
    for d in [(0, 0), (1, 1), (2, 2)]:
        assert abs(draws.count(d) - 10_000 / 3) < 3 * sigma

    a = [measure_all(reg, np.random.default_rng(5)).digits for _ in range(3)]
    b = [measure_all(reg, np.random.default_rng(5)).digits for _ in range(3)]
    assert a == b


def test_measure_rejects_unnormalized():
    with pytest.raises(ValueError):
        measure_all(QuditRegister(3, 1, np.array([1, 1, 0], dtype=complex)), np.random.default_rng(0))


def test_expected_coefficients_examples():
    w = lambda k: PhaseExp.omega_power(k, 3)  # noqa: E731
    assert expected_postphase_coefficients(PromiseColumn(1, 0, 3)) == (w(0), w(-1), w(-2))
    assert expected_postphase_coefficients(PromiseColumn(0, 1, 3)) == (w(-1),) * 3
    assert expected_postphase_coefficients(PromiseColumn(0, 0, 3)) == (PhaseExp(0, 3),) * 3


@pytest.mark.parametrize("n", [3, 5, 7])
def test_postphase_exact_identities(n):
    for a, b in itertools.product(range(n), repeat=2):
        col = PromiseColumn(a, b, n)
        assert postphase_coefficients(col) == expected_postphase_coefficients(col)


@pytest.mark.parametrize("n", [3, 5])
def test_postphase_dense_identities(n):
    stride = sum(n**i for i in range(n))
    for a, b in itertools.product(range(n), repeat=2):
        col = PromiseColumn(a, b, n)
        expected = np.zeros(n**n, dtype=complex)
        for k, c in enumerate(expected_postphase_coefficients(col)):
            expected[k * stride] = c.to_complex() / math.sqrt(n)
        assert np.max(np.abs(dense_postphase_state(col).amplitudes - expected)) < 1e-12


def test_class_distribution_point_masses():
    assert np.allclose(analytic_class_distribution(PromiseColumn(1, 0, 3)), [0, 1, 0], atol=1e-12)
    assert np.allclose(analytic_class_distribution(PromiseColumn(0, 1, 3)), [1, 0, 0], atol=1e-12)


@pytest.mark.parametrize("n", [3, 5])
def test_backend_agreement(n):
    for a, b in itertools.product(range(n), repeat=2):
        col = PromiseColumn(a, b, n)
        assert np.max(np.abs(analytic_class_distribution(col) - dense_class_marginals(col))) < 1e-9


def test_analytic_sampler_uniform_on_class():
    col = PromiseColumn(1, 0, 3)
    rng = np.random.default_rng(2024)
    draws = [sample_outcome_analytic(col, rng).digits for _ in range(10_000)]
    assert all(sum(d) % 3 == 1 for d in draws)
    valid = [d for d in itertools.product(range(3), repeat=3) if sum(d) % 3 == 1]
    assert len(valid) == 9
    sigma = math.sqrt(10_000 * (1 / 9) * (8 / 9))
    for d in valid:
        assert abs(draws.count(d) - 10_000 / 9) < 3 * sigma


def test_analytic_backend_handles_n7_cheaply():
    inst = random_instance(7, 30, 1)
    _, rec = run_quantum_protocol(inst, "analytic", seed=3)
    assert rec == gip_eval(inst)


def test_nth_root_sum_zero():
    assert nth_root_sum_is_zero([0, 1, 2], 3)
    assert not nth_root_sum_is_zero([0, 0, 0], 3)
    assert nth_root_sum_is_zero([0, 0, 1, 1, 2, 2], 3)
    assert not nth_root_sum_is_zero([0, 1, 1], 3)


def test_protocol_examples():
    inst = PromiseInstance([[1], [1], [1]], 3)
    for seed in range(10):
        t, rec = run_quantum_protocol(inst, "dense", seed=seed)
        assert rec.value == 1
        assert t.ideal_bits == pytest.approx(2 * math.log2(3))
        assert t.rounded_bits == 4
        assert len(t.symbols) == 2


def test_protocol_exhaustive_n3_m2():
    for inst in enumerate_instances(3, 2):
        oracle = gip_eval(inst)
        for seed in range(20):
            assert run_quantum_protocol(inst, "dense", seed=seed)[1] == oracle


@pytest.mark.parametrize("n", [5, 7])
def test_protocol_random(n):
    for seed in range(40):
        inst = random_instance(n, 12, seed)
        backend = "dense" if n == 5 else "analytic"
        assert run_quantum_protocol(inst, backend, seed=seed)[1] == gip_eval(inst)


def test_protocol_is_deterministic_per_seed():
    inst = random_instance(5, 6, 9)
    assert run_quantum_protocol(inst, "dense", seed=4)[0] == run_quantum_protocol(inst, "dense", seed=4)[0]


def test_dense_memory_guard():
    inst = random_instance(11, 2, 0)
    with pytest.raises(MemoryBudgetError, match="analytic"):
        run_quantum_protocol(inst, "dense")
    _, rec = run_quantum_protocol(inst, "analytic")
    assert rec == gip_eval(inst)


def _digit_sums(n):
    return np.indices((n,) * n).reshape(n, -1).sum(axis=0) % n


@pytest.mark.parametrize("n", [3, 5])
def test_post_qft_support_dense(n):
    sums = _digit_sums(n)
    for x in range(n):
        amps = qft_all(phased_span_state(n, x)).amplitudes
        mags = np.abs(amps)
        on = sums == x
        assert np.all(mags[~on] < 1e-9)
        assert np.allclose(mags[on], n ** ((1 - n) / 2), atol=1e-9)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_post_qft_support_exact(n):
    sums = _digit_sums(n)
    for x in range(n):
        assert np.array_equal(exact_support_after_qft(n, x), sums == x)
