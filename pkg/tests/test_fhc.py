"""Ladder calculus: exact raising/lowering, right inverse, majorant decay."""

from __future__ import annotations

import math

import numpy as np
import pytest

import entireops as eo
from support import airy_problem, gaussian_problem


def gauss_vector(terms, a=1.0, dim=1) -> eo.LadderVector:
    gens = tuple(gaussian_problem(6, a) for _ in range(dim))
    return eo.LadderVector(gens, terms)


def random_vector(rng, dim: int) -> eo.LadderVector:
    a = tuple(
        complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0)) for _ in range(dim)
    )
    gens = tuple(gaussian_problem(6, a_j) for a_j in a)
    support = {
        tuple(int(e) for e in rng.integers(0, 6, dim))
        for _ in range(int(rng.integers(1, 6)))
    }
    terms = {
        n: complex(rng.standard_normal(), rng.standard_normal()) for n in support
    }
    return eo.LadderVector(gens, terms)


# ---------------------------------------------------------------------------
# the exact basis action
# ---------------------------------------------------------------------------


def test_power_action_single_step():
    assert eo.operator_power_on_basis((1,), (2,), (1.0,)) == (2.0, (1,))


def test_power_action_identity():
    scalar, idx = eo.operator_power_on_basis((0, 0), (3, 1), (1.0, 1.0))
    assert scalar == 1.0 and idx == (3, 1)


def test_power_action_annihilates():
    assert eo.operator_power_on_basis((1, 0), (0, 3), (1.0, 1.0)) is None


def test_power_action_scalar_formula():
    scalar, idx = eo.operator_power_on_basis((2, 1), (3, 4), (2.0, 3.0))
    assert scalar == pytest.approx((2.0**2 * 6) * (3.0 * 4))
    assert idx == (1, 3)


def test_lowering_single_label():
    x = gauss_vector({(2,): 1.0})
    y = eo.apply_lowering(x, 1)
    assert y.terms == {(1,): 2.0}


def test_lowering_kills_generator_label():
    x = gauss_vector({(0,): 1.0})
    assert eo.apply_lowering(x, 1).is_zero()


def test_lowering_termwise_with_constant_two():
    x = gauss_vector({(1,): 1.0, (3,): 1.0}, a=2.0)
    y = eo.apply_lowering(x, 1)
    assert y.terms == {(0,): 2.0, (2,): 6.0}


def test_raising_on_generator():
    x = gauss_vector({(0,): 1.0})
    assert eo.apply_raising(x, 1).terms == {(1,): 1.0}


def test_raising_twice_halves():
    x = gauss_vector({(0,): 1.0})
    y = eo.apply_raising(eo.apply_raising(x, 1), 1)
    assert y.terms == {(2,): 0.5}


def test_raising_off_axis_constant():
    gens = (gaussian_problem(6, 2.0), gaussian_problem(6, 1.0))
    x = eo.LadderVector(gens, {(0, 1): 1.0})
    y = eo.apply_raising(x, 1)
    assert y.terms == {(1, 1): 0.5}


def test_raising_power_scalar_closed_form():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n_j = int(rng.integers(0, 6))
        k = int(rng.integers(0, 8))
        a = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        gens = (gaussian_problem(6, a),)
        x = eo.LadderVector(gens, {(n_j,): 1.0})
        for _ in range(k):
            x = eo.apply_raising(x, 1)
        (idx, scalar), = x.terms.items()
        assert idx == (n_j + k,)
        expected = eo.raising_power_scalar(n_j, k, a)
        assert scalar == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(
            math.factorial(n_j) / (a**k * math.factorial(n_j + k)), rel=1e-14
        )


# ---------------------------------------------------------------------------
# right inverse, nilpotency, axis independence
# ---------------------------------------------------------------------------


def test_right_inverse_on_generator():
    assert eo.verify_right_inverse(gauss_vector({(0,): 1.0}), 1)


def test_right_inverse_on_random_vectors():
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = random_vector(rng, int(rng.integers(1, 3)))
        for axis in range(1, x.dim + 1):
            assert eo.verify_right_inverse(x, axis)


def test_left_inverse_fails_on_kernel_label():
    x = gauss_vector({(0,): 1.0})
    y = eo.apply_raising(eo.apply_lowering(x, 1), 1)
    assert y.is_zero()
    assert y.terms != x.terms


def test_nilpotency_values():
    gens = (gaussian_problem(6), gaussian_problem(6))
    assert eo.nilpotency_index(eo.LadderVector(gens, {(2, 0): 1.0}), 1) == 3
    assert eo.nilpotency_index(eo.LadderVector(gens, {(0, 0): 1.0}), 1) == 1
    assert eo.nilpotency_index(eo.LadderVector(gens, {(2, 0): 1.0}), 2) == 1


def test_nilpotency_matches_iterated_lowering():
    rng = np.random.default_rng(29)
    for _ in range(20):
        x = random_vector(rng, 2)
        for axis in (1, 2):
            k = eo.nilpotency_index(x, axis)
            y = x
            for _ in range(k - 1):
                y = eo.apply_lowering(y, axis)
            assert not y.is_zero()
            assert eo.apply_lowering(y, axis).is_zero()


def test_nilpotency_rejects_zero_vector():
    x = gauss_vector({})
    with pytest.raises(ValueError, match="zero vector"):
        eo.nilpotency_index(x, 1)


def test_lowering_series_terminates():
    # finite support means the operator series on any vector has finitely
    # many nonzero terms
    rng = np.random.default_rng(41)
    for _ in range(10):
        x = random_vector(rng, 2)
        terms = 0
        y = x
        while not y.is_zero():
            terms += 1
            assert terms <= 16
            y = eo.apply_lowering(y, 1)


def test_raising_and_lowering_commute_across_axes():
    rng = np.random.default_rng(43)
    for _ in range(20):
        x = random_vector(rng, 2)
        a = eo.apply_raising(eo.apply_lowering(x, 1), 2)
        b = eo.apply_lowering(eo.apply_raising(x, 2), 1)
        keys = set(a.terms) | set(b.terms)
        for n in keys:
            assert a.terms.get(n, 0j) == pytest.approx(b.terms.get(n, 0j), rel=1e-12)


# ---------------------------------------------------------------------------
# realization and the small ladder-vs-series oracle
# ---------------------------------------------------------------------------


def test_realize_single_label_matches_differentiated_kernel():
    x = gauss_vector({(2,): 1.0})
    series = eo.realize(x, 4)
    f = eo.solve_kernel_axis(gaussian_problem(6))
    expected = eo.with_cutoff(eo.differentiate(f, (2,)), 4)
    diff = eo.linear_combine([(1, series), (-1, expected)])
    assert diff.max_exact_coefficient() <= 1e-14
    assert series.exact_degree == 4


def test_lowering_agrees_with_operator_application():
    # small instance of the symbolic-vs-numeric equivalence
    gens = (gaussian_problem(12),)
    op = eo.CROperator(1, 1, 1.0, eo.ConvolutionSymbol(1, {(1,): 1.0}))
    for n in range(4):
        x = eo.LadderVector(gens, {(n,): 1.0})
        numeric = eo.apply_cr_operator(op, eo.realize(x, 6))
        symbolic = eo.realize(eo.apply_lowering(x, 1), 6)
        aligned = eo.with_cutoff(symbolic, numeric.cutoff)
        diff = eo.linear_combine([(1, numeric), (-1, aligned)])
        assert diff.max_exact_coefficient() <= 1e-12


# ---------------------------------------------------------------------------
# convergence diagnostics
# ---------------------------------------------------------------------------


def test_convergence_report_gaussian():
    x = gauss_vector({(0,): 1.0})
    report = eo.convergence_report(x, 1, eo.SemiNormSpec(1, 2.0), 20, 8)
    assert report.bound == pytest.approx(0.5)
    assert report.u[0] == pytest.approx(7.0)
    assert report.kth_roots[-1] <= 0.55
    assert report.stable
    assert report.partial_sums[-1] - report.partial_sums[-2] == pytest.approx(
        report.u[-1], rel=1e-6
    )
    assert report.u[-1] < 1e-5


def test_convergence_report_rejects_small_epsilon():
    x = gauss_vector({(0,): 1.0})
    with pytest.raises(ValueError, match="radius condition"):
        eo.convergence_report(x, 1, eo.SemiNormSpec(1, 0.5), 10, 6)


def test_convergence_report_airy():
    gens = (airy_problem(6),)
    x = eo.LadderVector(gens, {(0,): 1.0})
    report = eo.convergence_report(x, 1, eo.SemiNormSpec(1, 2.0), 12, 8)
    assert report.kth_roots[-1] < 1.0
    assert report.stable
    assert all(r is not None for r in report.ratios)
    assert report.partial_sums[-1] < float("inf")


def test_convergence_report_epsilon_floor_uses_all_axes():
    gens = (gaussian_problem(6, a=4.0), gaussian_problem(6, a=0.25))
    x = eo.LadderVector(gens, {(0, 0): 1.0})
    # 1/|a_2| = 4 dominates, so epsilon = 2 is too small even on axis 1
    with pytest.raises(ValueError, match="radius condition"):
        eo.convergence_report(x, 1, eo.SemiNormSpec(1, 2.0), 8, 6)
