from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chaos_census.chaos import (
    ChaosCoefficients,
    VariableCovering,
    cauchy_schwarz_sides,
    double_factorial,
    dl_gl_estimates,
    falling_factorial,
    gen_cauchy_schwarz_check,
    khintchine_reference,
    moment_combinatorial,
    moment_direct,
    norm_p,
    random_coefficients,
    random_variable_covering,
    t1_sandwich,
    t1_upper_holds,
    uniform_ratio,
    zlm_chain_sides,
)
from chaos_census.errors import NotEvenCovering, OddExponent, SizeLimitExceeded


def loop_moment(b: ChaosCoefficients, p: int) -> Fraction:
    """Oracle: plain Python average over every sign vector."""
    n = b.n
    total = Fraction(0)
    for eps in itertools.product((1, -1), repeat=n):
        f = sum((v * math.prod(eps[k - 1] for k in A) for A, v in b.terms.items()), Fraction(0))
        total += f**p
    return total / 2**n


coefficients = st.builds(
    lambda seed, l, m: random_coefficients(random.Random(seed), l, m),
    st.integers(0, 2**32),
    st.integers(1, 3),
    st.integers(3, 6),
)


@settings(max_examples=40, deadline=None)
@given(coefficients, st.sampled_from([2, 4, 6]))
def test_three_moment_routes_agree(b, p):
    want = loop_moment(b, p)
    assert moment_direct(b, p) == want
    assert moment_combinatorial(b, p) == want
    assert moment_combinatorial(b, p, method="multisets") == want


@given(coefficients)
def test_second_moment_is_norm(b):
    assert moment_combinatorial(b, 2) == b.norm_sq
    assert norm_p(b, 2) == pytest.approx(math.sqrt(b.norm_sq))


@given(coefficients, st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_homogeneity(b, lam):
    assert moment_combinatorial(b.scaled(lam), 4) == lam**4 * moment_combinatorial(b, 4)


def test_worked_fourth_moment():
    # f = ((e1+e2+e3)^2 - 3)/2 is 3 with probability 1/4 and -1 otherwise
    b = ChaosCoefficients.uniform(2, 3)
    assert b.norm_sq == 3
    assert moment_direct(b, 4) == moment_combinatorial(b, 4) == 21
    assert loop_moment(b, 4) == 21


def test_odd_exponents():
    b = ChaosCoefficients.uniform(2, 3)
    with pytest.raises(OddExponent):
        moment_combinatorial(b, 3)
    assert moment_direct(b, 3) == loop_moment(b, 3) == Fraction(27 - 3 * 1, 4) * Fraction(1)
    assert moment_direct(b, 3, absolute=True) == Fraction(27 + 3, 4)


def test_coefficient_json_and_validation():
    b = ChaosCoefficients.of(2, {(1, 2): Fraction(1, 3), (2, 4): -2})
    assert ChaosCoefficients.from_json(b.to_json()) == b
    with pytest.raises(ValueError):
        ChaosCoefficients.of(2, {(1, 1): 1})
    with pytest.raises(ValueError):
        ChaosCoefficients(2, {(2, 1): Fraction(1)})
    assert b.integerized() == ({(1, 2): 1, (2, 4): -6}, 3)


def test_sign_vector_limit():
    b = ChaosCoefficients.of(1, {(30,): 1})
    with pytest.raises(SizeLimitExceeded):
        moment_direct(b, 2)
    assert moment_combinatorial(b, 2) == 1


def test_upper_bound_on_uniform_sums():
    for m in range(3, 8):
        b = ChaosCoefficients.uniform(2, m)
        assert t1_upper_holds(b, 4, mu_full=2)
    rep = t1_sandwich(2, 4, ChaosCoefficients.uniform(2, 4), m_range=range(4, 8))
    assert rep["upper_holds"] and rep["uniform_nondecreasing"]
    assert rep["lower_constant"] < rep["ratio"] < rep["upper_constant"]


def test_uniform_ratio_values():
    ratios = [uniform_ratio(2, 4, m) for m in range(4, 11)]
    assert ratios == sorted(ratios)
    assert ratios[0] == pytest.approx(1.4698, abs=1e-4)
    assert ratios[-1] == pytest.approx(1.7968, abs=1e-4)


def test_lower_chain_sides():
    lhs, rhs = zlm_chain_sides(2, 4, 6)
    assert lhs == loop_moment(ChaosCoefficients.uniform(2, 6), 4) == 1725
    # 4! * 1 * (6*5*4*3) / (2^4 * 6^2): only the 4-cycle is standard at (2,4)
    assert rhs == 15
    with pytest.raises(ValueError):
        zlm_chain_sides(2, 4, 3)


def test_falling_and_double_factorial():
    assert falling_factorial(6, 4) == 360
    assert falling_factorial(5, 0) == 1
    assert [double_factorial(n) for n in (1, 3, 5, 7)] == [1, 3, 15, 105]


@pytest.mark.parametrize("n", [1, 2, 7, 50, 1000])
def test_khintchine_closed_forms(n):
    assert khintchine_reference(4, n)["value"] == 3 - Fraction(2, n)
    assert khintchine_reference(6, n)["value"] == 15 - Fraction(30, n) + Fraction(16, n * n)


def test_khintchine_rejects_odd():
    with pytest.raises(OddExponent):
        khintchine_reference(3, 5)


def test_cauchy_schwarz_two_sets_is_classical():
    a = {(0,): Fraction(1), (1,): Fraction(2)}
    v = VariableCovering([("x",), ("x",)], {"x": 2}, [a, a])
    sides = cauchy_schwarz_sides(v)
    assert sides["lhs"] == 5
    assert sides["lhs_sq"] == sides["rhs_sq"] == 25


def test_cauchy_schwarz_on_a_triangle():
    ones = {vals: Fraction(1) for vals in itertools.product(range(2), repeat=2)}
    v = VariableCovering([("x", "y"), ("y", "z"), ("x", "z")], {"x": 2, "y": 2, "z": 2}, [ones] * 3)
    sides = cauchy_schwarz_sides(v)
    assert sides["lhs"] == 8 and sides["rhs_sq"] == 64
    assert gen_cauchy_schwarz_check(v)


def test_cauchy_schwarz_needs_even_covering():
    v = VariableCovering([("x",), ("y",)], {"x": 2, "y": 2}, [{}, {}])
    with pytest.raises(NotEvenCovering):
        cauchy_schwarz_sides(v)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.booleans())
def test_cauchy_schwarz_random(seed, even):
    v = random_variable_covering(random.Random(seed), even=even)
    assert gen_cauchy_schwarz_check(v)


def test_estimates_are_labeled_observations():
    out = dl_gl_estimates({2: {4: 2, 6: 4}}, [(2, 4, ChaosCoefficients.uniform(2, 5))])
    assert out["note"] == "observation, not assertion"
    assert out["d_estimate"][2] > 0 and out["g_estimate"][2] > 0
