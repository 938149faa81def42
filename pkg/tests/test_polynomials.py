import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpuniform.errors import FormatError, ValidationError
from fpuniform.field import digit_table, enumerate_vectors
from fpuniform.polynomials import (
    BiasResult,
    Polynomial,
    bias,
    family_size,
    monomials_up_to,
    random_polynomial,
)


@st.composite
def polys(draw, max_n=3, primes=(2, 3, 5)):
    p = draw(st.sampled_from(primes))
    n = draw(st.integers(1, max_n))
    monos = monomials_up_to(p, n, min(p - 1, 3))
    coeffs = draw(st.lists(st.integers(0, p - 1), min_size=len(monos), max_size=len(monos)))
    return Polynomial.from_coefficients(p, n, monos, coeffs)


def test_zero_degree_sentinel():
    assert Polynomial.zero(3, 2).degree == -1
    assert Polynomial.constant(3, 2, 2).degree == 0
    assert Polynomial.constant(3, 2, 3).degree == -1  # 3 = 0 mod 3


def test_term_normalization():
    P = Polynomial(3, 2, {(1, 0): 3, (0, 1): 4})
    assert P.terms == {(0, 1): 1}


def test_exponent_validation():
    with pytest.raises(ValidationError):
        Polynomial(2, 2, {(2, 0): 1})
    with pytest.raises(ValidationError):
        Polynomial(3, 2, {(1,): 1})


def test_immutability():
    P = Polynomial.variable(3, 2, 0)
    with pytest.raises(AttributeError):
        P.p = 5


def test_derivative_of_product_golden():
    # Delta_{e1}(x1*x2) = (x1+1)x2 - x1x2 = x2 over F_2
    P = Polynomial(2, 2, {(1, 1): 1})
    D = P.additive_derivative((1, 0))
    assert D.terms == {(0, 1): 1}


def test_derivative_square_golden():
    # Delta_y(x^2) = 2yx + y^2 over F_5
    P = Polynomial(5, 1, {(2,): 1})
    D = P.additive_derivative((3,))
    assert D.terms == {(1,): 6 % 5, (0,): 9 % 5}


@given(polys(), st.data())
@settings(max_examples=60, deadline=None)
def test_derivative_matches_shift_pointwise(P, data):
    y = tuple(data.draw(st.integers(0, P.p - 1)) for _ in range(P.n))
    D = P.additive_derivative(y)
    for x in enumerate_vectors(P.p, P.n):
        shifted = tuple((a + b) % P.p for a, b in zip(x, y))
        assert D.evaluate(x) == (P.evaluate(shifted) - P.evaluate(x)) % P.p


@given(polys(), st.data())
@settings(max_examples=40, deadline=None)
def test_derivative_drops_degree(P, data):
    y = tuple(data.draw(st.integers(0, P.p - 1)) for _ in range(P.n))
    assert P.additive_derivative(y).degree < max(P.degree, 0)


@given(polys(), st.data())
@settings(max_examples=25, deadline=None)
def test_deg_plus_one_derivatives_vanish(P, data):
    d = max(P.degree, 0)
    zero = Polynomial.zero(P.p, P.n)
    out = P
    for _ in range(d + 1):
        y = tuple(data.draw(st.integers(0, P.p - 1)) for _ in range(P.n))
        out = out.additive_derivative(y)
    assert out == zero


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_product_matches_pointwise(P, Q):
    if (P.p, P.n) != (Q.p, Q.n):
        return
    R = P * Q
    assert all(e < P.p for exps in R.terms for e in exps)
    pv, qv, rv = P.value_table(), Q.value_table(), R.value_table()
    assert np.array_equal(rv, (pv * qv) % P.p)


def test_fermat_reduction():
    x = Polynomial.variable(2, 1, 0)
    assert (x * x).terms == x.terms  # x^2 = x over F_2
    y = Polynomial(3, 1, {(2,): 1})
    assert (y * y).terms == {(2,): 1}  # x^4 = x^2 over F_3


@given(polys())
@settings(max_examples=40, deadline=None)
def test_value_table_matches_evaluate(P):
    table = P.value_table()
    for idx, x in enumerate(enumerate_vectors(P.p, P.n)):
        assert table[idx] == P.evaluate(x)
    pts = digit_table(P.p, P.n)
    assert np.array_equal(P.values_at(pts), table)


def test_homogeneous_flag():
    assert Polynomial(3, 2, {(1, 1): 1, (2, 0): 2}).is_homogeneous()
    assert not Polynomial(3, 2, {(1, 1): 1, (1, 0): 2}).is_homogeneous()
    assert Polynomial.zero(3, 2).is_homogeneous()


def test_text_round_trip():
    P = Polynomial(3, 2, {(1, 1): 1, (0, 2): 2})
    assert P.to_text() == "2*x2^2 + 1*x1*x2"
    assert Polynomial.from_text(3, 2, P.to_text()) == P
    assert Polynomial.from_text(3, 2, "0") == Polynomial.zero(3, 2)
    assert Polynomial.from_text(2, 2, "x1*x2 + 1") == Polynomial(
        2, 2, {(1, 1): 1, (0, 0): 1}
    )


def test_text_rejects_garbage():
    with pytest.raises(FormatError):
        Polynomial.from_text(3, 2, "x3")
    with pytest.raises(FormatError):
        Polynomial.from_text(3, 2, "1*y2")


def test_json_round_trip():
    P = Polynomial(5, 3, {(1, 2, 0): 4, (0, 0, 1): 1})
    obj = P.to_json_dict()
    assert obj["schema"] == "fpuniform/v1"
    assert Polynomial.from_json_dict(obj) == P


def test_json_error_pointer():
    with pytest.raises(FormatError) as exc:
        Polynomial.from_json_dict({"p": 3, "n": 2, "terms": [{"exps": [1]}]})
    assert "/terms/0" in str(exc.value)


def test_monomials_up_to():
    assert monomials_up_to(2, 2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert monomials_up_to(3, 2, 2, exactly=True) == [(0, 2), (1, 1), (2, 0)]
    # exponent cap: no x^2 over F_2 even at degree 2
    assert monomials_up_to(2, 2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert family_size(2, 2, 1) == 8


def test_bias_product_golden():
    # e_2(x1x2) averages to (3 - 1)/4 over F_2^2
    P = Polynomial(2, 2, {(1, 1): 1})
    assert math.isclose(float(bias(P)), 0.5, abs_tol=1e-12)


def test_bias_linear_is_zero():
    P = Polynomial(5, 2, {(1, 0): 3})
    assert float(bias(P)) < 1e-12


def test_bias_constant_is_one():
    P = Polynomial(3, 2, {(0, 0): 2})
    assert math.isclose(float(bias(P)), 1.0, abs_tol=1e-12)


@given(polys(max_n=2))
@settings(max_examples=30, deadline=None)
def test_bias_invariant_under_constants(P):
    shifted = P + Polynomial.constant(P.p, P.n, 1)
    assert math.isclose(float(bias(P)), float(bias(shifted)), abs_tol=1e-12)


def test_bias_mc_tracks_exact():
    P = Polynomial(3, 3, {(1, 1, 0): 1, (0, 0, 2): 2})
    exact = float(bias(P))
    est = bias(P, mode="mc", samples=20000, seed=7)
    assert isinstance(est, BiasResult)
    assert est.stderr is not None
    assert abs(est.value - exact) < 5 * est.stderr + 1e-3


def test_bias_mc_needs_samples():
    P = Polynomial(2, 2, {(1, 1): 1})
    with pytest.raises(ValidationError):
        bias(P, mode="mc")


def test_random_polynomial_exact_degree():
    for seed in range(40):
        P = random_polynomial(3, 2, 2, seed=seed)
        assert P.degree == 2
        H = random_polynomial(3, 2, 2, homogeneous=True, seed=seed)
        assert H.degree == 2 and H.is_homogeneous()


def test_random_polynomial_rejects_high_degree():
    with pytest.raises(ValidationError):
        random_polynomial(2, 3, 2)
    with pytest.raises(ValidationError):
        random_polynomial(3, 3, 3)


def test_random_polynomial_uniform_over_exact_degree_draws():
    # p=3, n=1, d=1: six polynomials c1*x + c0 with c1 != 0
    counts = Counter()
    draws = 10000
    for seed in range(draws):
        P = random_polynomial(3, 1, 1, seed=seed)
        counts[tuple(sorted(P.terms.items()))] += 1
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / draws - 1 / 6) < 0.02


def test_derivative_direction_zero_is_zero():
    P = random_polynomial(5, 2, 3, seed=1)
    assert P.additive_derivative((0, 0)) == Polynomial.zero(5, 2)
