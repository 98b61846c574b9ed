from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from cblab.algebra import GF, QQ
from cblab.polyring import (Form, Parametrization, binary_form_gcd_degree, compose, evaluate,
                            monomial_basis, multiply, partial_derivative)
from cblab.scenarios import twisted_cubic

from oracles import evaluate as oracle_eval, monomials, poly_mul


def x(i, n=4, field=QQ):
    return Form.variable(n, i, field)


def forms(nvars=3, max_degree=3):
    def build(d):
        coeffs = st.lists(st.integers(-3, 3), min_size=comb(d + nvars - 1, d),
                          max_size=comb(d + nvars - 1, d))
        return coeffs.map(lambda cs: Form(nvars, d, dict(zip(monomial_basis(nvars, d), cs))))
    return st.integers(0, max_degree).flatmap(build)


points3 = st.lists(st.integers(-4, 4), min_size=3, max_size=3).filter(any)


class TestMonomials:
    @pytest.mark.parametrize("nvars,d,size", [(3, 3, 10), (4, 2, 10), (2, 5, 6)])
    def test_sizes(self, nvars, d, size):
        assert len(monomial_basis(nvars, d)) == size
        assert set(monomial_basis(nvars, d)) == set(monomials(nvars, d))

    def test_graded_lex_order(self):
        assert monomial_basis(3, 2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1),
                                        (0, 0, 2))

    def test_negative_degree_empty(self):
        assert monomial_basis(3, -1) == ()


class TestForms:
    def test_evaluate_examples(self):
        f = x(0) * x(3) - x(1) * x(2)
        assert evaluate(f, (1, 0, 0, 1)) == 1
        q1 = x(0) * x(2) - x(1) ** 2
        assert evaluate(q1, (1, 1, 1, 1)) == 0

    def test_homogeneity_factor(self):
        f = Form(3, 3, {(3, 0, 0): 1, (1, 1, 1): -2, (0, 1, 2): 5})
        p = (1, 2, -1)
        assert evaluate(f, [2 * c for c in p]) == 8 * evaluate(f, p)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            evaluate(x(0), (0, 0, 0, 0))

    def test_partial_derivative_examples(self):
        f = Form(2, 3, {(2, 1): 1})
        assert partial_derivative(f, 0) == Form(2, 2, {(1, 1): 2})
        g = x(0) * x(3) - x(1) * x(2)
        assert partial_derivative(g, 2) == -x(1)
        assert not partial_derivative(x(0) ** 2, 1)

    def test_multiply_examples(self):
        f = x(0) + x(1)
        assert multiply(f, Form.constant(4, 1)) == f
        assert not multiply(f, Form.zero(4, 0))
        assert (x(0) - x(1)) * (x(0) + x(1)) == x(0) ** 2 - x(1) ** 2

    def test_zero_form_any_degree(self):
        z = Form.zero(3, 5)
        assert z.degree == 5 and not z.terms and str(z) == "0"

    def test_inhomogeneous_rejected(self):
        with pytest.raises(ValueError):
            Form(2, 2, {(1, 0): 1})

    def test_vector_round_trip(self):
        f = Form(3, 2, {(2, 0, 0): 1, (0, 1, 1): Fraction(-1, 2)})
        assert Form.from_vector(3, 2, f.to_vector(), QQ) == f

    def test_over_prime_field(self):
        f = GF(5)
        a = Form.variable(2, 0, f) * 3
        assert (a * 2) == Form.variable(2, 0, f)

    @given(forms(), forms())
    @settings(max_examples=60, deadline=None)
    def test_product_matches_oracle(self, f, g):
        expected = poly_mul(dict(f.terms), dict(g.terms))
        assert dict((f * g).terms) == expected

    @given(forms(), forms(), st.integers(0, 2))
    @settings(max_examples=60, deadline=None)
    def test_leibniz(self, f, g, i):
        lhs = partial_derivative(f * g, i)
        rhs = partial_derivative(f, i) * g + f * partial_derivative(g, i)
        if f.degree + g.degree == 0:
            assert not lhs and not rhs
        else:
            assert lhs == rhs

    @given(forms())
    @settings(max_examples=60, deadline=None)
    def test_euler(self, f):
        if f.degree == 0:
            return
        total = Form.zero(3, f.degree)
        for i in range(3):
            total = total + Form.variable(3, i) * partial_derivative(f, i)
        assert total == f.scale(f.degree)

    @given(forms(), points3)
    @settings(max_examples=60, deadline=None)
    def test_evaluate_matches_oracle(self, f, p):
        assert evaluate(f, p) == oracle_eval(dict(f.terms), p)


class TestParametrizations:
    def test_compose_examples(self):
        nu = twisted_cubic()
        s, t = Form.variable(2, 0), Form.variable(2, 1)
        assert compose(x(0), nu) == s ** 3
        assert not compose(x(0) * x(2) - x(1) ** 2, nu)
        line = Parametrization([s, Form.zero(2, 1), Form.zero(2, 1), t], "line")
        assert compose(x(0) * x(3), line) == s * t

    def test_base_point_rejected(self):
        s, t = Form.variable(2, 0), Form.variable(2, 1)
        with pytest.raises(ValueError):
            Parametrization([s * s, s * t, s * t], "with a base point")

    def test_gcd_degree(self):
        s, t = Form.variable(2, 0), Form.variable(2, 1)
        assert binary_form_gcd_degree([s * t, t * t]) == 1
        assert binary_form_gcd_degree([(s - t) * s, (s - t) * t]) == 1
        assert binary_form_gcd_degree([s ** 2, t ** 2]) == 0

    def test_immersion_of_twisted_cubic(self):
        assert twisted_cubic().check_immersion() == []

    def test_non_injective_flagged(self):
        s, t = Form.variable(2, 0), Form.variable(2, 1)
        double = Parametrization([s * s, t * t, s * t - s * t + t * t], "double cover")
        assert double.check_immersion()

    @given(forms(4, 2), forms(4, 2))
    @settings(max_examples=40, deadline=None)
    def test_compose_is_ring_homomorphism(self, f, g):
        nu = twisted_cubic()
        assert compose(f * g, nu) == compose(f, nu) * compose(g, nu)
        if f.degree == g.degree:
            assert compose(f + g, nu) == compose(f, nu) + compose(g, nu)

    @given(forms(4, 3), st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(any))
    @settings(max_examples=40, deadline=None)
    def test_compose_commutes_with_evaluation(self, f, st_pt):
        nu = twisted_cubic()
        assert evaluate(compose(f, nu), st_pt) == evaluate(f, nu(st_pt))
