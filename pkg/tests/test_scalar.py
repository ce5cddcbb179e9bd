from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grammar import parse_scalar
from scalar import I, LAMBDA, LAMBDA_PLUS, ONE, Q, Q_INV, ZERO, GaussQ, QScalar, qscalar_arith, qscalar_conj, qscalar_eval

gauss = st.builds(GaussQ, st.integers(-5, 5), st.integers(-5, 5))
qscalars = st.dictionaries(st.integers(-6, 6), gauss, max_size=4).map(QScalar)


@given(qscalars, qscalars, qscalars)
@settings(max_examples=150, deadline=None)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + ZERO == a and a * ONE == a
    assert a - a == ZERO


@given(qscalars, qscalars)
@settings(max_examples=100, deadline=None)
def test_conjugation_is_an_involutive_ring_map(a, b):
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()


@given(qscalars)
@settings(max_examples=100, deadline=None)
def test_render_parses_back(a):
    assert parse_scalar(a.render()) == a


def test_conjugation_fixes_q():
    assert Q.conj() == Q
    assert I.conj() == -I


def test_classical_limits():
    assert LAMBDA.eval_exact(1) == 0
    assert LAMBDA_PLUS.eval_exact(1) == 2
    assert qscalar_eval(LAMBDA, 1.0) == 0


def test_canonical_text():
    value = QScalar.q_power(Fraction(3, 2), GaussQ(1, -1)) + QScalar.q_power(-1, 2)
    assert value.render() == "(1 - i)*q^(3/2) + 2*q^(-1)"


def test_named_operations():
    a, b = Q + ONE, Q_INV
    assert qscalar_arith(a, b, "add") == a + b
    assert qscalar_arith(a, b, "sub") == a - b
    assert qscalar_arith(a, b, "mul") == ONE + Q_INV
    assert qscalar_conj(I * Q) == -I * Q
    with pytest.raises(ValueError):
        qscalar_arith(a, b, "div")


def test_negative_powers_only_for_monomials():
    assert Q ** -2 == QScalar.q_power(-2)
    assert (2 * Q) ** -1 == QScalar.q_power(-1, Fraction(1, 2))
    with pytest.raises(ArithmeticError):
        LAMBDA ** -1


def test_half_integer_exact_evaluation():
    half = QScalar.q_power(Fraction(1, 2))
    assert half.eval_exact(Fraction(9, 4)) == GaussQ(Fraction(3, 2))
    with pytest.raises(ValueError):
        half.eval_exact(2)
    assert abs(half.eval(2.0) - 2 ** 0.5) < 1e-15


def test_eval_rejects_nonpositive_q():
    with pytest.raises(ValueError):
        Q.eval(0)


def test_gauss_rejects_floats():
    with pytest.raises(TypeError):
        GaussQ.coerce(1.5j)
    with pytest.raises(TypeError):
        GaussQ(True)


def test_sympy_roundtrip():
    import sympy as sp

    t = sp.Symbol("t", positive=True)
    value = LAMBDA * LAMBDA_PLUS + I * QScalar.q_power(Fraction(-3, 2))
    assert QScalar.from_sympy(value.to_sympy(t), t) == value
