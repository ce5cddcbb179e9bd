from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

import sympy as sp

Number = Union[int, Fraction, "GaussQ", "QScalar"]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, bool):
        raise TypeError(f"Expected an exact rational, got {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"Expected an exact rational, got {value!r}")


def _render_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class GaussQ:
    """
    Exact Gaussian rational re + i*im.
    Used as the coefficient field of QScalar and as the exact value type of the lattice.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, key, value):
        raise AttributeError("GaussQ is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussQ":
        if isinstance(value, GaussQ):
            return value
        if isinstance(value, complex):
            raise TypeError("Floating point values are not exact; use GaussQ(re, im)")
        return cls(value)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussQ":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ(self.re / n, -self.im / n)

    def __add__(self, other):
        try:
            other = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussQ(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussQ.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussQ(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = GaussQ.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.render()})"

    def render(self) -> str:
        """Text form accepted by the expression grammar: 2, -1/3, i, 2*i, (1 - i)."""
        if self.im == 0:
            return _render_fraction(self.re)
        if self.im == 1:
            imag = "i"
        elif self.im == -1:
            imag = "-i"
        else:
            imag = f"{_render_fraction(self.im)}*i"
        if self.re == 0:
            return imag
        sign = "-" if self.im < 0 else "+"
        magnitude = GaussQ(0, abs(self.im)).render()
        return f"({_render_fraction(self.re)} {sign} {magnitude})"

    def to_sympy(self):
        return sp.Rational(self.re.numerator, self.re.denominator) + sp.I * sp.Rational(
            self.im.numerator, self.im.denominator
        )

    @classmethod
    def from_sympy(cls, value) -> "GaussQ":
        value = sp.nsimplify(value)
        re, im = sp.re(value), sp.im(value)
        if not (re.is_Rational and im.is_Rational):
            raise ValueError(f"{value} is not a Gaussian rational")
        return cls(_frac(re), _frac(im))


ZERO_G = GaussQ(0)
ONE_G = GaussQ(1)
I_G = GaussQ(0, 1)


def _sqrt_fraction(value: Fraction) -> Fraction:
    if value <= 0:
        raise ValueError("q must be positive")
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        raise ValueError(f"q = {value} has no rational square root; half-integer powers are not exact")
    return Fraction(num, den)


class QScalar:
    """
    Laurent polynomial in q with Gaussian-rational coefficients.

    Exponents are stored doubled, so q^(1/2) has key 1. Zero coefficients are
    never stored, which makes structural equality the value equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        for exp2, coeff in (terms or {}).items():
            coeff = GaussQ.coerce(coeff)
            if not coeff.is_zero():
                clean[int(exp2)] = coeff
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("QScalar is immutable")

    # constructors

    @classmethod
    def coerce(cls, value) -> "QScalar":
        if isinstance(value, QScalar):
            return value
        return cls({0: GaussQ.coerce(value)})

    @classmethod
    def q_power(cls, exponent, coeff=1) -> "QScalar":
        """coeff * q^exponent; exponent may be a half integer."""
        exp2 = _frac(exponent) * 2
        if exp2.denominator != 1:
            raise ValueError(f"Exponent {exponent} is not a half integer")
        return cls({int(exp2): coeff})

    @classmethod
    def from_sympy(cls, expr, t: sp.Symbol) -> "QScalar":
        """Inverse of to_sympy: a Laurent polynomial in t = q^(1/2)."""
        num, den = sp.fraction(sp.together(sp.expand(expr)))
        den_terms = sp.Poly(den, t).as_dict()
        if len(den_terms) != 1:
            raise ValueError(f"{expr} is not a Laurent polynomial in {t}")
        ((den_exp,), den_coeff), = den_terms.items()
        den_g = GaussQ.from_sympy(den_coeff)
        terms = {}
        if num != 0:
            for (exp,), coeff in sp.Poly(num, t).as_dict().items():
                terms[exp - den_exp] = GaussQ.from_sympy(coeff) / den_g
        return cls(terms)

    # structure

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def is_real(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def constant_term(self) -> GaussQ:
        return self._terms.get(0, ZERO_G)

    def degree_span(self) -> tuple:
        """(lowest, highest) exponent, as Fractions."""
        if not self._terms:
            return (Fraction(0), Fraction(0))
        keys = sorted(self._terms)
        return (Fraction(keys[0], 2), Fraction(keys[-1], 2))

    # arithmetic

    def __add__(self, other):
        try:
            other = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, ZERO_G) + c
        return QScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return QScalar({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return QScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, ZERO_G) + c1 * c2
        return QScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by monomials stays inside the Laurent ring
        other = QScalar.coerce(other)
        if not other.is_monomial():
            raise ArithmeticError(f"Cannot divide by the non-monomial {other.render()}")
        ((e, c),) = other._terms.items()
        return self * QScalar({-e: c.inverse()})

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ArithmeticError("Negative powers exist only for monomials")
            ((e, c),) = self._terms.items()
            return QScalar({e * n: c ** n})
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "QScalar":
        return QScalar({e: c.conj() for e, c in self._terms.items()})

    # comparison

    def __eq__(self, other):
        try:
            other = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # evaluation

    def eval(self, q_value: float) -> complex:
        if q_value <= 0:
            raise ValueError(f"q must be positive, got {q_value}")
        total = 0j
        for e, c in self.items():
            total += complex(c) * q_value ** (e / 2)
        return total

    def eval_exact(self, q_value) -> GaussQ:
        q_value = _frac(q_value)
        root = None
        total = ZERO_G
        for e, c in self._terms.items():
            if e % 2:
                if root is None:
                    root = _sqrt_fraction(q_value)
                total = total + c * GaussQ(root ** e)
            else:
                if q_value <= 0:
                    raise ValueError("q must be positive")
                total = total + c * GaussQ(q_value ** (e // 2))
        return total

    def to_sympy(self, t: sp.Symbol):
        """Expression in t = q^(1/2)."""
        return sp.Add(*[c.to_sympy() * t ** e for e, c in self._terms.items()])

    # text

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            negative = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
            mag = -c if negative else c
            if e == 0:
                body = mag.render()
            else:
                power = "q" if e == 2 else f"q^({_render_fraction(Fraction(e, 2))})"
                body = power if mag == ONE_G else f"{mag.render()}*{power}"
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f" - {body}" if negative else f" + {body}")
        return "".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QScalar({self.render()})"


def qscalar_arith(a: QScalar, b: QScalar, op: str) -> QScalar:
    """Exact add / sub / mul in canonical form."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"Unknown scalar operation: {op}")


def qscalar_conj(a: QScalar) -> QScalar:
    return a.conj()


def qscalar_eval(a: QScalar, q_value: float) -> complex:
    return a.eval(q_value)


def qsum(values: Iterable[QScalar]) -> QScalar:
    total = ZERO
    for v in values:
        total = total + v
    return total


ZERO = QScalar()
ONE = QScalar({0: 1})
I = QScalar({0: GaussQ(0, 1)})
Q = QScalar({2: 1})
Q_INV = QScalar({-2: 1})
LAMBDA = Q - Q_INV
LAMBDA_PLUS = Q + Q_INV
