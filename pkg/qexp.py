"""
Truncated q-exponentials from the momentum eigenvalue equations.

The series u = Σ c_{αβ} x^α ⊗ p^β is solved degree by degree. At degree n the
unknowns c_{αβ} (|α| = |β| = n) satisfy, for every momentum index j,

    left:  Σ_α c_{αβ} (i∂^j ▷ x^α) = [coefficient of p^β in u_{n-1} ⊛ p^j]
    dual:  Σ_α c_{αβ} (x^α ◁ i∂^j) = [coefficient of p^β in p^j ⊛ u_{n-1}]

one block per p-monomial β. Coefficients are exact elements of Q(t)[i] with
t = q^(1/2); blocks are solved by fraction-free row reduction in sympy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement

import sympy as sp
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from phasespace import DerivKind, PhaseAlgebra, load_phase_algebra, momentum_free_part, phase_normal_order
from scalar import ONE, GaussQ, QScalar
from utils.logger import setup_logger

logger = setup_logger(__name__)

T = sp.Symbol("t", positive=True)
FIELD = QQ.frac_field(T)


class SingularSystemError(ArithmeticError):
    """The linear system at some degree is singular or inconsistent."""

    def __init__(self, message: str, degree: int):
        super().__init__(message)
        self.degree = degree


class QCoeff:
    """re + i*im with re, im rational functions of t = q^(1/2)."""

    __slots__ = ("re", "im")

    def __init__(self, re=None, im=None):
        self.re = FIELD.zero if re is None else re
        self.im = FIELD.zero if im is None else im

    @staticmethod
    @lru_cache(maxsize=None)
    def from_qscalar(value: QScalar) -> "QCoeff":
        re = sum((sp.Rational(c.re.numerator, c.re.denominator) * T ** e for e, c in value.terms.items()), sp.Integer(0))
        im = sum((sp.Rational(c.im.numerator, c.im.denominator) * T ** e for e, c in value.terms.items()), sp.Integer(0))
        return QCoeff(FIELD.from_sympy(re), FIELD.from_sympy(im))

    @classmethod
    def one(cls) -> "QCoeff":
        return cls(FIELD.one)

    def is_zero(self) -> bool:
        return FIELD.is_zero(self.re) and FIELD.is_zero(self.im)

    def __add__(self, other: "QCoeff") -> "QCoeff":
        return QCoeff(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "QCoeff") -> "QCoeff":
        return QCoeff(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "QCoeff":
        return QCoeff(-self.re, -self.im)

    def __mul__(self, other: "QCoeff") -> "QCoeff":
        return QCoeff(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    def __eq__(self, other):
        if not isinstance(other, QCoeff):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    def to_sympy(self):
        return FIELD.to_sympy(self.re) + sp.I * FIELD.to_sympy(self.im)

    def to_qscalar(self) -> QScalar:
        """Exact QScalar when the coefficient is a Laurent polynomial in t."""
        return QScalar.from_sympy(self.to_sympy(), T)

    def at_one(self) -> GaussQ:
        return GaussQ.from_sympy(self.to_sympy().subs(T, 1))

    def eval(self, q_value: float) -> complex:
        return complex(self.to_sympy().subs(T, sp.sqrt(sp.Float(q_value))).evalf())

    def render(self) -> str:
        if self.is_zero():
            return "0"
        num, den = sp.fraction(sp.together(self.to_sympy()))
        if sp.Poly(den, T).is_monomial:
            return self.to_qscalar().render()
        return f"({QScalar.from_sympy(num, T).render()})/({QScalar.from_sympy(den, T).render()})"

    def __repr__(self):
        return f"QCoeff({self.render()})"


@dataclass
class BiSeries:
    """Truncated Σ c (x-word ⊗ p-word); x and p words are normal-ordered."""

    space: object
    kind: DerivKind
    max_degree: int
    dual: bool = False
    terms: dict = field(default_factory=dict)

    def coefficient(self, x_word, p_word) -> QCoeff:
        return self.terms.get((tuple(x_word), tuple(p_word)), QCoeff())

    def items(self) -> list:
        rank = {gen: i for i, gen in enumerate(self.space.generators)}

        def key(item):
            (x_word, p_word), _ = item
            return (len(x_word), [rank[x] for x in x_word], [rank[_coordinate(p)] for p in p_word])

        return sorted(self.terms.items(), key=key)

    def degrees_paired(self) -> bool:
        return all(len(x) == len(p) for x, p in self.terms)

    def at_one(self) -> dict:
        """(x exponents, p exponents) -> exact coefficient at q = 1."""
        gens = self.space.generators
        out = {}
        for (x_word, p_word), coeff in self.terms.items():
            x_exps = tuple(x_word.count(g) for g in gens)
            p_exps = tuple([_coordinate(p) for p in p_word].count(g) for g in gens)
            value = coeff.at_one()
            if not value.is_zero():
                out[(x_exps, p_exps)] = value
        return out

    def dump(self) -> list[str]:
        lines = []
        for (x_word, p_word), coeff in self.items():
            x_text = "*".join(x_word) or "1"
            p_text = "*".join(p_word) or "1"
            lines.append(f"({x_text} | {p_text}) : {coeff.render()}")
        return lines


def _coordinate(momentum: str) -> str:
    return "X" + momentum[2:] if momentum.startswith("Ph") else "X" + momentum[1:]


class _Blocks:
    """Cached actions on x-monomials and products of p-monomials for one calculus."""

    def __init__(self, alg: PhaseAlgebra, hatted: bool, dual: bool):
        self.alg = alg
        self.dual = dual
        self.calc = alg.calculus(hatted, "right" if dual else "left")
        self.momenta = dict(zip(alg.space.generators, alg.momentum_generators(hatted)))
        self.labels = alg.space.labels
        self._actions: dict = {}
        self._products: dict = {}

    def x_monomials(self, degree: int) -> list:
        return list(combinations_with_replacement(self.alg.space.generators, degree))

    def p_monomials(self, degree: int) -> list:
        return [tuple(self.momenta[x] for x in word) for word in self.x_monomials(degree)]

    def action(self, j: str, x_word: tuple) -> dict:
        """i∂^j ▷ x^α (left) or x^α ◁ i∂^j (dual) as {x-word: QScalar}."""
        key = (j, x_word)
        if key not in self._actions:
            p = self.calc.momentum(j)
            if self.dual:
                product = self.calc.rewriter.multiply({x_word: ONE}, {(p,): ONE})
                self._actions[key] = {w: -c for w, c in momentum_free_part(product, self.calc).items()}
            else:
                product = self.calc.rewriter.multiply({(p,): ONE}, {x_word: ONE})
                self._actions[key] = momentum_free_part(product, self.calc)
        return self._actions[key]

    def p_product(self, p_word: tuple, j: str) -> dict:
        """p^β ⊛ p^j (left) or p^j ⊛ p^β (dual)."""
        key = (p_word, j)
        if key not in self._products:
            p = (self.calc.momentum(j),)
            left, right = (p, p_word) if self.dual else (p_word, p)
            self._products[key] = self.calc.rewriter.multiply({left: ONE}, {right: ONE})
        return self._products[key]


def _solve_block(matrix: list, rhs: list, n_unknowns: int, degree: int, where: str) -> list:
    """Exact solution of a complex system given as rows of QCoeff."""
    rows = []
    for row, b in zip(matrix, rhs):
        rows.append([c.re for c in row] + [-c.im for c in row] + [b.re])
        rows.append([c.im for c in row] + [c.re for c in row] + [b.im])
    width = 2 * n_unknowns + 1
    reduced, pivots = DomainMatrix(rows, (len(rows), width), FIELD).rref()
    if width - 1 in pivots:
        raise SingularSystemError(f"Inconsistent system at degree {degree} ({where})", degree)
    if len(pivots) < 2 * n_unknowns:
        raise SingularSystemError(f"Singular system at degree {degree} ({where})", degree)
    dense = reduced.to_Matrix()
    values = [FIELD.zero] * (2 * n_unknowns)
    for row, col in enumerate(pivots):
        values[col] = FIELD.from_sympy(dense[row, width - 1])
    return [QCoeff(values[i], values[n_unknowns + i]) for i in range(n_unknowns)]


def _solve(space, kind: DerivKind | None, N: int, dual: bool) -> BiSeries:
    if N < 0:
        raise ValueError("The truncation degree must be non-negative")
    kind = kind or DerivKind()
    hatted = kind.hatted
    alg = load_phase_algebra(space)
    blocks = _Blocks(alg, hatted, dual)
    series = BiSeries(space, DerivKind(hatted, "right" if dual else "left"), N, dual)
    series.terms[((), ())] = QCoeff.one()
    where = f"{space.name}, {series.kind.tag}{' dual' if dual else ''}"

    for degree in range(1, N + 1):
        xs = blocks.x_monomials(degree)
        lower_xs = blocks.x_monomials(degree - 1)
        lower_ps = blocks.p_monomials(degree - 1)
        for beta in blocks.p_monomials(degree):
            matrix, rhs = [], []
            for j in blocks.labels:
                actions = [blocks.action(j, alpha) for alpha in xs]
                for gamma in lower_xs:
                    matrix.append([QCoeff.from_qscalar(act.get(gamma, QScalar())) for act in actions])
                    total = QCoeff()
                    for beta_low in lower_ps:
                        c = series.terms.get((gamma, beta_low))
                        if c is None:
                            continue
                        weight = blocks.p_product(beta_low, j).get(beta)
                        if weight is not None:
                            total = total + c * QCoeff.from_qscalar(weight)
                    rhs.append(total)
            for alpha, value in zip(xs, _solve_block(matrix, rhs, len(xs), degree, where)):
                if not value.is_zero():
                    series.terms[(alpha, beta)] = value
        logger.debug(f"qexp {where}: degree {degree} solved, {len(series.terms)} terms")
    logger.info(f"Solved q-exponential for {where} through degree {N}")
    return series


def solve_qexp(space, kind: DerivKind | None = None, N: int = 8) -> BiSeries:
    """Series with constant term 1 solving i∂^j ▷ u = u ⊛ p^j through degree N."""
    return _solve(space, kind, N, dual=False)


def solve_qexp_dual(space, kind: DerivKind | None = None, N: int = 8) -> BiSeries:
    """Series with constant term 1 solving ū ◁ i∂^j = p^j ⊛ ū through degree N."""
    return _solve(space, kind, N, dual=True)


def residual(series: BiSeries, alg: PhaseAlgebra | None = None) -> dict:
    """
    Nonzero entries (j, x-word, p-word) of the eigenvalue equation with the series
    substituted, through x-degree N - 1. Whole words are normal-ordered in the
    phase-space calculus; nothing is shared with the solver.
    """
    alg = alg or load_phase_algebra(series.space)
    hatted = series.kind.hatted
    side = "right" if series.dual else "left"
    calc = alg.calculus(hatted, side)
    sign = -ONE if series.dual else ONE
    out: dict = {}

    def add(key, value: QCoeff):
        out[key] = out.get(key, QCoeff()) + value

    for (x_word, p_word), coeff in series.terms.items():
        for j in alg.space.labels:
            p = calc.momentum(j)
            if x_word:
                word = x_word + (p,) if series.dual else (p,) + x_word
                acted = phase_normal_order(alg, [(word, sign)], hatted, side)
                for w, c in acted.terms.items():
                    if not calc.momenta.intersection(w):
                        add((j, w, p_word), coeff * QCoeff.from_qscalar(c))
            if len(x_word) <= series.max_degree - 1:
                word = (p,) + p_word if series.dual else p_word + (p,)
                for w, c in phase_normal_order(alg, [(word, ONE)], hatted, side).terms.items():
                    add((j, x_word, w), -(coeff * QCoeff.from_qscalar(c)))
    return {key: value for key, value in out.items() if len(key[1]) <= series.max_degree - 1 and not value.is_zero()}


def perturbation_breaks_residual(series: BiSeries, key: tuple) -> bool:
    """Adds 1 to one solved coefficient and reports whether the residual stops vanishing."""
    perturbed = BiSeries(series.space, series.kind, series.max_degree, series.dual, dict(series.terms))
    perturbed.terms[key] = perturbed.coefficient(*key) + QCoeff.one()
    return bool(residual(perturbed))


def classical_coefficients(space, N: int, metric_factor: QScalar = ONE) -> dict:
    """Multinomial coefficients of exp(-i x^l G_{lm} p^m) through degree N, G the inverse metric at q = 1."""
    n = len(space.generators)
    xs = sp.symbols(f"x0:{n}")
    ps = sp.symbols(f"p0:{n}")
    g = sp.zeros(n, n)
    for (k, l), value in space.metric.items():
        g[space.labels.index(k), space.labels.index(l)] = (value * metric_factor).eval_exact(1).to_sympy()
    inverse = g.inv()
    exponent = sum(-sp.I * xs[l] * inverse[l, m] * ps[m] for l in range(n) for m in range(n))
    series = sp.expand(sum(exponent ** k / sp.factorial(k) for k in range(N + 1)))
    out = {}
    for monomial, coeff in sp.Poly(series, *xs, *ps).terms():
        out[(tuple(monomial[:n]), tuple(monomial[n:]))] = GaussQ.from_sympy(coeff)
    return out


def matches_classical(series: BiSeries) -> bool:
    alg = load_phase_algebra(series.space)
    factor = alg.rmatrix.hatted_metric_factor if series.kind.hatted else ONE
    return series.at_one() == classical_coefficients(series.space, series.max_degree, factor)
