"""
Noncommutative polynomial algebras of the quantum spaces.

Normal ordering is a memoized rewrite engine. A normal word is non-decreasing in
the space's generator order; appending a generator to a normal word either keeps
it normal or triggers the rule for the offending adjacent pair, whose right-hand
side is folded back onto the shortened word letter by letter. Every rule makes
the word smaller in degree-lexicographic order, so rewriting terminates.

The same engine serves the phase-space calculi (``phasespace``) and the free
real-frame coordinates: any object with ``name``, ``generators``, ``rewriter``
and ``conjugation`` can carry an ``NCPoly``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from config import ConfigError
from scalar import ONE, ZERO, GaussQ, QScalar
from utils.logger import setup_logger

logger = setup_logger(__name__)


class UnknownGeneratorError(KeyError):
    """A word uses a symbol that is not a generator of the space."""


class SpaceMismatchError(ValueError):
    """Operands belong to different spaces."""


class UnsupportedSpaceError(ValueError):
    """The operation is not defined for this space."""


class RewriteBoundExceeded(RuntimeError):
    """Rewriting nested deeper than the termination bound allows."""


def rewrite_bound(space, degree: int) -> int:
    """Number of words of length <= degree: no chain of strictly decreasing words is longer."""
    n = len(space.generators) if hasattr(space, "generators") else int(space)
    return sum(n ** k for k in range(degree + 1))


def _accumulate(target: dict, word: tuple, coeff: QScalar):
    total = target.get(word, ZERO) + coeff
    if total.is_zero():
        target.pop(word, None)
    else:
        target[word] = total


class RewriteSystem:
    """
    Oriented rules ``(a, b) -> [(coeff, word), ...]`` for every adjacent pair with
    rank(a) > rank(b). With free=True missing rules mean "no relation".
    """

    def __init__(self, order: Sequence[str], rules: Mapping[tuple, Iterable], free: bool = False):
        self.order = tuple(order)
        self.rank = {gen: i for i, gen in enumerate(self.order)}
        self.free = free
        self.rules = {}
        for lhs, rhs in rules.items():
            lhs = tuple(lhs)
            rhs = tuple((QScalar.coerce(c), tuple(w)) for c, w in rhs)
            self._check_rule(lhs, rhs)
            self.rules[lhs] = rhs
        self._cache: dict = {}
        self.max_depth = 0
        self.applications = 0

    def _check_rule(self, lhs: tuple, rhs: tuple):
        for word in (lhs,) + tuple(w for _, w in rhs):
            self.check(word)
        if len(lhs) != 2 or self.rank[lhs[0]] <= self.rank[lhs[1]]:
            raise ConfigError(f"Rule {lhs} does not rewrite an out-of-order pair")
        key = [self.rank[x] for x in lhs]
        for _, word in rhs:
            if len(word) > 2 or (len(word) == 2 and [self.rank[x] for x in word] >= key):
                raise ConfigError(f"Rule {lhs} -> {word} is not decreasing; rewriting may not terminate")

    def check(self, word: Iterable[str]):
        for letter in word:
            if letter not in self.rank:
                raise UnknownGeneratorError(letter)

    def append(self, word: tuple, letter: str, depth: int = 0) -> dict:
        """Normal form of word·letter for a normal word."""
        key = (word, letter)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if not word or self.rank[word[-1]] <= self.rank[letter]:
            result = {word + (letter,): ONE}
        else:
            pair = (word[-1], letter)
            rule = self.rules.get(pair)
            if rule is None:
                if not self.free:
                    raise ConfigError(f"No rewrite rule for the pair {pair}")
                result = {word + (letter,): ONE}
            else:
                if depth > rewrite_bound(len(self.order), len(word) + 1):
                    raise RewriteBoundExceeded(f"Rewriting {word + (letter,)} exceeded the termination bound")
                self.applications += 1
                self.max_depth = max(self.max_depth, depth + 1)
                result = {}
                prefix = word[:-1]
                for coeff, rhs in rule:
                    current = {prefix: coeff}
                    for r in rhs:
                        current = self._fold(current, r, depth + 1)
                    for w, c in current.items():
                        _accumulate(result, w, c)
        self._cache[key] = result
        return result

    def _fold(self, current: dict, letter: str, depth: int) -> dict:
        out: dict = {}
        for w, c in current.items():
            for w2, c2 in self.append(w, letter, depth).items():
                _accumulate(out, w2, c * c2)
        return out

    def reduce(self, word: Iterable[str], coeff=ONE) -> dict:
        word = tuple(word)
        self.check(word)
        current = {(): QScalar.coerce(coeff)}
        for letter in word:
            current = self._fold(current, letter, 0)
        return current

    def multiply(self, left: Mapping, right: Mapping) -> dict:
        """Product of two normal-ordered term maps."""
        out: dict = {}
        for w1, c1 in left.items():
            for w2, c2 in right.items():
                current = {w1: c1 * c2}
                for letter in w2:
                    current = self._fold(current, letter, 0)
                for w, c in current.items():
                    _accumulate(out, w, c)
        return out

    def sort_key(self, word: tuple):
        return (len(word), [self.rank[x] for x in word])


class NCPoly:
    """Finite map from normal-ordered words to QScalar coefficients."""

    __slots__ = ("space", "_terms")

    def __init__(self, space, terms: Mapping | None = None):
        object.__setattr__(self, "space", space)
        clean = {}
        for word, coeff in (terms or {}).items():
            coeff = QScalar.coerce(coeff)
            if not coeff.is_zero():
                clean[tuple(word)] = coeff
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, key, value):
        raise AttributeError("NCPoly is immutable")

    # constructors

    @classmethod
    def from_words(cls, space, items) -> "NCPoly":
        return normal_order(space, items)

    @classmethod
    def generator(cls, space, symbol: str) -> "NCPoly":
        space.rewriter.check([symbol])
        return cls(space, {(symbol,): ONE})

    @classmethod
    def constant(cls, space, value) -> "NCPoly":
        return cls(space, {(): QScalar.coerce(value)})

    # structure

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        key = self.space.rewriter.sort_key
        return sorted(self._terms.items(), key=lambda item: key(item[0]))

    def coefficient(self, word) -> QScalar:
        return self._terms.get(tuple(word), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degrees(self) -> set:
        return {len(word) for word in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def letters(self) -> set:
        return {letter for word in self._terms for letter in word}

    # arithmetic

    def _same_space(self, other: "NCPoly"):
        if other.space.name != self.space.name:
            raise SpaceMismatchError(f"{self.space.name} and {other.space.name} do not mix")

    def _coerce(self, other):
        if isinstance(other, NCPoly):
            self._same_space(other)
            return other
        try:
            return NCPoly.constant(self.space, other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for word, coeff in other._terms.items():
            _accumulate(out, word, coeff)
        return NCPoly(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.space, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            return ncmul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def scale(self, value) -> "NCPoly":
        value = QScalar.coerce(value)
        return NCPoly(self.space, {w: c * value for w, c in self._terms.items()})

    def map_coefficients(self, fn) -> "NCPoly":
        return NCPoly(self.space, {w: fn(c) for w, c in self._terms.items()})

    def rebase(self, space) -> "NCPoly":
        """The same element read in another carrier that contains these generators."""
        return normal_order(space, self._terms.items())

    # comparison

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return other.space.name == self.space.name and other._terms == self._terms
        try:
            return self._terms == NCPoly.constant(self.space, other)._terms
        except TypeError:
            return NotImplemented

    __hash__ = None

    # evaluation

    def specialize(self, q_value) -> dict:
        """Coefficients at a numeric q: exact GaussQ for rational q, complex otherwise."""
        if isinstance(q_value, float):
            return {w: c.eval(q_value) for w, c in self._terms.items()}
        return {w: c.eval_exact(q_value) for w, c in self._terms.items()}

    def render(self) -> str:
        from grammar import poly_to_expr, render

        return render(poly_to_expr(self.items()))

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"NCPoly[{self.space.name}]({self.render()})"


def normal_order(space, raw_word_poly) -> NCPoly:
    """Normal form of Σ coeff·word; raw_word_poly is an iterable of (word, coeff) or an NCPoly."""
    if isinstance(raw_word_poly, NCPoly):
        raw_word_poly = raw_word_poly.items()
    rewriter = space.rewriter
    out: dict = {}
    for word, coeff in raw_word_poly:
        for w, c in rewriter.reduce(word, coeff).items():
            _accumulate(out, w, c)
    return NCPoly(space, out)


def ncmul(a: NCPoly, b: NCPoly) -> NCPoly:
    a._same_space(b)
    return NCPoly(a.space, a.space.rewriter.multiply(a._terms, b._terms))


def normal_order_stats(space, raw_word_poly) -> dict:
    """Rewrite statistics on a fresh engine: nesting depth reached, rule applications, the bound."""
    source = space.rewriter
    fresh = RewriteSystem(source.order, source.rules, free=source.free)
    degree = 0
    for word, coeff in raw_word_poly:
        degree = max(degree, len(word))
        fresh.reduce(word, coeff)
    return {
        "max_depth": fresh.max_depth,
        "rule_applications": fresh.applications,
        "bound": rewrite_bound(space, degree),
    }


# conjugation


def _conjugate_letter(space, letter: str) -> NCPoly:
    table = space.conjugation
    if letter not in table:
        raise UnsupportedSpaceError(f"No conjugation rule for {letter} in {space.name}")
    return normal_order(space, [(w, c) for c, w in table[letter]])


def conjugate_words(space, raw_word_poly) -> NCPoly:
    """Conjugate of Σ coeff·word, taken word by word before any normal ordering."""
    out = NCPoly(space)
    letters = {}
    for word, coeff in raw_word_poly:
        term = NCPoly.constant(space, QScalar.coerce(coeff).conj())
        for letter in reversed(tuple(word)):
            if letter not in letters:
                letters[letter] = _conjugate_letter(space, letter)
            term = ncmul(term, letters[letter])
        out = out + term
    return out


def nc_conjugate(f: NCPoly) -> NCPoly:
    """Antilinear, antimultiplicative conjugation from the space's generator table."""
    return conjugate_words(f.space, f.items())


# commutative coefficient functions and the star product


class CoefficientPoly:
    """Commutative polynomial over the coordinate symbols: exponent vector -> QScalar."""

    __slots__ = ("space", "_terms")

    def __init__(self, space, terms: Mapping | None = None):
        object.__setattr__(self, "space", space)
        n = len(space.generators)
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or min(exps, default=0) < 0:
                raise ValueError(f"Exponent vector {exps} does not fit {space.name}")
            coeff = QScalar.coerce(coeff)
            if not coeff.is_zero():
                clean[exps] = coeff
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, key, value):
        raise AttributeError("CoefficientPoly is immutable")

    @classmethod
    def constant(cls, space, value) -> "CoefficientPoly":
        return cls(space, {(0,) * len(space.generators): QScalar.coerce(value)})

    @classmethod
    def variable(cls, space, symbol: str) -> "CoefficientPoly":
        if symbol not in space.generators:
            raise UnknownGeneratorError(symbol)
        exps = [0] * len(space.generators)
        exps[space.generators.index(symbol)] = 1
        return cls(space, {tuple(exps): ONE})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        return sorted(self._terms.items(), key=lambda item: (sum(item[0]), [-e for e in item[0]]))

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other):
        if not isinstance(other, CoefficientPoly):
            other = CoefficientPoly.constant(self.space, other)
        if other.space.name != self.space.name:
            raise SpaceMismatchError(f"{self.space.name} and {other.space.name} do not mix")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self._terms)
        for exps, coeff in other._terms.items():
            _accumulate(out, exps, coeff)
        return CoefficientPoly(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return CoefficientPoly(self.space, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                _accumulate(out, tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
        return CoefficientPoly(self.space, out)

    __rmul__ = __mul__

    def scale(self, value) -> "CoefficientPoly":
        value = QScalar.coerce(value)
        return CoefficientPoly(self.space, {e: c * value for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, CoefficientPoly):
            return other.space.name == self.space.name and other._terms == self._terms
        return NotImplemented

    __hash__ = None

    def evaluate(self, point: Mapping[str, object], q_value):
        """Value at coordinates point[generator]; exact when q and the point are rational."""
        exact = not isinstance(q_value, float) and all(not isinstance(v, (float, complex)) for v in point.values())
        total = GaussQ(0) if exact else 0j
        values = [point[gen] for gen in self.space.generators]
        for exps, coeff in self._terms.items():
            term = coeff.eval_exact(q_value) if exact else coeff.eval(q_value)
            for value, e in zip(values, exps):
                if e:
                    term = term * (GaussQ.coerce(value) ** e if exact else value ** e)
            total = total + term
        return total

    def render(self) -> str:
        return quantize(self).render()

    def __repr__(self):
        return f"CoefficientPoly[{self.space.name}]({self.render()})"


def _word_of(space, exps: tuple) -> tuple:
    return tuple(gen for gen, e in zip(space.generators, exps) for _ in range(e))


def quantize(f: CoefficientPoly) -> NCPoly:
    """W: commutative monomial -> normal-ordered word of the same multidegree."""
    return NCPoly(f.space, {_word_of(f.space, exps): c for exps, c in f._terms.items()})


def dequantize(f: NCPoly) -> CoefficientPoly:
    """Inverse of quantize on normal-ordered polynomials."""
    gens = f.space.generators
    out = {}
    for word, coeff in f.terms.items():
        out[tuple(word.count(gen) for gen in gens)] = coeff
    return CoefficientPoly(f.space, out)


def star_product(f: CoefficientPoly, g: CoefficientPoly, space=None) -> CoefficientPoly:
    """f ⊛ g = W⁻¹(W(f)·W(g))."""
    space = space or f.space
    if f.space.name != space.name or g.space.name != space.name:
        raise SpaceMismatchError("star_product operands must live in the same space")
    return dequantize(ncmul(quantize(f), quantize(g)))


# self-conjugate coordinates


@dataclass(frozen=True, eq=False)
class FreeSpace:
    """Free algebra on real-frame generators; every generator is its own conjugate."""

    name: str
    generators: tuple
    parent: object = field(repr=False)

    @property
    def rewriter(self) -> RewriteSystem:
        return _free_rewriter(self.generators)

    @property
    def conjugation(self) -> dict:
        return {gen: ((ONE, (gen,)),) for gen in self.generators}

    @staticmethod
    def real_frame(space) -> "FreeSpace":
        if space.real_frame is None:
            raise UnsupportedSpaceError(f"{space.name} has no self-conjugate coordinate frame")
        return _frame_for(space)


@lru_cache(maxsize=None)
def _free_rewriter(generators: tuple) -> RewriteSystem:
    return RewriteSystem(generators, {}, free=True)


@lru_cache(maxsize=None)
def _frame_for(space) -> FreeSpace:
    return FreeSpace(f"{space.name}/real", space.real_frame.generators, space)


def _substitute(poly: NCPoly, target, images: Mapping[str, tuple]) -> NCPoly:
    cache = {letter: NCPoly.from_words(target, [((sym,), c) for c, sym in row]) for letter, row in images.items()}
    out = NCPoly(target)
    for word, coeff in poly.items():
        term = NCPoly.constant(target, coeff)
        for letter in word:
            term = ncmul(term, cache[letter])
        out = out + term
    return out


def to_real_coords(f: NCPoly) -> NCPoly:
    """Rewrites an X-polynomial in the self-conjugate Y generators (free words)."""
    frame = FreeSpace.real_frame(f.space)
    return _substitute(f, frame, f.space.real_frame.inverse)


def from_real_coords(f: NCPoly, space=None) -> NCPoly:
    """Substitutes the Y rows and normal-orders in the coordinate algebra."""
    space = space or getattr(f.space, "parent", None)
    if space is None or space.real_frame is None:
        raise UnsupportedSpaceError("from_real_coords expects a polynomial over a real frame")
    return _substitute(f, space, space.real_frame.rows)


# relation checks


def relation_residuals(space, conjugated: bool = False) -> list:
    """
    Per defining relation, the normal form of lhs - rhs as written in its anchor
    (or of conj(lhs) - conj(rhs)). The anchor is parsed independently of the
    rewrite rule, in its printed orientation.
    """
    from grammar import evaluate, parse

    out = []
    for relation in space.relations:
        lhs, rhs = relation.anchor.split("=")
        src = f"conj({lhs}) - conj({rhs})" if conjugated else f"{lhs} - ({rhs})"
        residual = evaluate(parse(src, space), space)
        if not isinstance(residual, NCPoly):
            residual = NCPoly.constant(space, residual)
        out.append((relation, residual))
    return out


def relations_commute_at_one(space) -> dict:
    """anchor -> whether the relation degenerates to commutativity at q = 1."""
    out = {}
    for relation in space.relations:
        limit: dict = {}
        for coeff, word in relation.rhs:
            key = tuple(sorted(word))
            limit[key] = limit.get(key, GaussQ(0)) + coeff.eval_exact(1)
        limit = {k: v for k, v in limit.items() if not v.is_zero()}
        out[relation.anchor] = limit == {tuple(sorted(relation.lhs)): GaussQ(1)}
    return out
