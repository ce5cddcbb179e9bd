"""
Expression grammar for scalars, coordinate polynomials, phase-space words and
Grassmann monomials.

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := unary ('*' unary)*
    unary    := '-' unary | power
    power    := atom ['^' exponent]
    exponent := INT | '(' ['+'|'-'] NUMBER ')'
    atom     := NUMBER | 'q' | 'i' | 'lambda' | 'lambda_plus' | SYMBOL
              | 'conj' '(' expr ')' | 'star' '(' expr ',' expr ')'
              | DERIV '(' expr ')' | '(' expr ')'

NUMBER is an integer or a fraction of integers (``3``, ``1/16``). SYMBOL is any
generator the selected space knows: coordinates (``X+``), momenta (``P+``,
hatted ``Ph+``), Grassmann generators (``theta3/0``) and real-frame coordinates
(``Y1``). DERIV is ``d`` followed by a derivative kind (``L``, ``R``, ``hL``,
``hR``) and a coordinate label, e.g. ``dL1(X1*X2)``.

Symbols are matched longest first, so ``X3/0``-style labels never need quoting.
Constants are folded while parsing, which makes ``render`` canonical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scalar import I, LAMBDA, LAMBDA_PLUS, ONE, Q, ZERO, QScalar
from utils.logger import setup_logger

logger = setup_logger(__name__)

KEYWORDS = ("lambda_plus", "lambda", "conj", "star", "q", "i")
DERIV_KINDS = ("hL", "hR", "L", "R")
_NUMBER = re.compile(r"\d+(?:/\d+)?")
_OPERATORS = "+-*^(),"


class ParseError(ValueError):
    """Syntax error at a character position of the source text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# AST


@dataclass(frozen=True)
class Num:
    value: QScalar


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Conj:
    arg: object


@dataclass(frozen=True)
class Star:
    left: object
    right: object


@dataclass(frozen=True)
class Deriv:
    kind: str
    label: str
    arg: object


def make_product(factors) -> object:
    """Flattens nested products and folds every scalar into one leading Num."""
    coeff = ONE
    rest = []
    for factor in factors:
        parts = factor.factors if isinstance(factor, Product) else (factor,)
        for part in parts:
            if isinstance(part, Num):
                coeff = coeff * part.value
            else:
                rest.append(part)
    if not rest or coeff.is_zero():
        return Num(coeff)
    if coeff == ONE:
        return rest[0] if len(rest) == 1 else Product(tuple(rest))
    return Product((Num(coeff),) + tuple(rest))


def make_sum(terms) -> object:
    """Flattens nested sums; constants are combined into a single leading Num."""
    constant = ZERO
    rest = []
    for term in terms:
        parts = term.terms if isinstance(term, Sum) else (term,)
        for part in parts:
            if isinstance(part, Num):
                constant = constant + part.value
            else:
                rest.append(part)
    if not rest:
        return Num(constant)
    if not constant.is_zero():
        rest.insert(0, Num(constant))
    return rest[0] if len(rest) == 1 else Sum(tuple(rest))


def negate(node) -> object:
    return make_product([Num(-ONE), node])


# lexer


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


@lru_cache(maxsize=None)
def _symbols_for(space_name: str | None) -> dict:
    """Every symbol text known in a space, mapped to its category."""
    if space_name is None:
        return {}
    from spaces import load_space

    space = load_space(space_name)
    table = {}
    for gen in space.generators:
        table[gen] = "X"
    for label in space.labels:
        table[f"P{label}"] = "P"
        table[f"Ph{label}"] = "Ph"
        for kind in DERIV_KINDS:
            table[f"d{kind}{label}"] = "DERIV"
    if space.real_frame is not None:
        for gen in space.real_frame.generators:
            table[gen] = "Y"
    try:
        from grassmann import load_grassmann_space

        for label in load_grassmann_space(space_name).basis:
            table[f"theta{label}"] = "theta"
    except KeyError:
        logger.debug(f"No Grassmann data for {space_name}")
    return table


def tokenize(src: str, symbols: dict) -> list[Token]:
    candidates = sorted(list(symbols) + list(KEYWORDS), key=len, reverse=True)
    tokens = []
    pos = 0
    while pos < len(src):
        ch = src[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            match = _NUMBER.match(src, pos)
            tokens.append(Token("NUM", match.group(), pos))
            pos = match.end()
            continue
        if ch in _OPERATORS:
            tokens.append(Token("OP", ch, pos))
            pos += 1
            continue
        for text in candidates:
            if src.startswith(text, pos):
                kind = "KW" if text in KEYWORDS else symbols[text]
                if kind not in ("KW", "DERIV"):
                    kind = "SYM"
                tokens.append(Token(kind, text, pos))
                pos += len(text)
                break
        else:
            raise ParseError(f"Unknown symbol starting with {src[pos:pos + 8]!r}", pos)
    return tokens


# parser


class _Parser:
    def __init__(self, src: str, symbols: dict):
        self.src = src
        self.tokens = tokenize(src, symbols)
        self.index = 0

    def peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def position(self) -> int:
        token = self.peek()
        return token.pos if token else len(self.src)

    def accept(self, text: str) -> bool:
        token = self.peek()
        if token is not None and token.kind in ("OP", "KW") and token.text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.peek().text if self.peek() else "end of input"
            raise ParseError(f"Expected {text!r}, found {found!r}", self.position())

    def parse(self):
        if not self.tokens:
            raise ParseError("Empty expression", 0)
        node = self.expr()
        if self.peek() is not None:
            raise ParseError(f"Unexpected {self.peek().text!r}", self.position())
        return node

    def expr(self):
        terms = []
        if self.accept("-"):
            terms.append(negate(self.term()))
        else:
            self.accept("+")
            terms.append(self.term())
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(negate(self.term()))
            else:
                return make_sum(terms)

    def term(self):
        factors = [self.unary()]
        while self.accept("*"):
            factors.append(self.unary())
        return make_product(factors)

    def unary(self):
        if self.accept("-"):
            return negate(self.unary())
        return self.power()

    def power(self):
        start = self.position()
        base = self.atom()
        if not self.accept("^"):
            return base
        exponent = self.exponent()
        return self._raise(base, exponent, start)

    def exponent(self) -> Fraction:
        token = self.peek()
        if token is not None and token.kind == "NUM" and "/" not in token.text:
            self.index += 1
            return Fraction(int(token.text))
        self.expect("(")
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        token = self.peek()
        if token is None or token.kind != "NUM":
            raise ParseError("Expected a rational exponent", self.position())
        self.index += 1
        self.expect(")")
        return sign * Fraction(token.text)

    def _raise(self, base, exponent: Fraction, pos: int):
        if isinstance(base, Num):
            value = base.value
            if exponent.denominator == 1:
                try:
                    return Num(value ** int(exponent))
                except ArithmeticError as e:
                    raise ParseError(str(e), pos) from e
            if value.is_monomial():
                ((exp2, coeff),) = value.terms.items()
                if coeff == 1:
                    try:
                        return Num(QScalar.q_power(Fraction(exp2, 2) * exponent))
                    except ValueError as e:
                        raise ParseError(str(e), pos) from e
            raise ParseError("Rational exponents apply to powers of q only", pos)
        if exponent.denominator != 1 or exponent < 0:
            raise ParseError("Generators take non-negative integer exponents only", pos)
        return make_product([base] * int(exponent)) if exponent else Num(ONE)

    def atom(self):
        token = self.peek()
        if token is None:
            raise ParseError("Unexpected end of input", len(self.src))
        self.index += 1
        if token.kind == "NUM":
            return Num(QScalar.coerce(Fraction(token.text)))
        if token.kind == "SYM":
            return Sym(token.text)
        if token.kind == "DERIV":
            body = token.text[1:]
            kind = next(k for k in DERIV_KINDS if body.startswith(k))
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Deriv(kind, body[len(kind):], arg)
        if token.kind == "KW":
            constants = {"q": Q, "i": I, "lambda": LAMBDA, "lambda_plus": LAMBDA_PLUS}
            if token.text in constants:
                return Num(constants[token.text])
            self.expect("(")
            first = self.expr()
            if token.text == "conj":
                self.expect(")")
                return Conj(first)
            self.expect(",")
            second = self.expr()
            self.expect(")")
            return Star(first, second)
        if token.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"Unexpected {token.text!r}", token.pos)


def parse(src: str, space=None):
    """Parses src into an AST; symbols are resolved against space (scalars only when None)."""
    name = space if isinstance(space, str) or space is None else space.name
    return _Parser(src, _symbols_for(name)).parse()


def parse_scalar(src: str) -> QScalar:
    node = parse(src)
    if not isinstance(node, Num):
        raise ParseError("Expected a scalar", 0)
    return node.value


# printer


def _split_sign(node):
    """(True, |node|) when node prints with a leading minus."""
    if isinstance(node, Num) and node.value.is_monomial() and node.value.render().startswith("-"):
        return True, Num(-node.value)
    if isinstance(node, Product) and isinstance(node.factors[0], Num):
        value = node.factors[0].value
        if value.is_monomial() and value.render().startswith("-"):
            return True, make_product((Num(-value),) + node.factors[1:])
    return False, node


def _render_factor(node) -> str:
    if isinstance(node, Sum):
        return f"({render(node)})"
    if isinstance(node, Num) and not node.value.is_monomial():
        return f"({node.value.render()})"
    return render(node)


def render(node) -> str:
    if isinstance(node, Num):
        return node.value.render()
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Conj):
        return f"conj({render(node.arg)})"
    if isinstance(node, Star):
        return f"star({render(node.left)}, {render(node.right)})"
    if isinstance(node, Deriv):
        return f"d{node.kind}{node.label}({render(node.arg)})"
    if isinstance(node, Product):
        head, *tail = node.factors
        if isinstance(head, Num) and head.value == -ONE:
            return "-" + "*".join(_render_factor(f) for f in tail)
        if isinstance(head, Num) and head.value.is_monomial():
            return "*".join([head.value.render()] + [_render_factor(f) for f in tail])
        return "*".join(_render_factor(f) for f in node.factors)
    if isinstance(node, Sum):
        out = render(node.terms[0])
        for term in node.terms[1:]:
            negative, magnitude = _split_sign(term)
            out += f" - {render(magnitude)}" if negative else f" + {render(magnitude)}"
        return out
    raise TypeError(f"Not an expression node: {node!r}")


def poly_to_expr(items) -> object:
    """AST of Σ coeff·word for (word, QScalar) pairs."""
    terms = [make_product([Num(coeff)] + [Sym(letter) for letter in word]) for word, coeff in items]
    return make_sum(terms) if terms else Num(ZERO)


# evaluation


def _symbol_kinds(node, table: dict, found: set):
    if isinstance(node, Sym):
        found.add(table.get(node.name, "X"))
    elif isinstance(node, (Product, Sum)):
        for child in node.factors if isinstance(node, Product) else node.terms:
            _symbol_kinds(child, table, found)
    elif isinstance(node, Conj):
        _symbol_kinds(node.arg, table, found)
    elif isinstance(node, Star):
        found.add("X")
    elif isinstance(node, Deriv):
        found.add("X")


class _Evaluator:
    def __init__(self, space, node):
        from ncalg import NCPoly

        self.space = space
        self.table = _symbols_for(space.name)
        kinds = set()
        _symbol_kinds(node, self.table, kinds)
        if "theta" in kinds and kinds - {"theta"}:
            raise ParseError("Grassmann generators do not mix with other generators", 0)
        if {"P", "Ph"} <= kinds:
            raise ParseError("Hatted and unhatted momenta belong to different calculi", 0)
        self.grassmann = "theta" in kinds
        self.carrier = space
        if kinds & {"P", "Ph"}:
            from phasespace import load_phase_algebra

            self.carrier = load_phase_algebra(space).calculus(hatted="Ph" in kinds, side="left")
        self.NCPoly = NCPoly

    def lift(self, value):
        if isinstance(value, self.NCPoly) and value.space is not self.carrier:
            return value.rebase(self.carrier)
        return value

    def value(self, node):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Sym):
            return self.symbol(node.name)
        if isinstance(node, Sum):
            total = self.value(node.terms[0])
            for term in node.terms[1:]:
                total = _add(self.lift(total), self.lift(self.value(term)))
            return total
        if isinstance(node, Product):
            if self.grassmann:
                return self.grassmann_product(node.factors)
            result = self.value(node.factors[0])
            for factor in node.factors[1:]:
                result = _mul(self.lift(result), self.lift(self.value(factor)))
            return result
        if isinstance(node, Conj):
            return self.conjugate(self.value(node.arg))
        if isinstance(node, Star):
            from ncalg import quantize, star_product

            left = evaluate_coefficients(node.left, self.space)
            right = evaluate_coefficients(node.right, self.space)
            return self.lift(quantize(star_product(left, right, self.space)))
        if isinstance(node, Deriv):
            from phasespace import DerivKind, derivative_action, load_phase_algebra

            arg = evaluate(node.arg, self.space)
            if not isinstance(arg, self.NCPoly):
                arg = self.NCPoly.constant(self.space, arg)
            kind = DerivKind.from_tag(node.kind)
            return self.lift(derivative_action(load_phase_algebra(self.space), kind, node.label, arg))
        raise TypeError(f"Not an expression node: {node!r}")

    def symbol(self, name: str):
        kind = self.table.get(name)
        if kind == "X":
            return self.NCPoly.generator(self.carrier, name)
        if kind in ("P", "Ph"):
            return self.NCPoly.generator(self.carrier, name)
        if kind == "Y":
            from ncalg import FreeSpace, from_real_coords

            frame = FreeSpace.real_frame(self.space)
            return self.lift(from_real_coords(self.NCPoly.generator(frame, name), self.space))
        if kind == "theta":
            from grassmann import Supernumber, load_grassmann_space

            return Supernumber.monomial(load_grassmann_space(self.space.name), [name[len("theta"):]])
        from ncalg import UnknownGeneratorError

        raise UnknownGeneratorError(name)

    def grassmann_product(self, factors):
        from grassmann import Supernumber, load_grassmann_space

        gspace = load_grassmann_space(self.space.name)
        coeff = ONE
        word = []
        others = []
        for factor in factors:
            if isinstance(factor, Num):
                coeff = coeff * factor.value
            elif isinstance(factor, Sym):
                word.append(factor.name[len("theta"):])
            else:
                others.append(self.value(factor))
        if others and word or len(others) > 1:
            raise ParseError("Grassmann multiplication is limited to canonically ordered monomials", 0)
        if others:
            return others[0].scale(coeff)
        ranks = [gspace.basis.index(label) for label in word]
        if ranks != sorted(set(ranks)):
            raise ParseError(
                f"Grassmann monomials must follow the basis order {', '.join(gspace.basis)}", 0
            )
        return Supernumber.monomial(gspace, word, coeff)

    def conjugate(self, value):
        from ncalg import nc_conjugate

        if isinstance(value, QScalar):
            return value.conj()
        if isinstance(value, self.NCPoly):
            return nc_conjugate(value)
        from ncalg import UnsupportedSpaceError

        raise UnsupportedSpaceError("conj is defined on scalars and coordinate polynomials")


def _add(a, b):
    from ncalg import NCPoly

    if isinstance(a, NCPoly) and not isinstance(b, NCPoly):
        return a + NCPoly.constant(a.space, b)
    if isinstance(b, NCPoly) and not isinstance(a, NCPoly):
        return NCPoly.constant(b.space, a) + b
    return a + b


def _mul(a, b):
    if isinstance(a, QScalar) and not isinstance(b, QScalar):
        return b.scale(a) if hasattr(b, "scale") else a * b
    if isinstance(b, QScalar) and not isinstance(a, QScalar):
        return a.scale(b)
    return a * b


def evaluate(node, space):
    """Value of an AST in space: QScalar, NCPoly (coordinates or phase space) or Supernumber."""
    return _Evaluator(space, node).value(node)


def evaluate_coefficients(node, space):
    """Commutative reading of an AST: coordinate symbols become commuting variables."""
    from ncalg import CoefficientPoly, dequantize, nc_conjugate, quantize

    if isinstance(node, Num):
        return CoefficientPoly.constant(space, node.value)
    if isinstance(node, Sym):
        if node.name not in space.generators:
            raise ParseError(f"{node.name} is not a coordinate of {space.name}", 0)
        return CoefficientPoly.variable(space, node.name)
    if isinstance(node, Sum):
        total = CoefficientPoly.constant(space, ZERO)
        for term in node.terms:
            total = total + evaluate_coefficients(term, space)
        return total
    if isinstance(node, Product):
        result = CoefficientPoly.constant(space, ONE)
        for factor in node.factors:
            result = result * evaluate_coefficients(factor, space)
        return result
    if isinstance(node, Star):
        from ncalg import star_product

        return star_product(evaluate_coefficients(node.left, space), evaluate_coefficients(node.right, space), space)
    if isinstance(node, Conj):
        return dequantize(nc_conjugate(quantize(evaluate_coefficients(node.arg, space))))
    if isinstance(node, Deriv):
        from phasespace import DerivKind, derivative_action, load_phase_algebra

        arg = quantize(evaluate_coefficients(node.arg, space))
        kind = DerivKind.from_tag(node.kind)
        return dequantize(derivative_action(load_phase_algebra(space), kind, node.label, arg))
    raise TypeError(f"Not an expression node: {node!r}")
