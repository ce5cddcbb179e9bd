"""
The antisymmetrized sector: supernumbers as coefficient vectors over subsets of
the Grassmann basis, the sesquilinear-form tables, delta monomials and volumes.

Table data lives in ``grassmann_tables.json``, one record per printed term, with
the subscripts in the order they are printed. Coefficient keys are subsets, so
the printed order only matters for display and for the delta monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

import sympy as sp
from pydantic import BaseModel, ConfigDict, ValidationError

from config import Config, ConfigError
from ncalg import UnknownGeneratorError
from scalar import I, ONE, ZERO, QScalar
from spaces import UnknownSpaceError, load_space, read_json
from utils.logger import setup_logger

logger = setup_logger(__name__)

VARIANTS = ("L", "Lbar", "R", "Rbar")
COMBINATIONS = {1: ("L", "Rbar"), 2: ("Lbar", "R")}

_t = sp.Symbol("t", positive=True)


# records


class DeltaRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coeff: str
    word: list[str]


class FormTableRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variants: list[str]
    primed: bool
    terms: list[Union[tuple[list[str], list[str], str], tuple[list[str], list[str], str, str]]]


class GrassmannRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    basis: list[str]
    vol: str
    k: str
    deltas: dict[str, DeltaRecord]
    tables: list[FormTableRecord]


class GrassmannFile(BaseModel):
    spaces: list[GrassmannRecord]


# runtime


@dataclass(frozen=True)
class FormTerm:
    f: frozenset
    g: frozenset
    coeff: QScalar
    f_word: tuple
    g_word: tuple
    flag: Optional[str] = None

    def degree(self) -> int:
        return len(self.f) + len(self.g)


@dataclass(frozen=True, eq=False)
class GrassmannSpace:
    name: str
    basis: tuple
    kappa: QScalar
    vol: QScalar
    k: QScalar
    deltas: dict
    tables: dict

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return 2 ** self.n

    def subsets(self) -> list:
        """All basis subsets, ordered by size and then by basis position."""
        from itertools import combinations

        return [frozenset(c) for size in range(self.n + 1) for c in combinations(self.basis, size)]

    def ordered(self, subset) -> tuple:
        return tuple(label for label in self.basis if label in subset)

    def key(self, word) -> frozenset:
        word = tuple(word)
        for label in word:
            if label not in self.basis:
                raise UnknownGeneratorError(f"theta{label}")
        if len(set(word)) != len(word):
            raise ValueError(f"Repeated Grassmann generator in {word}")
        return frozenset(word)


def _grassmann_from_record(record: GrassmannRecord) -> GrassmannSpace:
    from grammar import ParseError, parse_scalar

    try:
        space = GrassmannSpace(
            name=record.name,
            basis=tuple(record.basis),
            kappa=load_space(record.name).kappa_grassmann,
            vol=parse_scalar(record.vol),
            k=parse_scalar(record.k),
            deltas={},
            tables={},
        )
        for variant, delta in record.deltas.items():
            space.deltas[variant] = (parse_scalar(delta.coeff), tuple(delta.word))
            space.key(delta.word)
        for table in record.tables:
            terms = []
            for entry in table.terms:
                f_word, g_word, text = entry[0], entry[1], entry[2]
                flag = entry[3] if len(entry) > 3 else None
                terms.append(FormTerm(space.key(f_word), space.key(g_word), parse_scalar(text), tuple(f_word), tuple(g_word), flag))
            terms = tuple(terms)
            for variant in table.variants:
                if variant not in VARIANTS:
                    raise ConfigError(f"Unknown variant {variant!r} in {record.name}")
                if (variant, table.primed) in space.tables:
                    raise ConfigError(f"Duplicate table {variant} (primed={table.primed}) in {record.name}")
                space.tables[(variant, table.primed)] = terms
    except (ParseError, UnknownGeneratorError, ValueError) as e:
        raise ConfigError(f"Grassmann data for {record.name}: {e}") from e
    missing = [(v, p) for v in VARIANTS for p in (False, True) if (v, p) not in space.tables]
    if missing or set(space.deltas) != set(VARIANTS):
        raise ConfigError(f"Grassmann data for {record.name} is incomplete: {missing or 'deltas'}")
    return space


@lru_cache(maxsize=None)
def _load_grassmann(path: str) -> dict:
    try:
        records = GrassmannFile.model_validate(read_json(Path(path))).spaces
    except ValidationError as e:
        raise ConfigError(f"Invalid Grassmann tables in {path}: {e}") from e
    spaces = {record.name: _grassmann_from_record(record) for record in records}
    logger.info(f"Loaded Grassmann tables for {', '.join(spaces)}")
    return spaces


def load_grassmann_space(name: str) -> GrassmannSpace:
    spaces = _load_grassmann(str(Config.CONFIG_DIR / "grassmann_tables.json"))
    if name not in spaces:
        raise UnknownSpaceError(f"No Grassmann data for {name!r}")
    return spaces[name]


class Supernumber:
    """Coefficient vector over basis subsets; the empty subset is the f′ component."""

    __slots__ = ("space", "_coeffs", "printed")

    def __init__(self, space: GrassmannSpace, coeffs=None, printed=None):
        self.space = space
        self._coeffs = {}
        for subset, value in (coeffs or {}).items():
            value = QScalar.coerce(value)
            if not value.is_zero():
                self._coeffs[space.key(subset)] = value
        self.printed = dict(printed or {})

    @classmethod
    def monomial(cls, space: GrassmannSpace, word, coeff=ONE) -> "Supernumber":
        key = space.key(word)
        return cls(space, {key: coeff}, {key: tuple(word)})

    @classmethod
    def constant(cls, space: GrassmannSpace, value) -> "Supernumber":
        return cls(space, {frozenset(): value})

    def coefficient(self, subset) -> QScalar:
        return self._coeffs.get(frozenset(subset), ZERO)

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def _other(self, other) -> "Supernumber":
        if isinstance(other, Supernumber):
            if other.space.name != self.space.name:
                from ncalg import SpaceMismatchError

                raise SpaceMismatchError(f"{self.space.name} and {other.space.name} do not mix")
            return other
        return Supernumber.constant(self.space, other)

    def __add__(self, other):
        other = self._other(other)
        out = dict(self._coeffs)
        for key, value in other._coeffs.items():
            out[key] = out.get(key, ZERO) + value
        return Supernumber(self.space, out, {**self.printed, **other.printed})

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-self._other(other))

    def scale(self, value) -> "Supernumber":
        value = QScalar.coerce(value)
        return Supernumber(self.space, {k: v * value for k, v in self._coeffs.items()}, self.printed)

    def __mul__(self, other):
        if isinstance(other, Supernumber):
            raise TypeError("Grassmann multiplication is not available; build monomials directly")
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Supernumber):
            return other.space.name == self.space.name and other._coeffs == self._coeffs
        return NotImplemented

    __hash__ = None

    def render(self) -> str:
        from grammar import poly_to_expr, render

        items = []
        for subset in self.space.subsets():
            if subset in self._coeffs:
                word = self.printed.get(subset, self.space.ordered(subset))
                items.append((tuple(f"theta{label}" for label in word), self._coeffs[subset]))
        return render(poly_to_expr(items))

    def __repr__(self):
        return f"Supernumber[{self.space.name}]({self.render()})"


# forms


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ValueError(f"Unknown variant {variant!r}; use one of {', '.join(VARIANTS)}")


def sesquilinear(space: GrassmannSpace, variant: str, primed: bool, f: Supernumber, g: Supernumber) -> QScalar:
    """Σ c·conj(f_I)·g_J over the table (primed: Σ c·f_I·conj(g_J))."""
    _check_variant(variant)
    total = ZERO
    for term in space.tables[(variant, primed)]:
        f_i, g_j = f.coefficient(term.f), g.coefficient(term.g)
        if f_i.is_zero() or g_j.is_zero():
            continue
        total = total + (term.coeff * f_i * g_j.conj() if primed else term.coeff * f_i.conj() * g_j)
    return total


def combined_forms(space: GrassmannSpace, which: int, primed: bool, f: Supernumber, g: Supernumber) -> QScalar:
    """iⁿ/2 times the sum of the two forms of the combination (1: L + Rbar, 2: Lbar + R)."""
    if which not in COMBINATIONS:
        raise ValueError("which must be 1 or 2")
    first, second = COMBINATIONS[which]
    prefactor = (I ** space.n) * QScalar.coerce(Fraction(1, 2))
    return prefactor * (sesquilinear(space, first, primed, f, g) + sesquilinear(space, second, primed, f, g))


def grassmann_delta(space: GrassmannSpace, variant: str) -> Supernumber:
    _check_variant(variant)
    coeff, word = space.deltas[variant]
    return Supernumber.monomial(space, word, coeff)


def grassmann_vol(space: GrassmannSpace) -> QScalar:
    return space.vol


def grassmann_kappa(space: GrassmannSpace) -> QScalar:
    return space.kappa


def gram_matrix(space: GrassmannSpace, variant: str, primed: bool = False) -> list:
    """Form values on pairs of basis monomials, rows and columns in space.subsets() order."""
    basis = [Supernumber(space, {subset: ONE}) for subset in space.subsets()]
    return [[sesquilinear(space, variant, primed, f, g) for g in basis] for f in basis]


def gram_determinant(space: GrassmannSpace, variant: str, primed: bool = False) -> QScalar:
    matrix = sp.Matrix([[entry.to_sympy(_t) for entry in row] for row in gram_matrix(space, variant, primed)])
    det = sp.expand(matrix.det(method="berkowitz"))
    return QScalar.from_sympy(det, _t)


def degree_violations(space: GrassmannSpace) -> list:
    """(variant, primed, term) for every table term not pairing complementary degrees."""
    out = []
    for (variant, primed), terms in space.tables.items():
        for term in terms:
            if term.degree() != space.n:
                out.append((variant, primed, term))
    return out


def table_form(space: GrassmannSpace, variant: str, primed: bool = False) -> dict:
    """The table as (I, J) -> summed coefficient; equal forms give equal dicts."""
    _check_variant(variant)
    out: dict = {}
    for term in space.tables[(variant, primed)]:
        out[(term.f, term.g)] = out.get((term.f, term.g), ZERO) + term.coeff
    return {key: value for key, value in out.items() if not value.is_zero()}


def table_coincidences(space: GrassmannSpace) -> dict:
    """Whether L and Rbar (and Lbar and R) define the same form, unprimed and primed."""
    out = {}
    for primed in (False, True):
        suffix = "'" if primed else ""
        out[f"L=Rbar{suffix}"] = table_form(space, "L", primed) == table_form(space, "Rbar", primed)
        out[f"Lbar=R{suffix}"] = table_form(space, "Lbar", primed) == table_form(space, "R", primed)
    return out
