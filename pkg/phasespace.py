"""
Position-momentum algebras and derivative actions.

A space with R-matrix data gets two calculi. The unhatted one rewrites

    P^k X^l -> k (R^-1)^{kl}_{mn} X^m P^n + i g^{kl}

and the hatted one uses k^-1 R^{kl}_{mn} and the metric g-bar. Momenta obey the
coordinate relations with X replaced by P. Each calculus is available in two
normal forms: X-first for left actions and P-first (inverted cross rule) for
right actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from config import Config, ConfigError
from ncalg import NCPoly, RewriteSystem, SpaceMismatchError, UnknownGeneratorError, normal_order
from scalar import I, ONE, ZERO, GaussQ, QScalar
from utils.logger import setup_logger

logger = setup_logger(__name__)


class MissingRMatrixError(LookupError):
    """Phase-space data is not shipped for this space."""


# R-matrix data


class RMatrixRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: str
    labels: list[str]
    k: str
    hatted_metric_factor: str = "1"
    spectrum: list[str] = []
    entries: list[tuple[tuple[str, str], tuple[str, str], str]]
    inverse: list[tuple[tuple[str, str], tuple[str, str], str]]


@dataclass(frozen=True, eq=False)
class RMatrix:
    """R^{kl}_{mn} stored as {((k, l), (m, n)): QScalar}; absent entries are zero."""

    labels: tuple
    entries: dict
    inverse: dict
    k: QScalar
    hatted_metric_factor: QScalar = ONE
    spectrum: tuple = ()
    record: Optional[RMatrixRecord] = field(default=None, repr=False)


def rmatrix_from_record(record: RMatrixRecord) -> RMatrix:
    from grammar import ParseError, parse_scalar

    try:
        def table(rows):
            return {(tuple(kl), tuple(mn)): parse_scalar(text) for kl, mn, text in rows}

        return RMatrix(
            labels=tuple(record.labels),
            entries=table(record.entries),
            inverse=table(record.inverse),
            k=parse_scalar(record.k),
            hatted_metric_factor=parse_scalar(record.hatted_metric_factor),
            spectrum=tuple(parse_scalar(s) for s in record.spectrum),
            record=record,
        )
    except ParseError as e:
        raise ConfigError(f"R-matrix for {record.space}: {e}") from e


@lru_cache(maxsize=None)
def _load_rmatrix(path: str) -> RMatrix:
    from spaces import read_json

    try:
        record = RMatrixRecord.model_validate(read_json(Path(path)))
    except ValidationError as e:
        raise ConfigError(f"Invalid R-matrix record {path}: {e}") from e
    logger.info(f"Loaded R-matrix for {record.space} from {path}")
    return rmatrix_from_record(record)


def load_rmatrix(space) -> RMatrix:
    if space.rmatrix is None:
        raise MissingRMatrixError(f"No R-matrix data shipped for {space.name}")
    return _load_rmatrix(str(Config.CONFIG_DIR / space.rmatrix))


def dump_rmatrix(r: RMatrix) -> dict:
    if r.record is None:
        raise ConfigError("R-matrix was not built from a record")
    return r.record.model_dump(mode="json")


# matrix helpers on index-tuple dictionaries


def _compose(a: dict, b: dict) -> dict:
    by_row: dict = {}
    for (row, col), value in b.items():
        by_row.setdefault(row, []).append((col, value))
    out: dict = {}
    for (row, mid), value in a.items():
        for col, other in by_row.get(mid, ()):
            key = (row, col)
            total = out.get(key, ZERO) + value * other
            if total.is_zero():
                out.pop(key, None)
            else:
                out[key] = total
    return out


def _identity(basis) -> dict:
    return {(b, b): ONE for b in basis}


def _subtract(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, value in b.items():
        total = out.get(key, ZERO) - value
        if total.is_zero():
            out.pop(key, None)
        else:
            out[key] = total
    return out


def _embed(table: dict, labels: tuple, first: bool) -> dict:
    """R acting on sites (1,2) or (2,3) of a triple index."""
    out = {}
    for ((k, l), (m, n)), value in table.items():
        for spectator in labels:
            if first:
                out[((k, l, spectator), (m, n, spectator))] = value
            else:
                out[((spectator, k, l), (spectator, m, n))] = value
    return out


def _check_dimension(r: RMatrix):
    labels = set(r.labels)
    for table in (r.entries, r.inverse):
        for (kl, mn) in table:
            if len(kl) != 2 or len(mn) != 2 or not set(kl + mn) <= labels:
                raise ConfigError(f"R-matrix index {kl}, {mn} does not fit the labels {r.labels}")


def rmatrix_checks(r: RMatrix) -> dict:
    """Exact pass/fail of braid relation, invertibility, q=1 flip limit and characteristic polynomial."""
    _check_dimension(r)
    pairs = list(cartesian(r.labels, repeat=2))
    r12 = _embed(r.entries, r.labels, first=True)
    r23 = _embed(r.entries, r.labels, first=False)
    braid = _compose(_compose(r12, r23), r12) == _compose(_compose(r23, r12), r23)

    identity = _identity(pairs)
    inverse = _compose(r.entries, r.inverse) == identity and _compose(r.inverse, r.entries) == identity

    flip = {((k, l), (l, k)): GaussQ(1) for k, l in pairs}
    at_one = {key: value.eval_exact(1) for key, value in r.entries.items()}
    flip_limit = {key: value for key, value in at_one.items() if not value.is_zero()} == flip

    checks = {"braid": braid, "inverse": inverse, "flip_limit": flip_limit}
    if r.spectrum:
        acc = identity
        for eigenvalue in r.spectrum:
            shifted = _subtract(r.entries, {key: eigenvalue for key in identity})
            acc = _compose(acc, shifted)
        checks["characteristic"] = not acc
    for name, ok in checks.items():
        if not ok:
            logger.warning(f"R-matrix check {name} failed")
    return checks


# phase-space algebra


@dataclass(frozen=True)
class DerivKind:
    """Unhatted or hatted derivative, acting from the left or from the right."""

    hatted: bool = False
    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be left or right, got {self.side!r}")

    @property
    def tag(self) -> str:
        return ("h" if self.hatted else "") + ("L" if self.side == "left" else "R")

    @classmethod
    def from_tag(cls, tag: str) -> "DerivKind":
        tags = {"L": cls(False, "left"), "R": cls(False, "right"), "hL": cls(True, "left"), "hR": cls(True, "right")}
        if tag not in tags:
            raise ValueError(f"Unknown derivative kind {tag!r}; use one of {', '.join(tags)}")
        return tags[tag]

    def barred(self) -> "DerivKind":
        """The action built from the opposite calculus."""
        return DerivKind(not self.hatted, self.side)


@dataclass(frozen=True, eq=False)
class PhaseCalculus:
    """One normal form of one calculus; carries NCPoly values like a space does."""

    name: str
    generators: tuple
    rewriter: RewriteSystem = field(repr=False)
    conjugation: dict = field(repr=False)
    hatted: bool
    side: str
    momenta: frozenset = field(repr=False)

    def momentum(self, label: str) -> str:
        return ("Ph" if self.hatted else "P") + label


class PhaseAlgebra:
    def __init__(self, space, rmatrix: RMatrix):
        if set(rmatrix.labels) != set(space.labels):
            raise ConfigError(f"R-matrix labels {rmatrix.labels} do not match {space.name}")
        if not rmatrix.k.is_monomial():
            raise ConfigError("The constant k must be a monomial in q")
        self.space = space
        self.rmatrix = rmatrix
        self.k = rmatrix.k
        self._calculi: dict = {}

    def momentum_generators(self, hatted: bool = False) -> tuple:
        prefix = "Ph" if hatted else "P"
        return tuple(prefix + label for label in self.space.labels)

    def cross_matrix(self, hatted: bool = False) -> dict:
        """A with P^k X^l = A^{kl}_{mn} X^m P^n + i g^{kl}."""
        if hatted:
            factor, table = ONE / self.k, self.rmatrix.entries
        else:
            factor, table = self.k, self.rmatrix.inverse
        return {key: value * factor for key, value in table.items()}

    def inverse_cross_matrix(self, hatted: bool = False) -> dict:
        if hatted:
            factor, table = self.k, self.rmatrix.inverse
        else:
            factor, table = ONE / self.k, self.rmatrix.entries
        return {key: value * factor for key, value in table.items()}

    def metric(self, hatted: bool = False) -> dict:
        factor = self.rmatrix.hatted_metric_factor if hatted else ONE
        return {key: value * factor for key, value in self.space.metric.items()}

    def _x(self, label: str) -> str:
        return self.space.symbol(label)

    def cross_rules(self, hatted: bool = False) -> dict:
        momenta = dict(zip(self.space.labels, self.momentum_generators(hatted)))
        metric = self.metric(hatted)
        rules: dict = {}
        for ((k, l), (m, n)), value in self.cross_matrix(hatted).items():
            rules.setdefault((momenta[k], self._x(l)), []).append((value, (self._x(m), momenta[n])))
        for k, l in cartesian(self.space.labels, repeat=2):
            rhs = rules.setdefault((momenta[k], self._x(l)), [])
            g = metric.get((k, l), ZERO)
            if not g.is_zero():
                rhs.append((I * g, ()))
        return rules

    def inverse_cross_rules(self, hatted: bool = False) -> dict:
        """X^a P^b = (A^-1)^{ab}_{kl} P^k X^l - i (A^-1 g)^{ab}."""
        momenta = dict(zip(self.space.labels, self.momentum_generators(hatted)))
        metric = self.metric(hatted)
        rules: dict = {}
        shift: dict = {}
        for ((a, b), (k, l)), value in self.inverse_cross_matrix(hatted).items():
            rules.setdefault((self._x(a), momenta[b]), []).append((value, (momenta[k], self._x(l))))
            shift[(a, b)] = shift.get((a, b), ZERO) + value * metric.get((k, l), ZERO)
        for a, b in cartesian(self.space.labels, repeat=2):
            rhs = rules.setdefault((self._x(a), momenta[b]), [])
            s = shift.get((a, b), ZERO)
            if not s.is_zero():
                rhs.append((-I * s, ()))
        return rules

    def _mirrored_relations(self, hatted: bool) -> dict:
        rename = dict(zip(self.space.generators, self.momentum_generators(hatted)))
        return {
            tuple(rename[x] for x in relation.lhs): [(c, tuple(rename[x] for x in w)) for c, w in relation.rhs]
            for relation in self.space.relations
        }

    def calculus(self, hatted: bool = False, side: str = "left") -> PhaseCalculus:
        key = (hatted, side)
        if key not in self._calculi:
            momenta = self.momentum_generators(hatted)
            rules = {relation.lhs: relation.rhs for relation in self.space.relations}
            rules.update(self._mirrored_relations(hatted))
            if side == "left":
                order = self.space.generators + momenta
                rules.update(self.cross_rules(hatted))
            else:
                order = momenta + self.space.generators
                rules.update(self.inverse_cross_rules(hatted))
            tag = DerivKind(hatted, side).tag
            self._calculi[key] = PhaseCalculus(
                name=f"{self.space.name}/phase-{tag}",
                generators=order,
                rewriter=RewriteSystem(order, rules),
                conjugation=self.space.conjugation,
                hatted=hatted,
                side=side,
                momenta=frozenset(momenta),
            )
            logger.debug(f"Built phase calculus {self._calculi[key].name} with {len(rules)} rules")
        return self._calculi[key]


@lru_cache(maxsize=None)
def load_phase_algebra(space) -> PhaseAlgebra:
    return PhaseAlgebra(space, load_rmatrix(space))


def phase_normal_order(alg: PhaseAlgebra, mixed_word_poly, hatted: bool = False, side: str = "left") -> NCPoly:
    return normal_order(alg.calculus(hatted, side), mixed_word_poly)


def momentum_free_part(poly_terms: dict, calc: PhaseCalculus) -> dict:
    return {w: c for w, c in poly_terms.items() if not calc.momenta.intersection(w)}


def derivative_action(alg: PhaseAlgebra, kind: DerivKind, index: str, f: NCPoly) -> NCPoly:
    """∂^index ▷ f (left) or f ◁ ∂^index (right), read off the momentum-free remainder."""
    if f.space.name != alg.space.name:
        raise SpaceMismatchError(f"derivative_action expects a {alg.space.name} polynomial")
    if index not in alg.space.labels:
        raise UnknownGeneratorError(index)
    calc = alg.calculus(kind.hatted, kind.side)
    momentum = {(calc.momentum(index),): ONE}
    if kind.side == "left":
        product = calc.rewriter.multiply(momentum, f.terms)
        factor = -I
    else:
        product = calc.rewriter.multiply(f.terms, momentum)
        factor = I
    remainder = momentum_free_part(product, calc)
    return NCPoly(alg.space, remainder).scale(factor)


def cross_rule_identities(alg: PhaseAlgebra) -> list:
    """
    For both calculi and both normal forms, the normal form of
    P^k X^l - A^{kl}_{mn} X^m P^n - i g^{kl} for every index pair (all zero when consistent).
    """
    out = []
    for hatted, side in cartesian((False, True), ("left", "right")):
        calc = alg.calculus(hatted, side)
        matrix = alg.cross_matrix(hatted)
        metric = alg.metric(hatted)
        for k, l in cartesian(alg.space.labels, repeat=2):
            raw = [((calc.momentum(k), alg._x(l)), ONE)]
            for ((kk, ll), (m, n)), value in matrix.items():
                if (kk, ll) == (k, l):
                    raw.append(((alg._x(m), calc.momentum(n)), -value))
            raw.append(((), -I * metric.get((k, l), ZERO)))
            out.append((DerivKind(hatted, side), k, l, normal_order(calc, raw)))
    return out


def associativity_failures(alg: PhaseAlgebra, triples, kind: DerivKind) -> list:
    """Mixed word triples (a, b, c) on which W(W(ab)c) and W(aW(bc)) differ in the calculus of kind."""
    from ncalg import ncmul

    failures = []
    for a, b, c in triples:
        left = ncmul(phase_normal_order(alg, [(tuple(a) + tuple(b), ONE)], kind.hatted, kind.side),
                     phase_normal_order(alg, [(tuple(c), ONE)], kind.hatted, kind.side))
        right = ncmul(phase_normal_order(alg, [(tuple(a), ONE)], kind.hatted, kind.side),
                      phase_normal_order(alg, [(tuple(b) + tuple(c), ONE)], kind.hatted, kind.side))
        if left != right:
            failures.append((a, b, c))
    return failures


def commutator_at_one(alg: PhaseAlgebra, hatted: bool = False) -> dict:
    """(k, l) -> whether P^k X^l - X^l P^k equals i g^{kl} at q = 1."""
    calc = alg.calculus(hatted, "left")
    metric = alg.metric(hatted)
    out = {}
    for k, l in cartesian(alg.space.labels, repeat=2):
        diff = normal_order(calc, [((calc.momentum(k), alg._x(l)), ONE), ((alg._x(l), calc.momentum(k)), -ONE)])
        at_one = {w: v for w, v in diff.specialize(1).items() if not v.is_zero()}
        expected = (I * metric.get((k, l), ZERO)).eval_exact(1)
        out[(k, l)] = at_one == ({(): expected} if not expected.is_zero() else {})
    return out


def classical_limit_check(alg: PhaseAlgebra, kind: DerivKind, max_degree: int = 4) -> list:
    """Monomials (index, exponents) on which the action at q = 1 differs from Σ_l g^{kl} ∂_l."""
    from ncalg import CoefficientPoly, dequantize, quantize

    space = alg.space
    n = len(space.generators)
    metric = {key: value.eval_exact(1) for key, value in alg.metric(kind.hatted).items()}
    failures = []
    for exps in cartesian(range(max_degree + 1), repeat=n):
        if sum(exps) > max_degree:
            continue
        f = quantize(CoefficientPoly(space, {exps: ONE}))
        for k in space.labels:
            got = dequantize(derivative_action(alg, kind, k, f))
            got = {e: c.eval_exact(1) for e, c in got.terms.items()}
            got = {e: c for e, c in got.items() if not c.is_zero()}
            expected: dict = {}
            for j, l in enumerate(space.labels):
                g = metric.get((k, l), GaussQ(0))
                if exps[j] and not g.is_zero():
                    lowered = exps[:j] + (exps[j] - 1,) + exps[j + 1:]
                    expected[lowered] = expected.get(lowered, GaussQ(0)) + g * exps[j]
            expected = {e: c for e, c in expected.items() if not c.is_zero()}
            if got != expected:
                failures.append((k, exps))
    if failures:
        logger.warning(f"{kind.tag} derivative differs from the classical limit on {len(failures)} monomials")
    return failures
