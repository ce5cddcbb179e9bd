"""
Quasipoint lattices and Jackson integration.

A lattice point carries a sign and an exponent per coordinate; its coordinate
value is s_j·α_j·q^{a_j v_j} and its volume weight is
prefactor(q)·Π_j α_j q^{a_j v_j}. Integrals are finite sums over the window.

Two arithmetic modes:
  * exact: q and α are rationals, values are GaussQ, weights are Fractions;
  * float: q and α are floats, values are complex, sums run through numpy over
    the quasipoints in sorted order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import product as cartesian
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from config import Config, ConfigError
from ncalg import (
    CoefficientPoly,
    NCPoly,
    SpaceMismatchError,
    UnsupportedSpaceError,
    dequantize,
    nc_conjugate,
    ncmul,
    quantize,
    star_product,
)
from scalar import I, GaussQ, QScalar
from spaces import SpaceSpec, load_space, read_json
from utils.logger import setup_logger

logger = setup_logger(__name__)

HALF_LINES = ("pos", "neg", "full")


class LatticeWindowError(ValueError):
    """A quasipoint lies outside the lattice window."""


class ZeroNormError(ZeroDivisionError):
    """The wave function has zero norm on the window."""


# records


class LatticeSpecRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: str
    q: Union[str, float]
    alpha: Optional[list[Union[str, float]]] = None
    window: Union[int, list[tuple[int, int]]] = 6
    sectors: Optional[list[list[int]]] = None
    exact: bool = False

    @field_validator("sectors")
    @classmethod
    def check_signs(cls, value):
        if value is not None:
            for sector in value:
                if any(s not in (1, -1) for s in sector):
                    raise ValueError(f"sector {sector} may only hold +1 and -1")
        return value


# runtime


@dataclass(frozen=True, order=True)
class Quasipoint:
    signs: tuple
    exps: tuple

    def __post_init__(self):
        if len(self.signs) != len(self.exps):
            raise ValueError("one sign per exponent required")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signs must be +1 or -1, got {self.signs}")


def _number(value, exact: bool):
    if exact:
        if isinstance(value, float):
            raise ConfigError(f"Exact lattices need rational parameters, got {value!r}")
        return Fraction(value)
    return float(Fraction(value)) if isinstance(value, str) else float(value)


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    space: SpaceSpec
    q: Union[Fraction, float]
    alpha: tuple
    steps: tuple
    prefactor: QScalar
    window: tuple
    sectors: tuple
    exact: bool = False
    record: Optional[LatticeSpecRecord] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.steps)

    @cached_property
    def prefactor_value(self):
        if self.exact:
            value = self.prefactor.eval_exact(self.q)
            if not value.is_real():
                raise ConfigError(f"Lattice prefactor of {self.space.name} is not real at q = {self.q}")
            return value.re
        return self.prefactor.eval(self.q).real

    @cached_property
    def points(self) -> tuple:
        ranges = [range(lo, hi + 1) for lo, hi in self.window]
        return tuple(sorted(Quasipoint(s, v) for s in self.sectors for v in cartesian(*ranges)))

    def zero(self):
        return GaussQ(0) if self.exact else 0j

    def one(self):
        return GaussQ(1) if self.exact else 1 + 0j

    def contains(self, point: Quasipoint) -> bool:
        if len(point.exps) != self.n or point.signs not in self.sectors:
            return False
        return all(lo <= v <= hi for v, (lo, hi) in zip(point.exps, self.window))

    def check(self, point: Quasipoint):
        if not self.contains(point):
            raise LatticeWindowError(f"{point} is outside the window {self.window} / sectors {self.sectors}")

    def magnitude(self, point: Quasipoint, j: int):
        return self.alpha[j] * self.q ** (self.steps[j] * point.exps[j])

    def coordinate(self, point: Quasipoint, j: int):
        return point.signs[j] * self.magnitude(point, j)

    def coordinates(self, point: Quasipoint) -> tuple:
        return tuple(self.coordinate(point, j) for j in range(self.n))

    def weight(self, point: Quasipoint):
        w = self.prefactor_value
        for j in range(self.n):
            w = w * self.magnitude(point, j)
        return w

    def weights(self, points: Sequence[Quasipoint]) -> np.ndarray:
        """Float weights for many points at once."""
        exps = np.array([p.exps for p in points], dtype=float).reshape(len(points), self.n)
        alpha = np.array([float(a) for a in self.alpha])
        steps = np.array(self.steps, dtype=float)
        return float(self.prefactor_value) * np.prod(alpha * float(self.q) ** (steps * exps), axis=1)

    def __repr__(self):
        return f"LatticeSpec({self.space.name}, q={self.q}, window={self.window})"


def make_lattice_spec(
    space: Union[SpaceSpec, str],
    q_value,
    alpha: Optional[Sequence] = None,
    window: Union[int, Sequence[tuple]] = None,
    sectors: Optional[Iterable[Sequence[int]]] = None,
    exact: bool = False,
) -> LatticeSpec:
    if isinstance(space, str):
        space = load_space(space)
    n = len(space.lattice_steps)
    q = _number(q_value, exact)
    if q <= 1:
        raise ValueError(f"Lattices need q > 1, got {q_value}")
    alpha = tuple(_number(a, exact) for a in (alpha if alpha is not None else [1] * n))
    if len(alpha) != n or any(a <= 0 for a in alpha):
        raise ValueError(f"{space.name} needs {n} positive scales, got {alpha}")
    if window is None:
        window = Config.WINDOW
    if isinstance(window, int):
        window = [(-window, window)] * n
    window = tuple((int(lo), int(hi)) for lo, hi in window)
    if len(window) != n or any(lo > hi for lo, hi in window):
        raise ValueError(f"Invalid window {window} for {space.name}")
    if sectors is None:
        sectors = cartesian((1, -1), repeat=n)
    sectors = tuple(sorted({tuple(int(s) for s in sector) for sector in sectors}, reverse=True))
    if any(len(sector) != n for sector in sectors):
        raise ValueError(f"Sign sectors of {space.name} need {n} entries")
    return LatticeSpec(
        space=space,
        q=q,
        alpha=alpha,
        steps=tuple(space.lattice_steps),
        prefactor=space.lattice_prefactor,
        window=window,
        sectors=sectors,
        exact=exact,
    )


def lattice_spec_from_record(record: LatticeSpecRecord) -> LatticeSpec:
    spec = make_lattice_spec(record.space, record.q, record.alpha, record.window, record.sectors, record.exact)
    return replace(spec, record=record)


def load_lattice_spec(path: Union[str, Path]) -> LatticeSpec:
    try:
        record = LatticeSpecRecord.model_validate(read_json(Path(path)))
    except ValidationError as e:
        raise ConfigError(f"Invalid lattice spec in {path}: {e}") from e
    spec = lattice_spec_from_record(record)
    logger.info(f"Loaded lattice spec for {spec.space.name} ({len(spec.points)} quasipoints)")
    return spec


def dump_lattice_spec(spec: LatticeSpec) -> dict:
    if spec.record is not None:
        return spec.record.model_dump(mode="json")
    text = str if spec.exact else float
    return LatticeSpecRecord(
        space=spec.space.name,
        q=text(spec.q),
        alpha=[text(a) for a in spec.alpha],
        window=[list(w) for w in spec.window],
        sectors=[list(s) for s in spec.sectors],
        exact=spec.exact,
    ).model_dump(mode="json")


class LatticeFunction:
    """Samples on quasipoints of a window; missing points are zero."""

    __slots__ = ("spec", "_samples")

    def __init__(self, spec: LatticeSpec, samples: Mapping[Quasipoint, object] | None = None):
        self.spec = spec
        clean = {}
        for point, value in (samples or {}).items():
            spec.check(point)
            value = GaussQ.coerce(value) if spec.exact else complex(value)
            if value != 0:
                clean[point] = value
        self._samples = clean

    @classmethod
    def from_callable(cls, spec: LatticeSpec, fn: Callable[[tuple], object]) -> "LatticeFunction":
        """Samples fn(coordinates) on every quasipoint."""
        return cls(spec, {p: fn(spec.coordinates(p)) for p in spec.points})

    @property
    def samples(self) -> dict:
        return dict(self._samples)

    def items(self) -> list:
        return sorted(self._samples.items())

    def value(self, point: Quasipoint):
        return self._samples.get(point, self.spec.zero())

    def _other(self, other: "LatticeFunction") -> "LatticeFunction":
        if other.spec is not self.spec:
            raise SpaceMismatchError("lattice functions live on different lattices")
        return other

    def __add__(self, other):
        other = self._other(other)
        keys = set(self._samples) | set(other._samples)
        return LatticeFunction(self.spec, {p: self.value(p) + other.value(p) for p in keys})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __mul__(self, other):
        if isinstance(other, LatticeFunction):
            other = self._other(other)
            return LatticeFunction(self.spec, {p: v * other.value(p) for p, v in self._samples.items()})
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, value) -> "LatticeFunction":
        return LatticeFunction(self.spec, {p: v * value for p, v in self._samples.items()})

    def __eq__(self, other):
        if isinstance(other, LatticeFunction):
            return other.spec is self.spec and other._samples == self._samples
        return NotImplemented

    __hash__ = None

    def close_to(self, other: "LatticeFunction", tol: float = 1e-12) -> bool:
        other = self._other(other)
        for point in set(self._samples) | set(other._samples):
            a, b = complex(self.value(point)), complex(other.value(point))
            if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
                return False
        return True

    def __repr__(self):
        return f"LatticeFunction({self.spec.space.name}, {len(self._samples)} samples)"


# csv


def write_csv(f: LatticeFunction, handle):
    n = f.spec.n
    writer = csv.writer(handle)
    writer.writerow([f"s_{j}" for j in range(1, n + 1)] + [f"v_{j}" for j in range(1, n + 1)] + ["re", "im"])
    for point, value in f.items():
        if f.spec.exact:
            re, im = str(value.re), str(value.im)
        else:
            re, im = repr(value.real), repr(value.imag)
        writer.writerow([*point.signs, *point.exps, re, im])


def read_csv(spec: LatticeSpec, handle) -> LatticeFunction:
    n = spec.n
    reader = csv.reader(handle)
    header = next(reader, None)
    expected = [f"s_{j}" for j in range(1, n + 1)] + [f"v_{j}" for j in range(1, n + 1)] + ["re", "im"]
    if header != expected:
        raise ConfigError(f"CSV header {header} does not match {expected}")
    samples = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2 * n + 2:
            raise ConfigError(f"CSV line {line} has {len(row)} columns, expected {2 * n + 2}")
        try:
            point = Quasipoint(tuple(int(s) for s in row[:n]), tuple(int(v) for v in row[n : 2 * n]))
            if spec.exact:
                value = GaussQ(Fraction(row[-2]), Fraction(row[-1]))
            else:
                value = complex(float(row[-2]), float(row[-1]))
        except ValueError as e:
            raise ConfigError(f"CSV line {line}: {e}") from e
        samples[point] = value
    return LatticeFunction(spec, samples)


# integration


def jackson_1d(
    f: Callable,
    a: int,
    c,
    q_value,
    half_line: str = "full",
    window: tuple = (-6, 6),
):
    """
    (q^a - 1)·Σ_k c·q^{ak}·f(±c·q^{ak}) over k in the window.

    The negative half-line carries the same positive factor as the positive one,
    so that q -> 1 reproduces the Riemann integral over both half-lines.
    """
    if q_value <= 1:
        raise ValueError(f"jackson_1d needs q > 1, got {q_value}")
    if half_line not in HALF_LINES:
        raise ValueError(f"half_line must be one of {HALF_LINES}")
    lo, hi = window
    signs = {"pos": (1,), "neg": (-1,), "full": (1, -1)}[half_line]
    total = 0
    for sign in signs:
        for k in range(lo, hi + 1):
            x = c * q_value ** (a * k)
            total = total + x * f(sign * x)
    return (q_value ** a - 1) * total


def integrate(f: LatticeFunction):
    """Σ_v weight(v)·f(v) over the quasipoints, in sorted order."""
    spec = f.spec
    items = f.items()
    if not items:
        return spec.zero()
    if spec.exact:
        total = spec.zero()
        for point, value in items:
            total = total + value * spec.weight(point)
        return total
    points = [p for p, _ in items]
    values = np.array([v for _, v in items], dtype=complex)
    return complex(np.sum(spec.weights(points) * values))


def separable_ratio(spec: LatticeSpec):
    """prefactor / Π_j (q^{a_j} - 1): integrate(separable f) = ratio·Π_j jackson_1d."""
    denominator = 1
    for a in spec.steps:
        denominator = denominator * (spec.q ** a - 1)
    return spec.prefactor_value / denominator


def lattice_delta(spec: LatticeSpec, at: Quasipoint) -> LatticeFunction:
    spec.check(at)
    return LatticeFunction(spec, {at: spec.one() / spec.weight(at)})


def rescale(f: LatticeFunction, factor) -> LatticeFunction:
    """The same samples on the lattice with α ↦ α/factor."""
    spec = f.spec
    factor = _number(factor, spec.exact)
    if factor <= 0:
        raise ValueError("rescale factor must be positive")
    scaled = replace(spec, alpha=tuple(a / factor for a in spec.alpha), record=None)
    return LatticeFunction(scaled, f.samples)


def combined_integral(f: LatticeFunction, which: int, integrals: Mapping[str, Callable] | None = None):
    """i/2 times the sum of the two variant integrals (1: L and Rbar, 2: Lbar and R)."""
    from grassmann import COMBINATIONS

    if which not in COMBINATIONS:
        raise ValueError("which must be 1 or 2")
    integrals = integrals or {}
    first, second = (integrals.get(v, integrate)(f) for v in COMBINATIONS[which])
    half_i = GaussQ(0, Fraction(1, 2)) if f.spec.exact else 0.5j
    return half_i * (first + second)


# projectors


def _key(sign: int, exp: int) -> tuple:
    # negative branch < 0 < positive branch; magnitude ordered within a branch
    return (sign, sign * exp)


class Projector:
    """
    Multiplication by the indicator of quasipoints at or below a per-coordinate bound.
    A bound is None (no restriction), 0 (the negative branch) or a (sign, exponent) pair.
    """

    def __init__(self, spec: LatticeSpec, bounds: Sequence, complement: bool = False):
        if len(bounds) != spec.n:
            raise ValueError(f"Projector on {spec.space.name} needs {spec.n} bounds")
        self.spec = spec
        self.bounds = tuple(bounds)
        self.complement = complement
        self._keys = []
        for bound in bounds:
            if bound is None:
                self._keys.append(None)
            elif bound == 0:
                self._keys.append((0, 0))
            else:
                sign, exp = bound
                if sign not in (1, -1):
                    raise ValueError(f"bound sign must be +1 or -1, got {sign}")
                self._keys.append(_key(sign, exp))

    def indicator(self, point: Quasipoint) -> bool:
        inside = all(
            key is None or _key(s, v) <= key for key, s, v in zip(self._keys, point.signs, point.exps)
        )
        return inside != self.complement

    def __call__(self, f: LatticeFunction) -> LatticeFunction:
        if f.spec is not self.spec:
            raise SpaceMismatchError("projector and function live on different lattices")
        return LatticeFunction(f.spec, {p: v for p, v in f.samples.items() if self.indicator(p)})

    def bar(self) -> "Projector":
        return Projector(self.spec, self.bounds, not self.complement)


def projector_E(spec: LatticeSpec, threshold: Sequence) -> Projector:
    return Projector(spec, threshold)


def projector_E_bar(spec: LatticeSpec, threshold: Sequence) -> Projector:
    return Projector(spec, threshold, complement=True)


def heaviside(spec: LatticeSpec, axis: int) -> Projector:
    """q-Heaviside in coordinate axis: keeps the positive branch."""
    bounds = [None] * spec.n
    bounds[axis] = 0
    return projector_E_bar(spec, bounds)


def spectral_apply(spec: LatticeSpec, F: Callable[[tuple], object], f: LatticeFunction) -> LatticeFunction:
    """Pointwise multiplication by F(coordinates)."""
    if f.spec is not spec:
        raise SpaceMismatchError("spectral_apply: function lives on a different lattice")
    return LatticeFunction(spec, {p: v * F(spec.coordinates(p)) for p, v in f.samples.items()})


def coordinate_function(j: int) -> Callable[[tuple], object]:
    return lambda coords: coords[j]


# wave functions


def _generator_point(spec: LatticeSpec, point: Quasipoint) -> dict:
    return dict(zip(spec.space.lattice_coordinates, spec.coordinates(point)))


def sample(spec: LatticeSpec, poly: CoefficientPoly) -> LatticeFunction:
    """A commutative coefficient polynomial evaluated on every quasipoint."""
    space = spec.space
    if poly.space.name != space.name:
        raise SpaceMismatchError(f"polynomial of {poly.space.name} sampled on a {space.name} lattice")
    if set(space.lattice_coordinates) != set(space.generators):
        raise UnsupportedSpaceError(f"The {space.name} lattice is not built on its generators")
    return LatticeFunction(spec, {p: poly.evaluate(_generator_point(spec, p), spec.q) for p in spec.points})


def density_poly(psi: CoefficientPoly) -> CoefficientPoly:
    """conj(ψ) ⊛ ψ as a coefficient polynomial."""
    conj_psi = dequantize(nc_conjugate(quantize(psi)))
    return star_product(conj_psi, psi)


def norm(psi: CoefficientPoly, spec: LatticeSpec):
    return integrate(sample(spec, density_poly(psi)))


def _checked_norm(psi: CoefficientPoly, spec: LatticeSpec):
    value = norm(psi, spec)
    if value == 0 or abs(complex(value)) < 1e-300:
        raise ZeroNormError(f"ψ has zero norm on the window {spec.window}")
    return value


def density(psi: CoefficientPoly, spec: LatticeSpec, normalize: bool = False) -> LatticeFunction:
    rho = sample(spec, density_poly(psi))
    if normalize:
        rho = rho.scale(spec.one() / _checked_norm(psi, spec))
    return rho


@dataclass(frozen=True)
class MomentumOperator:
    """Σ_k c_k P^k acting as -i∂^k ▷ (left derivatives, optionally hatted)."""

    coeffs: tuple
    hatted: bool = False

    @classmethod
    def of(cls, coeffs: Mapping[str, object], hatted: bool = False) -> "MomentumOperator":
        return cls(tuple(sorted((label, QScalar.coerce(c)) for label, c in coeffs.items())), hatted)

    def apply(self, f: NCPoly) -> NCPoly:
        from phasespace import DerivKind, derivative_action, load_phase_algebra

        alg = load_phase_algebra(f.space)
        kind = DerivKind(self.hatted, "left")
        out = NCPoly(f.space)
        for label, c in self.coeffs:
            out = out + derivative_action(alg, kind, label, f).scale(-I * c)
        return out


def hermitian_part(op: NCPoly) -> NCPoly:
    """½(A + conj A)."""
    return (op + nc_conjugate(op)).scale(QScalar.coerce(Fraction(1, 2)))


def expectation(op: Union[NCPoly, MomentumOperator], psi: CoefficientPoly, spec: LatticeSpec, normalize: bool = False):
    """∫ conj(ψ) ⊛ (A ▷ ψ) on the lattice."""
    w = quantize(psi)
    if isinstance(op, MomentumOperator):
        applied = op.apply(w)
    else:
        if op.space.name != psi.space.name:
            raise SpaceMismatchError(f"operator of {op.space.name} applied to a {psi.space.name} state")
        applied = ncmul(op, w)
    integrand = dequantize(ncmul(nc_conjugate(w), applied))
    value = integrate(sample(spec, integrand))
    if normalize:
        value = value / _checked_norm(psi, spec)
    return value
