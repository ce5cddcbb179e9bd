"""
Quantum-space presets.

Every space is shipped as a JSON record in ``<config dir>/spaces.json``. The
records are validated with pydantic, their scalar texts are parsed by the
expression grammar, and the result is an immutable ``SpaceSpec``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from config import Config, ConfigError
from scalar import QScalar
from utils.logger import setup_logger

logger = setup_logger(__name__)

SPACE_NAMES = ("quantum_plane", "euclid3", "euclid4", "minkowski")


class UnknownSpaceError(KeyError):
    """No preset with that name in the config directory."""


# records


class RelationRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lhs: list[str]
    rhs: list[tuple[str, list[str]]]
    anchor: str


class RealFrameRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generators: list[str]
    rows: dict[str, list[tuple[str, str]]]
    inverse: dict[str, list[tuple[str, str]]]


class SpaceRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    generators: list[str]
    labels: list[str]
    relations: list[RelationRecord]
    relations_tag: str = ""
    metric: list[tuple[str, str, str]]
    metric_inverse: list[tuple[str, str, str]]
    conjugation: dict[str, list[tuple[str, list[str]]]]
    kappa_bosonic: str
    kappa_grassmann: str
    lattice_coordinates: list[str]
    lattice_steps: list[int]
    lattice_prefactor: str
    volume_prefactor: str
    real_frame: Optional[RealFrameRecord] = None
    rmatrix: Optional[str] = None

    @model_validator(mode="after")
    def check_shape(self):
        n = len(self.generators)
        if len(self.labels) != n:
            raise ValueError("labels and generators differ in length")
        if len(self.lattice_steps) != n or len(self.lattice_coordinates) != n:
            raise ValueError("one lattice step and coordinate per generator required")
        if any(step <= 0 for step in self.lattice_steps):
            raise ValueError("lattice steps must be positive")
        known = set(self.generators)
        for relation in self.relations:
            words = [relation.lhs] + [word for _, word in relation.rhs]
            unknown = {letter for word in words for letter in word} - known
            if unknown:
                raise ValueError(f"relation {relation.anchor!r} uses unknown generators {sorted(unknown)}")
            if len(relation.lhs) != 2:
                raise ValueError(f"relation {relation.anchor!r} must rewrite a word of length 2")
            if relation.anchor.count("=") != 1:
                raise ValueError(f"relation anchor {relation.anchor!r} must read lhs = rhs")
        if set(self.conjugation) != known:
            raise ValueError("conjugation must list every generator exactly once")
        labels = set(self.labels)
        for i, j, _ in self.metric + self.metric_inverse:
            if i not in labels or j not in labels:
                raise ValueError(f"metric index ({i}, {j}) is not a label")
        return self


class SpacesFile(BaseModel):
    spaces: list[SpaceRecord]


# runtime


@dataclass(frozen=True)
class Relation:
    lhs: tuple
    rhs: tuple
    anchor: str


@dataclass(frozen=True)
class RealFrame:
    generators: tuple
    rows: dict
    inverse: dict


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    name: str
    generators: tuple
    labels: tuple
    relations: tuple
    metric: dict
    metric_inverse: dict
    conjugation: dict
    kappa_bosonic: QScalar
    kappa_grassmann: QScalar
    lattice_coordinates: tuple
    lattice_steps: tuple
    lattice_prefactor: QScalar
    volume_prefactor: QScalar
    real_frame: Optional[RealFrame] = None
    rmatrix: Optional[str] = None
    relations_tag: str = ""
    record: Optional[SpaceRecord] = field(default=None, repr=False)

    @cached_property
    def rewriter(self):
        from ncalg import RewriteSystem

        rules = {relation.lhs: relation.rhs for relation in self.relations}
        return RewriteSystem(self.generators, rules)

    def symbol(self, label: str) -> str:
        return self.generators[self.labels.index(label)]

    def label(self, symbol: str) -> str:
        return self.labels[self.generators.index(symbol)]

    def metric_entry(self, upper: str, lower: str, inverse: bool = False) -> QScalar:
        table = self.metric_inverse if inverse else self.metric
        return table.get((upper, lower), QScalar())

    def __repr__(self):
        return f"SpaceSpec({self.name})"


def _terms(pairs):
    from grammar import parse_scalar

    return tuple((parse_scalar(text), tuple(word)) for text, word in pairs)


def space_from_record(record: SpaceRecord) -> SpaceSpec:
    from grammar import ParseError, parse_scalar

    try:
        frame = None
        if record.real_frame is not None:
            rows = {y: tuple((parse_scalar(c), x) for c, x in row) for y, row in record.real_frame.rows.items()}
            inverse = {x: tuple((parse_scalar(c), y) for c, y in row) for x, row in record.real_frame.inverse.items()}
            frame = RealFrame(tuple(record.real_frame.generators), rows, inverse)
        return SpaceSpec(
            name=record.name,
            generators=tuple(record.generators),
            labels=tuple(record.labels),
            relations=tuple(Relation(tuple(r.lhs), _terms(r.rhs), r.anchor) for r in record.relations),
            metric={(i, j): parse_scalar(v) for i, j, v in record.metric},
            metric_inverse={(i, j): parse_scalar(v) for i, j, v in record.metric_inverse},
            conjugation={gen: _terms(rhs) for gen, rhs in record.conjugation.items()},
            kappa_bosonic=parse_scalar(record.kappa_bosonic),
            kappa_grassmann=parse_scalar(record.kappa_grassmann),
            lattice_coordinates=tuple(record.lattice_coordinates),
            lattice_steps=tuple(record.lattice_steps),
            lattice_prefactor=parse_scalar(record.lattice_prefactor),
            volume_prefactor=parse_scalar(record.volume_prefactor),
            real_frame=frame,
            rmatrix=record.rmatrix,
            relations_tag=record.relations_tag,
            record=record,
        )
    except ParseError as e:
        raise ConfigError(f"Space {record.name}: {e}") from e


def read_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


@lru_cache(maxsize=None)
def _load_spaces(path: str) -> dict:
    try:
        records = SpacesFile.model_validate(read_json(Path(path))).spaces
    except ValidationError as e:
        raise ConfigError(f"Invalid space records in {path}: {e}") from e
    spaces = {record.name: space_from_record(record) for record in records}
    logger.info(f"Loaded {len(spaces)} space presets from {path}")
    return spaces


def load_spaces(config_dir: Path | None = None) -> dict:
    directory = Path(config_dir) if config_dir is not None else Config.CONFIG_DIR
    return _load_spaces(str(directory / "spaces.json"))


def load_space(name: str, config_dir: Path | None = None) -> SpaceSpec:
    spaces = load_spaces(config_dir)
    if name not in spaces:
        raise UnknownSpaceError(f"Unknown space {name!r}; known: {', '.join(spaces)}")
    return spaces[name]


def dump_space(space: SpaceSpec) -> dict:
    """The space as its JSON record; load_space(dump_space(s)) reproduces s."""
    if space.record is None:
        raise ConfigError(f"Space {space.name} was not built from a record")
    return space.record.model_dump(mode="json")
