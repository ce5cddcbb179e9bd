import json
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from config import ConfigError
from ncalg import NCPoly, SpaceMismatchError, UnknownGeneratorError
from phasespace import (
    DerivKind,
    MissingRMatrixError,
    _load_rmatrix,
    associativity_failures,
    classical_limit_check,
    commutator_at_one,
    cross_rule_identities,
    derivative_action,
    dump_rmatrix,
    load_phase_algebra,
    load_rmatrix,
    phase_normal_order,
    rmatrix_checks,
)
from scalar import I, ONE, ZERO
from utils.helpers import make_rng, random_word

WITH_RMATRIX = ["quantum_plane", "euclid3"]


@pytest.fixture(params=WITH_RMATRIX)
def algebra(request):
    from spaces import load_space

    return load_phase_algebra(load_space(request.param))


def test_rmatrix_checks_pass(algebra):
    checks = rmatrix_checks(algebra.rmatrix)
    assert {"braid", "inverse", "flip_limit"} <= set(checks)
    assert all(checks.values()), checks


def test_cross_rules_hold_in_every_normal_form(algebra):
    identities = cross_rule_identities(algebra)
    assert len(identities) == 4 * len(algebra.space.labels) ** 2
    for kind, k, l, residual in identities:
        assert residual.is_zero(), (kind.tag, k, l, residual.render())


@pytest.mark.parametrize("tag", ["L", "R", "hL", "hR"])
def test_generator_triples_associate(algebra, tag):
    kind = DerivKind.from_tag(tag)
    generators = algebra.calculus(kind.hatted, kind.side).generators
    triples = [((a,), (b,), (c,)) for a, b, c in product(generators, repeat=3)]
    assert associativity_failures(algebra, triples, kind) == []


@pytest.mark.parametrize("name", WITH_RMATRIX)
@pytest.mark.parametrize("tag", ["L", "R", "hL", "hR"])
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=10, deadline=None)
def test_mixed_words_associate(name, tag, seed):
    from spaces import load_space

    rng = make_rng(seed)
    kind = DerivKind.from_tag(tag)
    alg = load_phase_algebra(load_space(name))
    generators = alg.calculus(kind.hatted, kind.side).generators
    triple = tuple(random_word(rng, generators, int(rng.integers(0, 3))) for _ in range(3))
    assert associativity_failures(alg, [triple], kind) == []


@pytest.mark.parametrize("hatted", [False, True])
def test_canonical_commutator_at_one(algebra, hatted):
    assert all(commutator_at_one(algebra, hatted).values())


@pytest.mark.parametrize("tag", ["L", "R", "hL", "hR"])
def test_derivatives_act_classically_at_one(algebra, tag):
    assert classical_limit_check(algebra, DerivKind.from_tag(tag), max_degree=2) == []


def test_derivative_of_constants_vanishes(algebra):
    one = NCPoly.constant(algebra.space, ONE)
    for tag in ("L", "R", "hL", "hR"):
        for label in algebra.space.labels:
            assert derivative_action(algebra, DerivKind.from_tag(tag), label, one).is_zero()


def test_left_derivative_on_coordinates(plane):
    alg = load_phase_algebra(plane)
    for k in plane.labels:
        for l in plane.labels:
            x = NCPoly.generator(plane, plane.symbol(l))
            expected = NCPoly.constant(plane, plane.metric.get((k, l), ZERO))
            assert derivative_action(alg, DerivKind(), k, x) == expected


def test_momentum_position_exchange(plane):
    alg = load_phase_algebra(plane)
    value = phase_normal_order(alg, [(("P1", "X2"), ONE)])
    assert value.coefficient(()) == I * plane.metric[("1", "2")]
    assert all(len(word) in (0, 2) for word in value.terms)


def test_deriv_kind_tags():
    assert DerivKind.from_tag("hR") == DerivKind(True, "right")
    assert DerivKind(True, "left").barred() == DerivKind(False, "left")
    with pytest.raises(ValueError):
        DerivKind.from_tag("dL")
    with pytest.raises(ValueError):
        DerivKind(False, "up")


def test_missing_rmatrix(euclid4):
    with pytest.raises(MissingRMatrixError):
        load_rmatrix(euclid4)
    with pytest.raises(LookupError):
        load_phase_algebra(euclid4)


def test_derivative_argument_checks(plane, euclid3):
    alg = load_phase_algebra(plane)
    with pytest.raises(UnknownGeneratorError):
        derivative_action(alg, DerivKind(), "3", NCPoly.generator(plane, "X1"))
    with pytest.raises(SpaceMismatchError):
        derivative_action(alg, DerivKind(), "1", NCPoly.generator(euclid3, "X3"))


def test_record_roundtrip_and_bad_records(plane, tmp_path):
    record = dump_rmatrix(load_rmatrix(plane))
    assert record["space"] == "quantum_plane"
    record["k"] = "q^^"
    path = tmp_path / "bad_k.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(ConfigError):
        _load_rmatrix(str(path))
    record.pop("entries")
    path = tmp_path / "no_entries.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    with pytest.raises(ConfigError):
        _load_rmatrix(str(path))
