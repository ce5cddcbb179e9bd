import pytest
from hypothesis import given, settings, strategies as st

from config import ConfigError
from ncalg import (
    CoefficientPoly,
    FreeSpace,
    NCPoly,
    RewriteBoundExceeded,
    RewriteSystem,
    SpaceMismatchError,
    UnknownGeneratorError,
    UnsupportedSpaceError,
    dequantize,
    from_real_coords,
    nc_conjugate,
    ncmul,
    normal_order,
    normal_order_stats,
    quantize,
    relation_residuals,
    relations_commute_at_one,
    rewrite_bound,
    star_product,
    to_real_coords,
)
from scalar import I, LAMBDA, ONE, Q
from spaces import SPACE_NAMES, SpaceRecord, dump_space, load_space, space_from_record
from utils.helpers import make_rng, random_coefficient_poly, random_ncpoly, random_word


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_relations_reduce_to_zero(name):
    space = load_space(name)
    for relation, residual in relation_residuals(space):
        assert residual.is_zero(), relation.anchor


def test_relations_are_read_in_their_printed_orientation(euclid4):
    relation = next(r for r in euclid4.relations if r.lhs == ("X2", "X1"))
    assert relation.anchor.startswith("X1*X2")
    assert all(residual.is_zero() for r, residual in relation_residuals(euclid4) if r is relation)


@pytest.mark.parametrize("coeff", ["q^(-1)", "q^(2)", "1"])
def test_wrong_rewrite_rule_leaves_a_residual(plane, coeff):
    record = dump_space(plane)
    record["relations"][0]["rhs"] = [[coeff, ["X2", "X1"]]]
    broken = space_from_record(SpaceRecord.model_validate(record))
    ((_, residual),) = relation_residuals(broken)
    assert not residual.is_zero()
    ((_, residual),) = relation_residuals(broken, conjugated=True)
    assert not residual.is_zero()


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_relations_commute_at_one(name):
    assert all(relations_commute_at_one(load_space(name)).values())


def test_quantum_plane_rule(plane):
    x1, x2 = NCPoly.generator(plane, "X1"), NCPoly.generator(plane, "X2")
    assert x1 * x2 == (x2 * x1).scale(Q)
    assert normal_order(plane, [(("X1", "X1", "X2"), ONE)]) == NCPoly(plane, {("X2", "X1", "X1"): Q * Q})


def test_euclid4_lambda_term(euclid4):
    value = normal_order(euclid4, [(("X4", "X1"), ONE)])
    assert value.coefficient(("X1", "X4")) == ONE
    assert value.coefficient(("X2", "X3")) == LAMBDA


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_associativity(name, seed):
    space = load_space(name)
    rng = make_rng(seed)
    a, b, c = (random_ncpoly(space, rng, max_degree=2, terms=2) for _ in range(3))
    assert ncmul(ncmul(a, b), c) == ncmul(a, ncmul(b, c))


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_normal_order_is_homogeneous_and_bounded(name, rng):
    space = load_space(name)
    for _ in range(20):
        word = random_word(rng, space.generators, 5)
        poly = normal_order(space, [(word, ONE)])
        assert poly.is_zero() or poly.degrees() == {5}
        stats = normal_order_stats(space, [(word, ONE)])
        assert stats["max_depth"] <= stats["bound"] == rewrite_bound(space, 5)


def test_rewrite_bound_counts_words():
    assert rewrite_bound(2, 3) == 1 + 2 + 4 + 8


@pytest.mark.parametrize("name", ["euclid3", "euclid4", "minkowski"])
def test_conjugation_is_an_involutive_antihomomorphism(name, rng):
    space = load_space(name)
    for _ in range(10):
        f, g = random_ncpoly(space, rng, 2, 2), random_ncpoly(space, rng, 2, 2)
        assert nc_conjugate(nc_conjugate(f)) == f
        assert nc_conjugate(ncmul(f, g)) == ncmul(nc_conjugate(g), nc_conjugate(f))


def test_quantum_plane_conjugation_squares_to_degree_sign(plane, rng):
    for _ in range(10):
        f = random_ncpoly(plane, rng, max_degree=3, terms=3)
        expected = NCPoly(plane, {w: (c if len(w) % 2 == 0 else -c) for w, c in f.terms.items()})
        assert nc_conjugate(nc_conjugate(f)) == expected


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_conjugation_respects_relations(name):
    for relation, residual in relation_residuals(load_space(name), conjugated=True):
        assert residual.is_zero(), relation.anchor


def test_conjugation_is_antilinear(euclid3):
    x3 = NCPoly.generator(euclid3, "X3")
    assert nc_conjugate(x3.scale(I * Q)) == x3.scale(-I * Q)
    assert nc_conjugate(NCPoly.generator(euclid3, "X+")) == NCPoly.generator(euclid3, "X-").scale(-Q)


@pytest.mark.parametrize("name", ["euclid3", "euclid4", "minkowski"])
def test_real_frame(name, rng):
    space = load_space(name)
    frame = FreeSpace.real_frame(space)
    for y in frame.generators:
        image = from_real_coords(NCPoly.generator(frame, y))
        assert nc_conjugate(image) == image
    f = random_ncpoly(space, rng, 2, 3)
    assert from_real_coords(to_real_coords(f)) == f


def test_quantum_plane_has_no_real_frame(plane):
    with pytest.raises(UnsupportedSpaceError):
        FreeSpace.real_frame(plane)
    with pytest.raises(UnsupportedSpaceError):
        to_real_coords(NCPoly.generator(plane, "X1"))


def test_star_product_of_coordinates(plane):
    x1 = CoefficientPoly.variable(plane, "X1")
    x2 = CoefficientPoly.variable(plane, "X2")
    assert star_product(x2, x1) == x1 * x2
    assert star_product(x1, x2) == (x1 * x2).scale(Q)


@pytest.mark.parametrize("name", SPACE_NAMES)
@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=10, deadline=None)
def test_star_product_is_associative(name, seed):
    space = load_space(name)
    rng = make_rng(seed)
    f, g, h = (random_coefficient_poly(space, rng, max_degree=3, terms=2) for _ in range(3))
    assert star_product(star_product(f, g), h) == star_product(f, star_product(g, h))


def test_star_product_with_constants(euclid3, rng):
    f = random_coefficient_poly(euclid3, rng, max_degree=3, terms=3)
    two = CoefficientPoly.constant(euclid3, ONE + ONE)
    assert star_product(two, f) == star_product(f, two) == f.scale(ONE + ONE)


def test_quantize_roundtrip(euclid4, rng):
    f = random_ncpoly(euclid4, rng, 3, 4)
    assert quantize(dequantize(f)) == f


def test_spaces_do_not_mix(plane, euclid3):
    with pytest.raises(SpaceMismatchError):
        NCPoly.generator(plane, "X1") + NCPoly.generator(euclid3, "X3")
    with pytest.raises(SpaceMismatchError):
        star_product(CoefficientPoly.variable(plane, "X1"), CoefficientPoly.variable(euclid3, "X3"))


def test_unknown_generators(plane):
    with pytest.raises(UnknownGeneratorError):
        normal_order(plane, [(("X1", "Y"), ONE)])
    with pytest.raises(UnknownGeneratorError):
        CoefficientPoly.variable(plane, "X3")


def test_nondecreasing_rules_are_rejected():
    with pytest.raises(ConfigError):
        RewriteSystem(("a", "b"), {("b", "a"): [(ONE, ("b", "a"))]})
    with pytest.raises(ConfigError):
        RewriteSystem(("a", "b"), {("a", "b"): [(ONE, ("a", "b"))]})


def test_missing_rule_is_a_config_error():
    system = RewriteSystem(("a", "b"), {})
    with pytest.raises(ConfigError):
        system.reduce(("b", "a"))
    free = RewriteSystem(("a", "b"), {}, free=True)
    assert free.reduce(("b", "a")) == {("b", "a"): ONE}


def test_rewrite_depth_guard(monkeypatch, plane):
    import ncalg

    monkeypatch.setattr(ncalg, "rewrite_bound", lambda space, degree: -1)
    system = RewriteSystem(plane.rewriter.order, plane.rewriter.rules)
    with pytest.raises(RewriteBoundExceeded):
        system.reduce(("X1", "X2"))
