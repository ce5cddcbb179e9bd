import io
import json
from fractions import Fraction

import pytest

from config import ConfigError
from lattice import (
    LatticeFunction,
    LatticeSpecRecord,
    LatticeWindowError,
    MomentumOperator,
    Projector,
    Quasipoint,
    ZeroNormError,
    combined_integral,
    coordinate_function,
    density,
    dump_lattice_spec,
    expectation,
    heaviside,
    hermitian_part,
    integrate,
    jackson_1d,
    lattice_delta,
    lattice_spec_from_record,
    load_lattice_spec,
    make_lattice_spec,
    norm,
    projector_E,
    projector_E_bar,
    read_csv,
    rescale,
    sample,
    separable_ratio,
    spectral_apply,
    write_csv,
)
from ncalg import CoefficientPoly, NCPoly, SpaceMismatchError, UnsupportedSpaceError, nc_conjugate
from scalar import I, ONE, GaussQ, QScalar
from spaces import SPACE_NAMES
from utils.helpers import random_lattice_function


@pytest.fixture
def exact_plane():
    return make_lattice_spec("quantum_plane", 2, window=2, exact=True)


@pytest.fixture
def fn(exact_plane, rng):
    return random_lattice_function(exact_plane, rng)


# lattice specs


def test_points_cover_every_sector_and_exponent():
    spec = make_lattice_spec("quantum_plane", 2, window=1, exact=True)
    assert len(spec.points) == 4 * 3 * 3
    assert list(spec.points) == sorted(spec.points)
    assert spec.sectors[0] == (1, 1)


def test_weights_use_magnitudes():
    spec = make_lattice_spec("quantum_plane", 2, window=1, exact=True)
    # (q^2 - 1)^2 q^2 q^2 at q = 2
    assert spec.weight(Quasipoint((1, 1), (1, 1))) == 144
    assert spec.weight(Quasipoint((-1, 1), (1, 1))) == 144
    assert spec.weight(Quasipoint((1, -1), (0, 0))) == 9
    assert spec.coordinate(Quasipoint((-1, 1), (1, 0)), 0) == -4
    assert spec.coordinates(Quasipoint((1, 1), (-1, 0))) == (Fraction(1, 4), 1)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_float_weights_agree_with_exact_ones(name):
    exact = make_lattice_spec(name, 2, window=1, exact=True)
    floating = make_lattice_spec(name, 2.0, window=1)
    weights = floating.weights(floating.points)
    for point, weight in zip(floating.points, weights):
        assert weight == pytest.approx(float(exact.weight(point)), rel=1e-12)


def test_spec_arguments_are_validated(plane):
    with pytest.raises(ValueError):
        make_lattice_spec(plane, 1)
    with pytest.raises(ConfigError):
        make_lattice_spec(plane, 1.5, exact=True)
    with pytest.raises(ValueError):
        make_lattice_spec(plane, 2, alpha=[1])
    with pytest.raises(ValueError):
        make_lattice_spec(plane, 2, alpha=[1, -1])
    with pytest.raises(ValueError):
        make_lattice_spec(plane, 2, window=[(1, 0), (0, 0)])
    with pytest.raises(ValueError):
        make_lattice_spec(plane, 2, sectors=[(1, 1, 1)])


def test_window_membership(exact_plane):
    assert exact_plane.contains(Quasipoint((1, -1), (2, -2)))
    assert not exact_plane.contains(Quasipoint((1, -1), (3, 0)))
    with pytest.raises(LatticeWindowError):
        LatticeFunction(exact_plane, {Quasipoint((1, 1), (0, 5)): 1})
    with pytest.raises(ValueError):
        Quasipoint((1, 0), (0, 0))


def test_restricted_sectors():
    spec = make_lattice_spec("quantum_plane", 2, window=0, sectors=[(1, 1)], exact=True)
    assert spec.points == (Quasipoint((1, 1), (0, 0)),)
    assert not spec.contains(Quasipoint((-1, 1), (0, 0)))


# Jackson integrals


def test_jackson_scaling_is_exact():
    q = Fraction(2)
    table = {q ** (2 * k): Fraction(k + 3) for k in range(-2, 3)}

    def f(x):
        return table.get(x, Fraction(0))

    lhs = jackson_1d(lambda x: f(q ** 2 * x), 2, Fraction(1), q, "pos", (-5, 5))
    rhs = q ** -2 * jackson_1d(f, 2, Fraction(1), q, "pos", (-5, 5))
    assert lhs == rhs


def test_jackson_reaches_the_riemann_integral():
    q = 1.001
    value = jackson_1d(lambda x: x * x if x <= 1 else 0.0, 1, 1.0, q, "pos", (-20000, 0))
    assert abs(value - 1 / 3) < 5 * (q - 1)


def test_jackson_half_lines():
    def even(x):
        return 1 / (1 + x * x)

    pos = jackson_1d(even, 2, 1.0, 1.5, "pos")
    neg = jackson_1d(even, 2, 1.0, 1.5, "neg")
    assert pos == pytest.approx(neg)
    assert jackson_1d(even, 2, 1.0, 1.5, "full") == pytest.approx(pos + neg)
    assert jackson_1d(lambda x: x, 2, 1.0, 1.5, "full") == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        jackson_1d(even, 2, 1.0, 1.5, "left")
    with pytest.raises(ValueError):
        jackson_1d(even, 2, 1.0, 0.5)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_separable_functions_factorize(name):
    spec = make_lattice_spec(name, 1.3, window=3)

    def factor(x):
        return 1 / (1 + x * x)

    def product(coords):
        out = 1
        for x in coords:
            out *= factor(x)
        return out

    total = integrate(LatticeFunction.from_callable(spec, product))
    expected = separable_ratio(spec)
    for j in range(spec.n):
        expected *= jackson_1d(factor, spec.steps[j], spec.alpha[j], spec.q, "full", spec.window[j])
    assert abs(total - expected) <= 1e-12 * max(1.0, abs(expected))


# lattice identities


def test_delta_reproduces_values(exact_plane, fn):
    for point in exact_plane.points[::7]:
        delta = lattice_delta(exact_plane, point)
        assert integrate(fn * delta) == fn.value(point)
        assert integrate(delta) == 1
    with pytest.raises(LatticeWindowError):
        lattice_delta(exact_plane, Quasipoint((1, 1), (9, 9)))


def test_delta_is_a_position_eigenfunction(exact_plane):
    for point in exact_plane.points[::5]:
        delta = lattice_delta(exact_plane, point)
        for j in range(exact_plane.n):
            assert spectral_apply(exact_plane, coordinate_function(j), delta) == delta.scale(exact_plane.coordinate(point, j))


def test_projectors(exact_plane, fn):
    bounds = [(1, 0), (-1, 1)]
    E = projector_E(exact_plane, bounds)
    assert E(E(fn)) == E(fn)
    assert E(fn) + projector_E_bar(exact_plane, bounds)(fn) == fn
    assert E.bar()(fn) == projector_E_bar(exact_plane, bounds)(fn)
    full = projector_E(exact_plane, [(1, hi) for _, hi in exact_plane.window])
    assert full(fn) == fn
    # second axis: x <= -q^2
    assert all(p.signs[1] == -1 and p.exps[1] >= 1 for p in E(fn).samples)


def test_heaviside_keeps_the_positive_branch(exact_plane, fn):
    theta = heaviside(exact_plane, 0)
    kept = theta(fn)
    assert all(p.signs[0] == 1 for p in kept.samples)
    assert kept + theta.bar()(fn) == fn


def test_projector_arguments(exact_plane):
    with pytest.raises(ValueError):
        Projector(exact_plane, [None])
    with pytest.raises(ValueError):
        Projector(exact_plane, [(2, 0), None])
    other = make_lattice_spec("quantum_plane", 2, window=2, exact=True)
    with pytest.raises(SpaceMismatchError):
        projector_E(exact_plane, [None, None])(LatticeFunction(other))


def test_spectral_functions_multiply(exact_plane, fn):
    F, G = coordinate_function(0), (lambda c: c[1] * c[1])
    assert spectral_apply(exact_plane, F, spectral_apply(exact_plane, G, fn)) == spectral_apply(
        exact_plane, lambda c: F(c) * G(c), fn
    )
    assert spectral_apply(exact_plane, lambda c: 1, fn) == fn


def test_rescale_scales_the_volume(fn):
    scaled = rescale(fn, 3)
    assert scaled.spec.alpha == (Fraction(1, 3), Fraction(1, 3))
    assert integrate(scaled) == integrate(fn) / Fraction(9)
    with pytest.raises(ValueError):
        rescale(fn, 0)


def test_combined_integral(exact_plane, fn, rng):
    direct = integrate(fn)
    assert combined_integral(fn, 1) == GaussQ(0, Fraction(1, 2)) * (direct + direct)
    g = random_lattice_function(exact_plane, rng)
    assert combined_integral(fn + g, 2) == combined_integral(fn, 2) + combined_integral(g, 2)
    custom = {"L": lambda f: GaussQ(2), "Rbar": lambda f: GaussQ(4)}
    assert combined_integral(fn, 1, custom) == GaussQ(0, 3)
    with pytest.raises(ValueError):
        combined_integral(fn, 0)


def test_float_combined_integral():
    spec = make_lattice_spec("quantum_plane", 1.5, window=1)
    f = LatticeFunction.from_callable(spec, lambda c: 1.0)
    assert combined_integral(f, 2) == pytest.approx(1j * integrate(f))


# lattice functions


def test_function_arithmetic(exact_plane, fn, rng):
    g = random_lattice_function(exact_plane, rng)
    assert (fn + g) - g == fn
    assert fn - fn == LatticeFunction(exact_plane)
    assert -fn == fn.scale(-1)
    assert (2 * fn).value(exact_plane.points[0]) == 2 * fn.value(exact_plane.points[0])
    point = exact_plane.points[3]
    assert (fn * g).value(point) == fn.value(point) * g.value(point)
    twin = make_lattice_spec("quantum_plane", 2, window=2, exact=True)
    with pytest.raises(SpaceMismatchError):
        fn + LatticeFunction(twin)


def test_exact_functions_reject_floats(exact_plane):
    with pytest.raises(TypeError):
        LatticeFunction(exact_plane, {exact_plane.points[0]: 0.5j})


def test_close_to():
    spec = make_lattice_spec("quantum_plane", 1.5, window=1)
    f = LatticeFunction.from_callable(spec, lambda c: c[0])
    assert f.close_to(f + LatticeFunction(spec, {spec.points[0]: 1e-15}))
    assert not f.close_to(f + LatticeFunction(spec, {spec.points[0]: 1e-3}))


# files


def test_csv_roundtrip_exact(exact_plane, fn):
    buffer = io.StringIO()
    write_csv(fn, buffer)
    buffer.seek(0)
    assert buffer.getvalue().splitlines()[0] == "s_1,s_2,v_1,v_2,re,im"
    assert read_csv(exact_plane, buffer) == fn


def test_csv_roundtrip_float(rng):
    spec = make_lattice_spec("euclid3", 1.5, window=1)
    f = random_lattice_function(spec, rng)
    buffer = io.StringIO()
    write_csv(f, buffer)
    buffer.seek(0)
    assert read_csv(spec, buffer) == f


@pytest.mark.parametrize(
    "text",
    [
        "s_1,v_1,re,im\n",
        "s_1,s_2,v_1,v_2,re,im\n1,1,0,0,1\n",
        "s_1,s_2,v_1,v_2,re,im\n1,1,0,0,one,0\n",
        "s_1,s_2,v_1,v_2,re,im\n2,1,0,0,1,0\n",
    ],
)
def test_csv_errors(exact_plane, text):
    with pytest.raises(ConfigError):
        read_csv(exact_plane, io.StringIO(text))


def test_spec_json_roundtrip(tmp_path, exact_plane):
    record = dump_lattice_spec(exact_plane)
    assert record["q"] == "2" and record["exact"] is True
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(record), encoding="utf-8")
    loaded = load_lattice_spec(path)
    assert loaded.points == exact_plane.points
    assert loaded.q == exact_plane.q and loaded.alpha == exact_plane.alpha
    assert dump_lattice_spec(loaded) == LatticeSpecRecord.model_validate(record).model_dump(mode="json")


def test_spec_record_defaults():
    spec = lattice_spec_from_record(LatticeSpecRecord(space="euclid4", q=1.2, window=1))
    assert spec.n == 4 and not spec.exact
    assert len(spec.sectors) == 16


def test_invalid_spec_files(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"space": "euclid3", "q": "2", "sectors": [[1, 2, 1]]}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_lattice_spec(path)
    path.write_text(json.dumps({"space": "euclid3", "q": "2", "colour": "red"}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_lattice_spec(path)


# wave functions


def test_sampling_polynomials(exact_plane):
    x1 = CoefficientPoly.variable(exact_plane.space, "X1")
    sampled = sample(exact_plane, x1)
    for point in exact_plane.points[::6]:
        assert sampled.value(point) == exact_plane.coordinate(point, 1)


def test_minkowski_lattice_is_not_sampled(minkowski):
    spec = make_lattice_spec(minkowski, 1.5, window=1)
    with pytest.raises(UnsupportedSpaceError):
        sample(spec, CoefficientPoly.constant(minkowski, ONE))


def test_normalized_density_integrates_to_one(euclid3):
    spec = make_lattice_spec(euclid3, 1.5, window=2)
    psi = CoefficientPoly.constant(euclid3, ONE) + CoefficientPoly.variable(euclid3, "X3")
    assert abs(integrate(density(psi, spec, normalize=True)) - 1) < 1e-12
    assert integrate(density(psi, spec)) == pytest.approx(norm(psi, spec))


def test_zero_state_has_no_norm(euclid3):
    spec = make_lattice_spec(euclid3, 1.5, window=1)
    zero = CoefficientPoly(euclid3)
    with pytest.raises(ZeroNormError):
        density(zero, spec, normalize=True)
    with pytest.raises(ZeroDivisionError):
        expectation(NCPoly.generator(euclid3, "X3"), zero, spec, normalize=True)


def test_odd_expectations_vanish_exactly(euclid3):
    spec = make_lattice_spec(euclid3, 4, window=1, exact=True)
    one = CoefficientPoly.constant(euclid3, ONE)
    for x in euclid3.generators:
        assert expectation(hermitian_part(NCPoly.generator(euclid3, x)), one, spec) == 0


def test_hermitian_part_is_self_conjugate(euclid3):
    h = hermitian_part(NCPoly.generator(euclid3, "X+"))
    assert nc_conjugate(h) == h


def test_momentum_operator(plane):
    op = MomentumOperator.of({"1": 1})
    x2 = NCPoly.generator(plane, "X2")
    assert op.apply(x2) == NCPoly.constant(plane, -I * QScalar.q_power(Fraction(-1, 2)))
    assert op.apply(NCPoly.constant(plane, ONE)).is_zero()
    spec = make_lattice_spec(plane, 1.5, window=1)
    assert expectation(op, CoefficientPoly.constant(plane, ONE), spec) == 0


def test_operator_space_must_match(euclid3, plane):
    spec = make_lattice_spec(euclid3, 1.5, window=1)
    with pytest.raises(SpaceMismatchError):
        expectation(NCPoly.generator(plane, "X1"), CoefficientPoly.constant(euclid3, ONE), spec)
