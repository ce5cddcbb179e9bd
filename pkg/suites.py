"""
Verification suites. Every suite is deterministic for a given seed: each one draws
from its own generator seeded with (seed, suite index), so a suite yields the same
report alone or inside "all".
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable

from config import Config
from report import CheckRecord, Report
from scalar import I, LAMBDA, LAMBDA_PLUS, ONE, Q, Q_INV, GaussQ, QScalar
from utils.helpers import make_rng, random_coefficient_poly, random_ncpoly, random_qscalar, random_supernumber, random_word
from utils.logger import setup_logger

logger = setup_logger(__name__)

SUITES = ("algebra", "conjugation", "phasespace", "qexp", "grassmann", "lattice")

ASSOCIATIVITY_TRIPLES = 1000
CONJUGATION_SAMPLES = 500
STAR_TRIPLES = 50
PHASE_TRIPLES = 30

PREFACTORS = {
    "quantum_plane": ("(q^(2) - 1)^2", (2, 2)),
    "euclid3": ("(q^(4) - 1)^2*(q^(2) - 1)", (4, 2, 4)),
    "euclid4": ("(q^(4) - 1)^4", (2, 2, 2, 2)),
    "minkowski": ("(1 - q^(-2))^4", (2, 2, 2, 2)),
}
GRASSMANN_CONSTANTS = {
    # space: (kappa, vol)
    "quantum_plane": ("q^(3)", "1"),
    "euclid3": ("-q^(-6)", "i"),
    "euclid4": ("q^(-4)", "1"),
    "minkowski": ("q^(4)", "1"),
}


class UnknownSuiteError(KeyError):
    pass


class _Checks:
    """Collects CheckRecords; failures are logged as they happen."""

    def __init__(self, suite: str):
        self.suite = suite
        self.records: list[CheckRecord] = []

    def add(self, record: CheckRecord):
        if record.status == "fail":
            logger.warning(f"{record.id} failed [{record.paper_ref}]: {record.anchor} ({record.witness})")
        else:
            logger.debug(f"{record.id}: {record.status}")
        self.records.append(record)

    def exact(self, id: str, paper_ref: str, anchor: str, ok: bool, witness: str | None = None):
        self.add(CheckRecord(id=id, paper_ref=paper_ref, anchor=anchor, status="exact-pass" if ok else "fail", witness=witness))

    def numeric(self, id: str, paper_ref: str, anchor: str, error: float, tolerance: float, finding: bool = False):
        if error <= tolerance:
            status = "numeric-pass"
        else:
            status = "finding" if finding else "fail"
        self.add(CheckRecord(id=id, paper_ref=paper_ref, anchor=anchor, status=status, tolerance=tolerance, witness=repr(error)))

    def finding(self, id: str, paper_ref: str, anchor: str, witness: str):
        self.add(CheckRecord(id=id, paper_ref=paper_ref, anchor=anchor, status="finding", witness=witness))


def _first(items, fn=lambda x: x):
    for item in items:
        return fn(item)
    return None


# algebra


def _algebra(checks: _Checks, rng, q_value, window):
    from ncalg import (
        NCPoly,
        ncmul,
        normal_order,
        normal_order_stats,
        relation_residuals,
        relations_commute_at_one,
        star_product,
    )
    from spaces import SPACE_NAMES, load_space

    bad = []
    for _ in range(200):
        a, b, c = (random_qscalar(rng) for _ in range(3))
        if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or a * b != b * a:
            bad.append((a, b, c))
        if a.conj().conj() != a:
            bad.append((a,))
    checks.exact(
        "algebra.scalar.ring",
        "invented",
        "(ab)c = a(bc), a(b+c) = ab+ac, conj conj a = a",
        not bad,
        _first(bad, repr),
    )
    checks.exact("algebra.scalar.conj-q", "invented", "conj(q) = q", Q.conj() == Q)
    checks.exact(
        "algebra.scalar.limits",
        "invented",
        "lambda -> 0, lambda_plus -> 2",
        LAMBDA.eval_exact(1) == 0 and LAMBDA_PLUS.eval_exact(1) == 2,
    )

    for name in SPACE_NAMES:
        space = load_space(name)
        residuals = [(r.anchor, res) for r, res in relation_residuals(space) if not res.is_zero()]
        checks.exact(
            f"algebra.{name}.relations",
            space.relations_tag,
            "; ".join(r.anchor for r in space.relations),
            not residuals,
            _first(residuals, lambda x: f"{x[0]}: {x[1].render()}"),
        )

        limits = relations_commute_at_one(space)
        checks.exact(
            f"algebra.{name}.classical-limit",
            space.relations_tag,
            "X^i X^j = X^j X^i at q = 1",
            all(limits.values()),
            _first([a for a, ok in limits.items() if not ok]),
        )

        bad = []
        for _ in range(ASSOCIATIVITY_TRIPLES):
            a, b, c = (
                NCPoly.from_words(space, [(random_word(rng, space.generators, int(rng.integers(0, 3))), random_qscalar(rng, terms=1))])
                for _ in range(3)
            )
            if ncmul(ncmul(a, b), c) != ncmul(a, ncmul(b, c)):
                bad.append((a, b, c))
                break
        checks.exact(
            f"algebra.{name}.associativity",
            "invented",
            "(fg)h = f(gh)",
            not bad,
            _first(bad, lambda t: " | ".join(p.render() for p in t)),
        )

        bad = []
        for _ in range(STAR_TRIPLES):
            f, g, h = (random_coefficient_poly(space, rng, max_degree=3, terms=2) for _ in range(3))
            if star_product(star_product(f, g), h) != star_product(f, star_product(g, h)):
                bad.append((f, g, h))
                break
        checks.exact(
            f"algebra.{name}.star-associativity",
            "PraSes",
            "(f * g) * h = f * (g * h)",
            not bad,
            _first(bad, lambda t: " | ".join(repr(p.terms) for p in t)),
        )

        homogeneous, bounded = True, True
        for _ in range(50):
            word = random_word(rng, space.generators, int(rng.integers(1, 7)))
            poly = normal_order(space, [(word, ONE)])
            homogeneous &= poly.is_zero() or poly.degrees() == {len(word)}
            stats = normal_order_stats(space, [(word, ONE)])
            bounded &= stats["max_depth"] <= stats["bound"]
        checks.exact(f"algebra.{name}.homogeneity", "DarsDef", "deg W(f) = deg f", homogeneous)
        checks.exact(f"algebra.{name}.termination", "invented", "depth <= sum_k n^k", bounded)


# conjugation


def _conjugation(checks: _Checks, rng, q_value, window):
    from grammar import evaluate, parse
    from ncalg import (
        FreeSpace,
        NCPoly,
        UnsupportedSpaceError,
        from_real_coords,
        nc_conjugate,
        ncmul,
        relation_residuals,
        to_real_coords,
    )
    from spaces import SPACE_NAMES, load_space

    for name in SPACE_NAMES:
        space = load_space(name)
        bad = []
        for _ in range(CONJUGATION_SAMPLES):
            f = random_ncpoly(space, rng, max_degree=3, terms=2)
            twice = nc_conjugate(nc_conjugate(f))
            if name == "quantum_plane":
                expected = NCPoly(space, {w: (c if len(w) % 2 == 0 else -c) for w, c in f.terms.items()})
            else:
                expected = f
            if twice != expected:
                bad.append(f)
                break
        if name == "quantum_plane":
            checks.exact(
                f"conjugation.{name}.involution",
                "KonRel",
                "conj conj f = (-1)^deg f",
                not bad,
                _first(bad, lambda f: f.render()),
            )
        else:
            checks.exact(
                f"conjugation.{name}.involution",
                "KonRel",
                "conj conj f = f",
                not bad,
                _first(bad, lambda f: f.render()),
            )

        bad = []
        for _ in range(50):
            f, g = random_ncpoly(space, rng, 2, 2), random_ncpoly(space, rng, 2, 2)
            if nc_conjugate(ncmul(f, g)) != ncmul(nc_conjugate(g), nc_conjugate(f)):
                bad.append((f, g))
                break
        checks.exact(f"conjugation.{name}.antihomomorphism", "KonRel", "conj(fg) = conj(g) conj(f)", not bad)

        residuals = [(r.anchor, res) for r, res in relation_residuals(space, conjugated=True) if not res.is_zero()]
        checks.exact(
            f"conjugation.{name}.relations",
            space.relations_tag,
            "conj(lhs) - conj(rhs) = 0",
            not residuals,
            _first(residuals, lambda x: f"{x[0]}: {x[1].render()}"),
        )

        if space.real_frame is None:
            try:
                to_real_coords(NCPoly.generator(space, space.generators[0]))
                raised = False
            except UnsupportedSpaceError:
                raised = True
            checks.exact(f"conjugation.{name}.real-frame", "RealKoor3dim", "no real coordinates", raised)
            continue
        frame = FreeSpace.real_frame(space)
        selfconj = []
        for y in frame.generators:
            image = from_real_coords(NCPoly.generator(frame, y))
            if nc_conjugate(image) != image:
                selfconj.append(y)
        checks.exact(
            f"conjugation.{name}.real-frame",
            "RealKoor3dim",
            "conj(Y^i) = Y^i",
            not selfconj,
            _first(selfconj),
        )
        bad = []
        for _ in range(20):
            f = random_ncpoly(space, rng, 2, 2)
            if from_real_coords(to_real_coords(f)) != f:
                bad.append(f)
                break
        checks.exact(f"conjugation.{name}.real-roundtrip", "RealKoor3dim", "X -> Y -> X", not bad)

    minkowski = load_space("minkowski")
    value = evaluate(parse("conj(X+)", minkowski), minkowski)
    expected = NCPoly.generator(minkowski, "X-").scale(-Q_INV)
    checks.exact("conjugation.minkowski.light-cone", "MinrelN", "conj(X+) = -q^(-1) X-", value == expected, value.render())


# phase space


def _phasespace(checks: _Checks, rng, q_value, window):
    from phasespace import (
        DerivKind,
        associativity_failures,
        classical_limit_check,
        commutator_at_one,
        cross_rule_identities,
        load_phase_algebra,
        rmatrix_checks,
    )
    from spaces import load_space

    for name in ("quantum_plane", "euclid3"):
        alg = load_phase_algebra(load_space(name))
        for check, ok in sorted(rmatrix_checks(alg.rmatrix).items()):
            checks.exact(f"phasespace.{name}.rmatrix-{check}", "LeiMom1N", f"R: {check}", ok)

        identities = cross_rule_identities(alg)
        bad = [(kind.tag, k, l, res) for kind, k, l, res in identities if not res.is_zero()]
        checks.exact(
            f"phasespace.{name}.leibniz",
            "LeiMom1N",
            "P^k X^l = k (R^-1)^{kl}_{mn} X^m P^n + i g^{kl}",
            not bad,
            _first(bad, lambda b: f"{b[0]} ({b[1]},{b[2]}): {b[3].render()}"),
        )

        for hatted in (False, True):
            limit = commutator_at_one(alg, hatted)
            tag = "hatted" if hatted else "unhatted"
            checks.exact(
                f"phasespace.{name}.commutator-{tag}",
                "CanComRel",
                "P^k X^l - X^l P^k = i g^{kl}",
                all(limit.values()),
                _first([k for k, ok in limit.items() if not ok], repr),
            )

        for tag in ("L", "R", "hL", "hR"):
            failures = classical_limit_check(alg, DerivKind.from_tag(tag), max_degree=3)
            checks.exact(
                f"phasespace.{name}.derivative-{tag}",
                "WirkMomL",
                "d^k f = g^{kl} d_l f",
                not failures,
                _first(failures, repr),
            )

            kind = DerivKind.from_tag(tag)
            generators = alg.calculus(kind.hatted, kind.side).generators
            triples = [((a,), (b,), (c,)) for a, b, c in product(generators, repeat=3)]
            triples += [
                tuple(random_word(rng, generators, int(rng.integers(0, 3))) for _ in range(3)) for _ in range(PHASE_TRIPLES)
            ]
            failures = associativity_failures(alg, triples, kind)
            checks.exact(
                f"phasespace.{name}.{tag}.associativity",
                "CanComRel",
                "W(W(ab)c) = W(aW(bc)) on mixed X/P words",
                not failures,
                _first(failures, repr),
            )


# q-exponentials


def _qexp(checks: _Checks, rng, q_value, window):
    from phasespace import DerivKind
    from qexp import QCoeff, matches_classical, perturbation_breaks_residual, residual, solve_qexp, solve_qexp_dual
    from spaces import load_space

    plane = load_space("quantum_plane")
    degree = Config.QEXP_DEGREE
    series = solve_qexp(plane, N=degree)
    res = residual(series)
    checks.exact(
        "qexp.quantum_plane.residual",
        "DefMomEig1",
        "i d^j > u = u * p^j",
        not res,
        _first(res.items(), lambda kv: f"{kv[0]}: {kv[1].render()}"),
    )
    checks.exact("qexp.quantum_plane.pairing", "DefMomEig1", "deg_x = deg_p", series.degrees_paired())
    checks.exact("qexp.quantum_plane.classical", "DefMomEig1", "exp(-i x g^-1 p)", matches_classical(series))
    spot = series.coefficient(("X1",), ("P2",)) == QCoeff.from_qscalar(I * QScalar.q_power(Fraction(-1, 2)))
    spot &= series.coefficient(("X2",), ("P1",)) == QCoeff.from_qscalar(-I * QScalar.q_power(Fraction(1, 2)))
    checks.exact("qexp.quantum_plane.degree-one", "DefMomEig1", "i q^(-1/2) x^1 p^2 - i q^(1/2) x^2 p^1", spot)
    key = (("X1",), ("P2",))
    checks.exact(
        "qexp.quantum_plane.uniqueness",
        "DefMomEig1",
        "unique solution with u(0) = 1",
        perturbation_breaks_residual(series, key),
    )

    small = min(degree, 4)
    dual = solve_qexp_dual(plane, N=small)
    checks.exact("qexp.quantum_plane.dual-residual", "DefMomEig2", "u < i d^j = p^j * u", not residual(dual))
    hatted = solve_qexp(plane, DerivKind(True, "left"), N=min(degree, 3))
    checks.exact("qexp.quantum_plane.hatted-residual", "DefMomEig1", "i dh^j > u = u * p^j", not residual(hatted))
    checks.exact("qexp.quantum_plane.hatted-classical", "DefMomEig1", "exp(-i x gbar^-1 p)", matches_classical(hatted))

    euclid3 = solve_qexp(load_space("euclid3"), N=1)
    checks.exact("qexp.euclid3.residual", "DefMomEig1", "i d^j > u = u * p^j", not residual(euclid3))
    checks.exact("qexp.euclid3.classical", "DefMomEig1", "exp(-i x g^-1 p)", matches_classical(euclid3))


# Grassmann sector


def _grassmann(checks: _Checks, rng, q_value, window):
    from grammar import parse_scalar
    from grassmann import (
        VARIANTS,
        Supernumber,
        combined_forms,
        degree_violations,
        gram_determinant,
        grassmann_delta,
        load_grassmann_space,
        sesquilinear,
        table_coincidences,
    )
    from spaces import SPACE_NAMES

    plane = load_grassmann_space("quantum_plane")
    theta1 = Supernumber.monomial(plane, ["1"])
    checks.exact(
        "grassmann.quantum_plane.spot",
        "SesAnt",
        "q^(-1/2) conj(f_1) g_1",
        sesquilinear(plane, "L", False, theta1, theta1) == QScalar.q_power(Fraction(-1, 2)),
    )
    checks.exact(
        "grassmann.quantum_plane.combined",
        "SymSes1",
        "i^n/2 (<f,g>_L + <f,g>_Rbar)",
        combined_forms(plane, 1, False, theta1, theta1) == -QScalar.q_power(Fraction(-1, 2)),
    )
    e3 = load_grassmann_space("euclid3")
    top = Supernumber.monomial(e3, ["+", "3", "-"])
    checks.exact(
        "grassmann.euclid3.spot",
        "SesAnt",
        "-q^(-4) conj(f_+3-) g'",
        sesquilinear(e3, "L", False, top, Supernumber.constant(e3, ONE)) == -QScalar.q_power(-4),
    )
    mk = load_grassmann_space("minkowski")
    pair = Supernumber.monomial(mk, ["3/0", "3"])
    checks.exact(
        "grassmann.minkowski.spot",
        "SesAnt",
        "(q - q^3) conj(f_{3/0,3}) g_{3/0,3}",
        sesquilinear(mk, "L", False, pair, pair) == Q - Q ** 3,
    )
    deltas = {
        ("quantum_plane", "L"): (ONE, ("2", "1")),
        ("euclid3", "L"): (I, ("+", "3", "-")),
        ("minkowski", "R"): (ONE, ("+", "3", "3/0", "-")),
    }
    for (name, variant), (coeff, word) in deltas.items():
        gspace = load_grassmann_space(name)
        delta = grassmann_delta(gspace, variant)
        ok = delta == Supernumber.monomial(gspace, word, coeff) and delta.printed[frozenset(word)] == word
        checks.exact(f"grassmann.{name}.delta-{variant}", "SesAnt", delta.render(), ok)

    for name in SPACE_NAMES:
        gspace = load_grassmann_space(name)
        kappa, vol = GRASSMANN_CONSTANTS[name]
        checks.exact(f"grassmann.{name}.kappa", "SesAnt", f"kappa = {kappa}", gspace.kappa == parse_scalar(kappa), gspace.kappa.render())
        checks.exact(f"grassmann.{name}.vol", "SesAnt", f"vol = {vol}", gspace.vol == parse_scalar(vol), gspace.vol.render())

        violations = degree_violations(gspace)
        unflagged = [v for v in violations if v[2].flag is None]
        checks.exact(
            f"grassmann.{name}.complementary",
            "SesAnt",
            "|I| + |J| = n",
            not unflagged,
            _first(unflagged, lambda v: f"{v[0]}{chr(39) if v[1] else ''}: {v[2].f_word} {v[2].g_word}"),
        )
        for variant, primed, term in violations:
            if term.flag is not None:
                suffix = "-primed" if primed else ""
                checks.finding(
                    f"grassmann.{name}.flagged-{variant}{suffix}",
                    "SesAnt",
                    f"{term.coeff.render()} f_{{{','.join(term.f_word)}}} g_{{{','.join(term.g_word)}}}",
                    term.flag,
                )

        one = Supernumber.constant(gspace, ONE)
        zero_on_constants = all(sesquilinear(gspace, v, p, one, one).is_zero() for v in VARIANTS for p in (False, True))
        checks.exact(f"grassmann.{name}.constants", "SesAnt", "<1, 1> = 0", zero_on_constants)

        coincide = table_coincidences(gspace)
        expected = name != "minkowski"
        checks.exact(
            f"grassmann.{name}.coincidences",
            "SesAnt",
            "L = Rbar, Lbar = R" if expected else "L, Lbar, R, Rbar distinct",
            all(ok == expected for ok in coincide.values()),
        )

        bad = []
        for _ in range(10):
            f, g = random_supernumber(gspace, rng), random_supernumber(gspace, rng)
            alpha = random_qscalar(rng, terms=2)
            for variant in VARIANTS:
                base = sesquilinear(gspace, variant, False, f, g)
                if sesquilinear(gspace, variant, False, f.scale(alpha), g) != alpha.conj() * base:
                    bad.append(variant)
                if sesquilinear(gspace, variant, False, f, g.scale(alpha)) != alpha * base:
                    bad.append(variant)
                base = sesquilinear(gspace, variant, True, f, g)
                if sesquilinear(gspace, variant, True, f.scale(alpha), g) != alpha * base:
                    bad.append(variant + "'")
                if sesquilinear(gspace, variant, True, f, g.scale(alpha)) != alpha.conj() * base:
                    bad.append(variant + "'")
        checks.exact(f"grassmann.{name}.sesquilinear", "SesAnt", "<af, g> = conj(a)<f, g>, <f, ag> = a<f, g>", not bad, _first(bad))

    for name in ("quantum_plane", "euclid3"):
        det = gram_determinant(load_grassmann_space(name), "L")
        ok = not det.is_zero()
        if name == "quantum_plane":
            ok = ok and not det.eval_exact(1).is_zero()
        checks.exact(f"grassmann.{name}.gram", "invented", "det G_L != 0", ok, det.render())


# lattice


def _lattice(checks: _Checks, rng, q_value, window):
    from grammar import parse_scalar
    from lattice import (
        LatticeFunction,
        Quasipoint,
        combined_integral,
        coordinate_function,
        density,
        expectation,
        heaviside,
        hermitian_part,
        integrate,
        jackson_1d,
        lattice_delta,
        make_lattice_spec,
        projector_E,
        projector_E_bar,
        rescale,
        separable_ratio,
        spectral_apply,
    )
    from ncalg import CoefficientPoly, NCPoly
    from spaces import SPACE_NAMES, load_space
    from utils.helpers import random_lattice_function

    for name in SPACE_NAMES:
        space = load_space(name)
        text, steps = PREFACTORS[name]
        spec = make_lattice_spec(space, 2, window=1, exact=True)
        ok = space.lattice_prefactor == parse_scalar(text) and tuple(space.lattice_steps) == steps
        for exps in ((0,) * spec.n, (1,) * spec.n, tuple(j % 3 - 1 for j in range(spec.n))):
            point = Quasipoint((1,) * spec.n, exps)
            expected = (space.lattice_prefactor * Q ** sum(a * v for a, v in zip(steps, exps))).eval_exact(2)
            ok &= spec.weight(point) == expected.re and expected.im == 0
        checks.exact(f"lattice.{name}.weights", "MatIntKon1", f"{text} * prod q^(a_j v_j), steps {steps}", ok)

    q2 = Fraction(2)
    table = {q2 ** (2 * k): Fraction(int(rng.integers(-5, 6))) for k in range(-2, 3)}

    def f(x):
        return table.get(x, Fraction(0))

    def shifted(x):
        return f(q2 ** 2 * x)

    lhs = jackson_1d(shifted, 2, Fraction(1), q2, "pos", (-5, 5))
    rhs = q2 ** -2 * jackson_1d(f, 2, Fraction(1), q2, "pos", (-5, 5))
    checks.exact("lattice.jackson.scaling", "PerJackN", "J[f(q^a x)] = q^-a J[f]", lhs == rhs, str(lhs))

    q_riemann = 1.001
    value = jackson_1d(lambda x: x * x if x <= 1 else 0.0, 1, 1.0, q_riemann, "pos", (-20000, 0))
    checks.numeric("lattice.jackson.riemann", "PerJackN", "int_0^1 x^2 dx = 1/3", abs(value - 1 / 3), 5 * (q_riemann - 1))

    plane = make_lattice_spec("quantum_plane", 2, window=2, exact=True)
    fn = random_lattice_function(plane, rng)
    points = [plane.points[int(i)] for i in rng.integers(0, len(plane.points), size=5)]
    reproducing = all(integrate(fn * lattice_delta(plane, p)) == fn.value(p) for p in points)
    reproducing &= all(integrate(lattice_delta(plane, p)) == 1 for p in points)
    checks.exact("lattice.quantum_plane.delta", "DeltProAlg0", "int f delta_v = f(v)", reproducing)

    eigen = all(
        spectral_apply(plane, coordinate_function(j), lattice_delta(plane, p)) == lattice_delta(plane, p).scale(plane.coordinate(p, j))
        for p in points
        for j in range(plane.n)
    )
    checks.exact("lattice.quantum_plane.position-eigen", "DefPosEig1", "x^i u_y = y^i u_y", eigen)

    bounds = [(int(rng.choice([1, -1])), int(rng.integers(-2, 3))) for _ in range(plane.n)]
    E = projector_E(plane, bounds)
    full = projector_E(plane, [(1, hi) for _, hi in plane.window])
    ok = E(E(fn)) == E(fn) and full(fn) == fn and E(fn) + projector_E_bar(plane, bounds)(fn) == fn
    theta = heaviside(plane, 0)
    ok &= all(p.signs[0] == 1 for p in theta(fn).samples)
    checks.exact("lattice.quantum_plane.projector", "SpecOp1", "E E = E, E + Ebar = 1", ok)

    F, G = coordinate_function(0), (lambda c: c[1] * c[1])
    ok = spectral_apply(plane, F, spectral_apply(plane, G, fn)) == spectral_apply(plane, lambda c: F(c) * G(c), fn)
    ok &= spectral_apply(plane, lambda c: 1, fn) == fn
    checks.exact("lattice.quantum_plane.spectral", "SpecDecOrt", "F(X) G(X) = (FG)(X)", ok)

    scaled = rescale(fn, 3)
    checks.exact(
        "lattice.quantum_plane.rescale",
        "DeltProAlg0",
        "int f(k^-1 x) = k^-n int f",
        integrate(scaled) == integrate(fn) / Fraction(3) ** plane.n,
    )

    g = random_lattice_function(plane, rng)
    direct = sum((fn.value(p) * plane.weight(p) for p in plane.points), plane.zero())
    ok = combined_integral(fn, 1) == GaussQ(0, Fraction(1, 2)) * (direct + direct)
    ok &= combined_integral(fn + g, 2) == combined_integral(fn, 2) + combined_integral(g, 2)
    checks.exact("lattice.quantum_plane.combined", "SubInt", "(i/2)(int_L + int_Rbar)", ok)

    for name in SPACE_NAMES:
        spec = make_lattice_spec(name, q_value, window=min(window, 3))
        coefficients = [complex(rng.normal(), rng.normal()) for _ in range(spec.n)]

        def factor(j, x):
            return coefficients[j] / (1 + x * x)

        def product(coords):
            out = 1
            for j, x in enumerate(coords):
                out *= factor(j, x)
            return out

        total = integrate(LatticeFunction.from_callable(spec, product))
        expected = separable_ratio(spec)
        for j in range(spec.n):
            expected *= jackson_1d(lambda x, j=j: factor(j, x), spec.steps[j], spec.alpha[j], spec.q, "full", spec.window[j])
        error = abs(total - expected) / max(1.0, abs(expected))
        checks.numeric(f"lattice.{name}.separable", "PerJackN", "int prod f_j = prod J[f_j]", error, 1e-12)

    e3 = load_space("euclid3")
    exact = make_lattice_spec(e3, 4, window=1, exact=True)
    one = CoefficientPoly.constant(e3, ONE)
    odd = all(expectation(hermitian_part(NCPoly.generator(e3, x)), one, exact) == 0 for x in e3.generators)
    checks.exact("lattice.euclid3.odd-expectation", "NorBed1", "<(X + conj X)/2> = 0", odd)

    numeric = make_lattice_spec(e3, q_value, window=min(window, 3))
    psi = CoefficientPoly.constant(e3, ONE) + CoefficientPoly.variable(e3, "X3")
    total = integrate(density(psi, numeric, normalize=True))
    checks.numeric("lattice.euclid3.normalization", "NorBed1", "int rho = 1", abs(total - 1), 1e-12)

    psi = random_coefficient_poly(e3, rng, max_degree=2, terms=3, complex_values=False)
    worst = 0.0
    for x in e3.generators:
        value = expectation(hermitian_part(NCPoly.generator(e3, x)), psi, numeric)
        worst = max(worst, abs(complex(value).imag) / max(1.0, abs(complex(value))))
    checks.numeric(
        "lattice.euclid3.real-expectation",
        "NorBed1",
        "Im <(X + conj X)/2> = 0",
        worst,
        1e-10,
        finding=True,
    )


_RUNNERS: dict[str, Callable] = {
    "algebra": _algebra,
    "conjugation": _conjugation,
    "phasespace": _phasespace,
    "qexp": _qexp,
    "grassmann": _grassmann,
    "lattice": _lattice,
}


def run_suite(name: str, q_value: float | None = None, seed: int | None = None, window: int | None = None) -> Report:
    """Runs one suite (or "all") and returns its report."""
    if name != "all" and name not in _RUNNERS:
        raise UnknownSuiteError(f"Unknown suite {name!r}; use one of {', '.join(SUITES + ('all',))}")
    q_value = Config.Q_VALUE if q_value is None else q_value
    seed = Config.SEED if seed is None else seed
    window = Config.WINDOW if window is None else window
    names = SUITES if name == "all" else (name,)

    records = []
    for suite in names:
        logger.info(f"Running suite {suite} (q={q_value}, seed={seed}, window={window})")
        checks = _Checks(suite)
        _RUNNERS[suite](checks, make_rng([seed, SUITES.index(suite)]), q_value, window)
        records.extend(checks.records)
        failed = sum(r.status == "fail" for r in checks.records)
        logger.info(f"Suite {suite}: {len(checks.records)} checks, {failed} failed")
    return Report(suite=name, q=q_value, seed=seed, window=window, checks=records)
