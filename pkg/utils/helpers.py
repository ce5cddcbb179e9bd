from fractions import Fraction

import numpy as np

from scalar import GaussQ, QScalar


def make_rng(seed):
    """Seeded generator for every randomized check."""
    return np.random.default_rng(seed)


def random_gauss(rng, bound=3, complex_values=True):
    re = int(rng.integers(-bound, bound + 1))
    im = int(rng.integers(-bound, bound + 1)) if complex_values else 0
    return GaussQ(re, im)


def random_qscalar(rng, terms=3, span=4, complex_values=True):
    """Laurent polynomial with up to `terms` terms, doubled exponents in [-span, span]."""
    out = {}
    for _ in range(terms):
        exp2 = int(rng.integers(-span, span + 1))
        out[exp2] = out.get(exp2, GaussQ(0)) + random_gauss(rng, complex_values=complex_values)
    return QScalar(out)


def random_word(rng, generators, length):
    return tuple(generators[int(i)] for i in rng.integers(0, len(generators), size=length))


def random_ncpoly(space, rng, max_degree=2, terms=3, complex_values=True):
    """Normal-ordered polynomial built from random raw words."""
    from ncalg import normal_order

    raw = []
    for _ in range(terms):
        word = random_word(rng, space.generators, int(rng.integers(0, max_degree + 1)))
        raw.append((word, random_qscalar(rng, terms=2, complex_values=complex_values)))
    return normal_order(space, raw)


def random_coefficient_poly(space, rng, max_degree=2, terms=3, complex_values=True):
    from ncalg import CoefficientPoly

    n = len(space.generators)
    out = {}
    for _ in range(terms):
        exps = [0] * n
        for _ in range(int(rng.integers(0, max_degree + 1))):
            exps[int(rng.integers(0, n))] += 1
        out[tuple(exps)] = QScalar.coerce(random_gauss(rng, complex_values=complex_values))
    return CoefficientPoly(space, out)


def random_supernumber(gspace, rng, complex_values=True):
    """Random coefficient on every basis subset."""
    from grassmann import Supernumber

    coeffs = {subset: random_qscalar(rng, terms=2, complex_values=complex_values) for subset in gspace.subsets()}
    return Supernumber(gspace, coeffs)


def random_lattice_function(spec, rng, density=0.5):
    """Random samples on a random share of the quasipoints; exact specs get small rationals."""
    from lattice import LatticeFunction

    samples = {}
    for point in spec.points:
        if rng.random() >= density:
            continue
        if spec.exact:
            samples[point] = GaussQ(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))), int(rng.integers(-3, 4)))
        else:
            samples[point] = complex(rng.normal(), rng.normal())
    return LatticeFunction(spec, samples)


def format_value(value):
    """Text for a scalar result: exact values in grammar form, floats with full precision."""
    if isinstance(value, (GaussQ, QScalar)):
        return value.render()
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    return f"{value.real!r} {'+' if value.imag >= 0 else '-'} {abs(value.imag)!r}*i"
