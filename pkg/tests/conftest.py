from fractions import Fraction

import pytest
from hypothesis import settings

from cuspmink.field_core import BUILTIN_FIELDS, builtin_field
from cuspmink.ideal_lattice import FractionalIdeal, codifferent, ideal_from_generators

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

QUADRATIC = ("qsqrt5", "qsqrt2", "qsqrt3", "qsqrt10")


@pytest.fixture(params=BUILTIN_FIELDS)
def field(request):
    return builtin_field(request.param)


@pytest.fixture(params=QUADRATIC)
def quad_field(request):
    return builtin_field(request.param)


@pytest.fixture
def k5():
    return builtin_field("qsqrt5")


def random_element(field, rng, size=5, denom=1):
    coords = rng.integers(-size, size + 1, size=field.degree)
    if not coords.any():
        coords[0] = 1
    d = int(rng.integers(1, denom + 1))
    return field.element([Fraction(int(c), d) for c in coords])


def random_ideal(field, rng, size=5, denom=3):
    gens = [random_element(field, rng, size, denom) for _ in range(2)]
    return ideal_from_generators(gens)


def standard_ideals(field):
    o = FractionalIdeal.unit(field)
    return [o, o.scale(field(2)), codifferent(field)]
