from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cuspmink.errors import IndexDivisorPrime, ZeroIdeal
from cuspmink.field_core import BUILTIN_FIELDS, builtin_field, parse_field_config
from cuspmink.ideal_lattice import (FractionalIdeal, codifferent, ideal_from_generators,
                                    ideal_inverse, ideal_mul, ideal_norm, is_principal_smallfield,
                                    local_norm_product, prime_split, trace_dual, two_generator_norm,
                                    valuation)

from conftest import random_element, random_ideal

import oracles


def test_unit_ideal(field):
    o = FractionalIdeal.unit(field)
    assert o.norm() == 1
    assert o.hnf == [[int(i == j) for j in range(field.degree)] for i in range(field.degree)]


def test_zero_ideal_rejected(k5):
    with pytest.raises(ZeroIdeal):
        ideal_from_generators([k5.zero, k5.zero])


def test_principal_norm(k5):
    a = FractionalIdeal.principal(k5.element([3, 1]))
    assert a.norm() == abs(k5.element([3, 1]).norm())


def test_two_generated_norm_example(k5):
    # (2, theta) = O_K since theta is a unit
    assert two_generator_norm(k5(2), k5.theta, FractionalIdeal.unit(k5)) == 1
    # (2, 2 theta) = (2)
    assert two_generator_norm(k5(2), 2 * k5.theta, FractionalIdeal.unit(k5)) == 4


def test_codifferent_norm_matches_trace_gram(field):
    gram = oracles.trace_gram(list(field.minpoly), [list(r) for r in field.basis_power])
    d = codifferent(field)
    assert 1 / d.norm() == oracles.det(gram) == field.discriminant


def test_codifferent_example_sqrt5(k5):
    d = codifferent(k5)
    # d^{-1} = (1/sqrt5), sqrt5 = 2 theta - 1
    assert d == FractionalIdeal.principal((2 * k5.theta - 1).inverse())


def test_inverse_examples(k5):
    a = FractionalIdeal.unit(k5).scale(k5(2))
    assert ideal_inverse(a) == FractionalIdeal.principal(k5(Fraction(1, 2)))


def test_parse_roundtrip(field):
    rng = np.random.default_rng(3)
    a = random_ideal(field, rng)
    assert FractionalIdeal.parse(field, a.serialize()) == a


def test_trace_dual_involution(field):
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = random_ideal(field, rng)
        assert trace_dual(trace_dual(a)) == a
        assert a.dual() == trace_dual(a)


def test_prime_split_fields():
    k5 = builtin_field("qsqrt5")
    assert [(f.e, f.f) for f in prime_split(5, k5)] == [(2, 1)]
    assert [(f.e, f.f) for f in prime_split(2, k5)] == [(1, 2)]
    assert sorted((f.e, f.f) for f in prime_split(11, k5)) == [(1, 1), (1, 1)]
    cubic = builtin_field("cubic49")
    assert [(f.e, f.f) for f in prime_split(7, cubic)] == [(3, 1)]
    assert sorted((f.e, f.f) for f in prime_split(13, cubic)) == [(1, 1)] * 3


def test_index_divisor_rejected():
    # theta = sqrt 5 generates an order of index 2
    k = parse_field_config({"minpoly": [-5, 0, 1], "integral_basis": [[1, 0], ["1/2", "1/2"]]})
    assert k.index == 2 and k.discriminant == 5
    with pytest.raises(IndexDivisorPrime):
        prime_split(2, k)
    with pytest.raises(IndexDivisorPrime):
        local_norm_product(k(2), k(6), FractionalIdeal.unit(k))


def test_prime_norms_multiply(field):
    for p in (3, 5, 7, 11, 13):
        if field.index % p == 0:
            continue
        prod = FractionalIdeal.unit(field)
        for f in prime_split(p, field):
            prod = prod * f.ideal ** f.e
        assert prod == FractionalIdeal.unit(field).scale(field(p))


def test_valuation_of_principal(k5):
    (p11a, p11b) = prime_split(11, k5)
    a = p11a.ideal ** 3 * p11b.ideal.inverse()
    assert valuation(a, p11a) == 3
    assert valuation(a, p11b) == -1


def test_principality_sqrt10():
    k = builtin_field("qsqrt10")
    p2 = prime_split(2, k)[0].ideal
    res = is_principal_smallfield(p2)
    assert not res and res.conclusive
    res = is_principal_smallfield(ideal_mul(p2, p2))
    assert res and abs(res.generator.norm()) == 4
    res = is_principal_smallfield(prime_split(3, k)[0].ideal * p2)
    assert res and abs(res.generator.norm()) == 6


def test_principality_class_one(k5):
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = random_ideal(k5, rng)
        res = is_principal_smallfield(a)
        assert res and res.conclusive
        assert FractionalIdeal.principal(res.generator) == a


idx = st.integers(0, len(BUILTIN_FIELDS) - 1)
seed = st.integers(0, 2 ** 32 - 1)


@given(idx, seed)
def test_multiplicativity_property(i, s):
    field = builtin_field(BUILTIN_FIELDS[i])
    rng = np.random.default_rng(s)
    a, b = random_ideal(field, rng), random_ideal(field, rng)
    ab = ideal_mul(a, b)
    assert ideal_norm(ab) == ideal_norm(a) * ideal_norm(b)
    assert ab == ideal_mul(b, a)
    assert ideal_mul(a, ideal_inverse(a)) == FractionalIdeal.unit(field)


@given(idx, seed)
def test_hnf_canonical_under_generator_change(i, s):
    field = builtin_field(BUILTIN_FIELDS[i])
    rng = np.random.default_rng(s)
    g1, g2 = random_element(field, rng), random_element(field, rng)
    x = random_element(field, rng, 3)
    a = ideal_from_generators([g1, g2])
    b = ideal_from_generators([g1, g2 + x * g1, g1])
    assert a == b and a.hnf == b.hnf and a.denom == b.denom


@given(idx, seed)
def test_local_formula_property(i, s):
    field = builtin_field(BUILTIN_FIELDS[i])
    rng = np.random.default_rng(s)
    alpha, beta = random_element(field, rng, 6), random_element(field, rng, 6)
    a = random_ideal(field, rng, 4, 2)
    try:
        local = local_norm_product(alpha, beta, a)
    except IndexDivisorPrime:
        return
    assert local == two_generator_norm(alpha, beta, a)


@given(idx, seed)
def test_containment_consistent(i, s):
    field = builtin_field(BUILTIN_FIELDS[i])
    rng = np.random.default_rng(s)
    a, b = random_ideal(field, rng), random_ideal(field, rng)
    assert (a * b).contains_ideal(a * b * b) == b.is_integral() or not b.is_integral()
    assert (a + b).contains_ideal(a) and (a + b).contains_ideal(b)
    for x in a.basis:
        assert a.contains(x)


def test_local_formula_split_prime_in_denominator():
    # 3 splits in Q(sqrt 10); beta a has valuations +1 and -1 above 3, so 3 cancels in N(beta a)
    k = builtin_field("qsqrt10")
    alpha, beta = k.element([-6, -7]), k.element([-1, 5])
    a = FractionalIdeal.parse(k, "3; 6 4; 0 1")
    assert two_generator_norm(alpha, beta, a) == Fraction(2, 3)
    assert local_norm_product(alpha, beta, a) == Fraction(2, 3)
