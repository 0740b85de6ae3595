"""Fractional ideals as exact Hermite-normal-form lattices.

A fractional ideal ``a`` is stored as ``(d, H)`` where ``d`` is the least
positive integer with ``d*a`` integral and ``H`` is the column-style upper
triangular HNF of ``d*a`` over the integral basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import IndexDivisorPrime, ZeroIdeal
from .field_core import FieldElement, NumberField
from .linalg import (EnumerationBudget, common_denominator, fincke_pohst,
                     frac_inverse, hnf_columns, matmul, transpose,
                     triangular_coords)


@dataclass(frozen=True, eq=False)
class FractionalIdeal:
    field: NumberField
    denom: int
    columns: tuple[tuple[int, ...], ...]

    # ----- canonical construction -------------------------------------------

    @classmethod
    def from_lattice(cls, field: NumberField, vectors: Iterable[Sequence[Fraction]]) -> "FractionalIdeal":
        """Canonical ideal spanned over Z by rational coordinate vectors."""
        vecs = [[Fraction(v) for v in vec] for vec in vectors]
        vecs = [v for v in vecs if any(v)]
        if not vecs:
            raise ZeroIdeal("lattice generated by zero vectors only")
        n = field.degree
        big_d = common_denominator(v for vec in vecs for v in vec)
        ints = [[int(v * big_d) for v in vec] for vec in vecs]
        h = hnf_columns(ints, n)
        g = reduce(math.gcd, (v for col in h for v in col), big_d)
        cols = tuple(tuple(v // g for v in col) for col in h)
        return cls(field, big_d // g, cols)

    @classmethod
    def unit(cls, field: NumberField) -> "FractionalIdeal":
        n = field.degree
        return cls(field, 1, tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n)))

    @classmethod
    def principal(cls, x: FieldElement) -> "FractionalIdeal":
        if x.is_zero():
            raise ZeroIdeal("principal ideal of zero")
        return cls.from_lattice(x.field, [(x * w).coords for w in x.field.basis_elements()])

    @classmethod
    def parse(cls, field: NumberField, text: str) -> "FractionalIdeal":
        """Parse the canonical text form ``"d; h11 h12; 0 h22"`` (HNF rows)."""
        parts = [p.strip() for p in text.strip().split(";")]
        d = int(parts[0])
        rows = [[int(v) for v in p.split()] for p in parts[1:]]
        n = field.degree
        if d <= 0 or len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"malformed ideal text {text!r}")
        cols = [[Fraction(rows[i][j], d) for i in range(n)] for j in range(n)]
        ideal = cls.from_lattice(field, cols)
        if not ideal.is_module():
            raise ValueError(f"lattice {text!r} is not an O_K-module")
        return ideal

    # ----- views --------------------------------------------------------------

    @property
    def hnf(self) -> list[list[int]]:
        """HNF as a row-major matrix (columns form the basis of ``d*a``)."""
        return transpose(self.columns)

    def serialize(self) -> str:
        return f"{self.denom}; " + "; ".join(" ".join(str(v) for v in row) for row in self.hnf)

    def __str__(self) -> str:
        return self.serialize()

    __repr__ = __str__

    def __eq__(self, other) -> bool:
        return isinstance(other, FractionalIdeal) and self.field is other.field \
            and self.denom == other.denom and self.columns == other.columns

    def __hash__(self) -> int:
        return hash((self.denom, self.columns))

    @cached_property
    def basis(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.field, tuple(Fraction(v, self.denom) for v in col))
                     for col in self.columns)

    @cached_property
    def embedded_basis(self) -> np.ndarray:
        """Float matrix whose column k is the embedding vector of basis element k."""
        return np.column_stack([b.embeddings() for b in self.basis])

    def norm(self) -> Fraction:
        n = self.field.degree
        return Fraction(math.prod(self.columns[i][i] for i in range(n)), self.denom ** n)

    def is_integral(self) -> bool:
        return self.denom == 1

    def is_module(self) -> bool:
        return all(self.contains(b * w) for b in self.basis for w in self.field.basis_elements())

    def coordinates(self, x: FieldElement) -> list[Fraction]:
        """Rational coordinates of ``x`` in the HNF basis of this ideal."""
        return triangular_coords(self.columns, [c * self.denom for c in x.coords])

    def contains(self, x: FieldElement) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(x))

    def contains_ideal(self, other: "FractionalIdeal") -> bool:
        return all(self.contains(b) for b in other.basis)

    # ----- arithmetic -----------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, FractionalIdeal):
            return ideal_mul(self, other)
        if isinstance(other, FieldElement):
            return self.scale(other)
        return self.scale(self.field(other))

    __rmul__ = __mul__

    def scale(self, x: FieldElement) -> "FractionalIdeal":
        if x.is_zero():
            raise ZeroIdeal("scaling an ideal by zero")
        return FractionalIdeal.from_lattice(self.field, [(x * b).coords for b in self.basis])

    def __add__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        return FractionalIdeal.from_lattice(self.field, [b.coords for b in self.basis + other.basis])

    def inverse(self) -> "FractionalIdeal":
        return ideal_inverse(self)

    def __pow__(self, e: int) -> "FractionalIdeal":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = FractionalIdeal.unit(self.field), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        return self * other.inverse()

    def dual(self) -> "FractionalIdeal":
        return trace_dual(self)

    def small_element(self) -> FieldElement:
        return self.basis[0]


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def ideal_from_generators(gens: Sequence[FieldElement],
                          scale_ideals: Sequence[FractionalIdeal | None] | None = None) -> FractionalIdeal:
    """The ideal ``sum_i g_i * scale_i`` (``scale_i`` defaults to ``O_K``)."""
    if not gens:
        raise ZeroIdeal("no generators")
    field = gens[0].field
    if scale_ideals is None:
        scale_ideals = [None] * len(gens)
    vecs = []
    for g, s in zip(gens, scale_ideals):
        if g.is_zero():
            continue
        basis = field.basis_elements() if s is None else s.basis
        vecs.extend((g * b).coords for b in basis)
    if not vecs:
        raise ZeroIdeal("all generators are zero")
    return FractionalIdeal.from_lattice(field, vecs)


def ideal_mul(a: FractionalIdeal, b: FractionalIdeal) -> FractionalIdeal:
    return FractionalIdeal.from_lattice(a.field, [(x * y).coords for x in a.basis for y in b.basis])


def trace_dual(a: FractionalIdeal) -> FractionalIdeal:
    """``{x in K : Tr(x a) in Z}`` via ``W = T^{-1} V^{-T}``."""
    t = a.field.trace_form
    v = [[c for c in b.coords] for b in a.basis]  # rows = basis coords, i.e. V^T
    w = matmul(frac_inverse(t), frac_inverse(v))
    return FractionalIdeal.from_lattice(a.field, transpose(w))


def codifferent(field: NumberField) -> FractionalIdeal:
    return trace_dual(FractionalIdeal.unit(field))


def ideal_inverse(a: FractionalIdeal) -> FractionalIdeal:
    """``a^{-1}`` as the trace dual of ``a`` times the codifferent.

    The result is checked by ``a * a^{-1} == O_K``.
    """
    inv = trace_dual(ideal_mul(a, codifferent(a.field)))
    if ideal_mul(a, inv) != FractionalIdeal.unit(a.field):
        raise ArithmeticError("ideal inverse failed its postcondition")
    return inv


def ideal_norm(a: FractionalIdeal) -> Fraction:
    return a.norm()


def two_generator_norm(alpha: FieldElement, beta: FieldElement, a: FractionalIdeal) -> Fraction:
    """``N(alpha O_K + beta a)``."""
    return ideal_from_generators([alpha, beta], [None, a]).norm()


# --------------------------------------------------------------------------
# primes and valuations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeIdealFactor:
    p: int
    generator: FieldElement
    e: int
    f: int
    ideal: FractionalIdeal

    @property
    def norm(self) -> int:
        return self.p ** self.f


_SPLIT_CACHE: dict[tuple[int, int], list[PrimeIdealFactor]] = {}


def prime_split(p: int, field: NumberField) -> list[PrimeIdealFactor]:
    """Dedekind-Kummer factorization of ``p O_K`` from the minpoly mod ``p``."""
    key = (id(field), p)
    if key in _SPLIT_CACHE:
        return _SPLIT_CACHE[key]
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if field.index % p == 0:
        raise IndexDivisorPrime(f"{p} divides the index [O_K : Z[theta]] = {field.index}")
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(field.minpoly)), x, modulus=p)
    _, factors = poly.factor_list()
    out = []
    for g, e in factors:
        coeffs = [int(c) for c in reversed(g.all_coeffs())]
        gen = field.from_power_basis(coeffs)
        ideal = ideal_from_generators([field(p), gen])
        out.append(PrimeIdealFactor(p, gen, int(e), g.degree(), ideal))
    if sum(f.e * f.f for f in out) != field.degree:
        raise ArithmeticError("prime splitting does not satisfy sum e*f = n")
    _SPLIT_CACHE[key] = out
    return out


def _vp_int(p: int, m: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


def valuation(a: FractionalIdeal, prime: PrimeIdealFactor) -> int:
    """``v_P(a)`` by repeated containment tests ``d a in P^k``."""
    integral = FractionalIdeal(a.field, 1, a.columns)
    num = math.prod(a.columns[i][i] for i in range(a.field.degree))
    k_max = _vp_int(prime.p, num) // prime.f
    k = 0
    power = prime.ideal
    while k < k_max and power.contains_ideal(integral):
        k += 1
        power = ideal_mul(power, prime.ideal)
    return k - prime.e * _vp_int(prime.p, a.denom)


def _primes_of(q: Fraction) -> set[int]:
    out = set()
    for m in (abs(q.numerator), q.denominator):
        if m > 1:
            out.update(int(p) for p in sympy.factorint(m))
    return out


def local_norm_product(alpha: FieldElement, beta: FieldElement, a: FractionalIdeal) -> Fraction:
    """``prod_P N(P)^{min(v_P(alpha), v_P(beta) + v_P(a))}`` over the relevant primes."""
    if alpha.is_zero() and beta.is_zero():
        raise ZeroIdeal("both generators are zero")
    field = alpha.field
    primes: set[int] = set()
    a_alpha = None if alpha.is_zero() else FractionalIdeal.principal(alpha)
    b_beta = None if beta.is_zero() else ideal_mul(FractionalIdeal.principal(beta), a)
    # norms of the pieces separately: valuations of opposite sign at primes
    # over the same p can cancel in N(beta a)
    for x in (alpha, beta):
        if not x.is_zero():
            primes |= _primes_of(x.norm())
    primes |= _primes_of(Fraction(a.denom)) | _primes_of(a.norm() * a.denom ** a.field.degree)
    bad = [p for p in primes if field.index % p == 0]
    if bad:
        raise IndexDivisorPrime(f"primes {bad} divide the index {field.index}")
    result = Fraction(1)
    for p in sorted(primes):
        for prime in prime_split(p, field):
            vals = []
            if a_alpha is not None:
                vals.append(valuation(a_alpha, prime))
            if b_beta is not None:
                vals.append(valuation(b_beta, prime))
            result *= Fraction(prime.norm) ** min(vals)
    return result


# --------------------------------------------------------------------------
# principality (desk scale)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrincipalSearch:
    generator: FieldElement | None
    conclusive: bool
    bound: float
    bound_needed: float

    def __bool__(self) -> bool:
        return self.generator is not None


def generator_bound(a: FractionalIdeal) -> float:
    """Embedding bound that some generator of a principal ``a`` must satisfy.

    A generator can be moved by units so that its centred log-vector lies in
    the centred unit parallelepiped, whose coordinates are bounded by half
    the column sums of absolute unit logs.
    """
    field = a.field
    n = field.degree
    base = float(a.norm()) ** (1.0 / n)
    if n == 1:
        return base
    logs = np.abs(field.unit_log_matrix)
    return base * math.exp(0.5 * float(logs.sum(axis=0).max()))


def is_principal_smallfield(a: FractionalIdeal, search_bound: float | None = None,
                            max_nodes: int = 500_000) -> PrincipalSearch:
    """Search ``x in a`` with ``|N(x)| = N(a)`` and all ``|sigma_j(x)| <= bound``."""
    needed = generator_bound(a)
    bound = needed * (1 + 1e-9) if search_bound is None else float(search_bound)
    target = a.norm()
    emb = a.embedded_basis
    gram = emb.T @ emb
    n = a.field.degree
    found: list[FieldElement] = []

    class _Stop(Exception):
        pass

    def visit(x, q):
        v = emb @ np.array(x, dtype=float)
        if np.max(np.abs(v)) > bound * (1 + 1e-12):
            return
        elem = sum((b * c for b, c in zip(a.basis, x) if c), a.field.zero)
        if abs(elem.norm()) == target:
            found.append(elem)
            raise _Stop

    conclusive = bound >= needed
    try:
        fincke_pohst(gram, lambda: n * bound * bound * (1 + 1e-9), visit, max_nodes=max_nodes)
    except _Stop:
        return PrincipalSearch(found[0], True, bound, needed)
    except EnumerationBudget:
        conclusive = False
    return PrincipalSearch(None, conclusive, bound, needed)
