"""Exact arithmetic in a totally real number field.

Elements are stored as rational coordinates over an integral basis
``omega_1, ..., omega_n`` of the ring of integers. Real embeddings are
rigorous rational intervals obtained by isolating the real roots of the
minimal polynomial (Descartes sign-variation bisection, via sympy) and
refining them on demand.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import (BadBasis, BadUnits, ConfigError, DivisionByZero,
                     MissingData, NotTotallyReal, PrecisionExhausted,
                     Reducible, ZeroInput)
from .linalg import (frac_det, frac_inverse, frac_solve, int_det, matmul)

DEFAULT_PRECISION = 128
CONFIG_KEYS = {"name", "minpoly", "integral_basis", "fundamental_units",
               "known_h_K", "known_discriminant", "ideal_class_reps"}
_X = sympy.Symbol("x")


def _frac(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise ConfigError(f"floating value {v!r} where an exact rational is required")
    return Fraction(v)


# --------------------------------------------------------------------------
# rigorous rational intervals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RealInterval:
    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> Fraction:
        return (self.hi - self.lo) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, v) -> bool:
        return self.lo <= Fraction(v) <= self.hi

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __add__(self, other: "RealInterval") -> "RealInterval":
        return RealInterval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other: "RealInterval") -> "RealInterval":
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RealInterval(min(p), max(p))

    def scale(self, c: Fraction) -> "RealInterval":
        a, b = self.lo * c, self.hi * c
        return RealInterval(min(a, b), max(a, b))

    @classmethod
    def point(cls, v) -> "RealInterval":
        v = Fraction(v)
        return cls(v, v)

    def __float__(self) -> float:
        return float(self.mid)


def _eval_poly_interval(coeffs: Sequence[Fraction], z: RealInterval) -> RealInterval:
    """Horner evaluation of ``sum coeffs[k] z^k`` over an interval."""
    acc = RealInterval.point(0)
    for c in reversed(coeffs):
        acc = acc * z + RealInterval.point(c)
    return acc


# --------------------------------------------------------------------------
# polynomials over Q (ascending coefficient lists)
# --------------------------------------------------------------------------

def _poly_mulmod(a: Sequence[Fraction], b: Sequence[Fraction],
                 f: Sequence[int]) -> list[Fraction]:
    n = len(f) - 1
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] -= c * f[i]
    prod = prod[:n] + [Fraction(0)] * max(0, n - len(prod))
    return prod[:n]


# --------------------------------------------------------------------------
# the field
# --------------------------------------------------------------------------

class NumberField:
    """A totally real number field with a fixed integral basis.

    Instances are immutable after construction; cached derived data is
    filled lazily but never changes observable values.
    """

    def __init__(self, minpoly: Sequence[int], integral_basis: Sequence[Sequence] | None = None,
                 fundamental_units: Sequence[Sequence] | None = None, *, name: str = "",
                 known_h_K: int | None = None, known_discriminant: int | None = None,
                 ideal_class_reps: Sequence[Sequence[Sequence]] | None = None,
                 source_text: str | None = None):
        f = [int(c) for c in minpoly]
        if len(f) < 2:
            raise ConfigError("minpoly must have degree >= 1")
        if f[-1] != 1:
            raise ConfigError("minpoly must be monic (ascending coefficients, leading 1)")
        self.name = name
        self.minpoly = tuple(f)
        self.degree = n = len(f) - 1
        self.known_h_K = known_h_K
        self.known_discriminant = known_discriminant
        self.source_text = source_text

        self._poly = sympy.Poly(list(reversed(f)), _X, domain="QQ")
        if n > 1 and not self._poly.is_irreducible:
            raise Reducible(f"minpoly {f} factors over Q")
        ivs = self._poly.intervals()
        if len(ivs) != n or any(m != 1 for _, m in ivs):
            raise NotTotallyReal(f"minpoly {f} has {n - len(ivs)} non-real roots")
        roots = sorted(((Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)))
                        for (a, b), _ in ivs), key=lambda t: t[0] + t[1])
        self._root_cache: dict[int, tuple[RealInterval, ...]] = {
            0: tuple(RealInterval(a, b) for a, b in roots)}

        if integral_basis is None:
            if n > 2:
                raise MissingData("fields of degree >= 3 need integral_basis in the config")
            integral_basis = self._quadratic_basis() if n == 2 else [[1]]
        basis = [[_frac(v) for v in row] for row in integral_basis]
        if len(basis) != n or any(len(r) != n for r in basis):
            raise BadBasis("integral_basis must be an n x n matrix")
        if frac_det(basis) == 0:
            raise BadBasis("integral_basis is singular")
        self.basis_power = tuple(tuple(r) for r in basis)
        self._basis_inv = frac_inverse(basis)
        self._check_order()

        disc = int_det(self.trace_form)
        if disc <= 0:
            raise BadBasis("trace form determinant must be positive for a totally real field")
        poly_disc = Fraction(int(sympy.discriminant(self._poly)))
        ratio = poly_disc / disc
        if ratio.denominator != 1 or math.isqrt(ratio.numerator) ** 2 != ratio.numerator:
            raise BadBasis("disc(minpoly)/disc(basis) is not a perfect square")
        self.discriminant = disc
        self.index = math.isqrt(ratio.numerator)
        if known_discriminant is not None and int(known_discriminant) != disc:
            raise BadBasis(f"declared discriminant {known_discriminant} != computed {disc}")

        if fundamental_units is None:
            if n > 2:
                raise MissingData("fields of degree >= 3 need fundamental_units in the config")
            units = [self._quadratic_unit()] if n == 2 else []
        else:
            units = [self.element(u) for u in fundamental_units]
        if len(units) != n - 1:
            raise BadUnits(f"expected {n - 1} fundamental units, got {len(units)}")
        for u in units:
            if not u.is_integral() or abs(u.norm()) != 1:
                raise BadUnits(f"{u} is not a unit")
        self.units = tuple(units)
        if n > 1 and self.regulator() < 1e-9:
            raise BadUnits("fundamental units are multiplicatively dependent")
        self._class_rep_data = [[list(g) for g in rep] for rep in (ideal_class_reps or [])]

    # ----- construction helpers ------------------------------------------

    def _quadratic_basis(self) -> list[list[Fraction]]:
        c, b, _ = self.minpoly
        disc = b * b - 4 * c
        fac = sympy.factorint(disc)
        sq, free = 1, 1
        for p, e in fac.items():
            sq *= p ** (e // 2)
            free *= p ** (e % 2)
        # sqrt(free) = (2 theta + b) / sq
        if free % 4 == 1:
            # omega = (1 + sqrt(free)) / 2
            return [[Fraction(1), Fraction(0)],
                    [Fraction(1, 2) + Fraction(b, 2 * sq), Fraction(1, sq)]]
        return [[Fraction(1), Fraction(0)], [Fraction(b, sq), Fraction(2, sq)]]

    def _quadratic_unit(self) -> "FieldElement":
        # continued fraction of omega = (P0 + sqrt(d)) / Q0
        omega = self.element([0, 1])
        tr = omega.trace()
        nm = omega.norm()
        d4 = tr * tr - 4 * nm  # omega = (tr + sqrt(d4)) / 2
        if d4.denominator != 1:
            raise BadBasis("quadratic integral basis element is not integral")
        d = int(d4)
        s = math.isqrt(d)
        # pick the root with the larger embedding so omega > 1 style expansion works
        p_cur, q_cur = int(tr), 2
        if (d - p_cur * p_cur) % q_cur:
            p_cur, q_cur = 2 * p_cur, 4
            d *= 4
            s = math.isqrt(d)
        h_prev, h = 0, 1
        k_prev, k = 1, 0
        for _ in range(10000):
            if q_cur > 0:
                a = (p_cur + s) // q_cur
            else:
                a = -((p_cur + s) // (-q_cur) + 1)
            h_prev, h = h, a * h + h_prev
            k_prev, k = k, a * k + k_prev
            cand = self.element([h, -k])
            if k > 0 and abs(cand.norm()) == 1:
                return self._normalize_unit(cand)
            p_cur = a * q_cur - p_cur
            q_cur = (d - p_cur * p_cur) // q_cur
        raise BadUnits("continued fraction did not produce a unit")

    def _normalize_unit(self, u: "FieldElement") -> "FieldElement":
        e = u.embeddings()
        if abs(e[-1]) < 1:
            u = u.inverse()
            e = u.embeddings()
        if e[-1] < 0:
            u = -u
        return u

    def _check_order(self) -> None:
        n = self.degree
        one = self._power_to_coords([Fraction(1)] + [Fraction(0)] * (n - 1))
        if any(c.denominator != 1 for c in one):
            raise BadBasis("1 is not in the Z-span of integral_basis")
        for t in self.mult_tables:
            if any(v.denominator != 1 for row in t for v in row):
                raise BadBasis("integral_basis is not closed under multiplication")

    # ----- basis conversions -----------------------------------------------

    def _power_to_coords(self, p: Sequence[Fraction]) -> list[Fraction]:
        n = self.degree
        return [sum(p[i] * self._basis_inv[i][j] for i in range(n)) for j in range(n)]

    def _coords_to_power(self, c: Sequence[Fraction]) -> list[Fraction]:
        n = self.degree
        return [sum(c[i] * self.basis_power[i][j] for i in range(n)) for j in range(n)]

    @cached_property
    def mult_tables(self) -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
        """``mult_tables[i][r][k]``: coordinate r of ``omega_i * omega_k``."""
        n = self.degree
        tabs = []
        for i in range(n):
            cols = []
            for k in range(n):
                p = _poly_mulmod(self.basis_power[i], self.basis_power[k], self.minpoly)
                cols.append(self._power_to_coords(p))
            tabs.append(tuple(tuple(cols[k][r] for k in range(n)) for r in range(n)))
        return tuple(tabs)

    @cached_property
    def int_mult_tables(self) -> np.ndarray:
        return np.array([[[int(v) for v in row] for row in t] for t in self.mult_tables],
                        dtype=object)

    @cached_property
    def trace_form(self) -> tuple[tuple[int, ...], ...]:
        """Gram matrix ``Tr(omega_i omega_j)`` over the integral basis."""
        n = self.degree
        traces = [self.element(self._unit_vec(i)).trace() for i in range(n)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                prod_coords = [self.mult_tables[i][r][j] for r in range(n)]
                row.append(sum(c * t for c, t in zip(prod_coords, traces)))
            rows.append(tuple(int(v) for v in row))
        return tuple(rows)

    def _unit_vec(self, i: int) -> list[int]:
        return [1 if k == i else 0 for k in range(self.degree)]

    # ----- elements ----------------------------------------------------------

    def element(self, coords: Iterable) -> "FieldElement":
        c = tuple(_frac(v) for v in coords)
        if len(c) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(c)}")
        return FieldElement(self, c)

    def from_power_basis(self, coeffs: Sequence) -> "FieldElement":
        p = [_frac(v) for v in coeffs] + [Fraction(0)] * (self.degree - len(coeffs))
        q = p[:self.degree]
        if len(p) > self.degree:
            q = _poly_mulmod(p, [Fraction(1)], self.minpoly)
        return FieldElement(self, tuple(self._power_to_coords(q)))

    def __call__(self, v) -> "FieldElement":
        if isinstance(v, FieldElement):
            return v
        return self.element([_frac(v)] + [0] * (self.degree - 1)) if self._one_is_first \
            else self.from_power_basis([v])

    @cached_property
    def _one_is_first(self) -> bool:
        return self._power_to_coords([Fraction(1)] + [Fraction(0)] * (self.degree - 1)) == \
            [Fraction(1)] + [Fraction(0)] * (self.degree - 1)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, tuple(Fraction(0) for _ in range(self.degree)))

    @property
    def theta(self) -> "FieldElement":
        return self.from_power_basis([0, 1])

    def basis_elements(self) -> list["FieldElement"]:
        return [self.element(self._unit_vec(i)) for i in range(self.degree)]

    # ----- embeddings --------------------------------------------------------

    def root_intervals(self, precision: int = DEFAULT_PRECISION) -> tuple[RealInterval, ...]:
        """Isolating intervals for the roots, widths at most ``2**-precision``."""
        if precision in self._root_cache:
            return self._root_cache[precision]
        eps = sympy.Rational(1, 2 ** precision)
        out = []
        for iv in self._root_cache[0]:
            s, t = self._poly.refine_root(sympy.Rational(iv.lo.numerator, iv.lo.denominator),
                                          sympy.Rational(iv.hi.numerator, iv.hi.denominator),
                                          eps=eps)
            s, t = sympy.Rational(s), sympy.Rational(t)
            out.append(RealInterval(Fraction(int(s.p), int(s.q)), Fraction(int(t.p), int(t.q))))
        res = tuple(out)
        self._root_cache[precision] = res
        return res

    @cached_property
    def embedding_matrix(self) -> np.ndarray:
        """Float matrix ``E[i, j] = sigma_j(omega_i)`` from 128-bit enclosures."""
        n = self.degree
        roots = self.root_intervals(DEFAULT_PRECISION)
        e = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                e[i, j] = float(_eval_poly_interval(self.basis_power[i], roots[j]).mid)
        return e

    def embed_intervals(self, x: "FieldElement", precision: int = DEFAULT_PRECISION,
                        slack: int = 4, max_rounds: int = 12) -> list[RealInterval]:
        if precision < 53:
            raise ValueError("precision must be at least 53 bits")
        p = x.power_coeffs()
        target = Fraction(1, 2 ** max(precision - slack, 1))
        extra = 8
        for _ in range(max_rounds):
            roots = self.root_intervals(precision + extra)
            out = [_eval_poly_interval(p, r) for r in roots]
            if all(iv.width <= target for iv in out):
                return out
            extra *= 2
        raise PrecisionExhausted(f"could not reach {precision} bits for {x}")

    # ----- invariants --------------------------------------------------------

    def regulator(self) -> float:
        n = self.degree
        if n == 1:
            return 1.0
        m = self.unit_log_matrix[:, : n - 1]
        return abs(float(np.linalg.det(m)))

    @cached_property
    def unit_log_matrix(self) -> np.ndarray:
        """Rows ``log|sigma_j(u_i)|`` for the fundamental units."""
        if not self.units:
            return np.zeros((0, self.degree))
        return np.array([np.log(np.abs(u.embeddings())) for u in self.units])

    def unit_sign_index(self) -> int:
        """``[O_K^{x,+} : O_K^{x,2}]`` from the sign vectors of unit classes."""
        count = 0
        for sgn, exps in self._unit_class_signs():
            if all(s > 0 for s in sgn):
                count += 1
        return count

    def _unit_class_signs(self):
        signs = [np.sign(u.embeddings()) for u in self.units]
        for s0 in (1, -1):
            for exps in itertools.product((0, 1), repeat=len(self.units)):
                v = np.full(self.degree, float(s0))
                for e, sv in zip(exps, signs):
                    if e:
                        v = v * sv
                yield v, (s0, exps)

    @cached_property
    def totally_positive_units(self) -> tuple["FieldElement", ...]:
        """A Z-basis of ``O_K^{x,+}`` (units positive in every embedding)."""
        from .linalg import hnf_columns
        r = len(self.units)
        if r == 0:
            return ()
        signs = [np.sign(u.embeddings()) < 0 for u in self.units]
        gens = []
        for exps in itertools.product((0, 1), repeat=r):
            v = np.zeros(self.degree, dtype=bool)
            for e, s in zip(exps, signs):
                if e:
                    v ^= s
            if not v.any() or v.all():
                gens.append(list(exps))
        gens += [[2 if i == k else 0 for i in range(r)] for k in range(r)]
        basis = hnf_columns(gens, r)
        out = []
        for col in basis:
            u = self.one
            for e, unit in zip(col, self.units):
                u = u * unit ** e
            if u.embeddings()[0] < 0:
                u = -u
            out.append(u)
        return tuple(out)

    @cached_property
    def totally_positive_log_matrix(self) -> np.ndarray:
        return np.array([np.log(u.embeddings()) for u in self.totally_positive_units]) \
            if self.totally_positive_units else np.zeros((0, self.degree))

    def minkowski_bound(self) -> float:
        n = self.degree
        return math.factorial(n) / n ** n * math.sqrt(self.discriminant)

    def class_rep_generators(self) -> list[list["FieldElement"]]:
        return [[self.element(g) for g in rep] for rep in self._class_rep_data]

    @cached_property
    def config_hash(self) -> str:
        text = self.source_text or json.dumps({"minpoly": self.minpoly, "name": self.name})
        return hashlib.sha256(text.encode()).hexdigest()

    def c_upper_default(self) -> float:
        """The unconditional estimate ``sqrt(2) * Delta_K^(1/2n)``."""
        return math.sqrt(2.0) * self.discriminant ** (1.0 / (2 * self.degree))

    def __repr__(self) -> str:
        return f"NumberField({self.name or self.minpoly}, n={self.degree}, disc={self.discriminant})"

    def __reduce__(self):
        return (_rebuild_field, (self.source_text, self._init_args()))

    def _init_args(self):
        return dict(minpoly=list(self.minpoly),
                    integral_basis=[[str(v) for v in r] for r in self.basis_power],
                    fundamental_units=[[str(v) for v in u.coords] for u in self.units],
                    name=self.name, known_h_K=self.known_h_K,
                    known_discriminant=self.known_discriminant,
                    ideal_class_reps=self._class_rep_data)


_FIELD_REGISTRY: dict[str, NumberField] = {}


def _rebuild_field(source_text, kwargs):
    key = source_text or json.dumps(kwargs, sort_keys=True, default=str)
    if key not in _FIELD_REGISTRY:
        _FIELD_REGISTRY[key] = NumberField(source_text=source_text, **kwargs)
    return _FIELD_REGISTRY[key]


# --------------------------------------------------------------------------
# elements
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldElement:
    field: NumberField = dc_field(repr=False)
    coords: tuple[Fraction, ...]

    # exact arithmetic
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.field.degree
        tabs = self.field.mult_tables
        out = [Fraction(0)] * n
        for i, xi in enumerate(self.coords):
            if xi:
                t = tabs[i]
                for r in range(n):
                    row = t[r]
                    s = sum(row[k] * yk for k, yk in enumerate(o.coords) if yk)
                    if s:
                        out[r] += xi * s
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        one = self.field.one.coords
        sol = frac_solve(self.mult_matrix(), one)
        return FieldElement(self.field, tuple(sol))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self == self.field(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def mult_matrix(self) -> list[list[Fraction]]:
        n = self.field.degree
        tabs = self.field.mult_tables
        return [[sum(self.coords[i] * tabs[i][r][k] for i in range(n)) for k in range(n)]
                for r in range(n)]

    def norm(self) -> Fraction:
        if self.is_integral():
            return Fraction(int_det(self.int_mult_matrix()))
        return frac_det(self.mult_matrix())

    def int_mult_matrix(self) -> list[list[int]]:
        t = self.field.int_mult_tables
        n = self.field.degree
        c = [int(v) for v in self.coords]
        return [[sum(c[i] * t[i][r][k] for i in range(n)) for k in range(n)] for r in range(n)]

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    def power_coeffs(self) -> list[Fraction]:
        return self.field._coords_to_power(self.coords)

    def embeddings(self) -> np.ndarray:
        """Float embeddings ``sigma_1(x) < ... `` ordering follows the roots."""
        return np.array([float(c) for c in self.coords]) @ self.field.embedding_matrix

    def __repr__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def __reduce__(self):
        return (FieldElement, (self.field, self.coords))


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def parse_field_config(text) -> NumberField:
    """Build a field from JSON text, a mapping, or a path to a JSON file."""
    source = None
    if isinstance(text, Path) or (isinstance(text, str) and not text.lstrip().startswith("{")):
        path = Path(text)
        if not path.exists():
            builtin = Path(__file__).parent / "data" / "fields" / f"{text}.json"
            if builtin.exists():
                path = builtin
            else:
                raise ConfigError(f"no such config file or builtin field: {text}")
        text = path.read_text()
    if isinstance(text, str):
        source = text
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        data = dict(text)
        source = json.dumps(data, sort_keys=True, default=str)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "minpoly" not in data:
        raise ConfigError("config must provide minpoly")
    kwargs = {k: data[k] for k in ("integral_basis", "fundamental_units", "known_h_K",
                                   "known_discriminant", "ideal_class_reps") if k in data}
    if not all(isinstance(c, int) for c in data["minpoly"]):
        raise ConfigError("minpoly coefficients must be integers")
    return NumberField(data["minpoly"], name=data.get("name", ""), source_text=source, **kwargs)


def builtin_field(name: str) -> NumberField:
    path = Path(__file__).parent / "data" / "fields" / f"{name}.json"
    key = str(path)
    if key not in _FIELD_REGISTRY:
        _FIELD_REGISTRY[key] = parse_field_config(path)
    return _FIELD_REGISTRY[key]


BUILTIN_FIELDS = ("qsqrt5", "qsqrt2", "qsqrt3", "qsqrt10", "cubic49")


def elem_arith(kind: str, x: FieldElement, y: FieldElement | None = None) -> FieldElement:
    if kind == "add":
        return x + y
    if kind == "sub":
        return x - y
    if kind == "mul":
        return x * y
    if kind == "inv":
        return x.inverse()
    raise ValueError(f"unknown operation {kind!r}")


def elem_norm_trace(x: FieldElement) -> tuple[Fraction, Fraction]:
    return x.norm(), x.trace()


def embed_real(x: FieldElement, precision: int = DEFAULT_PRECISION) -> list[RealInterval]:
    return x.field.embed_intervals(x, precision)


def is_totally_positive(x: FieldElement, precision: int = 64) -> bool:
    if x.is_zero():
        raise ZeroInput("zero is neither positive nor negative")
    prec = precision
    for _ in range(16):
        ivs = x.field.embed_intervals(x, max(prec, 53))
        if not any(iv.straddles_zero() for iv in ivs):
            return all(iv.lo > 0 for iv in ivs)
        prec *= 2
    raise PrecisionExhausted("sign of embedding undecided")


def unit_sign_index(field: NumberField) -> int:
    return field.unit_sign_index()
