"""Action of the generalized Hilbert modular group on ``H^n`` and ``P^1(K)``.

``Gamma_K(a)`` consists of matrices ``[[a, b], [c, d]]`` with ``a, d`` in
``O_K``, ``b`` in ``a^{-1}``, ``c`` in ``a`` and totally positive unit
determinant, taken modulo scalar units. Scaling by a unit preserves every
one of those conditions, so membership is tested on the given matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cusp_geometry import Cusp, HPoint, q_ideal, sphere_membership, _inv
from .errors import NoSolution, NotOrientationPreserving
from .field_core import FieldElement, NumberField, is_totally_positive
from .ideal_lattice import FractionalIdeal, ideal_from_generators, is_principal_smallfield
from .linalg import common_denominator, hnf_columns, triangular_coords


@dataclass(frozen=True, eq=False)
class ModularMatrix:
    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    @classmethod
    def identity(cls, field: NumberField) -> "ModularMatrix":
        return cls(field.one, field.zero, field.zero, field.one)

    @classmethod
    def translation(cls, mu: FieldElement) -> "ModularMatrix":
        f = mu.field
        return cls(f.one, mu, f.zero, f.one)

    @classmethod
    def scaling(cls, eps: FieldElement) -> "ModularMatrix":
        f = eps.field
        return cls(eps, f.zero, f.zero, f.one)

    @property
    def field(self) -> NumberField:
        return self.a.field

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                             self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "ModularMatrix":
        dt = self.det()
        return ModularMatrix(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def adjugate(self) -> "ModularMatrix":
        return ModularMatrix(self.d, -self.b, -self.c, self.a)

    def __eq__(self, o) -> bool:
        return isinstance(o, ModularMatrix) and all(
            x == y for x, y in zip(self.entries(), o.entries()))

    def __hash__(self) -> int:
        return hash(tuple(e.coords for e in self.entries()))

    def entries(self) -> tuple[FieldElement, ...]:
        return (self.a, self.b, self.c, self.d)

    def on_cusp(self, c: Cusp) -> Cusp:
        return Cusp(self.a * c.alpha + self.b * c.beta, self.c * c.alpha + self.d * c.beta)

    def serialize(self) -> list[list[str]]:
        return [[str(v) for v in e.coords] for e in self.entries()]

    def __repr__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def act(m: ModularMatrix, tau: HPoint) -> HPoint:
    """Componentwise homography with embedded entries."""
    dt = m.det()
    if dt != dt.field.one and not is_totally_positive(dt):
        raise NotOrientationPreserving(f"det {dt} is not totally positive")
    a, b, c, d = (e.embeddings() for e in m.entries())
    z = tau.z
    w = (a * z + b) / (c * z + d)
    return HPoint(tuple(w.real), tuple(np.maximum(w.imag, np.finfo(float).tiny)), tau.precision)


def in_group(m: ModularMatrix, a: FractionalIdeal) -> bool:
    if not (m.a.is_integral() and m.d.is_integral()):
        return False
    if not (_inv(a).contains(m.b) and a.contains(m.c)):
        return False
    dt = m.det()
    if dt.is_zero() or not dt.is_integral() or abs(dt.norm()) != 1:
        return False
    return is_totally_positive(dt)


def stabilizes_infinity(m: ModularMatrix) -> bool:
    return m.c.is_zero()


# --------------------------------------------------------------------------
# cusp conjugation
# --------------------------------------------------------------------------

def cusp_matrix(c: Cusp, a: FractionalIdeal) -> tuple[ModularMatrix, FractionalIdeal]:
    """``M = [[alpha, alpha*], [beta, beta*]]`` with ``det M = 1`` and ``M inf = c``.

    ``beta*`` lies in ``q^{-1}`` and ``alpha*`` in ``a^{-1} q^{-1}`` where
    ``q = alpha O + beta a^{-1}``; found from an HNF transform expressing 1
    in ``alpha q^{-1} + beta a^{-1} q^{-1}``.
    """
    field = a.field
    c = c.integral()
    alpha, beta = c.alpha, c.beta
    q = q_ideal(c, a)
    if beta.is_zero():
        # q = alpha O, take alpha* = 0, beta* = 1/alpha
        m = ModularMatrix(alpha, field.zero, beta, alpha.inverse())
        _check_cusp_matrix(m, c, a, q)
        return m, q
    q_inv = q.inverse()
    aq_inv = q_inv * _inv(a)
    gens = [alpha * u for u in q_inv.basis] + [beta * v for v in aq_inv.basis]
    big_d = common_denominator(v for g in gens for v in g.coords)
    cols = [[int(v * big_d) for v in g.coords] for g in gens]
    h, trans = hnf_columns(cols, field.degree, track=True)
    target = [v * big_d for v in field.one.coords]
    t = triangular_coords(h, target)
    if any(v.denominator != 1 for v in t):
        raise NoSolution(f"1 is not in alpha q^-1 + beta a^-1 q^-1 for {c}")
    coef = [sum(int(t[k]) * trans[k][i] for k in range(len(h))) for i in range(len(gens))]
    nu = len(q_inv.basis)
    beta_star = sum((u * x for u, x in zip(q_inv.basis, coef[:nu]) if x), field.zero)
    alpha_star = -sum((v * y for v, y in zip(aq_inv.basis, coef[nu:]) if y), field.zero)
    m = ModularMatrix(alpha, alpha_star, beta, beta_star)
    _check_cusp_matrix(m, c, a, q)
    return m, q


def _check_cusp_matrix(m, c, a, q) -> None:
    if m.det() != m.field.one:
        raise NoSolution("cusp matrix determinant is not 1")
    if not q.inverse().contains(m.d) or not (q.inverse() * _inv(a)).contains(m.b):
        raise NoSolution("cusp matrix entries are not in the required ideals")
    if m.on_cusp(Cusp.infinity(m.field)) != c:
        raise NoSolution("cusp matrix does not map infinity to the cusp")


# --------------------------------------------------------------------------
# reduction by the stabilizer of infinity
# --------------------------------------------------------------------------

def _centered_round(v: np.ndarray) -> np.ndarray:
    return np.floor(v + 0.5)


def unit_log_coordinates(field: NumberField, y: np.ndarray) -> np.ndarray:
    """Coordinates of the trace-zero part of ``log y`` in the O^{x,+} log basis."""
    logs = field.totally_positive_log_matrix  # (r, n)
    if logs.shape[0] == 0:
        return np.zeros(0)
    w = np.log(y)
    w = w - w.mean()
    coef, *_ = np.linalg.lstsq(logs.T, w, rcond=None)
    return coef


def translation_coordinates(b_inv: FractionalIdeal, x: np.ndarray) -> np.ndarray:
    return np.linalg.solve(b_inv.embedded_basis, x)


def reduce_point(tau: HPoint, b: FractionalIdeal) -> tuple[HPoint, ModularMatrix]:
    """Move ``tau`` into ``T x F`` by an element of ``Gamma_K(b)_inf``.

    Unit scaling first puts the log of ``Im tau`` in the centred half-open
    parallelepiped of the ``O^{x,+}`` log lattice; translation by ``b^{-1}``
    then puts ``Re tau`` in the centred half-open parallelepiped of that
    lattice.
    """
    field = b.field
    eps = field.one
    coef = unit_log_coordinates(field, tau.ya)
    shifts = _centered_round(coef).astype(int)
    for u, s in zip(field.totally_positive_units, shifts):
        if s:
            eps = eps * u ** int(-s)
    e = eps.embeddings()
    x1 = tau.xa * e
    y1 = tau.ya * e
    b_inv = _inv(b)
    tc = _centered_round(translation_coordinates(b_inv, x1)).astype(int)
    shift = sum((w * int(-k) for w, k in zip(b_inv.basis, tc) if k), field.zero)
    x2 = x1 + shift.embeddings()
    gamma = ModularMatrix(eps, shift, field.zero, field.one)
    return HPoint(tuple(x2), tuple(y1), tau.precision), gamma


def is_reduced(tau: HPoint, b: FractionalIdeal) -> bool:
    field = b.field
    coef = unit_log_coordinates(field, tau.ya)
    if np.any(_centered_round(coef) != 0):
        return False
    tc = translation_coordinates(_inv(b), tau.xa)
    return not np.any(_centered_round(tc) != 0)


# --------------------------------------------------------------------------
# cusp class representatives and the global fundamental domain
# --------------------------------------------------------------------------

def cusp_representatives(a: FractionalIdeal, search_box: int = 4) -> list[Cusp]:
    """One cusp per ideal class, from the class representatives in the config.

    For each class ideal ``b`` a cusp ``[alpha : beta]`` with
    ``alpha O + beta a^{-1} = b`` is found with ``alpha`` in ``b`` and
    ``beta`` a small element of ``a b``.
    """
    field = a.field
    reps = field.class_rep_generators()
    out = [Cusp.infinity(field)]
    for gens in reps:
        bideal = ideal_from_generators(gens)
        if bideal == FractionalIdeal.unit(field) or _is_principal(bideal):
            continue
        ab = a * bideal
        found = None
        for alpha in bideal.basis:
            for coefs in itertools.product(range(-search_box, search_box + 1), repeat=field.degree):
                if not any(coefs):
                    continue
                beta = sum((w * k for w, k in zip(ab.basis, coefs) if k), field.zero)
                cusp = Cusp(alpha, beta)
                if q_ideal(cusp, a) == bideal:
                    found = cusp.integral()
                    break
            if found:
                break
        if found is None:
            raise NoSolution(f"no cusp found for ideal class of {bideal}")
        out.append(found)
    check_inequivalent(out, a)
    return out


def _is_principal(b: FractionalIdeal) -> bool:
    res = is_principal_smallfield(b)
    if res.generator is None and not res.conclusive:
        raise ArithmeticError(f"principality of {b} undecided")
    return res.generator is not None


def check_inequivalent(reps: Sequence[Cusp], a: FractionalIdeal) -> None:
    """Raise unless the ideal classes of ``alpha O + beta a^{-1}`` are distinct."""
    qs = [q_ideal(c, a) for c in reps]
    for i in range(len(qs)):
        for j in range(i):
            if _is_principal(qs[i] * qs[j].inverse()):
                raise ValueError(f"cusps {reps[i]} and {reps[j]} are Gamma-equivalent")


def chart_data(a: FractionalIdeal, reps: Sequence[Cusp]):
    """``(M_j, q_j, a q_j^2)`` for every representative."""
    out = []
    for c in reps:
        m, q = cusp_matrix(c, a)
        out.append((m, q, a * q * q))
    return out


def fundamental_domain_contains(tau: HPoint, a: FractionalIdeal, reps: Sequence[Cusp],
                                charts=None) -> int | None:
    """Index ``j`` if ``tau`` is in the sphere of ``c_j`` and reduced in its chart."""
    if charts is None:
        charts = chart_data(a, reps)
    for j, (c, (m, q, b)) in enumerate(zip(reps, charts)):
        if not sphere_membership(tau, c, a):
            continue
        local = act(m.inverse(), tau)
        if is_reduced(local, b):
            return j
    return None


# --------------------------------------------------------------------------
# random group elements (for invariance checks)
# --------------------------------------------------------------------------

def random_group_element(a: FractionalIdeal, rng: np.random.Generator, length: int = 3,
                         coef_range: int = 2) -> ModularMatrix:
    """Product of random unipotent and unit-diagonal generators of ``Gamma_K(a)``."""
    field = a.field
    a_inv = _inv(a)
    m = ModularMatrix.identity(field)
    units = list(field.totally_positive_units)
    for _ in range(length):
        kind = rng.integers(0, 3)
        if kind == 0:
            mu = _random_lattice_element(a_inv, rng, coef_range)
            g = ModularMatrix.translation(mu)
        elif kind == 1:
            cc = _random_lattice_element(a, rng, coef_range)
            g = ModularMatrix(field.one, field.zero, cc, field.one)
        else:
            if not units:
                continue
            u = units[int(rng.integers(0, len(units)))] ** int(rng.choice([-1, 1]))
            g = ModularMatrix.scaling(u)
        m = m @ g
    return m


def _random_lattice_element(lat: FractionalIdeal, rng, coef_range: int) -> FieldElement:
    coefs = rng.integers(-coef_range, coef_range + 1, size=lat.field.degree)
    if not coefs.any():
        coefs[0] = 1
    return sum((w * int(k) for w, k in zip(lat.basis, coefs) if k), lat.field.zero)


def random_reduced_point(b: FractionalIdeal, rng: np.random.Generator,
                         log_t_range: tuple[float, float] | None = None) -> HPoint:
    """A point of ``T x F`` with ``log N(Im tau)`` uniform on ``log_t_range``.

    The default range spans from well inside the chart of infinity down past
    the level ``1/(c^{2n} N(b))`` where other cusps take over.
    """
    field = b.field
    n = field.degree
    if log_t_range is None:
        nb = float(b.norm())
        lo = math.log(1.0 / (field.c_upper_default() ** (2 * n) * nb)) - 1.0
        log_t_range = (lo, math.log(1.0 / nb) + 2.0)
    u = rng.random(n) - 0.5
    s = rng.random(n - 1) - 0.5
    v = rng.uniform(*log_t_range)
    x = _inv(b).embedded_basis @ u
    logs = field.totally_positive_log_matrix
    logy = v / n + (s @ logs if n > 1 else 0.0)
    return HPoint(tuple(x), tuple(np.exp(logy)))
