"""Cusps, the a-distance function mu, adelic heights and nearest-cusp search.

For a cusp ``c = [alpha : beta]`` and ``tau`` in ``H^n``::

    mu_a(tau, c) = N(alpha O + beta a^-1)^2 N(Im tau) / |N(alpha - beta tau)|^2

``nearest_cusps`` finds the largest values of ``mu`` by enumerating the
lattice ``O (+) a`` of pairs ``(alpha, beta)`` under the positive definite
form ``Q = sum_j |alpha_j - beta_j tau_j|^2 / y_j``. Every cusp with
``mu >= thr`` has a representative with ``N(q) <= B`` (Minkowski bound) whose
embedding profile is balanced by units, which bounds ``Q`` by
``(B^2 / thr)^(1/n) * S``; see :func:`search_radius`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CuspAtPoint, ZeroInput
from .field_core import FieldElement, NumberField
from .ideal_lattice import FractionalIdeal, ideal_from_generators
from .linalg import EnumerationBudget, fincke_pohst, lll_reduce

TIE_TOL = 1e-9
DEFAULT_MAX_NODES = 200_000


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cusp:
    """Projective point ``[alpha : beta]`` of ``P^1(K)``."""

    alpha: FieldElement
    beta: FieldElement

    def __post_init__(self):
        if self.alpha.is_zero() and self.beta.is_zero():
            raise ZeroInput("[0:0] is not a cusp")

    @classmethod
    def infinity(cls, field: NumberField) -> "Cusp":
        return cls(field.one, field.zero)

    @classmethod
    def zero(cls, field: NumberField) -> "Cusp":
        return cls(field.zero, field.one)

    @property
    def field(self) -> NumberField:
        return self.alpha.field

    def is_infinity(self) -> bool:
        return self.beta.is_zero()

    def key(self):
        """Exact projective invariant: ``'inf'`` or the coordinates of alpha/beta."""
        if self.beta.is_zero():
            return "inf"
        return (self.alpha / self.beta).coords

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cusp):
            return NotImplemented
        return (self.alpha * other.beta - other.alpha * self.beta).is_zero()

    def __hash__(self) -> int:
        return hash(self.key())

    def integral(self) -> "Cusp":
        """An equal cusp with both coordinates in ``O_K``."""
        from .linalg import common_denominator
        m = common_denominator(self.alpha.coords + self.beta.coords)
        return Cusp(self.alpha * m, self.beta * m)

    def as_dict(self) -> dict:
        return {"alpha": [str(c) for c in self.alpha.coords],
                "beta": [str(c) for c in self.beta.coords]}

    def __repr__(self) -> str:
        return f"[{self.alpha} : {self.beta}]"


@dataclass(frozen=True)
class HPoint:
    """A point of ``H^n``: real parts ``x`` and positive imaginary parts ``y``."""

    x: tuple[float, ...]
    y: tuple[float, ...]
    precision: int = 53

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        if not all(v > 0 for v in self.y):
            raise ValueError("imaginary parts must be positive")

    @classmethod
    def from_complex(cls, zs: Iterable[complex]) -> "HPoint":
        zs = list(zs)
        return cls(tuple(z.real for z in zs), tuple(z.imag for z in zs))

    @classmethod
    def parse(cls, text: str) -> "HPoint":
        """Parse ``"x1:y1,x2:y2,..."``."""
        xs, ys = [], []
        for part in text.split(","):
            a, b = part.split(":")
            xs.append(float(a))
            ys.append(float(b))
        return cls(tuple(xs), tuple(ys))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def xa(self) -> np.ndarray:
        return np.array(self.x)

    @property
    def ya(self) -> np.ndarray:
        return np.array(self.y)

    @property
    def z(self) -> np.ndarray:
        return self.xa + 1j * self.ya

    def norm_im(self) -> float:
        return float(np.prod(self.ya))

    def __str__(self) -> str:
        return ",".join(f"{a!r}:{b!r}" for a, b in zip(self.x, self.y))


@dataclass
class MuReport:
    cusp: Cusp
    mu: float
    rank: int
    enumeration_bound_used: float
    certified: bool
    tied: bool = False
    nodes: int = 0

    def as_dict(self) -> dict:
        return {"cusp": self.cusp.as_dict(), "mu": repr(self.mu), "precision": "double",
                "rank": self.rank, "enumeration_bound_used": self.enumeration_bound_used,
                "certified": self.certified, "tied": self.tied}


# --------------------------------------------------------------------------
# mu and heights
# --------------------------------------------------------------------------

def _inv(a: FractionalIdeal) -> FractionalIdeal:
    return _inverse_cached(a)


@lru_cache(maxsize=4096)
def _inverse_cached(a: FractionalIdeal) -> FractionalIdeal:
    return a.inverse()


def q_ideal(c: Cusp, a: FractionalIdeal) -> FractionalIdeal:
    """``alpha O + beta a^{-1}``."""
    return ideal_from_generators([c.alpha, c.beta], [None, _inv(a)])


def _abs_norm_sq(alpha_emb: np.ndarray, beta_emb: np.ndarray, tau: HPoint) -> float:
    re = alpha_emb - beta_emb * tau.xa
    im = beta_emb * tau.ya
    return float(np.prod(re * re + im * im))


def mu(tau: HPoint, c: Cusp, a: FractionalIdeal) -> float:
    nq = float(q_ideal(c, a).norm())
    den = _abs_norm_sq(c.alpha.embeddings(), c.beta.embeddings(), tau)
    if not den > 0:
        raise CuspAtPoint(f"|N(alpha - beta tau)| vanished numerically for {c}")
    return nq * nq * tau.norm_im() / den


def iota(c: Cusp) -> Cusp:
    return Cusp(c.beta, -c.alpha)


def adelic_height(tau: HPoint, a: FractionalIdeal, v: tuple[FieldElement, FieldElement]) -> float:
    """Height of ``(alpha, beta)`` in the rigid adelic space attached to ``(a, tau)``.

    Finite part ``N(alpha O + beta a)^{-1/n}``; infinite part
    ``prod_j (y_j^{-1/2} |alpha_j tau_j + beta_j|)^{1/n}``.
    """
    alpha, beta = v
    if alpha.is_zero() and beta.is_zero():
        raise ZeroInput("zero vector has no height")
    n = alpha.field.degree
    finite = float(ideal_from_generators([alpha, beta], [None, a]).norm()) ** (-1.0 / n)
    ae, be = alpha.embeddings(), beta.embeddings()
    z = tau.z
    local = np.abs(ae * z + be) / np.sqrt(tau.ya)
    return finite * float(np.prod(local ** (1.0 / n)))


def total_height(a: FractionalIdeal) -> float:
    """Height of the whole space, ``N(a)^{-1/n}``."""
    return float(a.norm()) ** (-1.0 / a.field.degree)


# --------------------------------------------------------------------------
# nearest cusps
# --------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _balance_constant(field: NumberField) -> float:
    """``max_t sum_j exp(sum_i 2 t_i log|sigma_j(u_i)|)`` over ``t in {+-1/2}^r``."""
    logs = field.unit_log_matrix
    n = field.degree
    if logs.shape[0] == 0:
        return float(n)
    best = 0.0
    for t in itertools.product((-0.5, 0.5), repeat=logs.shape[0]):
        expo = 2.0 * np.array(t) @ logs
        best = max(best, float(np.exp(expo).sum()))
    return best


def class_norm_bound(field: NumberField) -> int:
    """Every ideal class contains an integral ideal of norm at most this."""
    return max(1, math.floor(field.minkowski_bound() + 1e-9))


def search_radius(field: NumberField, thr: float) -> float:
    n = field.degree
    b = class_norm_bound(field)
    return (b * b / thr) ** (1.0 / n) * _balance_constant(field)


class _Search:
    """State of one nearest-cusp enumeration."""

    def __init__(self, tau: HPoint, a: FractionalIdeal, k: int):
        self.tau = tau
        self.a = a
        self.a_inv = _inv(a)
        self.field = a.field
        self.k = k
        self.n = self.field.degree
        self.norm_a = float(a.norm())
        self.bound_b = class_norm_bound(self.field)
        self.found: dict = {}
        self.ny = tau.norm_im()

    def offer(self, cusp: Cusp, value: float | None = None) -> None:
        key = cusp.key()
        if key in self.found:
            return
        if value is None:
            value = mu(self.tau, cusp, self.a)
        self.found[key] = (value, cusp)

    def threshold(self) -> float:
        vals = sorted((v for v, _ in self.found.values()), reverse=True)
        if len(vals) < self.k:
            return 0.0
        return vals[self.k - 1] * (1 - TIE_TOL)

    def radius(self) -> float:
        thr = self.threshold()
        if thr <= 0:
            return math.inf
        return search_radius(self.field, thr) * (1 + 1e-7)


def _pair_embedding(a: FractionalIdeal) -> tuple[np.ndarray, np.ndarray]:
    """Float maps from ``(alpha coords, beta coords in a-basis)`` to embeddings."""
    field = a.field
    return field.embedding_matrix.T, a.embedded_basis


def nearest_cusps(tau: HPoint, a: FractionalIdeal, k: int = 2, c_upper: float | None = None,
                  max_nodes: int = DEFAULT_MAX_NODES,
                  extra_candidates: Sequence[Cusp] = ()) -> list[MuReport]:
    """Top-``k`` values of ``mu_a(tau, .)`` over projectively distinct cusps.

    Reports are ordered by decreasing ``mu``. With ``k=2`` and a tie at the
    top (relative ``1e-9``), both tied cusps are reported with ``tied=True``;
    further cusps tied with the second value are appended as well.
    ``certified`` is false only if the node budget ran out.
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    field = a.field
    if c_upper is not None and c_upper < 1:
        raise ValueError("c_upper must be at least 1")
    n = field.degree
    if tau.n != n:
        raise ValueError(f"tau has {tau.n} coordinates, field degree is {n}")
    st = _Search(tau, a, k)
    st.offer(Cusp.infinity(field), st.ny)
    st.offer(Cusp.zero(field))
    for c in extra_candidates:
        st.offer(c)

    emb_o, emb_a = _pair_embedding(a)  # (n, n): sigma_j(omega_i) as [j, i]
    x, y = tau.xa, tau.ya
    sy = np.sqrt(y)
    basis = np.zeros((2 * n, 2 * n))
    basis[:n, :n] = emb_o / sy[:, None]
    basis[:n, n:] = -emb_a * (x / sy)[:, None]
    basis[n:, n:] = emb_a * sy[:, None]
    red, u = lll_reduce(basis)
    gram = red.T @ red
    gram = (gram + gram.T) / 2
    u_f = u.astype(float)
    norm_a = st.norm_a
    a_basis = a.basis
    o_basis = field.basis_elements()
    bound_b = st.bound_b

    def visit(xv, qval):
        z = u @ np.array(xv, dtype=np.int64)
        za, zb = z[:n], z[n:]
        ae = emb_o @ za
        be = emb_a @ zb
        den = _den(ae, be, x, y)
        if den <= 0:
            return
        thr = st.threshold()
        g = _norm_gcd_bound(ae, be, norm_a, za, zb, field, a_basis)
        g = min(g, bound_b) if g > 0 else bound_b
        if g * g * st.ny / den < thr * (1 - 1e-9):
            return
        alpha = _combine(o_basis, za, field)
        beta = _combine(a_basis, zb, field)
        cusp = Cusp(alpha, beta)
        key = cusp.key()
        if key in st.found:
            return
        nq = float(ideal_from_generators([alpha, beta], [None, st.a_inv]).norm())
        st.found[key] = (nq * nq * st.ny / den, cusp)

    certified = True
    nodes = 0
    try:
        nodes = fincke_pohst(gram, st.radius, visit, max_nodes=max_nodes)
    except EnumerationBudget:
        certified = False
        nodes = max_nodes
    radius = st.radius()
    ranked = sorted(st.found.values(), key=lambda t: -t[0])
    out = []
    top = ranked[0][0]
    kth = ranked[k - 1][0] * (1 - TIE_TOL)
    for i, (val, cusp) in enumerate(ranked):
        if i >= k and val < kth:
            break
        out.append(MuReport(cusp, val, 1 if i == 0 else 2, radius, certified, nodes=nodes))
    if len(out) > 1 and out[1].mu >= top * (1 - TIE_TOL):
        for r in out:
            if r.mu >= top * (1 - TIE_TOL):
                r.tied = True
    return out


def _den(ae, be, x, y) -> float:
    re = ae - be * x
    im = be * y
    return float(np.prod(re * re + im * im))


def _combine(basis: Sequence[FieldElement], coefs, field: NumberField) -> FieldElement:
    n = field.degree
    acc = [Fraction(0)] * n
    for b, c in zip(basis, coefs):
        c = int(c)
        if c:
            for i, v in enumerate(b.coords):
                acc[i] += c * v
    return FieldElement(field, tuple(acc))


def _norm_gcd_bound(ae, be, norm_a, za, zb, field, a_basis) -> int:
    """``gcd(|N(alpha)|, |N(beta)|/N(a))``, an upper bound on ``N(q)``; 0 means unknown."""
    na = float(np.prod(ae))
    nb = float(np.prod(be)) / norm_a
    if abs(na) < 2 ** 40 and abs(nb) < 2 ** 40:
        ia, ib = abs(round(na)), abs(round(nb))
    else:
        alpha = _combine(field.basis_elements(), za, field)
        beta = _combine(a_basis, zb, field)
        ia = abs(int(alpha.norm())) if not alpha.is_zero() else 0
        ib = abs(int(beta.norm() / Fraction(norm_a))) if not beta.is_zero() else 0
    return math.gcd(ia, ib)


def mu1(tau: HPoint, a: FractionalIdeal, **kw) -> MuReport:
    return nearest_cusps(tau, a, k=1, **kw)[0]


def mu1_mu2(tau: HPoint, a: FractionalIdeal, **kw) -> tuple[MuReport, MuReport]:
    reps = nearest_cusps(tau, a, k=2, **kw)
    return reps[0], reps[1]


# --------------------------------------------------------------------------
# brute force oracle
# --------------------------------------------------------------------------

def brute_force_nearest(tau: HPoint, a: FractionalIdeal, box: int,
                        top: int | None = 2) -> list[MuReport]:
    """Evaluate ``mu`` over all ``(alpha, beta)`` with coordinates in ``[-H, H]``.

    ``alpha`` ranges over integral-basis coordinates of ``O_K`` and ``beta``
    over coordinates in the HNF basis of ``a``. Candidates are evaluated
    exactly in decreasing order of the cheap upper bound
    ``gcd(|N alpha|, |N beta|/N(a))^2 N(Im tau) / |N(alpha - beta tau)|^2``,
    stopping once that bound falls below the ``top``-th distinct exact value
    (``top=None`` evaluates every candidate). Sorted by decreasing ``mu``.
    """
    if box < 0:
        raise ValueError("box must be nonnegative")
    field = a.field
    n = field.degree
    emb_o, emb_a = _pair_embedding(a)
    rng = np.arange(-box, box + 1)
    grid_a = np.array(list(itertools.product(rng, repeat=n)), dtype=np.int64).reshape(-1, n)
    grid_b = grid_a.copy()
    if box == 0:
        grid_b = np.zeros((1, n), dtype=np.int64)
    ae = grid_a @ emb_o.T  # (Na, n)
    be = grid_b @ emb_a.T
    na = np.rint(np.prod(ae, axis=1)).astype(np.int64)
    nb = np.rint(np.prod(be, axis=1) / float(a.norm())).astype(np.int64)
    x, y = tau.xa, tau.ya
    ny = tau.norm_im()
    re = ae[:, None, :] - be[None, :, :] * x
    im = be[None, :, :] * y + 0 * ae[:, None, :]
    den = np.prod(re * re + im * im, axis=2)
    g = np.gcd(np.abs(na)[:, None], np.abs(nb)[None, :]).astype(float)
    with np.errstate(divide="ignore"):
        ub = np.where(den > 0, g * g * ny / np.where(den > 0, den, 1.0), -1.0)
    flat = np.argsort(-ub, axis=None)
    nb_count = grid_b.shape[0]
    a_inv = _inv(a)
    found: dict = {}
    o_basis = field.basis_elements()
    for idx in flat:
        bound = ub.flat[idx]
        if bound < 0:
            break
        if top is not None and len(found) >= top:
            vals = sorted((v for v, _ in found.values()), reverse=True)
            if bound < vals[top - 1] * (1 - TIE_TOL):
                break
        i, j = divmod(int(idx), nb_count)
        alpha = _combine(o_basis, grid_a[i], field)
        beta = _combine(a.basis, grid_b[j], field)
        if alpha.is_zero() and beta.is_zero():
            continue
        cusp = Cusp(alpha, beta)
        key = cusp.key()
        if key in found:
            continue
        nq = float(ideal_from_generators([alpha, beta], [None, a_inv]).norm())
        found[key] = (nq * nq * ny / den.flat[idx], cusp)
    ranked = sorted(found.values(), key=lambda t: -t[0])
    return [MuReport(c, v, min(i + 1, 2), float(box), True) for i, (v, c) in enumerate(ranked)]


# --------------------------------------------------------------------------
# spheres of influence
# --------------------------------------------------------------------------

def sphere_membership(tau: HPoint, c: Cusp, a: FractionalIdeal, **kw) -> bool:
    """True iff ``mu_a(tau, c) >= mu_{a,1}(tau)`` (relative tolerance ``1e-9``)."""
    value = mu(tau, c, a)
    best = nearest_cusps(tau, a, k=1, extra_candidates=[c], **kw)[0]
    if not best.certified:
        from .errors import BudgetExceeded
        raise BudgetExceeded("mu_1 not certified", partial=best)
    return value >= best.mu * (1 - TIE_TOL)


def minima_from_cusps(tau: HPoint, a: FractionalIdeal, reports: Sequence[MuReport]) -> tuple[float, float]:
    """Roy-Thunder minima ``Lambda_1, Lambda_2`` as smallest heights of ``iota(c)``.

    The vectors ``iota(c)`` for distinct cusps are linearly independent, so
    the two smallest heights over distinct projective points are the minima.
    """
    hs = []
    for r in reports:
        c = iota(r.cusp).integral()
        hs.append(adelic_height(tau, a, (c.alpha, c.beta)))
    hs.sort()
    return hs[0], hs[1]
