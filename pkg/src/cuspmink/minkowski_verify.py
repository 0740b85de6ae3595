"""Numerical checks of the Minkowski-type bounds on ``mu_{a,1} mu_{a,2}``.

For every fractional ideal ``a`` and ``tau`` in ``H^n``::

    1 / (c^{4n} N(a)^2) <= mu_{a,1}(tau) mu_{a,2}(tau) <= 1 / N(a)^2

with ``c`` any upper bound for the Hermite-type constant (by default
``sqrt(2) Delta_K^{1/2n}``). Consequences checked alongside: ``mu_{a,1} >=
1/(c^{2n} N(a))``, at most one cusp has ``mu >= 1/N(a)``, and
``mu_{d^{-1},1} >= 2^{-n}`` for the inverse different.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .cusp_geometry import (TIE_TOL, Cusp, HPoint, MuReport, mu, nearest_cusps)
from .errors import NotOnBoundary
from .field_core import NumberField
from .ideal_lattice import FractionalIdeal, codifferent
from .modular_action import act, chart_data, cusp_representatives

SLACK = 1e-9


@dataclass
class BoundReport:
    tau: HPoint
    a: FractionalIdeal
    mu1: float
    mu2: float
    product_scaled: float
    lower: float
    upper: float
    pass_: bool
    certified: bool
    pass_upper: bool = True
    pass_lower: bool = True
    pass_mu1_bound: bool = True
    pass_separation: bool = True
    reports: list = dc_field(default_factory=list, repr=False)

    @property
    def margin_upper(self) -> float:
        return self.upper - self.product_scaled

    @property
    def margin_lower(self) -> float:
        return self.product_scaled - self.lower

    def as_dict(self) -> dict:
        return {"tau": str(self.tau), "ideal": self.a.serialize(), "mu1": self.mu1,
                "mu2": self.mu2, "product_scaled": self.product_scaled,
                "lower": self.lower, "upper": self.upper, "pass": self.pass_,
                "certified": self.certified, "pass_upper": self.pass_upper,
                "pass_lower": self.pass_lower, "pass_mu1_bound": self.pass_mu1_bound,
                "pass_separation": self.pass_separation}


def default_c_upper(field: NumberField) -> float:
    return field.c_upper_default()


def verify_minkowski(tau: HPoint, a: FractionalIdeal, c_upper: float | None = None,
                     **search_kw) -> BoundReport:
    field = a.field
    n = field.degree
    c = default_c_upper(field) if c_upper is None else float(c_upper)
    if c < 1:
        raise ValueError("c_upper must be at least 1")
    reps = nearest_cusps(tau, a, k=2, c_upper=c, **search_kw)
    mu1, mu2 = reps[0].mu, reps[1].mu
    na = float(a.norm())
    prod = na * na * mu1 * mu2
    lower = c ** (-4 * n)
    pass_upper = prod <= 1.0 * (1 + SLACK)
    pass_lower = prod >= lower * (1 - SLACK)
    pass_mu1 = mu1 >= (1 - SLACK) / (c ** (2 * n) * na)
    pass_sep = not (mu2 >= (1 + SLACK) / na)
    ok = pass_upper and pass_lower and pass_mu1 and pass_sep
    return BoundReport(tau, a, mu1, mu2, prod, lower, 1.0, ok, reps[0].certified,
                       pass_upper, pass_lower, pass_mu1, pass_sep, reps)


def verify_codifferent_bound(tau: HPoint, field: NumberField, **search_kw) -> bool:
    """``mu_{a,1}(tau) >= 2^{-n}`` for ``a`` the inverse different."""
    a = codifferent(field)
    r = nearest_cusps(tau, a, k=1, c_upper=default_c_upper(field), **search_kw)[0]
    return r.mu >= 2.0 ** (-field.degree) * (1 - SLACK)


def verify_boundary_annulus(tau: HPoint, c: Cusp, a: FractionalIdeal,
                            c_upper: float | None = None, rel: float = 1e-6) -> bool:
    """On the boundary of ``S_{a,c}``: ``1/(c^{2n} N(a)) <= mu_a(tau, c) <= 1/N(a)``."""
    field = a.field
    n = field.degree
    cu = default_c_upper(field) if c_upper is None else float(c_upper)
    reps = nearest_cusps(tau, a, k=2, extra_candidates=[c])
    value = mu(tau, c, a)
    if value < reps[0].mu * (1 - TIE_TOL):
        raise NotOnBoundary(f"{c} is not a closest cusp at {tau}")
    others = [r.mu for r in reps if r.cusp != c]
    if not others or abs(value - others[0]) > rel * value:
        raise NotOnBoundary(f"{tau} is not equidistant from {c} and another cusp")
    na = float(a.norm())
    return (1 - SLACK) / (cu ** (2 * n) * na) <= value <= (1 + SLACK) / na


def bisect_boundary(inside: HPoint, outside: HPoint, c: Cusp, a: FractionalIdeal,
                    steps: int = 80, rel: float = 1e-8) -> HPoint:
    """Bisect in ``(x, log y)`` between a point of ``S_{a,c}`` and one outside it."""

    def point(s: float) -> HPoint:
        x = (1 - s) * inside.xa + s * outside.xa
        ly = (1 - s) * np.log(inside.ya) + s * np.log(outside.ya)
        return HPoint(tuple(x), tuple(np.exp(ly)))

    def state(p: HPoint):
        reps = nearest_cusps(p, a, k=2, extra_candidates=[c])
        value = mu(p, c, a)
        other = max(r.mu for r in reps if r.cusp != c)
        return value, other

    v, o = state(inside)
    if v < o:
        raise ValueError("inside point is not in the sphere of influence")
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = (lo + hi) / 2
        v, o = state(point(mid))
        if v >= o:
            lo = mid
        else:
            hi = mid
        if abs(v - o) <= rel * v and v >= o:
            break
    return point(lo)


# --------------------------------------------------------------------------
# Hermite-type constant, lower estimate
# --------------------------------------------------------------------------

@dataclass
class HermiteEstimate:
    value: float
    tau: HPoint
    chart: int
    evaluations: int
    starts: int


def _objective(tau: HPoint, a: FractionalIdeal) -> float | None:
    reps = nearest_cusps(tau, a, k=2)
    if not reps[0].certified:
        return None
    prod = float(a.norm()) ** 2 * reps[0].mu * reps[1].mu
    return prod ** (-1.0 / (4 * a.field.degree))


class ChartParam:
    """Map a box of parameters to points of the region of one cusp chart.

    Parameters are ``(u_1..u_n, s_1..s_r, v)``: ``u`` are coordinates of
    ``Re tau'`` in the basis of ``b^{-1}``, ``s`` coordinates of the log of
    ``Im tau'`` in the totally positive unit log basis and ``v`` the log of
    ``t = N(Im tau')``. The point returned is ``M tau'``.
    """

    def __init__(self, a: FractionalIdeal, chart, c_upper: float):
        m, q, b = chart
        self.m = m
        field = a.field
        self.n = n = field.degree
        self.r = n - 1
        from .cusp_geometry import _inv
        self.t_basis = _inv(b).embedded_basis
        self.logs = field.totally_positive_log_matrix
        nb = float(b.norm())
        self.v_lo = math.log(1.0 / (c_upper ** (2 * n) * nb))
        self.v_hi = math.log(1.0 / nb)

    @property
    def dim(self) -> int:
        return self.n + self.r + 1

    def from_unit_box(self, p: np.ndarray) -> np.ndarray:
        out = np.array(p, dtype=float)
        out[: self.n + self.r] -= 0.5
        out[-1] = self.v_lo + p[-1] * (self.v_hi - self.v_lo)
        return out

    def point(self, params: np.ndarray) -> HPoint:
        n, r = self.n, self.r
        x = self.t_basis @ params[:n]
        logy = params[-1] / n + (params[n:n + r] @ self.logs if r else 0.0)
        local = HPoint(tuple(x), tuple(np.exp(logy)))
        return act(self.m, local)


def estimate_hermite_lower(field: NumberField, a: FractionalIdeal | None = None,
                           samples: int = 64, optimizer_steps: int = 200, seed: int = 0,
                           c_upper: float | None = None) -> float:
    return hermite_search(field, a, samples, optimizer_steps, seed, c_upper).value


def hermite_search(field: NumberField, a: FractionalIdeal | None = None, samples: int = 64,
                   optimizer_steps: int = 200, seed: int = 0,
                   c_upper: float | None = None) -> HermiteEstimate:
    """Largest ``(N(a)^2 mu_1 mu_2)^{-1/4n}`` found by sampling plus pattern search.

    Samples are a scrambled Halton sequence over the cusp charts, so a larger
    ``samples`` extends the same sequence. Pattern search (initial step 0.1,
    halving, floor 1e-4) is started from the best sample of every dyadic
    prefix, and ``optimizer_steps`` caps objective evaluations per start.
    Both budgets therefore only ever add candidates: the result is monotone.
    """
    if a is None:
        a = FractionalIdeal.unit(field)
    cu = default_c_upper(field) if c_upper is None else float(c_upper)
    reps = cusp_representatives(a)
    charts = [ChartParam(a, ch, cu) for ch in chart_data(a, reps)]
    dim = charts[0].dim
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    box = sampler.random(max(samples, 1))
    best = HermiteEstimate(1.0, HPoint((0.0,) * field.degree, (1.0,) * field.degree), 0, 0, 0)
    pts = []
    for i in range(samples):
        j = i % len(charts)
        params = charts[j].from_unit_box(box[i])
        val = _objective(charts[j].point(params), a)
        pts.append((val if val is not None else -math.inf, j, params))
        best.evaluations += 1
        if val is not None and val > best.value:
            best.value, best.tau, best.chart = val, charts[j].point(params), j
    starts = []
    k = 1
    while k <= samples:
        idx = max(range(k), key=lambda i: pts[i][0])
        if idx not in starts:
            starts.append(idx)
        k *= 2
    for idx in starts:
        val0, j, params = pts[idx]
        if val0 == -math.inf:
            continue
        res_val, res_params, evals = _pattern_search(lambda p: _objective(charts[j].point(p), a),
                                                     params, val0, optimizer_steps)
        best.evaluations += evals
        if res_val > best.value:
            best.value, best.tau, best.chart = res_val, charts[j].point(res_params), j
    best.starts = len(starts)
    return best


def _pattern_search(f, x0: np.ndarray, f0: float, budget: int, step: float = 0.1,
                    floor: float = 1e-4):
    x = np.array(x0, dtype=float)
    fx = f0
    evals = 0
    while step >= floor and evals < budget:
        improved = False
        for i in range(len(x)):
            for sgn in (1.0, -1.0):
                if evals >= budget:
                    break
                y = x.copy()
                y[i] += sgn * step
                fy = f(y)
                evals += 1
                if fy is not None and fy > fx:
                    x, fx = y, fy
                    improved = True
                    break
        if not improved:
            step /= 2
    return fx, x, evals
