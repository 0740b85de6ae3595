"""Cusp-ball volumes, the partial volume function and Monte-Carlo integrals.

The invariant measure is ``dm = prod_j dx_j dy_j / y_j^2``. In the chart of
a cusp ``c_j`` (pulled back to infinity by ``M_j`` from
:func:`cusp_matrix`) the stabilizer domain is ``T x F`` with ideal
``b_j = a q_j^2``. We parametrize it by

* ``u`` in ``[-1/2, 1/2)^n``: ``Re tau = E_T u`` where ``E_T`` embeds a basis of
  ``b_j^{-1}``;
* ``s`` in ``[-1/2, 1/2)^{n-1}`` and ``t > 0``: ``log y = (log t)/n + sum_i s_i
  log sigma(eps_i)`` with ``eps_i`` a basis of the totally positive units.

Then ``dm = |det E_T| |det A| du ds dt / t^2`` where ``A`` is the Jacobian
of ``(log t, s) -> log y``. Uniform ``u, s`` and ``t = L / U`` sample the
region ``t > L`` exactly according to ``dm``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from .cusp_geometry import TIE_TOL, Cusp, HPoint, mu, nearest_cusps, _inv
from .field_core import NumberField
from .ideal_lattice import FractionalIdeal
from .modular_action import ModularMatrix, act, chart_data, cusp_representatives

BLOCK = 2048


@dataclass
class McEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    extra: dict = dc_field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples,
                "seed": self.seed, **self.extra}


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def cusp_ball_volume(a: FractionalIdeal, r: float, field: NumberField | None = None) -> float:
    """``vol(Gamma_c \\ B_a(c, r)) = N(a)^-1 sqrt(Delta) 2^(n-1) / [O^{x,+} : O^{x,2}] R_K r^2``."""
    field = a.field if field is None else field
    if r <= 0:
        raise ValueError("r must be positive")
    n = field.degree
    return (math.sqrt(field.discriminant) * 2 ** (n - 1) / field.unit_sign_index()
            * field.regulator() * r * r / float(a.norm()))


def theorem_bounds(a: FractionalIdeal, t: float, c_val: float) -> tuple[float, float]:
    """Lower and upper bounds for the normalized integral of ``mu_{a,1}^t``."""
    if not 0 <= t < 1:
        raise ValueError("t must lie in [0, 1)")
    if c_val < 1:
        raise ValueError("c_val must be at least 1")
    n = a.field.degree
    na_t = float(a.norm()) ** (-t)
    c2n = c_val ** (-2 * n)
    lower = na_t * (c_val ** (-2 * n * t) * (1 - c2n) + c2n / (1 - t))
    upper = na_t / (1 - t)
    return lower, upper


def lower_bound_nonincreasing(a: FractionalIdeal, t: float, c_upper: float,
                              points: int = 2001) -> bool:
    """Scan ``c -> lower(c)`` on ``[1, c_upper]`` and check it never increases."""
    cs = np.linspace(1.0, c_upper, points)
    vals = np.array([theorem_bounds(a, t, c)[0] for c in cs])
    return bool(np.all(np.diff(vals) <= 1e-14 * np.abs(vals[:-1]) + 1e-300))


# --------------------------------------------------------------------------
# chart regions
# --------------------------------------------------------------------------

@dataclass
class ChartRegion:
    """``T x F x {t > lo}`` in the infinity chart of one cusp."""

    index: int
    cusp: Cusp
    m: ModularMatrix
    q_norm: float
    b_norm: float
    t_basis: np.ndarray
    unit_logs: np.ndarray
    lo: float

    @property
    def n(self) -> int:
        return self.t_basis.shape[0]

    @property
    def measure_factor(self) -> float:
        """``|det E_T| |det A|``: ``dm`` per unit of ``du ds dt / t^2``."""
        n = self.n
        jac = np.column_stack([np.full(n, 1.0 / n)] + list(self.unit_logs))
        return abs(float(np.linalg.det(self.t_basis))) * abs(float(np.linalg.det(jac)))

    def volume_above(self, level: float) -> float:
        return self.measure_factor / level

    @property
    def tail_level(self) -> float:
        """``t0 = 1/N(b)``: above it ``mu(tau, c) > 1/N(a)``."""
        return 1.0 / self.b_norm

    def draw(self, rng: np.random.Generator, count: int, hi: float | None = None):
        """Sample ``count`` points with density ``dm`` on ``lo < t < hi``."""
        n = self.n
        u = rng.random((count, n)) - 0.5
        s = rng.random((count, n - 1)) - 0.5
        w = rng.random(count)
        inv_lo = 1.0 / self.lo
        inv_hi = 0.0 if hi is None else 1.0 / hi
        # inverse CDF of dt/t^2 on (lo, hi): 1/t uniform on (inv_hi, inv_lo]
        t = 1.0 / (inv_lo - (1.0 - w) * (inv_lo - inv_hi))
        x = u @ self.t_basis.T
        logy = np.log(t)[:, None] / n + (s @ self.unit_logs if n > 1 else 0.0)
        return x, np.exp(logy), t

    def to_global(self, x: np.ndarray, y: np.ndarray) -> HPoint:
        return act(self.m, HPoint(tuple(x), tuple(y)))


def chart_regions(a: FractionalIdeal, reps: Sequence[Cusp], c_upper: float) -> list[ChartRegion]:
    field = a.field
    n = field.degree
    out = []
    for j, (c, (m, q, b)) in enumerate(zip(reps, chart_data(a, reps))):
        nb = float(b.norm())
        out.append(ChartRegion(j, c, m, float(q.norm()), nb, _inv(b).embedded_basis,
                               field.totally_positive_log_matrix, 1.0 / (c_upper ** (2 * n) * nb)))
    return out


def _rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1), spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def _pairwise_sum(v: np.ndarray) -> float:
    return float(np.add.reduce(np.asarray(v, dtype=float)))


# --------------------------------------------------------------------------
# streaming sampler
# --------------------------------------------------------------------------

def sample_fundamental_domain(a: FractionalIdeal, reps: Sequence[Cusp] | None, n_samples: int,
                              seed: int, c_upper: float | None = None
                              ) -> Iterator[tuple[HPoint, float, int]]:
    """Yield ``(tau, weight, chart)`` such that ``sum weight f(tau)`` estimates ``int f dm``.

    Points are drawn per chart with density ``dm`` on ``t > L_j``; the weight is
    the chart-region volume over its sample count, or zero when ``tau`` is not
    in the sphere of influence of the chart cusp.
    """
    field = a.field
    reps = cusp_representatives(a) if reps is None else list(reps)
    cu = field.c_upper_default() if c_upper is None else c_upper
    regions = chart_regions(a, reps, cu)
    counts = _allocate([r.volume_above(r.lo) for r in regions], n_samples)
    for reg, cnt in zip(regions, counts):
        w = reg.volume_above(reg.lo) / max(cnt, 1)
        for b0 in range(0, cnt, BLOCK):
            rng = _rng(seed, reg.index, b0 // BLOCK)
            m = min(BLOCK, cnt - b0)
            xs, ys, ts = reg.draw(rng, m)
            for x, y in zip(xs, ys):
                tau = reg.to_global(x, y)
                member = _membership(tau, reg, a)[0]
                yield tau, (w if member else 0.0), reg.index


def _allocate(volumes: Sequence[float], total: int) -> list[int]:
    tot = sum(volumes)
    counts = [max(1, int(round(total * v / tot))) for v in volumes]
    counts[0] += total - sum(counts)
    return counts


def _membership(tau: HPoint, reg: ChartRegion, a: FractionalIdeal):
    """``(member, mu_1, certified)`` for a global point sampled in chart ``reg``."""
    best = nearest_cusps(tau, a, k=1, extra_candidates=[reg.cusp])[0]
    own = mu(tau, reg.cusp, a)
    return own >= best.mu * (1 - TIE_TOL), best.mu, best.certified


# --------------------------------------------------------------------------
# batch sampler with analytic tails
# --------------------------------------------------------------------------

@dataclass
class DomainSample:
    """Per-chart band samples (``L_j < t < t0_j``) plus analytic cusp tails.

    Above ``t0_j = 1/N(a q_j^2)`` the chart cusp is at ``mu > 1/N(a)``, so it
    is the unique closest cusp and ``mu_1 = N(q_j)^2 t`` there; integrals over
    that tail are evaluated in closed form.
    """

    a: FractionalIdeal
    regions: list
    seed: int
    counts: list
    band_volume: list
    t: list = dc_field(default_factory=list)           # per chart: t samples
    member: list = dc_field(default_factory=list)      # per chart: bool arrays
    mu1: list = dc_field(default_factory=list)
    uncertified: int = 0

    @property
    def samples(self) -> int:
        return sum(self.counts)

    def _tail(self, reg: ChartRegion, s: float) -> float:
        # int_{t0}^inf (N(q)^2 t)^s dm = K N(q)^{2s} t0^{s-1} / (1 - s)
        t0 = reg.tail_level
        return reg.measure_factor * reg.q_norm ** (2 * s) * t0 ** (s - 1) / (1 - s)

    def integral(self, s: float) -> tuple[float, float]:
        """Estimate of ``int mu_1^s dm`` and its variance."""
        total = 0.0
        var = 0.0
        for j, reg in enumerate(self.regions):
            total += self._tail(reg, s)
            if self.counts[j] == 0:
                continue
            f = np.where(self.member[j], self.mu1[j] ** s, 0.0) * self.band_volume[j]
            total += _pairwise_sum(f) / self.counts[j]
            var += float(np.var(f, ddof=1)) / self.counts[j] if self.counts[j] > 1 else 0.0
        return total, var

    def volume(self) -> McEstimate:
        v, var = self.integral(0.0)
        return McEstimate(v, math.sqrt(var), self.samples, self.seed)

    def normalized_integral(self, s: float) -> McEstimate:
        """Ratio estimator of ``(1/vol) int mu_1^s dm`` with delta-method error."""
        num, den = 0.0, 0.0
        var_a = var_b = cov = 0.0
        for j, reg in enumerate(self.regions):
            num += self._tail(reg, s)
            den += self._tail(reg, 0.0)
            nj = self.counts[j]
            if nj == 0:
                continue
            fa = np.where(self.member[j], self.mu1[j] ** s, 0.0) * self.band_volume[j]
            fb = np.where(self.member[j], 1.0, 0.0) * self.band_volume[j]
            num += _pairwise_sum(fa) / nj
            den += _pairwise_sum(fb) / nj
            if nj > 1:
                c = np.cov(fa, fb, ddof=1)
                var_a += c[0, 0] / nj
                var_b += c[1, 1] / nj
                cov += c[0, 1] / nj
        r = num / den
        var_r = max(var_a - 2 * r * cov + r * r * var_b, 0.0) / (den * den)
        if s == 0:
            var_r = 0.0
        return McEstimate(r, math.sqrt(var_r), self.samples, self.seed,
                          {"volume": den, "uncertified": self.uncertified})

    def partial(self, x: float) -> McEstimate:
        """``g(x)``: volume of points whose closest cusp is at distance ``< x``."""
        level = 1.0 / (x * x)
        total, var = 0.0, 0.0
        for j, reg in enumerate(self.regions):
            # mu(tau, c_j) = N(q_j)^2 t > 1/x^2  <=>  t > level / N(q_j)^2
            tl = level / reg.q_norm ** 2
            t0 = reg.tail_level
            total += reg.measure_factor / max(tl, t0)
            nj = self.counts[j]
            if nj == 0 or tl >= t0:
                continue
            f = np.where(self.member[j] & (self.t[j] > tl), 1.0, 0.0) * self.band_volume[j]
            total += _pairwise_sum(f) / nj
            if nj > 1:
                var += float(np.var(f, ddof=1)) / nj
        return McEstimate(total, math.sqrt(var), self.samples, self.seed)


def _eval_block(args):
    a, reg, seed, block, count = args
    rng = _rng(seed, reg.index, block)
    xs, ys, ts = reg.draw(rng, count, hi=reg.tail_level)
    member = np.zeros(count, dtype=bool)
    mu1 = np.zeros(count)
    unc = 0
    for i in range(count):
        tau = reg.to_global(xs[i], ys[i])
        m, v, cert = _membership(tau, reg, a)
        member[i] = m
        mu1[i] = v
        unc += 0 if cert else 1
    return ts, member, mu1, unc


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("CUSPMINK_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def domain_sample(a: FractionalIdeal, n_samples: int, seed: int, reps: Sequence[Cusp] | None = None,
                  c_upper: float | None = None, threads: int | None = None) -> DomainSample:
    """Draw band samples in every chart and evaluate ``mu_1`` and membership.

    Streams are keyed by ``(seed, chart, block)`` so the result does not depend
    on the worker count.
    """
    field = a.field
    reps = cusp_representatives(a) if reps is None else list(reps)
    cu = field.c_upper_default() if c_upper is None else c_upper
    regions = chart_regions(a, reps, cu)
    band = [r.measure_factor * (1.0 / r.lo - 1.0 / r.tail_level) for r in regions]
    counts = _allocate(band, n_samples) if n_samples > 0 else [0] * len(regions)
    jobs = []
    for reg, cnt in zip(regions, counts):
        for b0 in range(0, cnt, BLOCK):
            jobs.append((a, reg, seed, b0 // BLOCK, min(BLOCK, cnt - b0)))
    workers = worker_count(threads)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_eval_block, jobs))
    else:
        results = [_eval_block(j) for j in jobs]
    ds = DomainSample(a, regions, seed, counts, band)
    for j in range(len(regions)):
        parts = [r for job, r in zip(jobs, results) if job[1].index == j]
        ds.t.append(np.concatenate([p[0] for p in parts]) if parts else np.zeros(0))
        ds.member.append(np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, bool))
        ds.mu1.append(np.concatenate([p[2] for p in parts]) if parts else np.zeros(0))
        ds.uncertified += sum(p[3] for p in parts)
    return ds


def integral_mu1_t(a: FractionalIdeal, t: float, n_samples: int, seed: int,
                   sample: DomainSample | None = None, **kw) -> McEstimate:
    """``(1/vol) int mu_{a,1}^t dm`` over a fundamental domain of ``Gamma_K(a)``."""
    if not 0 <= t < 1:
        raise ValueError("t must lie in [0, 1)")
    if sample is None:
        sample = domain_sample(a, n_samples, seed, **kw)
    return sample.normalized_integral(t)


def partial_volume(x: float, a: FractionalIdeal, c_upper: float | None = None,
                   mc_samples: int = 20000, seed: int = 0,
                   sample: DomainSample | None = None, **kw) -> McEstimate:
    """Partial volume ``g(x)``: closed form below ``sqrt N(a)``, MC above."""
    if x <= 0:
        raise ValueError("x must be positive")
    field = a.field
    n = field.degree
    cu = field.c_upper_default() if c_upper is None else c_upper
    na = float(a.norm())
    if x <= math.sqrt(na):
        h = len(cusp_representatives(a))
        return McEstimate(h * cusp_ball_volume(a, x, field), 0.0, 0, seed, {"closed_form": True})
    if sample is None:
        sample = domain_sample(a, mc_samples, seed, c_upper=cu, **kw)
    if x >= cu ** n * math.sqrt(na):
        est = sample.volume()
        est.extra["saturated"] = True
        return est
    return sample.partial(x)


def ball_volume_mc(a: FractionalIdeal, r: float, n_samples: int, seed: int,
                   c_upper: float | None = None) -> McEstimate:
    """MC volume of ``Gamma_inf \\ {N(Im tau) > 1/r^2}`` from the infinity chart sampler."""
    field = a.field
    cu = field.c_upper_default() if c_upper is None else c_upper
    reg = chart_regions(a, [Cusp.infinity(field)], cu)[0]
    level = 1.0 / (r * r)
    hits = np.zeros(0)
    for b0 in range(0, n_samples, BLOCK):
        rng = _rng(seed, 0, b0 // BLOCK)
        _, y, _ = reg.draw(rng, min(BLOCK, n_samples - b0))
        hits = np.concatenate([hits, (np.prod(y, axis=1) > level).astype(float)])
    vol = reg.volume_above(reg.lo)
    p = _pairwise_sum(hits) / n_samples
    se = vol * math.sqrt(p * (1 - p) / n_samples)
    return McEstimate(vol * p, se, n_samples, seed)
