"""Independent reference computations used by the test-suite.

None of these reuse the package's HNF, field multiplication or enumeration
code: traces come from Newton power sums of the minimal polynomial,
embeddings from mpmath polynomial roots at high precision, and units from
direct search.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from sympy.functions.combinatorial.numbers import kronecker_symbol

mpmath.mp.dps = 50


def power_sums(minpoly: list[int], upto: int) -> list[Fraction]:
    """``p_k = sum of k-th powers of the roots`` via Newton's identities."""
    n = len(minpoly) - 1
    # monic x^n + c_{n-1} x^{n-1} + ... with e_k = (-1)^k c_{n-k}
    e = [Fraction(1)] + [Fraction((-1) ** k * minpoly[n - k]) for k in range(1, n + 1)]
    p = [Fraction(n)]
    for k in range(1, upto + 1):
        s = sum(((-1) ** (i - 1) * e[i] * p[k - i] for i in range(1, min(k - 1, n) + 1)),
                Fraction(0))
        if k <= n:
            s += (-1) ** (k - 1) * k * e[k]
        p.append(s)
    return p


def trace_gram(minpoly: list[int], basis: list[list[Fraction]]) -> list[list[Fraction]]:
    """``Tr(w_i w_j)`` for basis rows given in the power basis."""
    n = len(minpoly) - 1
    p = power_sums(minpoly, 2 * n)
    g = []
    for bi in basis:
        row = []
        for bj in basis:
            row.append(sum(Fraction(bi[k]) * Fraction(bj[l]) * p[k + l]
                           for k in range(n) for l in range(n)))
        g.append(row)
    return g


def det(m) -> Fraction:
    m = [[Fraction(v) for v in r] for r in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(n))


def mp_roots(minpoly: list[int]) -> list:
    roots = mpmath.polyroots(list(reversed(minpoly)), maxsteps=200, extraprec=200)
    return sorted((mpmath.re(r) for r in roots))


def mp_embed(minpoly, basis_power, coords) -> list:
    """High-precision embeddings of an element given by integral-basis coordinates."""
    roots = mp_roots(minpoly)
    out = []
    for r in roots:
        v = mpmath.mpf(0)
        for c, row in zip(coords, basis_power):
            v += mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * \
                sum(mpmath.mpf(Fraction(b).numerator) / Fraction(b).denominator * r ** k
                    for k, b in enumerate(row))
        out.append(v)
    return out


def mp_mu(minpoly, basis_power, tau_x, tau_y, alpha, beta, q_norm) -> float:
    """``N(q)^2 N(Im tau) / |N(alpha - beta tau)|^2`` at 50 digits."""
    ae = mp_embed(minpoly, basis_power, alpha)
    be = mp_embed(minpoly, basis_power, beta)
    den = mpmath.mpf(1)
    ny = mpmath.mpf(1)
    for a, b, x, y in zip(ae, be, tau_x, tau_y):
        z = mpmath.mpc(x, y)
        den *= abs(a - b * z) ** 2
        ny *= y
    q = Fraction(q_norm)
    qn = mpmath.mpf(q.numerator) / q.denominator
    return float(qn ** 2 * ny / den)


def quadratic_unit_search(d_free: int, limit: int = 10 ** 5):
    """Smallest unit ``> 1`` of the maximal order of ``Q(sqrt d)`` by search over ``y``.

    Returns ``(x2, y2)`` with the unit equal to ``(x2 + y2 sqrt d) / 2``.
    """
    disc = d_free if d_free % 4 == 1 else 4 * d_free
    for y in range(1, limit):
        for sign in (-4, 4):
            x2 = disc * y * y + sign
            if x2 > 0:
                x = math.isqrt(x2)
                if x * x == x2:
                    # (x + y sqrt(disc)) / 2
                    if d_free % 4 == 1:
                        return x, y
                    return x, 2 * y
    raise RuntimeError("no unit found")


def regulator_bruteforce_quadratic(d_free: int) -> float:
    x2, y2 = quadratic_unit_search(d_free)
    return math.log((x2 + y2 * math.sqrt(d_free)) / 2)


def mp_act(minpoly, basis_power, entries, tau_x, tau_y):
    """``(a z + b) / (c z + d)`` per embedding at 50 digits; returns ``(x, y)`` lists."""
    emb = [mp_embed(minpoly, basis_power, e) for e in entries]
    xs, ys = [], []
    for j, (x, y) in enumerate(zip(tau_x, tau_y)):
        z = mpmath.mpc(x, y)
        w = (emb[0][j] * z + emb[1][j]) / (emb[2][j] * z + emb[3][j])
        xs.append(w.real)
        ys.append(w.imag)
    return xs, ys


def quadratic_disc(d_free: int) -> int:
    return d_free if d_free % 4 == 1 else 4 * d_free


def totally_positive_unit_log(d_free: int) -> float:
    """``log`` of the generator ``> 1`` of the totally positive units."""
    x2, y2 = quadratic_unit_search(d_free)
    # norm of (x2 + y2 sqrt d)/2 is (x2^2 - d y2^2)/4
    norm = (x2 * x2 - d_free * y2 * y2) // 4
    eps = math.log((x2 + y2 * math.sqrt(d_free)) / 2)
    return eps if norm == 1 else 2 * eps


def quadratic_ball_volume(d_free: int, r: float, norm_a: float = 1.0) -> float:
    """``int dm`` over ``{N(y) > 1/r^2}`` modulo translations and totally positive units.

    With ``p = log y1 + log y2`` and ``w = log y1 - log y2`` the measure is
    ``e^{-p} dp dw / 2`` and ``w`` has period ``2 log eps_+``; the translation
    lattice ``a^{-1}`` has covolume ``sqrt(D) / N(a)``.
    """
    return math.sqrt(quadratic_disc(d_free)) / norm_a * r * r * totally_positive_unit_log(d_free)


def quadratic_total_volume(d_free: int) -> float:
    """``2 D^{3/2} zeta_K(2) / pi^2`` with ``zeta_K(2) = zeta(2) L(2, chi_D)``."""
    disc = quadratic_disc(d_free)
    chi = [int(kronecker_symbol(disc, m)) for m in range(disc)]
    lval = mpmath.dirichlet(2, chi)
    return float(2 * mpmath.mpf(disc) ** 1.5 * mpmath.zeta(2) * lval / mpmath.pi ** 2)
