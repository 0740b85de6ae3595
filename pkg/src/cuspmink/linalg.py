"""Exact and floating lattice linear algebra.

Exact routines work on Python ``int`` / ``fractions.Fraction`` lists; the
floating routines (LLL, Fincke-Pohst) work on numpy arrays and track the
integral change of basis so that enumerated points can be mapped back to
exact coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

Matrix = list[list]


# --------------------------------------------------------------------------
# exact rational matrices
# --------------------------------------------------------------------------

def frac_det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(v) for v in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] / p
                row_r, row_c = a[r], a[c]
                for k in range(c, n):
                    row_r[k] -= f * row_c[k]
    return det


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            ai = a[i]
            aik = ai[k]
            ak = a[k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * akk - aik * ak[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def frac_solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve ``m x = b`` exactly; ``m`` must be square and invertible."""
    n = len(m)
    a = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        row_c = a[c]
        for k in range(c, n + 1):
            row_c[k] /= p
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                row_r = a[r]
                for k in range(c, n + 1):
                    row_r[k] -= f * row_c[k]
    return [a[i][n] for i in range(n)]


def frac_inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    cols = [frac_solve(m, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def common_denominator(values) -> int:
    d = 1
    for v in values:
        d = d * Fraction(v).denominator // math.gcd(d, Fraction(v).denominator)
    return d


# --------------------------------------------------------------------------
# Hermite normal form (column style, upper triangular)
# --------------------------------------------------------------------------

def hnf_columns(columns: Sequence[Sequence[int]], n: int,
                track: bool = False):
    """Column Hermite normal form of the Z-span of ``columns`` in Z^n.

    Returns ``H`` as a list of ``n`` columns forming an upper triangular
    basis with positive diagonal and ``0 <= H[i][j] < H[i][i]`` for
    ``j > i``. With ``track=True`` also returns ``U`` (one coefficient list
    per output column) such that ``H[k] = sum_i U[k][i] * columns[i]``.
    The span must have full rank ``n``.
    """
    cols = [list(map(int, c)) for c in columns]
    m = len(cols)
    trans = [[1 if i == k else 0 for i in range(m)] for k in range(m)] if track else None
    active = [k for k in range(m) if any(cols[k])]
    pivots: list[int | None] = [None] * n

    def combine(dst, src, q):
        # dst -= q * src
        cd, cs = cols[dst], cols[src]
        for r in range(n):
            cd[r] -= q * cs[r]
        if track:
            td, ts = trans[dst], trans[src]
            for r in range(m):
                td[r] -= q * ts[r]

    for row in range(n - 1, -1, -1):
        nz = [k for k in active if cols[k][row] != 0]
        while len(nz) > 1:
            nz.sort(key=lambda k: abs(cols[k][row]))
            p = nz[0]
            for k in nz[1:]:
                q = cols[k][row] // cols[p][row]
                combine(k, p, q)
            nz = [k for k in nz if cols[k][row] != 0]
        if not nz:
            raise ValueError("lattice is not of full rank")
        p = nz[0]
        if cols[p][row] < 0:
            cols[p] = [-v for v in cols[p]]
            if track:
                trans[p] = [-v for v in trans[p]]
        pivots[row] = p
        active.remove(p)

    for i in range(n - 1, -1, -1):
        pi = pivots[i]
        d = cols[pi][i]
        for j in range(i + 1, n):
            pj = pivots[j]
            q = cols[pj][i] // d
            if q:
                combine(pj, pi, q)

    h = [cols[pivots[i]] for i in range(n)]
    if track:
        return h, [trans[pivots[i]] for i in range(n)]
    return h


def triangular_coords(hcols: Sequence[Sequence[int]], v: Sequence) -> list[Fraction]:
    """Coordinates of ``v`` in the basis given by upper triangular columns."""
    n = len(hcols)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(v[i]) - sum(hcols[j][i] * x[j] for j in range(i + 1, n))
        x[i] = s / hcols[i][i]
    return x


# --------------------------------------------------------------------------
# floating lattice reduction and enumeration
# --------------------------------------------------------------------------

def lll_reduce(basis: np.ndarray, delta: float = 0.99):
    """LLL-reduce the columns of ``basis``.

    Returns ``(reduced, U)`` with ``reduced = basis @ U`` and ``U`` an
    integer unimodular matrix (numpy int64 object-free array).
    """
    b = np.array(basis, dtype=float, copy=True)
    m = b.shape[1]
    u = np.eye(m, dtype=np.int64)

    def gso(b):
        bs = np.zeros_like(b)
        mu = np.zeros((m, m))
        norms = np.zeros(m)
        for i in range(m):
            v = b[:, i].copy()
            for j in range(i):
                mu[i, j] = b[:, i] @ bs[:, j] / norms[j]
                v -= mu[i, j] * bs[:, j]
            bs[:, i] = v
            norms[i] = v @ v
        return mu, norms

    mu, norms = gso(b)
    k = 1
    guard = 0
    while k < m:
        guard += 1
        if guard > 10000:
            break
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[:, k] -= q * b[:, j]
                u[:, k] -= q * u[:, j]
                mu[k, :j + 1] -= q * np.append(mu[j, :j], 1.0)
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            u[:, [k - 1, k]] = u[:, [k, k - 1]]
            mu, norms = gso(b)
            k = max(k - 1, 1)
    return b, u


class EnumerationBudget(Exception):
    pass


def fincke_pohst(gram: np.ndarray, radius: Callable[[], float],
                 visit: Callable[[tuple[int, ...], float], None],
                 max_nodes: int = 200_000) -> int:
    """Enumerate nonzero integer ``x`` with ``x^T gram x <= radius()``.

    Only one of each pair ``{x, -x}`` is visited (last nonzero coordinate
    positive). ``radius`` is re-read at every node so callers may shrink
    it while ``visit`` runs. Returns the number of nodes expanded; raises
    :class:`EnumerationBudget` when ``max_nodes`` is exceeded.
    """
    m = gram.shape[0]
    r = np.linalg.cholesky(gram).T  # gram = r^T r, r upper triangular
    d = [float(r[i, i] ** 2) for i in range(m)]
    mu = [[float(r[i, j] / r[i, i]) for j in range(m)] for i in range(m)]
    x = [0] * m
    nodes = 0

    def rec(i: int, partial: float, top_zero: bool):
        nonlocal nodes
        c = -sum(mu[i][j] * x[j] for j in range(i + 1, m))
        rem = radius() - partial
        if rem < 0:
            return
        w = math.sqrt(rem / d[i])
        lo = math.ceil(c - w)
        hi = math.floor(c + w)
        if top_zero:
            lo = max(lo, 0)
        for v in range(lo, hi + 1):
            nodes += 1
            if nodes > max_nodes:
                raise EnumerationBudget
            q = partial + d[i] * (v - c) ** 2
            if q > radius():
                if v > c:
                    break
                continue
            x[i] = v
            if i == 0:
                if not (top_zero and v == 0):
                    visit(tuple(x), q)
            else:
                rec(i - 1, q, top_zero and v == 0)
        x[i] = 0

    rec(m - 1, 0.0, True)
    return nodes
