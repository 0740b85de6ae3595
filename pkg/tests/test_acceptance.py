"""Acceptance criteria 1-10, one test each, printing one verdict line per criterion."""

import math
import time

import numpy as np
import pytest

from cuspmink.cusp_geometry import (Cusp, HPoint, adelic_height, brute_force_nearest, iota, mu,
                                    nearest_cusps)
from cuspmink.errors import IndexDivisorPrime
from cuspmink.field_core import BUILTIN_FIELDS, builtin_field, is_totally_positive
from cuspmink.ideal_lattice import (FractionalIdeal, codifferent, ideal_inverse, ideal_mul,
                                    local_norm_product, two_generator_norm)
from cuspmink.minkowski_verify import estimate_hermite_lower, verify_minkowski
from cuspmink.modular_action import act, in_group, random_group_element, random_reduced_point
from cuspmink.volume_integrals import (ball_volume_mc, cusp_ball_volume, domain_sample,
                                       lower_bound_nonincreasing, partial_volume, theorem_bounds)

from conftest import QUADRATIC, random_element, random_ideal, standard_ideals

import oracles


def report(capsys, k: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
    assert ok, detail


def test_criterion_01_ideal_exactness(capsys):
    start = time.perf_counter()
    bad = []
    count = 0
    for i, name in enumerate(BUILTIN_FIELDS):
        field = builtin_field(name)
        rng = np.random.default_rng(100 + i)
        o = FractionalIdeal.unit(field)
        for _ in range(40):
            a, b = random_ideal(field, rng), random_ideal(field, rng)
            count += 1
            ab = ideal_mul(a, b)
            if ab.norm() != a.norm() * b.norm():
                bad.append((name, "norm", a, b))
            if ideal_mul(a, ideal_inverse(a)) != o:
                bad.append((name, "inverse", a))
            # canonicity: the same ideal from a redundant, permuted generating set
            gens = list(reversed(a.basis)) + [a.basis[0] + a.basis[-1]]
            again = FractionalIdeal.from_lattice(field, [g.coords for g in gens])
            if again.hnf != a.hnf or again.denom != a.denom or \
                    FractionalIdeal.parse(field, a.serialize()) != a:
                bad.append((name, "hnf", a))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    report(capsys, 1, ok, f"{count} ideals over {len(BUILTIN_FIELDS)} fields, "
           f"{len(bad)} failures, {elapsed:.1f}s (limit 30s)")


def test_criterion_02_codifferent_norm(capsys):
    expected = {"qsqrt5": 5, "qsqrt2": 8, "qsqrt3": 12, "qsqrt10": 40, "cubic49": 49}
    rows = []
    ok = True
    for name, disc in expected.items():
        field = builtin_field(name)
        gram = oracles.trace_gram(list(field.minpoly), [list(r) for r in field.basis_power])
        ref = oracles.det(gram)
        got = 1 / codifferent(field).norm()
        ok &= got == ref == disc == field.discriminant
        rows.append(f"{name}={got}")
    report(capsys, 2, ok, "N(d_K) = Delta_K: " + ", ".join(rows))


def test_criterion_03_local_norm(capsys):
    start = time.perf_counter()
    bad = skipped = total = 0
    for i, name in enumerate(BUILTIN_FIELDS):
        field = builtin_field(name)
        rng = np.random.default_rng(300 + i)
        done = 0
        while done < 100:
            alpha, beta = random_element(field, rng, 8), random_element(field, rng, 8)
            a = random_ideal(field, rng, 5, 3)
            try:
                local = local_norm_product(alpha, beta, a)
            except IndexDivisorPrime:
                skipped += 1
                continue
            done += 1
            total += 1
            bad += local != two_generator_norm(alpha, beta, a)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    report(capsys, 3, ok, f"{total} triples, {bad} mismatches, {skipped} skipped, "
           f"{elapsed:.1f}s (limit 60s)")


def test_criterion_04_height_identity(capsys):
    rng = np.random.default_rng(400)
    worst = 0.0
    for i in range(200):
        field = builtin_field(BUILTIN_FIELDS[i % len(BUILTIN_FIELDS)])
        a = standard_ideals(field)[(i // len(BUILTIN_FIELDS)) % 3]
        tau = random_reduced_point(a, rng)
        c = Cusp(random_element(field, rng, 6), random_element(field, rng, 6))
        n = field.degree
        v = iota(c)
        h = adelic_height(tau, a, (v.alpha, v.beta))
        expect = float(a.norm()) ** (-1 / n) * mu(tau, c, a) ** (-1 / (2 * n))
        worst = max(worst, abs(h - expect) / expect)
    report(capsys, 4, worst <= 1e-10, f"200 triples, max relative error {worst:.2e} (limit 1e-10)")


def test_criterion_05_minkowski_sandwich(capsys):
    start = time.perf_counter()
    upper_fail = lower_fail = uncertified = total = 0
    worst_upper = 0.0
    worst_lower = math.inf
    for i, name in enumerate(BUILTIN_FIELDS):
        field = builtin_field(name)
        n = field.degree
        c = field.c_upper_default()
        rng = np.random.default_rng(500 + i)
        for a in standard_ideals(field):
            for _ in range(1000):
                rep = verify_minkowski(random_reduced_point(a, rng), a)
                total += 1
                if not rep.certified:
                    uncertified += 1
                    continue
                worst_upper = max(worst_upper, rep.product_scaled)
                worst_lower = min(worst_lower, rep.product_scaled * c ** (4 * n))
                upper_fail += rep.product_scaled > 1 + 1e-9
                lower_fail += rep.product_scaled < c ** (-4 * n) - 1e-9
    elapsed = time.perf_counter() - start
    frac = 1 - uncertified / total
    ok = upper_fail == 0 and lower_fail == 0 and frac >= 0.999 and elapsed < 600
    report(capsys, 5, ok, f"{total} samples, upper violations {upper_fail}, lower violations "
           f"{lower_fail}, max N(a)^2 mu1 mu2 = {worst_upper:.6f}, min ratio to lower bound "
           f"{worst_lower:.3f}, certified {100 * frac:.2f}%, {elapsed:.0f}s (limit 600s)")


def test_criterion_06_group_invariance(capsys):
    worst_g = worst_l = 0.0
    not_in_group = 0
    for i, name in enumerate(BUILTIN_FIELDS):
        field = builtin_field(name)
        rng = np.random.default_rng(600 + i)
        o = FractionalIdeal.unit(field)
        for j in range(50):
            a = standard_ideals(field)[j % 3]
            g = random_group_element(a, rng)
            not_in_group += not in_group(g, a)
            tau = random_reduced_point(a, rng)
            m0 = nearest_cusps(tau, a, k=1)[0].mu
            m1 = nearest_cusps(act(g, tau), a, k=1)[0].mu
            worst_g = max(worst_g, abs(m1 - m0) / m0)
        for j in range(50):
            x = random_element(field, rng, 3)
            lam = x * x
            if rng.random() < 0.5 and field.totally_positive_units:
                lam = lam * field.totally_positive_units[0]
            assert is_totally_positive(lam)
            la = o.scale(lam)
            tau = random_reduced_point(la, rng)
            e = lam.embeddings()
            lam_tau = HPoint(tuple(tau.xa * e), tuple(tau.ya * e))
            left = nearest_cusps(tau, la)
            right = nearest_cusps(lam_tau, o)
            nl = float(lam.norm())
            for r_left, r_right in zip(left[:2], right[:2]):
                worst_l = max(worst_l, abs(r_left.mu - r_right.mu / nl) / r_left.mu)
    ok = not_in_group == 0 and worst_g <= 1e-8 and worst_l <= 1e-8
    report(capsys, 6, ok, f"gamma invariance max rel err {worst_g:.2e}, narrow covariance max "
           f"rel err {worst_l:.2e} (limit 1e-8), {not_in_group} matrices outside the group")


def test_criterion_07_oracle_equivalence(capsys):
    mismatches = 0
    worst = 0.0
    total = 0
    for i, name in enumerate(QUADRATIC):
        field = builtin_field(name)
        rng = np.random.default_rng(700 + i)
        for j in range(50):
            a = standard_ideals(field)[j % 3]
            tau = random_reduced_point(a, rng)
            fast = nearest_cusps(tau, a, k=2)
            slow = brute_force_nearest(tau, a, 6)
            total += 1
            for f, s in zip(fast[:2], slow[:2]):
                err = abs(f.mu - s.mu) / s.mu
                worst = max(worst, err)
                if err > 1e-9:
                    mismatches += 1
            if not fast[0].tied and fast[0].cusp != slow[0].cusp:
                mismatches += 1
    report(capsys, 7, mismatches == 0, f"{total} points, {mismatches} mismatches with the H=6 "
           f"oracle, max rel diff {worst:.2e} (limit 1e-9)")


def test_criterion_08_ball_volume(capsys):
    worst_sigma = 0.0
    scaling_ok = True
    for i, name in enumerate(BUILTIN_FIELDS):
        field = builtin_field(name)
        for j, a in enumerate(standard_ideals(field)):
            root = math.sqrt(float(a.norm()))
            for k, f in enumerate((0.3, 0.6, 1.0)):
                r = f * root
                est = ball_volume_mc(a, r, 100_000, seed=800 + 10 * i + 3 * j + k)
                worst_sigma = max(worst_sigma, abs(est.value - cusp_ball_volume(a, r)) / est.stderr)
            g1 = partial_volume(0.3 * root, a).value
            g2 = partial_volume(0.6 * root, a).value
            scaling_ok &= g2 == 4 * g1
    report(capsys, 8, worst_sigma <= 3 and scaling_ok,
           f"MC vs closed form worst deviation {worst_sigma:.2f} sigma (limit 3), "
           f"g(2r) = 4 g(r) exact: {scaling_ok}")


def test_criterion_09_integral_sandwich(capsys):
    start = time.perf_counter()
    field = builtin_field("qsqrt5")
    a = FractionalIdeal.unit(field)
    c = field.c_upper_default()
    sample = domain_sample(a, 100_000, seed=900)
    rows = []
    ok = True
    for t in (0.0, 0.25, 0.5, 0.75):
        est = sample.normalized_integral(t)
        lo, hi = theorem_bounds(a, t, c)
        scan = lower_bound_nonincreasing(a, t, c)
        inside = lo - 3 * est.stderr <= est.value <= hi + 3 * est.stderr
        if t == 0:
            inside &= abs(est.value - 1.0) <= 1e-12
        ok &= scan and inside
        rows.append(f"t={t}: {est.value:.4f}+-{est.stderr:.4f} in [{lo:.4f}, {hi:.4f}]")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1200
    report(capsys, 9, ok, "; ".join(rows) + f"; {elapsed:.0f}s (limit 1200s)")


def test_criterion_10_hermite(capsys):
    rows = []
    ok = True
    for name in BUILTIN_FIELDS:
        field = builtin_field(name)
        c = field.c_upper_default()
        vals = [estimate_hermite_lower(field, samples=s, optimizer_steps=40, seed=10)
                for s in (8, 32, 64)]
        ok &= all(1 <= v <= c + 1e-6 for v in vals) and vals == sorted(vals)
        rows.append(f"{name} {vals[-1]:.4f} <= {c:.4f}")
    report(capsys, 10, ok, "monotone and in range: " + ", ".join(rows))
