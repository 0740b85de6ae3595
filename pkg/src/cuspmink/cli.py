"""Command line interface: ``cuspmink <command> [options]``.

Every command prints one JSON document (``--json``, the default) that embeds
a run manifest; ``--csv PATH`` additionally writes plot-ready rows.

Exit codes: 0 success, 1 invariant violation, 2 usage error, 3 soft failure
(uncertified results present).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import dataclass, asdict
from fractions import Fraction

import numpy as np

from . import __version__
from .cusp_geometry import Cusp, HPoint, mu, nearest_cusps
from .errors import ConfigError, CuspminkError
from .field_core import DEFAULT_PRECISION, NumberField, embed_real, parse_field_config
from .ideal_lattice import (FractionalIdeal, codifferent, ideal_from_generators, prime_split)
from .minkowski_verify import hermite_search, verify_minkowski
from .modular_action import random_reduced_point
from .volume_integrals import (cusp_ball_volume, domain_sample, integral_mu1_t,
                               lower_bound_nonincreasing, partial_volume, theorem_bounds,
                               worker_count)

SCHEMA = "cuspmink/1"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_SOFT = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    config_sha256: str
    command: str
    parameters: dict
    seed: int | None
    version: str
    timestamp: str


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp so reruns are byte-identical
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        t = _dt.datetime.now(tz=_dt.timezone.utc)
    return t.isoformat(timespec="seconds")


def _manifest(field: NumberField, args, params: dict) -> dict:
    return asdict(RunManifest(field.config_hash, args.command, params,
                              getattr(args, "seed", None), __version__, _timestamp()))


# --------------------------------------------------------------------------
# parsing helpers
# --------------------------------------------------------------------------

def parse_ideal(field: NumberField, text: str | None) -> FractionalIdeal:
    """``O``, ``dinv`` (inverse different), an integer, ``d; rows`` or a JSON generator list."""
    if text is None or text.strip() in ("O", "1", "OK"):
        return FractionalIdeal.unit(field)
    s = text.strip()
    if s in ("dinv", "codifferent"):
        return codifferent(field)
    if ";" in s:
        return FractionalIdeal.parse(field, s)
    try:
        data = json.loads(s)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse ideal {text!r}") from exc
    if isinstance(data, (int, str)):
        data = [data]
    gens = [field(Fraction(g)) if not isinstance(g, list) else field.element(g) for g in data]
    return ideal_from_generators(gens)


def parse_cusp(field: NumberField, text: str) -> Cusp:
    s = text.strip()
    if s in ("inf", "oo"):
        return Cusp.infinity(field)
    if s == "0":
        return Cusp.zero(field)
    data = json.loads(s)
    return Cusp(field.element(data[0]), field.element(data[1]))


def _load_field(args) -> NumberField:
    if not args.config:
        raise UsageError("--config is required")
    return parse_field_config(args.config)


def _c_upper(args, field: NumberField) -> float:
    if args.c_upper is None:
        return field.c_upper_default()
    if args.c_upper < 1:
        raise UsageError("--c-upper must be at least 1")
    return float(args.c_upper)


def _frac_list(v) -> list[str]:
    return [str(x) for x in v]


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_field(args) -> tuple[dict, int]:
    field = _load_field(args)
    dk = codifferent(field)
    units = []
    for u in field.units:
        units.append({"coords": _frac_list(u.coords),
                      "signs": [int(np.sign(v)) for v in u.embeddings()],
                      "norm": str(u.norm())})
    roots = embed_real(field.theta, args.precision_bits)
    report = {
        "name": field.name, "degree": field.degree, "minpoly": list(field.minpoly),
        "discriminant": field.discriminant,
        "integral_basis": [_frac_list(r) for r in field.basis_power],
        "roots": [{"mid": str(float(r.mid)), "rad": float(r.rad)} for r in roots],
        "units": units, "unit_sign_index": field.unit_sign_index(),
        "regulator": field.regulator(),
        "codifferent": dk.serialize(),
        "norm_inverse_codifferent": str(dk.inverse().norm()),
        "norm_check": dk.inverse().norm() == field.discriminant,
    }
    return {"field": report}, EXIT_OK if report["norm_check"] else EXIT_VIOLATION


def cmd_ideal(args) -> tuple[dict, int]:
    field = _load_field(args)
    op = args.op
    a = parse_ideal(field, args.ideal)
    out: dict = {"op": op, "a": a.serialize()}
    if op == "norm":
        out["norm"] = str(a.norm())
    elif op == "mul":
        b = parse_ideal(field, args.other)
        prod = a * b
        out.update(b=b.serialize(), result=prod.serialize(), norm=str(prod.norm()),
                   multiplicative=prod.norm() == a.norm() * b.norm())
    elif op == "inv":
        inv = a.inverse()
        out.update(result=inv.serialize(), norm=str(inv.norm()),
                   check=(a * inv) == FractionalIdeal.unit(field))
    elif op == "codifferent":
        dk = codifferent(field)
        out.update(result=dk.serialize(), norm=str(dk.norm()))
    elif op == "factor":
        if args.prime is None:
            raise UsageError("ideal factor needs --prime")
        out["factors"] = [{"p": f.p, "e": f.e, "f": f.f, "generator": _frac_list(f.generator.coords),
                           "ideal": f.ideal.serialize()} for f in prime_split(args.prime, field)]
    ok = out.get("multiplicative", True) and out.get("check", True)
    return out, EXIT_OK if ok else EXIT_VIOLATION


def cmd_mu(args) -> tuple[dict, int]:
    field = _load_field(args)
    a = parse_ideal(field, args.ideal)
    if not args.tau:
        raise UsageError("--tau is required")
    tau = HPoint.parse(args.tau)
    if tau.n != field.degree:
        raise UsageError(f"--tau needs {field.degree} coordinates")
    if args.cusp:
        c = parse_cusp(field, args.cusp)
        v = mu(tau, c, a)
        return {"tau": str(tau), "cusp": c.as_dict(), "mu": v, "distance": v ** -0.5}, EXIT_OK
    cu = _c_upper(args, field)
    reps = nearest_cusps(tau, a, 2, c_upper=cu)
    rep = verify_minkowski(tau, a, cu)
    out = {"tau": str(tau), "nearest": [r.as_dict() for r in reps], "minkowski": rep.as_dict()}
    if not rep.certified:
        return out, EXIT_SOFT
    return out, EXIT_OK if rep.pass_ else EXIT_VIOLATION


def cmd_verify(args) -> tuple[dict, int]:
    field = _load_field(args)
    a = parse_ideal(field, args.ideal)
    cu = _c_upper(args, field)
    rng = np.random.default_rng(args.seed)
    reports = []
    for _ in range(args.samples):
        tau = random_reduced_point(a, rng)
        reports.append(verify_minkowski(tau, a, cu))
    cert = [r for r in reports if r.certified]
    fails = [r for r in cert if not r.pass_]
    summary = {
        "samples": len(reports), "certified": len(cert), "failures": len(fails),
        "min_margin_upper": min((r.margin_upper for r in cert), default=None),
        "min_margin_lower": min((r.margin_lower for r in cert), default=None),
        "max_product_scaled": max((r.product_scaled for r in cert), default=None),
        "min_product_scaled": min((r.product_scaled for r in cert), default=None),
        "lower": cu ** (-4 * field.degree), "upper": 1.0,
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "mu1", "mu2", "product_scaled", "certified", "pass"])
            for r in reports:
                w.writerow([" ".join(map(repr, r.tau.x)), " ".join(map(repr, r.tau.y)),
                            repr(r.mu1), repr(r.mu2), repr(r.product_scaled),
                            int(r.certified), int(r.pass_)])
    out = {"summary": summary}
    if args.records:
        out["records"] = [r.as_dict() for r in reports]
    if fails:
        return out, EXIT_VIOLATION
    return out, EXIT_SOFT if len(cert) < len(reports) else EXIT_OK


def cmd_estimate_c(args) -> tuple[dict, int]:
    field = _load_field(args)
    a = parse_ideal(field, args.ideal)
    est = hermite_search(field, a, args.samples, args.steps, args.seed, _c_upper(args, field))
    cap = field.c_upper_default()
    ok = 1.0 <= est.value <= cap + 1e-6
    return {"lower_estimate": est.value, "tau": str(est.tau), "chart": est.chart,
            "evaluations": est.evaluations, "starts": est.starts, "c_upper": cap,
            "in_range": ok}, EXIT_OK if ok else EXIT_VIOLATION


def cmd_integrate(args) -> tuple[dict, int]:
    field = _load_field(args)
    a = parse_ideal(field, args.ideal)
    t = args.t
    if not 0 <= t < 1:
        raise UsageError("--t must lie in [0, 1)")
    cu = _c_upper(args, field)
    warnings = []
    if t >= 0.95:
        warnings.append("t close to 1: the integrand variance grows like 1/(1-t)")
    sample = domain_sample(a, args.samples, args.seed, c_upper=cu, threads=args.threads)
    est = integral_mu1_t(a, t, args.samples, args.seed, sample=sample)
    lower, upper = theorem_bounds(a, t, cu)
    mono = lower_bound_nonincreasing(a, t, cu)
    se = est.stderr
    verdict = (est.value <= upper + 3 * se) and (not mono or est.value >= lower - 3 * se)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["chart", "t", "member", "mu1", "weight"])
            for j, reg in enumerate(sample.regions):
                wj = sample.band_volume[j] / max(sample.counts[j], 1)
                for tt, m, v in zip(sample.t[j], sample.member[j], sample.mu1[j]):
                    w.writerow([j, repr(float(tt)), int(m), repr(float(v)), repr(wj if m else 0.0)])
    out = {"estimate": est.as_dict(), "bounds": {"lower": lower, "upper": upper, "c": cu},
           "lower_bound_nonincreasing": mono, "verdict": "pass" if verdict else "fail",
           "warnings": warnings}
    if not verdict:
        return out, EXIT_VIOLATION
    frac = sample.uncertified / max(sample.samples, 1)
    return out, EXIT_SOFT if frac >= 1e-3 else EXIT_OK


def cmd_volume(args) -> tuple[dict, int]:
    field = _load_field(args)
    a = parse_ideal(field, args.ideal)
    r = args.r if args.r is not None else math.sqrt(float(a.norm()))
    out = {"r": r, "cusp_ball_volume": cusp_ball_volume(a, r, field),
           "scaling_check": cusp_ball_volume(a, 2 * r, field) / cusp_ball_volume(a, r, field)}
    if args.x:
        cu = _c_upper(args, field)
        sample = domain_sample(a, args.samples, args.seed, c_upper=cu, threads=args.threads)
        rows = []
        for x in args.x:
            g = partial_volume(x, a, cu, args.samples, args.seed, sample=sample)
            rows.append({"x": x, **g.as_dict()})
        out["partial_volume"] = rows
        out["total_volume"] = sample.volume().as_dict()
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["x", "g", "stderr"])
                for row in rows:
                    w.writerow([repr(row["x"]), repr(row["value"]), repr(row["stderr"])])
    return out, EXIT_OK


COMMANDS = {"field": cmd_field, "ideal": cmd_ideal, "mu": cmd_mu, "verify": cmd_verify,
            "estimate-c": cmd_estimate_c, "integrate": cmd_integrate, "volume": cmd_volume}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="field config (JSON path or builtin name)")
    common.add_argument("--ideal", help="O, dinv, integer, 'd; rows' or JSON generator list")
    common.add_argument("--tau", help="point of H^n as 'x1:y1,x2:y2,...'")
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--precision-bits", type=int,
                        default=int(os.environ.get("CUSPMINK_PRECISION", DEFAULT_PRECISION)))
    common.add_argument("--c-upper", type=float, default=None)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True, help="JSON output (default)")
    fmt.add_argument("--csv", metavar="PATH", help="also write plot-ready CSV rows to PATH")

    p = argparse.ArgumentParser(prog="cuspmink", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("field", parents=[common], help="inspect a field config")
    pi = sub.add_parser("ideal", parents=[common], help="ideal arithmetic")
    pi.add_argument("op", choices=["norm", "mul", "inv", "codifferent", "factor"])
    pi.add_argument("--other", help="second ideal for mul")
    pi.add_argument("--prime", type=int)
    pm = sub.add_parser("mu", parents=[common], help="a-distance / nearest cusps")
    pm.add_argument("--cusp", help="inf, 0 or JSON [[alpha coords], [beta coords]]")
    pv = sub.add_parser("verify", parents=[common], help="Minkowski bound campaign")
    pv.add_argument("--records", action="store_true", help="include every report")
    pe = sub.add_parser("estimate-c", parents=[common], help="lower estimate of c_II")
    pe.add_argument("--steps", type=int, default=200)
    pn = sub.add_parser("integrate", parents=[common], help="integral of mu_1^t")
    pn.add_argument("--t", type=float, required=True)
    pw = sub.add_parser("volume", parents=[common], help="cusp-ball and partial volumes")
    pw.add_argument("--r", type=float)
    pw.add_argument("--x", type=float, nargs="*")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = worker_count()
    if args.precision_bits < 53:
        print("error: --precision-bits must be at least 53", file=sys.stderr)
        return EXIT_USAGE
    try:
        body, code = COMMANDS[args.command](args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CuspminkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    params = {k: v for k, v in vars(args).items() if k not in ("command", "json", "threads")}
    field = parse_field_config(args.config)
    doc = {"schema": SCHEMA, "manifest": _manifest(field, args, params), **body}
    print(json.dumps(doc, indent=2, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
