"""Command line front end.  Every command prints one JSON report on stdout:
{"command", "ok", "details", "elapsedMillis"}.  Exit 0 when ok, 1 on a
mathematical violation, 2 on bad input."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import classifier, poissonspace, shiftedcat, webcalc
from .qscalar import ScalarParseError, ZeroDenominator, q_binomial, serialize_scalar
from .rootdata import RootSystem, ToricPoint, UnsupportedType, WeylElement


class InputError(Exception):
    pass


class Violation(Exception):
    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message)
        self.details = details or {}


def _threads() -> int:
    raw = os.environ.get("QFLAG_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"QFLAG_THREADS must be an integer, got {raw!r}") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _vector(text: str) -> tuple:
    try:
        return tuple(Fraction(c.strip()) for c in text.split(",") if c.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse vector {text!r}") from exc


def _load_chi(path: str) -> ToricPoint:
    data = _load_json(path)
    try:
        return ToricPoint.from_json(data)
    except (KeyError, TypeError, ValueError, ScalarParseError) as exc:
        raise InputError(f"{path} is not a toric point: {exc}") from exc


# commands


def cmd_poisson_check(args) -> tuple[bool, dict]:
    data = _load_json(args.phi)
    try:
        rs = RootSystem(args.type, args.rank)
        phi = poissonspace.PhiParam.from_json(data, rs)
    except (KeyError, TypeError, ValueError, ScalarParseError, UnsupportedType) as exc:
        raise InputError(f"bad parameter file: {exc}") from exc
    try:
        report = poissonspace.check_membership(phi, args.space)
    except poissonspace.ModeMismatch as exc:
        raise Violation(str(exc)) from exc
    return report["ok"], report


def cmd_poisson_normalize(args) -> tuple[bool, dict]:
    data = _load_json(args.phi)
    try:
        phi = poissonspace.PhiParam.from_json(data)
    except (KeyError, TypeError, ValueError, ScalarParseError, UnsupportedType) as exc:
        raise InputError(f"bad parameter file: {exc}") from exc
    try:
        w, new, audit = poissonspace.normalize_quotient(phi)
    except poissonspace.NotQuot as exc:
        raise Violation(str(exc)) from exc
    ok = audit["nonnegative"] and audit["componentsOk"]
    return ok, {"weyl": list(w.word), "phi": new.to_json(), "audit": audit}


def cmd_toric_validate(args) -> tuple[bool, dict]:
    chi = _load_chi(args.chi)
    report = chi.validate(require_regular=args.regular)
    return report["ok"], report


def cmd_webs_verify(args) -> tuple[bool, dict]:
    if args.relation and args.relation not in webcalc.RELATIONS:
        raise InputError(f"unknown relation {args.relation!r}; choose from {', '.join(webcalc.RELATIONS)}")
    relations = [args.relation] if args.relation else list(webcalc.RELATIONS)
    jobs = [(rel, p) for rel in relations for p in webcalc.admissible_params(rel, args.n, args.max_size)]
    if args.sample is not None and args.sample < len(jobs):
        jobs = random.Random(args.seed).sample(jobs, args.sample)
    workers = min(_threads(), max(1, len(jobs) // 8))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(webcalc._verify_job, [(rel, p, args.n) for rel, p in jobs], chunksize=8))
    else:
        results = [webcalc.verify_relation(rel, p, args.n) for rel, p in jobs]
    for r in results:
        if r["relation"] == "bubble":
            k, l = r["params"]
            r["scalar"] = serialize_scalar(q_binomial(k + l, k))
    failures = [r for r in results if not r["ok"]]
    return not failures, {"n": args.n, "checked": len(results), "failures": len(failures), "results": results}


def cmd_classify(args) -> tuple[bool, dict]:
    data = _load_json(args.gamma)
    try:
        gamma = classifier.ScalarSystem.from_json(data)
    except (KeyError, TypeError, ValueError, ScalarParseError) as exc:
        raise InputError(f"bad gamma table: {exc}") from exc
    try:
        point, certificate = classifier.classify(gamma)
    except (classifier.NotRegular, classifier.NotMultiplicative, classifier.AxiomFailure) as exc:
        raise Violation(str(exc), {"error": type(exc).__name__}) from exc
    out = point.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2)
    return True, {"chi": out, "certificate": certificate}


def cmd_gamma_from_chi(args) -> tuple[bool, dict]:
    chi = _load_chi(args.chi)
    if chi.system.kind != "A":
        raise InputError("scalar systems need a type A toric point")
    n = chi.system.rank + 1
    try:
        gamma = classifier.gamma_from_toric(chi, classifier.box_window(n, args.window), n)
    except classifier.NotRegular as exc:
        raise Violation(str(exc), {"error": "NotRegular"}) from exc
    table = gamma.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(table, fh, indent=2)
        return True, {"n": n, "entries": len(gamma.entries), "out": args.out}
    return True, table


def cmd_cato_dominance(args) -> tuple[bool, dict]:
    chi = _load_chi(args.chi)
    try:
        sw = shiftedcat.ShiftedWeight(_vector(args.lam), chi)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    weights = None
    if args.weights:
        weights = [_vector(w) for w in args.weights.split(";")]
    report = shiftedcat.dominance_test(sw, args.mode, weights)
    return report["ok"], report


def cmd_cato_shapovalov(args) -> tuple[bool, dict]:
    chi = _load_chi(args.chi)
    nu = tuple(int(c) for c in _vector(args.nu))
    if len(nu) != chi.system.rank or any(c < 0 for c in nu):
        raise InputError("nu must be a nonnegative root-lattice vector of the right length")
    factors = shiftedcat.shapovalov_determinant(nu, chi)
    return True, {"nu": list(nu), "factors": factors}


def cmd_cato_invariant(args) -> tuple[bool, dict]:
    chi = _load_chi(args.chi)
    rs = chi.system
    w = WeylElement(rs, [int(c) for c in args.word.split(",")]) if args.word else rs.identity
    try:
        value = shiftedcat.invariant_coefficient(_vector(args.mu), _vector(args.nu), w, args.eps, chi, _vector(args.lam))
    except ZeroDenominator as exc:
        raise Violation(str(exc), {"error": "ZeroDenominator"}) from exc
    except (ValueError, IndexError) as exc:
        raise InputError(str(exc)) from exc
    return True, {"value": serialize_scalar(value)}


def cmd_cato_diagram(args) -> tuple[bool, dict]:
    results = []
    for k in range(args.kmax + 1):
        for extra in range(args.extra + 1):
            results.append(shiftedcat.sl2_diagram_check(k, k + extra - args.chi_exp, args.chi_exp))
    return all(r["ok"] for r in results), {"results": results}


def cmd_identity_fraction(args) -> tuple[bool, dict]:
    report = shiftedcat.fraction_sweep(args.kmax, args.mrange)
    return report["ok"], report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qflag", description="Exact computations for quantum flag manifold actions.")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    sub = parser.add_subparsers(dest="group", required=True)

    poisson = sub.add_parser("poisson").add_subparsers(dest="action", required=True)
    p = poisson.add_parser("check")
    p.add_argument("--type", default="A")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--space", choices=poissonspace.SPACES, required=True)
    p.add_argument("--phi", required=True)
    p.set_defaults(func=cmd_poisson_check, name="poisson check")
    p = poisson.add_parser("normalize")
    p.add_argument("--phi", required=True)
    p.set_defaults(func=cmd_poisson_normalize, name="poisson normalize")

    toric = sub.add_parser("toric").add_subparsers(dest="action", required=True)
    p = toric.add_parser("validate")
    p.add_argument("--regular", action="store_true")
    p.add_argument("--chi", required=True)
    p.set_defaults(func=cmd_toric_validate, name="toric validate")

    webs = sub.add_parser("webs").add_subparsers(dest="action", required=True)
    p = webs.add_parser("verify")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relation")
    p.add_argument("--max-size", type=int)
    p.add_argument("--sample", type=int, help="check a random subset of this many instances")
    p.set_defaults(func=cmd_webs_verify, name="webs verify")

    p = sub.add_parser("classify")
    p.add_argument("--gamma", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify, name="classify")

    gamma = sub.add_parser("gamma").add_subparsers(dest="action", required=True)
    p = gamma.add_parser("from-chi")
    p.add_argument("--chi", required=True)
    p.add_argument("--window", type=int, required=True, help="radius of the weight box")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gamma_from_chi, name="gamma from-chi")

    cato = sub.add_parser("cato").add_subparsers(dest="action", required=True)
    p = cato.add_parser("dominance")
    p.add_argument("--chi", required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated simple-root coordinates")
    p.add_argument("--mode", choices=shiftedcat.DOMINANCE_MODES, required=True)
    p.add_argument("--weights", help="semicolon-separated weights for stronglyRegular")
    p.set_defaults(func=cmd_cato_dominance, name="cato dominance")
    p = cato.add_parser("shapovalov")
    p.add_argument("--nu", required=True)
    p.add_argument("--chi", required=True)
    p.set_defaults(func=cmd_cato_shapovalov, name="cato shapovalov")
    p = cato.add_parser("invariant-coeff")
    p.add_argument("--chi", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--eps", type=int, required=True, help="index of the simple root")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--word", help="comma-separated reduced word of w")
    p.set_defaults(func=cmd_cato_invariant, name="cato invariant-coeff")
    p = cato.add_parser("diagram")
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--chi-exp", type=int, default=0)
    p.add_argument("--extra", type=int, default=1)
    p.set_defaults(func=cmd_cato_diagram, name="cato diagram")

    ident = sub.add_parser("identity").add_subparsers(dest="action", required=True)
    p = ident.add_parser("fraction")
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--mrange", type=int, default=6)
    p.set_defaults(func=cmd_identity_fraction, name="identity fraction")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        ok, details = args.func(args)
    except InputError as exc:
        print(f"qflag: {exc}", file=sys.stderr)
        return 2
    except Violation as exc:
        ok, details = False, {"message": str(exc), **exc.details}
    report = {
        "command": args.name,
        "ok": bool(ok),
        "details": details,
        "elapsedMillis": int((time.perf_counter() - start) * 1000),
    }
    json.dump(report, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
