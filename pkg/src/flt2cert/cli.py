"""Command line entry point: certify, rank, series, delta, siegel."""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path

from sympy.ntheory import isprime

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if p < 3 or not isprime(p):
        raise argparse.ArgumentTypeError(f"{p} is not an odd prime")
    return p


def _emit(doc: dict, out: str | None = None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_certify(args: argparse.Namespace) -> int:
    from .certificate import certify

    if args.prime < 5:
        raise UsageError("the counting estimate needs p >= 5")
    doc, ok = certify(args.prime, args.out, seed=args.seed, skip_delta=args.skip_delta)
    summary = {
        "p": doc["p"],
        "overall": doc["overall"],
        "failed": [s["name"] for s in list(doc["counting"].values()) + doc["chain"] if s["verdict"] == "fail"],
        "out": args.out,
    }
    print(json.dumps(summary if args.out else doc, indent=2))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_recheck(args: argparse.Namespace) -> int:
    from .certificate import recheck

    doc = json.loads(Path(args.file).read_text())
    problems = recheck(doc)
    print(json.dumps({"ok": not problems, "problems": problems}, indent=2))
    return EXIT_PASS if not problems else EXIT_FAIL


def cmd_rank(args: argparse.Namespace) -> int:
    from .bernoulli import irregularity_index

    _emit(irregularity_index(args.prime).as_dict())
    return EXIT_PASS


def _write_csv(path: str, coeffs, p: int) -> None:
    handle = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        writer = csv.writer(handle)
        writer.writerow(["n"] + [f"c{c}" for c in range(1, p)])
        for n, a in enumerate(coeffs):
            writer.writerow([n] + [str(u) for u in a.coeffs])
    finally:
        if handle is not sys.stdout:
            handle.close()


def cmd_series(args: argparse.Namespace) -> int:
    from .group_ring import parse_elem
    from .series import SeriesContext, f_theta, integrality_and_bounds, verify_pth_power

    p = args.prime
    try:
        theta = parse_elem(args.theta, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.deg < 1:
        raise UsageError("--deg must be positive")
    sctx = SeriesContext.build(p)
    doc: dict = {"p": str(p), "theta": ",".join(map(str, theta.coeffs)), "deg": str(args.deg), "check": args.check}
    if args.check == "pthpower":
        v = verify_pth_power(theta, args.deg, sctx)
        doc["results"] = {"pth_power": _verdict(v)}
        ok = v.ok
    else:
        _, rep = integrality_and_bounds(theta, args.deg, sctx)
        if args.check == "integrality":
            doc["results"] = {"integral": _verdict(rep.integral), "normalized_integral": _verdict(rep.normalized_integral)}
            ok = rep.integral.ok and rep.normalized_integral.ok
        else:
            res = {"series_bound": _verdict(rep.series_bound), "M": str(sctx.M)}
            ok = rep.series_bound.ok
            for name, v in (("fact_bound", rep.fact_bound), ("fact_bound_weak", rep.fact_bound_weak)):
                if v is not None:
                    res[name] = _verdict(v)
                    ok = ok and v.ok
            doc["results"] = res
    doc["ok"] = ok
    if args.csv:
        _write_csv(args.csv, f_theta(theta, args.deg, sctx).coeffs, p)
    if args.csv != "-":
        _emit(doc)
    return EXIT_PASS if ok else EXIT_FAIL


def _verdict(v) -> dict:
    return {"ok": v.ok, "detail": v.detail, "first_failure": None if v.witness is None else str(v.witness)}


def cmd_delta(args: argparse.Namespace) -> int:
    from .delta import InsufficientDegree, construct_delta

    if args.weight < 1 or args.deg < 1:
        raise UsageError("--weight and --deg must be positive")
    try:
        cert = construct_delta(args.prime, args.weight, args.deg, seed=args.seed)
    except InsufficientDegree as exc:
        print(json.dumps({"ok": False, "error": str(exc)}, indent=2))
        return EXIT_FAIL
    _emit(cert.as_dict(), args.out)
    if args.out:
        print(json.dumps({"ok": cert.ok, "out": args.out, "checks": cert.checks}, indent=2))
    return EXIT_PASS if cert.ok else EXIT_FAIL


def random_instance(rows: int, cols: int, max_entry: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.randint(-max_entry, max_entry) for _ in range(cols)] for _ in range(rows)]


def cmd_siegel(args: argparse.Namespace) -> int:
    from .lattice import SiegelFailure, siegel_solve

    if not 0 <= args.rows < args.cols or args.max_entry < 0:
        raise UsageError("need 0 <= rows < cols and max-entry >= 0")
    A = random_instance(args.rows, args.cols, args.max_entry, args.seed)
    try:
        sol = siegel_solve(A, args.cols)
    except SiegelFailure as exc:
        print(json.dumps({"ok": False, "error": str(exc)}, indent=2))
        return EXIT_FAIL
    _emit({
        "w": [str(a) for a in sol.w],
        "inf_norm": str(sol.inf_norm),
        "bound": str(sol.certified_bound),
        "method": sol.method,
    })
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flt2cert", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="exact bound certificate for a prime")
    c.add_argument("--prime", type=_prime, required=True)
    c.add_argument("--out")
    c.add_argument("--skip-delta", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("recheck", help="re-verify a certificate file")
    c.add_argument("file")
    c.set_defaults(func=cmd_recheck)

    c = sub.add_parser("rank", help="irregularity index and rank")
    c.add_argument("--prime", type=_prime, required=True)
    c.set_defaults(func=cmd_rank)

    c = sub.add_parser("series", help="binomial series checks")
    c.add_argument("--prime", type=_prime, required=True)
    c.add_argument("--theta", required=True, help="n_1,...,n_{p-1} or e.g. 2psi1+psi2")
    c.add_argument("--deg", type=int, required=True)
    c.add_argument("--check", choices=["pthpower", "integrality", "bounds"], required=True)
    c.add_argument("--csv", help="write exact coefficients as CSV ('-' for stdout)")
    c.set_defaults(func=cmd_series)

    c = sub.add_parser("delta", help="construct and verify a delta certificate")
    c.add_argument("--prime", type=_prime, required=True)
    c.add_argument("--weight", type=int, required=True)
    c.add_argument("--deg", type=int, default=40)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_delta)

    c = sub.add_parser("siegel", help="small kernel vector of a random integer matrix")
    c.add_argument("--rows", type=int, required=True)
    c.add_argument("--cols", type=int, required=True)
    c.add_argument("--max-entry", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_siegel)
    return ap


def main(argv: list[str] | None = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
