"""Command-line front end.  Every subcommand prints one JSON document.

Exit codes: 0 success, 1 negative verdict, 2 bad input or unmet
precondition, 3 internal consistency failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import conic as conic_mod
from . import srg
from .cyclotomy import detect_three_valued_ap, gauss_periods, singer_set
from .errors import CycsrgError, InternalError, NotRational, PreconditionError
from .field import DEFAULT_BUDGET, build_field, prime_power

EXIT_OK, EXIT_VERDICT, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3


def cache_dir(args) -> Path | None:
    if args.no_cache:
        return None
    if args.cache_dir:
        return Path(args.cache_dir)
    env = os.environ.get("CYCSRG_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cycsrg"


def _field(args, q: int, degree: int):
    p, e = prime_power(q)
    return build_field(p, e * degree, budget=args.budget, cache_dir=cache_dir(args))


def _parse_partition(text: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """'8,12,18;10,13,15' -> ((8, 12, 18), (10, 13, 15)); either side may be empty."""
    if ";" not in text:
        raise PreconditionError("explicit partition must look like 'S1;S2'")
    left, right = text.split(";", 1)
    try:
        return tuple(int(t) for t in left.split(",") if t.strip()), tuple(int(t) for t in right.split(",") if t.strip())
    except ValueError:
        raise PreconditionError(f"cannot parse partition {text!r}") from None


# -- commands ----------------------------------------------------------------

def cmd_field(args):
    t = build_field(args.p, args.f, budget=args.budget, cache_dir=cache_dir(args))
    return {"p": t.p, "f": t.f, "q": t.q, "poly": list(t.spec.poly), "gamma_code": t.gamma,
            "gamma_digits": t.digits(t.gamma).tolist()}, EXIT_OK


def cmd_periods(args):
    t = _field(args, args.q, args.m)
    prof = gauss_periods(t, args.N, args.q, allow_irrational=args.allow_irrational, workers=args.threads)
    ap = detect_three_valued_ap(prof)
    return prof.to_dict(ap), EXIT_OK


def cmd_singer(args):
    p, e = prime_power(args.q)
    t = _field(args, args.q, args.m)
    data = singer_set(t, e)
    out = data.to_dict()
    if args.N:
        from .cyclotomy import reduce_multiset
        out["reduction"] = {"N": args.N, "counts": list(reduce_multiset(data, args.N))}
    return out, EXIT_OK


def _conic_report(args, M):
    t = _field(args, args.q, 3)
    c = conic_mod.lift_XQ(t, args.d0)
    out = c.to_dict()
    out.update({"M": M, "N": c.n // M})
    if M > 1:
        quo = conic_mod.quotient_and_purity(t, c, M)
        out.update(quo.to_dict())
        out["eta2"] = conic_mod.eta(t, t.constant(2))
        out["g_closed_form"] = {str(u): conic_mod.g_M_closed_form(t, M, l) for u, l in sorted(quo.ell.items())}
    else:
        out.update({"X1": [], "X2": list(c.X_Q), "pure": True, "g_values": {}})
    return out, EXIT_OK


def cmd_conic(args):
    return _conic_report(args, args.M)


def cmd_quotient(args):
    if args.M < 2:
        raise PreconditionError("quotient needs M >= 2")
    return _conic_report(args, args.M)


def _construct(args):
    partition = None if args.partition == "auto" else _parse_partition(args.partition)
    return srg.construct(args.q, args.M, partition, budget=args.budget, cache_dir=cache_dir(args),
                         workers=args.threads)


def cmd_construct(args):
    res = _construct(args)
    out = res.to_dict()
    p, e = prime_power(args.q)
    if args.export:
        srg.write_export(args.export, p, 6 * e, res.N, res.Y)
        out["export"] = str(args.export)
    ok = res.verdict.is_srg and res.condition.holds and res.predicted == res.measured
    return out, EXIT_OK if ok else EXIT_VERDICT


def cmd_export(args):
    res = _construct(args)
    p, e = prime_power(args.q)
    srg.write_export(args.out, p, 6 * e, res.N, res.Y)
    out = {"export": str(args.out), "p": p, "f": 6 * e, "classes": 4 * res.N, "Y": list(res.Y)}
    if args.adjacency:
        big = build_field(p, 6 * e, budget=args.budget, cache_dir=cache_dir(args))
        out["adjacency"] = str(args.adjacency)
        out["edges"] = srg.write_adjacency(args.adjacency, big, res.Y, res.N)
    return out, EXIT_OK


def cmd_verify(args):
    p, f, n4, Y = srg.read_export(args.file)
    N = n4 // 4
    big = build_field(p, f, budget=args.budget, cache_dir=cache_dir(args))
    if (big.q - 1) % n4:
        raise PreconditionError(f"{n4} does not divide {big.q - 1}")
    measured = srg.measure_spectrum(big, Y, N, workers=args.threads)
    k = len(Y) * (big.q - 1) // n4
    verdict = srg.classify_srg(measured, big.q, k)
    out = {"p": p, "f": f, "classes": n4, "Y": list(Y), "measured_spectrum": measured,
           "srg": verdict.to_dict()}
    return out, EXIT_OK if verdict.is_srg else EXIT_VERDICT


def cmd_search(args):
    t = _field(args, args.q, args.m)
    prof = gauss_periods(t, args.N, args.q)
    I1, I2, I3, _ = srg.level_sets(prof)
    hits = srg.search_partitions(I2, t, args.N, budget=args.search_budget)
    return {"q": args.q, "m": args.m, "N": args.N, "I1": list(I1), "I2": list(I2), "I3": list(I3),
            "hits": [h.to_dict() for h in hits]}, EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="trace cache directory (default $CYCSRG_CACHE or ~/.cache/cycsrg)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum field size")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")

    ap = argparse.ArgumentParser(prog="cycsrg", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("field", parents=[common], help="build F_{p^f} and show its defining data")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--f", type=int, default=1)
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("periods", parents=[common], help="Gauss periods of order N of F_{q^m}")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--allow-irrational", action="store_true")
    s.set_defaults(func=cmd_periods)

    s = sub.add_parser("singer", parents=[common], help="Singer difference set of F_{q^m} over F_q")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--m", type=int, default=3)
    s.add_argument("--N", type=int, default=0, help="also reduce modulo N")
    s.set_defaults(func=cmd_singer)

    for name, func, help_ in (("conic", cmd_conic, "conic in PG(2,q) and its lift X_Q"),
                              ("quotient", cmd_quotient, "quotients X_1, X_2 and purity")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--q", type=int, required=True)
        s.add_argument("--M", type=int, default=1 if name == "conic" else None, required=name == "quotient")
        s.add_argument("--d0", type=int, default=None)
        s.set_defaults(func=func)

    for name, func in (("construct", cmd_construct), ("export", cmd_export)):
        s = sub.add_parser(name, parents=[common], help=f"{name} the Cayley graph on F_(q^6)")
        s.add_argument("--q", type=int, required=True)
        s.add_argument("--M", type=int, required=True)
        s.add_argument("--partition", default="auto", help="'auto' or 'S1;S2' with comma lists")
        if name == "construct":
            s.add_argument("--export", help="also write the connection-set file")
        else:
            s.add_argument("--out", required=True)
            s.add_argument("--adjacency", help="edge list path (small fields only)")
        s.set_defaults(func=func)

    s = sub.add_parser("verify", parents=[common], help="measure the spectrum of an exported connection set")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[common], help="search partitions of I_2 satisfying the condition")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--search-budget", type=int, default=srg.SEARCH_BUDGET)
    s.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.func(args)
    except NotRational as exc:
        payload, code = {"error": "NotRational", "message": str(exc)}, EXIT_PRECONDITION
    except PreconditionError as exc:
        payload, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_PRECONDITION
    except (InternalError, CycsrgError, AssertionError) as exc:
        payload, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_INTERNAL
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
