"""Command-line entry point: ``celinesum {findrec,kingwalks,multisum,asym}``.

Exit codes: 0 success, 2 input error, 3 nothing found within the bounds
(or an inconclusive fit), 4 search exhausted with timed-out attempts,
5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import apps
from .errors import (DomainError, RecurrenceNotFound, SingularRecurrenceError, TermSyntaxError,
                     UnsupportedTermError, VerificationError)
from .operators import to_record, to_text

EXIT_OK, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_TIMEOUT, EXIT_VERIFY = 0, 2, 3, 4, 5


def _result_record(result) -> dict:
    return {
        "operator": to_record(result.operator),
        "valid_from": result.valid_from,
        "I_used": result.I_used,
        "J_used": result.J_used,
        "verification": result.verification.to_record(),
        "generic_parameters": result.diagnostics.get("generic_parameters", []),
        "attempts": len(result.attempts),
        "seconds": round(result.diagnostics.get("seconds", 0.0), 3),
    }


def _print_result(result, out):
    print(f"operator: {to_text(result.operator)}", file=out)
    print(f"order {result.operator.order}, degree {result.operator.degree()}, "
          f"found at I={result.I_used}, J={result.J_used}", file=out)
    print(f"valid for n >= {result.valid_from}", file=out)
    v = result.verification
    print(f"verified on n = 0..{v.n_check}: {'holds' if v.holds else 'FAILS'}"
          + (f" (skipped {v.skipped})" if v.skipped else ""), file=out)
    params = result.diagnostics.get("generic_parameters")
    if params:
        print(f"coefficients assume generic values of {', '.join(params)}", file=out)


def _emit(args, record: dict, text_fn):
    if args.json:
        json.dump(record, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        text_fn(sys.stdout)


def cmd_findrec(args) -> int:
    result = apps.run_findrec(args.rec, args.init, args.term, args.d, args.param, args.I_max,
                              args.J_max, args.timeout, args.checkpoint, args.method)
    record = {**_result_record(result), "stages": [], "fit": None}
    _emit(args, record, lambda out: _print_result(result, out))
    return EXIT_OK


def cmd_kingwalks(args) -> int:
    rep = apps.kingwalks(args.dim, n_check=args.n_verify, n_sum=args.n_sum, asymptotics=args.asymptotics,
                         n_max=args.n_max, I_max=args.I_max, J_max=args.J_max, timeout=args.timeout,
                         checkpoint=args.checkpoint)
    record = {**_result_record(rep.result), "walk_check": rep.walk_check.to_record(),
              "stages": [], "fit": rep.fit.to_record() if rep.fit else None}

    def text(out):
        _print_result(rep.result, out)
        print(f"closed-walk counts n = 0..{rep.walk_check.n_check}: holds", file=out)
        if rep.fit:
            print(rep.fit.report(), file=out)
    _emit(args, record, text)
    if rep.fit is not None and not rep.fit.conclusive:
        return EXIT_NOT_FOUND
    return EXIT_OK


def cmd_multisum(args) -> int:
    stages = apps.multisum(args.stage, d=args.d, params=args.param, I_max=args.I_max, J_max=args.J_max,
                           timeout=args.timeout, first_sum=args.sum_var)
    final = stages[-1].result
    record = {**_result_record(final),
              "stages": [{"term": s.text, "sum_var": s.sum_var, "outer_var": s.outer_var,
                          "operator": to_record(s.result.operator), "valid_from": s.result.valid_from,
                          "initial_values": [str(v) for v in s.initial_values]} for s in stages],
              "fit": None}

    def text(out):
        for i, s in enumerate(stages, 1):
            print(f"stage {i}: sum over {s.sum_var} of {s.text}, giving a sequence in {s.outer_var}", file=out)
            print(f"  operator: {to_text(s.result.operator)}", file=out)
            print(f"  initial values: {', '.join(str(v) for v in s.initial_values)}", file=out)
        _print_result(final, out)
    _emit(args, record, text)
    return EXIT_OK


def cmd_asym(args) -> int:
    fit = apps.asym(args.op, args.init, args.n_max, args.n_min, args.depth)
    record = {"operator": None, "valid_from": None, "stages": [], "fit": fit.to_record()}
    _emit(args, record, lambda out: print(fit.report(), file=out))
    return EXIT_OK if fit.conclusive else EXIT_NOT_FOUND


def _bounds(p, I_max=6, J_max=8, timeout=60.0):
    p.add_argument("--I-max", type=int, default=I_max, help="largest shift in n (default %(default)s)")
    p.add_argument("--J-max", type=lambda s: None if s == "auto" else int(s), default=J_max,
                   help="largest shift in k, or 'auto' for I+D+d (default %(default)s)")
    p.add_argument("--timeout", type=float, default=timeout, help="seconds per (I,J) attempt")
    p.add_argument("--checkpoint", help="JSON-lines file recording attempts; reruns skip failed pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="celinesum", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("findrec", help="recurrence for sum_k a_k^d H(n,k)")
    p.add_argument("--rec", required=True, help='recurrence of a_k in N and k, e.g. "N^2-N-1"')
    p.add_argument("--init", required=True, help='initial values a_0, a_1, ..., e.g. "0,1"')
    p.add_argument("--term", required=True, help='hypergeometric term, e.g. "binomial(n,k)"')
    p.add_argument("-d", type=int, default=1, help="power of a_k (default 1)")
    p.add_argument("--param", action="append", default=[], help="symbolic parameter (repeatable)")
    p.add_argument("--method", default="auto", choices=["auto", "modular", "primitive", "bareiss"])
    p.add_argument("--json", action="store_true")
    _bounds(p)
    p.set_defaults(func=cmd_findrec)

    p = sub.add_parser("kingwalks", help="closed king walks on Z^dim")
    p.add_argument("dim", type=int)
    p.add_argument("--n-verify", type=int, help="check against closed-walk counts up to this n")
    p.add_argument("--n-sum", type=int, default=60, help="check against brute-force sums up to this n")
    p.add_argument("--asymptotics", action="store_true", help="also fit c r^n n^theta (1 + b1/n + ...)")
    p.add_argument("--n-max", type=int, default=5000, help="terms used by the fit")
    p.add_argument("--json", action="store_true")
    _bounds(p, I_max=10, J_max=None, timeout=600.0)
    p.set_defaults(func=cmd_kingwalks)

    p = sub.add_parser("multisum", help="nested sums, innermost first")
    p.add_argument("--stage", action="append", required=True,
                   help='summand of one stage, innermost first, e.g. --stage "binomial(i,k)" --stage "binomial(n,i)"')
    p.add_argument("--sum-var", default="k", help="summation variable of the innermost stage")
    p.add_argument("-d", type=int, default=1, help="power applied to the inner sums (default 1)")
    p.add_argument("--param", action="append", default=[])
    p.add_argument("--json", action="store_true")
    _bounds(p)
    p.set_defaults(func=cmd_multisum)

    p = sub.add_parser("asym", help="numerical asymptotics of a recurrence")
    p.add_argument("--op", required=True, help='operator in n and N, e.g. "N-2"')
    p.add_argument("--init", required=True, help="initial values x_0, x_1, ...")
    p.add_argument("--n-max", type=int, default=5000)
    p.add_argument("--n-min", type=int)
    p.add_argument("--depth", type=int, default=4, help="Richardson depth")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_asym)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(message)s")
    try:
        return args.func(args)
    except (TermSyntaxError, UnsupportedTermError, SingularRecurrenceError, DomainError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RecurrenceNotFound as e:
        stage = getattr(e, "stage", None)
        where = f" (stage {stage})" if stage else ""
        print(f"not found{where}: {e}", file=sys.stderr)
        for a in e.attempts[-5:]:
            print(f"  I={a.I} J={a.J}: {a.status} {a.note}", file=sys.stderr)
        if e.verification_failed:
            return EXIT_VERIFY
        return EXIT_TIMEOUT if e.timed_out else EXIT_NOT_FOUND
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
