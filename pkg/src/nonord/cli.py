"""Command-line front end.

Every subcommand prints one JSON object per check on stdout with the keys
check, params, pass, witness, runtime_ms.  Exit status is 0 when every check
passes, 1 when any fails and 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, Sequence

from nonord import analytic, qcong
from nonord.errors import NonordError
from nonord.hypersums import CM_PARAMS, HALF, HyperParams, check_prime, search_report, vanhamme_sweep
from nonord.modring import is_prime, parse_rational
from nonord.polyfp import (
    build_family_mod_p,
    build_qp_integer,
    build_qp_mod_p,
    companion_check,
    dump_csv,
    family_check,
    theorem1_equivalence,
)
from nonord.qseries import CM9, LEVEL8, EtaQuotient, expand_eta_quotient, export_csv, save_table
from nonord.report import Report, stopwatch
from nonord.suite import KNOWN_NONORDINARY, KNOWN_SEARCH_BOUND, SuiteConfig, default_cache_dir, run_all

log = logging.getLogger("nonord")


class UsageError(Exception):
    pass


def _rational(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _form(text: str) -> EtaQuotient:
    try:
        return EtaQuotient.parse(text)
    except NonordError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonord", description=__doc__.splitlines()[0])
    parser.add_argument("--cache-dir", default=None,
                        help=f"coefficient cache (default ${{NONORD_CACHE_DIR}} or {default_cache_dir()})")
    parser.add_argument("--no-cache", action="store_true", help="never read or write cached tables")
    parser.add_argument("--jobs", type=_positive, default=1, help="worker processes for prime sweeps")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand an eta quotient and store its coefficient table")
    p.add_argument("--form", type=_form, default=LEVEL8, help='8-4, 9-4-cm or "(d,r);(d,r)"')
    p.add_argument("--limit", type=_positive, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--csv", type=Path)

    p = sub.add_parser("search", help="list odd non-ordinary primes up to a bound")
    p.add_argument("--bound", type=_positive, default=KNOWN_SEARCH_BOUND)
    p.add_argument("--form", type=_form, default=LEVEL8)

    p = sub.add_parser("vanhamme", help="truncated sum = b(p) mod p^power for all odd p <= pmax")
    p.add_argument("--pmax", type=_positive, default=499)
    p.add_argument("--power", type=int, choices=(1, 2, 3), default=3)

    p = sub.add_parser("qp", help="divisibility criterion and companion congruence for one prime")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--integer", action="store_true", help="also build Q_p exactly over Z (small p)")
    p.add_argument("--csv", type=Path, help="dump Q_p mod p as degree,coefficient")

    p = sub.add_parser("family", help="family polynomial mod p for parameters (s1, s2)")
    p.add_argument("--s1", type=_rational, required=True)
    p.add_argument("--s2", type=_rational, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--csv", type=Path)

    p = sub.add_parser("qcong", help="cyclotomic q-congruence for odd n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prefactor-only", action="store_true")
    p.add_argument("--cap", type=_positive, default=qcong.N_CAP)
    p.add_argument("--csv", type=Path, help="dump lhs - rhs as q_degree,a_degree,coefficient")

    p = sub.add_parser("lvalue", help="hypergeometric sum against 16 L(f,2) / pi^2")
    p.add_argument("--terms", type=_positive, default=analytic.DEFAULT_TERMS)
    p.add_argument("--cutoff", type=_positive, default=analytic.DEFAULT_CUTOFF)
    p.add_argument("--tol", type=float, default=analytic.DEFAULT_TOL)

    p = sub.add_parser("all", help="run every check with the default bounds")
    p.add_argument("--report", type=Path, help="also write all records as a JSON array")
    return parser


def _config(args: argparse.Namespace) -> SuiteConfig:
    cache = None if args.no_cache else (args.cache_dir or default_cache_dir())
    return SuiteConfig(cache_dir=cache, jobs=args.jobs)


def _odd_prime(p: int) -> int:
    if p < 3 or not is_prime(p):
        raise UsageError("p must be an odd prime")
    return p


def _table_for(params: HyperParams, cfg: SuiteConfig, p: int):
    quad = sorted(params.quadruple)
    for ref, desc in ((HALF, LEVEL8), (CM_PARAMS, CM9)):
        if quad == sorted(ref.quadruple):
            return cfg.table(desc, max(p, cfg.table_limit))
    return None


def _cmd_expand(args, cfg) -> Iterable[Report]:
    with stopwatch() as sw:
        tab = expand_eta_quotient(args.form, args.limit)
        save_table(tab, args.out)
        if args.csv:
            export_csv(tab, args.csv)
    yield Report("expand", {"form": args.form.name, "limit": args.limit},
                 True, {"out": str(args.out), "b_shift": tab.b(args.form.shift)}, sw["ms"])


def _cmd_search(args, cfg) -> Iterable[Report]:
    tab = cfg.table(args.form, args.bound)
    expected = None
    if args.form == LEVEL8 and args.bound <= KNOWN_SEARCH_BOUND:
        expected = [p for p in KNOWN_NONORDINARY if p <= args.bound]
    yield search_report(tab, args.bound, expected)


def _cmd_vanhamme(args, cfg) -> Iterable[Report]:
    yield vanhamme_sweep(args.pmax, cfg.table(LEVEL8, max(args.pmax, 1)), args.power)


def _cmd_qp(args, cfg) -> Iterable[Report]:
    p = _odd_prime(args.p)
    tab = cfg.table(LEVEL8, max(p, cfg.table_limit))
    qp = build_qp_mod_p(p)
    t1 = theorem1_equivalence(p, tab, qp)
    t1.witness["divisibility"] = qp.is_zero()
    yield t1
    yield companion_check(p, tab, qp)
    if args.csv:
        dump_csv(qp, args.csv)
    if args.integer:
        with stopwatch() as sw:
            big = build_qp_integer(p)
            agrees = big.reduce_mod(p) == qp
        yield Report("qp-integer", {"p": p}, agrees and big.degree == 4 * (p - 1),
                     {"degree": big.degree, "leading": str(big.coeffs[-1]), "constant": str(big[0]),
                      "agrees_mod_p": agrees}, sw["ms"])


def _cmd_family(args, cfg) -> Iterable[Report]:
    try:
        params = HyperParams(args.s1, args.s2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = _odd_prime(args.p)
    check_prime(p, params)
    yield family_check(p, params, _table_for(params, cfg, p))
    if args.csv:
        dump_csv(build_family_mod_p(p, params), args.csv)


def _cmd_qcong(args, cfg) -> Iterable[Report]:
    if not args.prefactor_only:
        yield qcong.verify_e05(args.n, args.cap)
        if args.csv:
            qcong.dump_difference_csv(args.n, args.csv)
    yield qcong.verify_prefactor(args.n)


def _cmd_lvalue(args, cfg) -> Iterable[Report]:
    if args.tol <= 0:
        raise UsageError("tol must be positive")
    tab = cfg.table(LEVEL8, max(args.cutoff, cfg.table_limit))
    yield analytic.lvalue_report(tab, args.terms, args.cutoff, args.tol)


def _cmd_all(args, cfg) -> Iterable[Report]:
    return run_all(cfg)


COMMANDS = {
    "expand": _cmd_expand,
    "search": _cmd_search,
    "vanhamme": _cmd_vanhamme,
    "qp": _cmd_qp,
    "family": _cmd_family,
    "qcong": _cmd_qcong,
    "lvalue": _cmd_lvalue,
    "all": _cmd_all,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config(args)
    records = []
    try:
        for rep in COMMANDS[args.command](args, cfg):
            records.append(rep)
            print(rep.to_json(), flush=True)
    except UsageError as exc:
        print(f"nonord: {exc}", file=sys.stderr)
        return 2
    except (NonordError, ValueError) as exc:
        # precondition violations from the library (bad prime, short table, cap)
        print(f"nonord: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nonord: {exc}", file=sys.stderr)
        return 2
    if args.command == "all" and args.report:
        args.report.write_text(json.dumps([r.to_dict() for r in records], indent=1, sort_keys=True,
                                          default=str) + "\n")
    failed = [r.check for r in records if not r.passed]
    if failed:
        log.warning("failed checks: %s", ", ".join(failed))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
