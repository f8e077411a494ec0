"""Command-line entry point: ``widthlab <command> ...``.

Exit status is 0 on success, 2 when a check in the report FAILs and 1 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import functools
import json
import sys
import time

from .besov import (
    BesovParams,
    GridFormatError,
    ResolutionError,
    besov_experiment,
    besov_seminorm,
    read_grid_function,
)
from .certificate import DegenerateBasis, ZeroImage, build_certificate, verify_certificate
from .core import Exponent, derive_seeds
from .projection import empirical_upper_bound
from .reports import ExperimentReport, emit_report
from .widths import bernstein_exponent, classify_regime, exact_manifold_width

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _exponent(text: str) -> Exponent:
    try:
        return Exponent.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


@functools.lru_cache(maxsize=1)
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="widthlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    width = sub.add_parser("width", help="closed-form widths and exponent tables")
    wsub = width.add_subparsers(dest="what", required=True, parser_class=_Parser)
    w = wsub.add_parser("exact", help="(M - n)^(1/p - 1/q)")
    w.add_argument("--M", type=int, required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--p", type=_exponent, required=True)
    w.add_argument("--q", type=_exponent, required=True)
    w = wsub.add_parser("bernstein", help="Bernstein width exponent and its case")
    w.add_argument("--s", type=float, required=True)
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--p", type=_exponent, required=True)
    w.add_argument("--q", type=_exponent, required=True)
    w = wsub.add_parser("regime", help="whether Bernstein widths are sharp")
    w.add_argument("--p", type=_exponent, required=True)
    w.add_argument("--q", type=_exponent, required=True)

    pr = sub.add_parser("project", help="empirical worst case of the projection scheme")
    pr.add_argument("--M", type=int, required=True)
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--p", type=_exponent, required=True)
    pr.add_argument("--q", type=_exponent, required=True)
    pr.add_argument("--samples", type=int, default=10_000)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out", help="write the JSON report here")

    ce = sub.add_parser("certify", help="build and verify the odd sphere map")
    ce.add_argument("--M", type=int, required=True)
    ce.add_argument("--n", type=int, required=True)
    ce.add_argument("--p", type=_exponent, required=True)
    ce.add_argument("--q", type=_exponent, required=True)
    ce.add_argument("--samples", type=int, default=10_000)
    ce.add_argument("--calib-samples", type=int, default=10_000)
    ce.add_argument("--seed", type=int, default=0)
    ce.add_argument("--eps-safety", type=float, default=0.9)
    ce.add_argument("--minor-budget", type=int, default=10**6)
    ce.add_argument("--out", help="write the JSON report here")

    be = sub.add_parser("besov", help="grid Besov norms and the Besov-ball experiment")
    bsub = be.add_subparsers(dest="what", required=True, parser_class=_Parser)
    bn = bsub.add_parser("norm", help="L_q norm, Besov seminorm and norm of a grid file")
    bn.add_argument("--input", required=True)
    bn.add_argument("--s", type=float, required=True)
    bn.add_argument("--r", type=_exponent, required=True)
    bn.add_argument("--q", type=_exponent, required=True)
    bn.add_argument("--k", type=int, default=None, help="modulus order (default floor(s)+1)")
    bx = bsub.add_parser("experiment", help="min L_p norm over the sphere map, per n")
    bx.add_argument("--d", type=int, required=True)
    bx.add_argument("--s", type=float, required=True)
    bx.add_argument("--p", type=_exponent, required=True)
    bx.add_argument("--q", type=_exponent, required=True)
    bx.add_argument("--n-list", type=_int_list, required=True)
    bx.add_argument("--res", type=int, required=True)
    bx.add_argument("--samples", type=int, default=2000)
    bx.add_argument("--seed", type=int, default=0)
    bx.add_argument("--calib-samples", type=int, default=10_000)
    bx.add_argument("--minor-budget", type=int, default=200)
    bx.add_argument("--shifts", choices=("nodes", "all"), default="nodes")
    bx.add_argument("--out", required=True, help="CSV table of per-n minima")
    bx.add_argument("--report", help="also write the JSON report here")
    return parser


def _width(args) -> tuple[ExperimentReport, str]:
    if args.what == "exact":
        value = exact_manifold_width(args.M, args.n, args.p, args.q)
        rep = ExperimentReport("width exact",
                               params={"M": args.M, "n": args.n, "p": str(args.p), "q": str(args.q)},
                               theory={"width": value})
        return rep, repr(value)
    if args.what == "bernstein":
        regime = bernstein_exponent(args.s, args.d, args.p, args.q)
        rep = ExperimentReport("width bernstein",
                               params={"s": args.s, "d": args.d, "p": str(args.p), "q": str(args.q)},
                               theory={"label": regime.label.value, "exponent": regime.exponent})
        return rep, f"{regime.label.value} {regime.exponent!r}"
    regime = classify_regime(args.p, args.q)
    rep = ExperimentReport("width regime", params={"p": str(args.p), "q": str(args.q)},
                           theory={"regime": regime.value})
    return rep, regime.value


def _project(args) -> ExperimentReport:
    t0 = time.perf_counter()
    res = empirical_upper_bound(args.M, args.n, args.p, args.q, args.samples, args.seed)
    return ExperimentReport(
        "project",
        params={"M": args.M, "n": args.n, "p": str(args.p), "q": str(args.q),
                "samples": args.samples},
        seeds={"seed": args.seed},
        theory={"width": res.bound},
        measured={"max_error": res.max_error, "extremal_error": res.extremal_error,
                  "random_max_error": res.random_max_error, "exceedances": res.exceedances},
        verdicts={"no_exceedance": "PASS" if res.exceedances == 0 else "FAIL",
                  "attained": "PASS" if res.attained else "FAIL"},
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


def _certify(args) -> ExperimentReport:
    t0 = time.perf_counter()
    cert_seed, fresh_seed = derive_seeds(args.seed, 2)
    cert = build_certificate(args.M, args.n, args.q, seed=cert_seed,
                             calib_samples=args.calib_samples, eps_safety=args.eps_safety,
                             minor_budget=args.minor_budget)
    rep = verify_certificate(cert, args.p, args.samples, seed=fresh_seed)
    rep.params["calib_samples"] = args.calib_samples
    rep.params["minor_budget"] = args.minor_budget
    rep.seeds = {"seed": args.seed, "certificate": cert_seed, **rep.seeds}
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def _besov_norm(args) -> ExperimentReport:
    t0 = time.perf_counter()
    f = read_grid_function(args.input)
    params = BesovParams(args.s, args.r, args.q, args.k)
    lq = f.lq_norm(params.q)
    semi = besov_seminorm(f, params)
    return ExperimentReport(
        "besov norm",
        params={"input": args.input, "d": f.d, "res": f.res, "s": args.s, "r": str(params.r),
                "q": str(params.q), "k": params.k},
        measured={"lq_norm": lq, "seminorm": semi, "norm": lq + semi},
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


def _besov_experiment(args) -> ExperimentReport:
    rep = besov_experiment(args.d, args.s, args.p, args.q, args.n_list, args.res,
                           args.samples, args.seed, calib_samples=args.calib_samples,
                           minor_budget=args.minor_budget, shifts=args.shifts)
    emit_report(rep, args.out, "csv")
    if args.report:
        emit_report(rep, args.report, "json")
    return rep


def run(argv=None) -> tuple[int, ExperimentReport | None]:
    """Parse ``argv``, execute, print the result; return (exit code, report)."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR, None
    except SystemExit as exc:  # --help
        return (EXIT_OK if not exc.code else EXIT_ERROR), None

    try:
        if args.command == "width":
            rep, text = _width(args)
            print(text)
            return EXIT_OK, rep
        if args.command == "project":
            rep = _project(args)
        elif args.command == "certify":
            rep = _certify(args)
        elif args.what == "norm":
            rep = _besov_norm(args)
        else:
            rep = _besov_experiment(args)
        if getattr(args, "out", None) and args.command != "besov":
            emit_report(rep, args.out, "json")
    except (ValueError, DegenerateBasis, ZeroImage, GridFormatError, ResolutionError,
            OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR, None

    print(json.dumps(rep.to_dict(), indent=2))
    return (EXIT_OK if rep.passed else EXIT_FAIL), rep


def main(argv=None) -> None:
    sys.exit(run(argv)[0])


if __name__ == "__main__":
    main()
