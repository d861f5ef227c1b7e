"""Command-line front end.

Exit codes: 0 success or passing certificate, 1 failed certificate or
violated invariant, 2 usage error, 3 divergence / resource / precision error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from .bounds import bound_inputs, certify, iterated_sums, pi_norm_bound, rho_chi_gamma_bounds, summary_sums
from .core import ModelParams, as_fraction
from .errors import DivergenceError, DomainError, PrecisionError, ResourceError
from .expansion import crosscheck, drift_series, enumerate_pi_all, enumerate_two_point, extract_pi
from .greens import derived_constants, greens_power_origin
from .montecarlo import SimConfig, estimate_drift_both, scan_beta
from .report import Report

log = logging.getLogger("erwspeed")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
SEED_ENV = "ERW_SEED"


def _beta(text: str) -> Fraction:
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError("beta must lie in [0, 1]")
    return value


def _betas(text: str):
    return [_beta(t) for t in text.split(",") if t.strip()]


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit meta.timestamp so reports are byte-reproducible")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="erwspeed", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("greens", parents=[common], help="G_d^{*n}(0) by the Bessel integral")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--n", type=_positive_int, default=1)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--kmax", type=int, default=20, help="cutoff of the series lower bound")

    s = sub.add_parser("constants", parents=[common], help="E_0, E_1, a_d, eps(d)")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("bounds", parents=[common], help="per-N coefficient and derivative bounds")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--beta", type=_beta, default=Fraction(1))
    s.add_argument("--nmax", type=_positive_int, default=6, help="largest N listed")
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("certify", parents=[common], help="monotonicity certificate")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("expansion", parents=[common], help="exact pi_m and truncated drift series")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--beta", type=_beta, required=True)
    s.add_argument("--mmax", type=_positive_int, default=5)
    s.add_argument("--method", choices=("direct", "recursion"), default="direct")
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("crosscheck", parents=[common], help="recursion vs direct enumeration")
    s.add_argument("--d", type=_positive_int, required=True)
    s.add_argument("--beta", type=_beta, required=True)
    s.add_argument("--mmax", type=_positive_int, default=5)

    for name, helptext in (("simulate", "Monte Carlo drift estimate"),
                           ("scan", "coupled beta scan")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--d", type=_positive_int, required=True)
        if name == "simulate":
            s.add_argument("--beta", type=_beta, required=True)
        else:
            s.add_argument("--betas", type=_betas, default="0,0.25,0.5,0.75,1",
                           help="comma-separated nondecreasing grid")
            s.add_argument("--uncoupled", action="store_true",
                           help="independent streams per grid point")
            s.add_argument("--estimator", choices=("endpoint", "fresh-site"), default="endpoint")
        s.add_argument("--n", type=_positive_int, default=2000, help="steps per walk")
        s.add_argument("--replicas", type=_positive_int, default=10_000)
        s.add_argument("--seed", type=int, default=None,
                       help=f"64-bit seed (default: ${SEED_ENV} or 0)")
        s.add_argument("--window", type=_positive_int, default=None,
                       help="trailing window of the fresh-site estimator (default n/2)")
    return p


def _config(args) -> dict:
    # threads never changes a result, so it stays out of the report
    skip = {"format", "output", "no_timestamp", "verbose", "command", "threads"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, Fraction):
            v = str(v)
        elif isinstance(v, list):
            v = [str(x) for x in v]
        out[k] = v
    return out


def _cmd_greens(args, rep: Report) -> int:
    from .greens import greens_series_oracle

    g = greens_power_origin(args.d, args.n, args.tol)
    rep.add(f"G_{args.d}^*{args.n}(0)", g.value, g.error_radius, "", "greens:bessel-integral")
    lower = greens_series_oracle(args.d, args.n, args.kmax)
    rep.add(f"series_lower_bound_kmax={args.kmax}", lower, 0.0, "", "greens:return-probability-series",
            exact=lower)
    return EXIT_OK


def _cmd_constants(args, rep: Report) -> int:
    c = derived_constants(args.d, args.tol)
    for name in ("E0", "E1", "a_d", "eps_d"):
        iv = getattr(c, name)
        rep.add(name, iv.mid, iv.rad, "", f"constants:{name}")
    rep.verdict = {"divergent": list(c.divergent)}
    return EXIT_RESOURCE if "a_d" in c.divergent else EXIT_OK


def _cmd_bounds(args, rep: Report) -> int:
    inputs = bound_inputs(args.d, args.tol)
    beta = float(args.beta)
    for N in range(1, args.nmax + 1):
        iv = pi_norm_bound(inputs, beta, N)
        rep.add(f"pi_norm_bound[N={N}]", iv.hi, iv.rad, "", "bounds:pi-norm")
        for label, iv in zip(("rho", "chi", "gamma"), rho_chi_gamma_bounds(inputs, beta, N)):
            rep.add(f"{label}[N={N}]", iv.hi, iv.rad, "", f"bounds:{label}")
    report = summary_sums(inputs)
    iterated = iterated_sums(inputs)
    for label, iv, it in zip(("rho", "chi", "gamma"),
                             (report.rho_sum, report.chi_sum, report.gamma_sum), iterated):
        rep.add(f"d*sum_N {label} (beta=1)", iv.hi, iv.rad, "", f"bounds:{label}-sum-closed-form")
        rep.add(f"d*sum_N {label} iterated (beta=1)", it.hi, it.rad, "", f"bounds:{label}-sum-iterated")
    rep.add("total (beta=1)", report.total.hi, report.total.rad, "", "bounds:summary-total")
    rep.verdict = {"a_d_condition": report.a_d_condition, "divergent": report.divergent}
    return EXIT_RESOURCE if report.divergent else EXIT_OK


def _cmd_certify(args, rep: Report) -> int:
    cert = certify(args.d, args.tol)
    rep.add("total", cert.total, 0.0, "", "bounds:summary-total (upper end)")
    rep.add("margin", cert.margin, 0.0, "", "1 - total")
    rep.add("E0", cert.E0, 0.0, "", "constants:E0 (upper end)")
    rep.add("a_d", cert.a_d, 0.0, "", "constants:a_d (upper end)")
    rep.verdict = {"verdict": cert.verdict, "notes": cert.notes}
    if cert.verdict == "monotone-all-beta":
        return EXIT_OK
    if cert.verdict == "divergent":
        return EXIT_RESOURCE
    return EXIT_FAIL


def _cmd_expansion(args, rep: Report) -> int:
    params = ModelParams(args.d, args.beta)
    if args.method == "recursion":
        pi = extract_pi(enumerate_two_point(params, args.mmax))
    else:
        pi = enumerate_pi_all(params, args.mmax)
    for m in sorted(pi.aggregated):
        tab = pi.aggregated[m]
        first_moment = sum((y[0] * v for y, v in tab.items()), Fraction(0))
        rep.add(f"sum_y y1*pi_{m}(y)", first_moment, 0.0, "", f"expansion:{pi.source}",
                exact=first_moment)
    if pi.per_N is not None:
        for N, v in sorted(pi.norm_by_N().items()):
            rep.add(f"partial_norm[N={N}]", v, 0.0, "", "expansion:sum_{m,x,y}|pi_m^(N)|", exact=v)
    series = drift_series(params, args.mmax, tol=args.tol)
    rep.add("drift_series[1]", series.value[0], series.tail_bound, "",
            "expansion:drift-series (error = rigorous tail bound)", exact=series.value[0])
    return EXIT_OK


def _cmd_crosscheck(args, rep: Report) -> int:
    checks = crosscheck(ModelParams(args.d, args.beta), args.mmax)
    for name, ok in checks.items():
        rep.add(name, 1.0 if ok else 0.0, 0.0, "flag", f"expansion:{name}")
    passed = all(checks.values())
    rep.verdict = {"passed": passed, "checks": checks}
    return EXIT_OK if passed else EXIT_FAIL


def _sim_config(args) -> SimConfig:
    seed = _default_seed() if args.seed is None else args.seed
    return SimConfig(args.n, args.replicas, seed, args.window, args.threads)


def _cmd_simulate(args, rep: Report) -> int:
    cfg = _sim_config(args)
    rep.seed = cfg.seed
    params = ModelParams(args.d, float(args.beta))
    both = estimate_drift_both(params, cfg)
    for est, res in both.items():
        for i, (m, e) in enumerate(zip(res.mean, res.stderr), start=1):
            rep.add(f"{est}[{i}]", m, e, "lattice units per step", f"montecarlo:{est}")
    return EXIT_OK


def _cmd_scan(args, rep: Report) -> int:
    cfg = _sim_config(args)
    rep.seed = cfg.seed
    scan = scan_beta(args.d, [float(b) for b in args.betas], cfg,
                     coupled=not args.uncoupled, estimator=args.estimator)
    rows = []
    for j, (beta, est) in enumerate(zip(scan.betas, scan.estimates)):
        diff, diff_err = scan.paired_diffs[j - 1] if j else ("", "")
        rows.append({"beta": beta, "mean": est.mean[0], "stderr": est.stderr[0],
                     "diff": diff, "diff_stderr": diff_err})
        rep.add(f"drift[1] beta={beta}", est.mean[0], est.stderr[0],
                "lattice units per step", f"montecarlo:{scan.estimator}")
    for j, (diff, err) in enumerate(scan.paired_diffs):
        rep.add(f"diff[1] {scan.betas[j]}->{scan.betas[j + 1]}", diff, err,
                "lattice units per step", "montecarlo:paired-difference")
    rep.rows = rows
    rep.verdict = {"coupled": scan.coupled,
                   "all_diffs_positive_3sigma": all(d > 3 * e for d, e in scan.paired_diffs)}
    return EXIT_OK


COMMANDS = {
    "greens": _cmd_greens, "constants": _cmd_constants, "bounds": _cmd_bounds,
    "certify": _cmd_certify, "expansion": _cmd_expansion, "crosscheck": _cmd_crosscheck,
    "simulate": _cmd_simulate, "scan": _cmd_scan,
}


def run(argv=None):
    """Parse ``argv``, execute, and return ``(exit_code, serialized_report)``."""
    code, text, _ = _execute(argv)
    return code, text


def _execute(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), "", None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    rep = Report(args.command, _config(args))
    try:
        code = COMMANDS[args.command](args, rep)
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_USAGE, "", None
    except (DivergenceError, ResourceError, PrecisionError) as exc:
        log.error("%s", exc)
        rep.verdict = {"error": type(exc).__name__, "message": str(exc)}
        code = EXIT_RESOURCE
    text = rep.to_csv() if args.format == "csv" else rep.to_json(not args.no_timestamp)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code, text, args.output


def main(argv=None) -> int:
    code, text, output = _execute(argv)
    if text and not output:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
