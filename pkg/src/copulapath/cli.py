"""Command-line surface: ``simulate``, ``fit``, and ``ks-check``.

Exit codes: 0 on success, 2 for usage problems (bad flags, unreadable
input, unknown columns), 3 for numeric or data failures (the message names
the offending matrix, fold, or cell). All randomness flows from ``--seed``
(fixed default, never time-derived); sub-streams are derived per fold and
replication, so repeating a full command reproduces its output exactly.

When ``--out`` is omitted the markdown report goes to stdout. When a
report is written to disk, diagnostic figures (PNG) land next to it unless
``--no-figures`` is given. ``COPULAPATH_OUT_DIR``, if set, anchors relative
``--out`` paths.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .copula import CorrelationMatrix
from .dataio import prepare, read_csv, render_report, write_report
from .errors import (
    CopulaPathError,
    EmptyFile,
    IoError,
    MissingColumn,
    NotPositiveDefinite,
    UnsupportedFormat,
)
from .evaluation import cross_validate, summarize_cv
from .figures import save_report_figures
from .numerics import ks_test_normal, standardize
from .regression import McSettings
from .simulation import LEVELS, SAMPLE_SIZES, Scenario, run_scenario

__all__ = ["main", "build_parser"]

USAGE_EXIT = 2
FAILURE_EXIT = 3

_METHOD_FLAGS = {
    "classical": "classical",
    "gaussian-copula": "gaussian_copula",
    "t-copula": "t_copula",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=5, help="number of CV folds (default: 5)")
    parser.add_argument("--seed", type=int, default=0,
                        help="root seed for all derived streams (default: 0)")
    parser.add_argument("--method", action="append", choices=sorted(_METHOD_FLAGS),
                        help="method to run; repeatable "
                             "(default: classical and gaussian-copula)")
    parser.add_argument("--nu", type=float, default=4.0,
                        help="degrees of freedom for t-copula (default: 4.0)")
    parser.add_argument("--mc-draws", type=int, default=20000,
                        help="Monte-Carlo draws per prediction when no closed "
                             "form applies (default: 20000)")
    parser.add_argument("--refit-on-test", action="store_true", default=False,
                        help="re-estimate test-partition correlations and copula "
                             "coefficients for reporting (default: off)")
    parser.add_argument("--conventional-ic", action="store_true", default=False,
                        help="use the deviance form -2*logL + penalty for AIC/BIC "
                             "instead of n*LL + penalty (default: off)")
    parser.add_argument("--k-params", type=int, default=None,
                        help="parameter count for AIC/BIC (default: p+1)")
    parser.add_argument("--out", default=None,
                        help="output path; csv format treats it as a directory "
                             "(default: markdown to stdout)")
    parser.add_argument("--format", choices=("json", "csv", "markdown"), default=None,
                        help="report format (default: json with --out, else markdown)")
    parser.add_argument("--no-figures", action="store_true", default=False,
                        help="skip PNG figures next to the written report (default: off)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copulapath",
        description="Path-analysis effect estimation via classical OLS and "
                    "elliptical-copula regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a synthetic correlation scenario")
    sim.add_argument("--p", type=int, default=2,
                     help="number of exogenous variables, 2 or 3 for built-in "
                          "matrices (default: 2)")
    sim.add_argument("--level", default="low",
                     help="built-in correlation level: low, medium, or high "
                          "(default: low)")
    sim.add_argument("--n", type=int, default=400,
                     help="sample size; 100/200/300/400 for built-in matrices "
                          "(default: 400)")
    sim.add_argument("--sigma-file", default=None,
                     help="CSV file with a custom correlation matrix over "
                          "(y, x1..xp); overrides --p/--level (default: none)")
    sim.add_argument("--reps", type=int, default=20,
                     help="number of replications to average (default: 20)")
    sim.add_argument("--strict-ks", action="store_true", default=False,
                     help="exclude replications failing the KS gate at p<0.01 "
                          "(default: report only)")
    _add_common(sim)

    fit_cmd = sub.add_parser("fit", help="fit a path model to a CSV dataset")
    fit_cmd.add_argument("--csv", required=True, help="input CSV file with header")
    fit_cmd.add_argument("--y", required=True, help="endogenous column name")
    fit_cmd.add_argument("--x", required=True,
                         help="comma-separated exogenous column names")
    _add_common(fit_cmd)

    ks = sub.add_parser("ks-check", help="KS normality check per standardized column")
    ks.add_argument("--csv", required=True, help="input CSV file with header")
    ks.add_argument("--columns", default=None,
                    help="comma-separated column names (default: all)")
    return parser


def _resolve_out(out):
    base = os.environ.get("COPULAPATH_OUT_DIR")
    if out is not None and base and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _methods(args) -> tuple[str, ...]:
    if not args.method:
        return ("classical", "gaussian_copula")
    seen = []
    for name in args.method:
        internal = _METHOD_FLAGS[name]
        if internal not in seen:
            seen.append(internal)
    return tuple(seen)


def _deliver(report: dict, args) -> None:
    out = _resolve_out(args.out)
    if out is None:
        sys.stdout.write(render_report(report, args.format or "markdown"))
        return
    format = args.format or "json"
    written = write_report(report, out, format)
    if not args.no_figures:
        if format == "csv":
            figure_dir, stem = out, "report"
        else:
            figure_dir = os.path.dirname(os.path.abspath(out))
            stem = os.path.splitext(os.path.basename(out))[0]
        written += save_report_figures(report, figure_dir, stem)
    for path in written:
        sys.stderr.write(f"wrote {path}\n")


def _load_sigma_file(path) -> CorrelationMatrix:
    try:
        values = np.loadtxt(path, delimiter=",", dtype=float)
    except OSError as err:
        raise IoError(f"cannot read {path}: {err}") from err
    except ValueError as err:
        raise NotPositiveDefinite(f"{path}: not a numeric matrix ({err})") from err
    try:
        return CorrelationMatrix(values)
    except (ValueError, NotPositiveDefinite) as err:
        raise NotPositiveDefinite(f"{path}: {err}") from err


def _cmd_simulate(args, parser: argparse.ArgumentParser) -> int:
    if args.sigma_file is not None:
        sigma = _load_sigma_file(args.sigma_file)
        scenario = Scenario(p=sigma.dim - 1, level="custom", sigma=sigma, n=args.n,
                            replications=args.reps, seed=args.seed)
    else:
        if args.p not in (2, 3):
            parser.error(f"--p {args.p} requires --sigma-file (built-ins cover p=2,3)")
        if args.level not in LEVELS:
            parser.error(f"--level must be one of {', '.join(LEVELS)}")
        if args.n not in SAMPLE_SIZES:
            parser.error(
                f"--n must be one of {', '.join(map(str, SAMPLE_SIZES))} "
                "for built-in scenarios (use --sigma-file for other sizes)"
            )
        scenario = Scenario.builtin(args.p, args.level, args.n,
                                    replications=args.reps, seed=args.seed)
    bundle = run_scenario(
        scenario,
        methods=_methods(args),
        k=args.k,
        ks_mode="strict" if args.strict_ks else "report",
        refit_on_test=args.refit_on_test,
        k_params=args.k_params,
        ic_mode="deviance" if args.conventional_ic else "loglik",
        nu=args.nu if "t_copula" in _methods(args) else None,
        mc_draws=args.mc_draws,
    )
    _deliver(bundle.to_dict(), args)
    return 0


def _cmd_fit(args, parser: argparse.ArgumentParser) -> int:
    exogenous = [name.strip() for name in args.x.split(",") if name.strip()]
    if not exogenous:
        parser.error("--x must name at least one column")
    data = read_csv(args.csv, args.y, exogenous)
    std, ks_results = prepare(data)
    cv = cross_validate(
        std,
        methods=_methods(args),
        k=args.k,
        seed=args.seed,
        k_params=args.k_params,
        ic_mode="deviance" if args.conventional_ic else "loglik",
        refit_on_test=args.refit_on_test,
        nu=args.nu if "t_copula" in _methods(args) else None,
        mc_settings=McSettings(n_draws=args.mc_draws, seed=args.seed),
    )
    report = {
        "dataset": {
            "path": str(args.csv),
            "endogenous": args.y,
            "exogenous": list(exogenous),
            "n": std.n,
            "k": args.k,
            "seed": args.seed,
        },
        "ks": [
            {"column": name, "statistic": r.statistic, "p_value": r.p_value}
            for name, r in zip(std.names, ks_results)
        ],
    }
    report.update(summarize_cv(cv, std.exogenous))
    _deliver(report, args)
    return 0


def _cmd_ks_check(args, parser: argparse.ArgumentParser) -> int:
    if args.columns:
        names = [c.strip() for c in args.columns.split(",") if c.strip()]
    else:
        import csv as csv_mod

        try:
            with open(args.csv, newline="", encoding="utf-8") as fh:
                header = next(csv_mod.reader(fh), [])
        except OSError as err:
            raise IoError(f"cannot read {args.csv}: {err}") from err
        names = [c.strip() for c in header if c.strip()]
        if not names:
            raise EmptyFile(f"{args.csv}: no header row")
    data = read_csv(args.csv, names[0], names[1:])
    rows = []
    for name in names:
        result = ks_test_normal(standardize(data.column(name)))
        rows.append((name, result.statistic, result.p_value, result.n))
    width = max(len(name) for name in names)
    sys.stdout.write(f"{'column'.ljust(width)}  {'statistic':>10}  {'p_value':>8}  {'n':>6}\n")
    for name, stat, pval, n in rows:
        sys.stdout.write(f"{name.ljust(width)}  {stat:>10.4f}  {pval:>8.4f}  {n:>6d}\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"simulate": _cmd_simulate, "fit": _cmd_fit, "ks-check": _cmd_ks_check}
    try:
        return handlers[args.command](args, parser)
    except SystemExit as exc:  # parser.error inside a handler
        return int(exc.code or 0)
    except (IoError, MissingColumn, EmptyFile) as err:
        sys.stderr.write(f"error: {err}\n")
        return USAGE_EXIT
    except UnsupportedFormat as err:
        sys.stderr.write(f"error: {err}\n")
        return USAGE_EXIT
    except CopulaPathError as err:
        sys.stderr.write(f"error: {err}\n")
        return FAILURE_EXIT
    except Exception as err:  # never let a traceback cross the CLI boundary
        sys.stderr.write(f"internal error: {err}\n")
        return FAILURE_EXIT


if __name__ == "__main__":
    sys.exit(main())
