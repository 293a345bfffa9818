"""Command-line interface.

Exit codes: 0 success, 2 malformed input file, 3 bad flags or dimensions,
4 output cannot be written.  Diagnostics go to stderr.

The penalized objective is (1/2n)*RSS + lambda * penalty, so lambda values
are comparable across sample sizes.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from shrinkreg import __version__
from shrinkreg.comparison import TABLE_COLUMNS, compare_models
from shrinkreg.core import Dataset, fit_ols
from shrinkreg.equal_weights import (
    SUM_LABEL,
    EqualWeightsFit,
    augmented_dataset,
    equal_weights_spec,
    implied_coefficients,
)
from shrinkreg.io import (
    ColumnError,
    DataFormatError,
    provenance_lines,
    read_dataset,
    read_key_values,
    render_table,
    write_text,
)
from shrinkreg.selection import cross_validate_path, kfold_split, model_setup
from shrinkreg.simulation import SUMMARY_COLUMNS, SimConfig, run_experiment
from shrinkreg.solver import PenaltySpec, default_lambda_grid, fit_path, fit_penalized
from shrinkreg.weighting import evaluate_schemes

EXIT_FORMAT = 2
EXIT_USAGE = 3
EXIT_OUTPUT = 4


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        write_text(out, text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}") from exc


def _ensure_dir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write-probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as exc:
        raise OutputError(f"output directory {path} is not writable: {exc}") from exc


def _header(args, command: str, config: dict) -> list[str]:
    return provenance_lines(command, config, args.seed, __version__)


def _data_config(args) -> dict:
    return {"data": args.data, "response": args.response}


def _standardize_default(model: str, flag):
    if flag is not None:
        return flag
    return model == "lasso"


# -- fit ---------------------------------------------------------------------

def cmd_fit(args) -> None:
    data = read_dataset(args.data, args.response)
    cfg = {**_data_config(args), "model": args.model}
    if args.model != "ols":
        if args.lam is None:
            raise UsageError(f"--lambda is required for --model {args.model}")
        std = _standardize_default(args.model, args.standardize)
        cfg.update(alpha=args.alpha, **{"lambda": args.lam}, standardize=std)
    if args.model == "ols":
        fit = fit_ols(data)
        cols = ("term", "estimate")
        rows = [("Intercept", fit.intercept), *zip(data.column_names, fit.coefficients)]
    elif args.model == "lasso":
        fit = fit_penalized(data, PenaltySpec(args.alpha, args.lam, None, std))
        cols = ("term", "estimate")
        rows = [("Intercept", fit.intercept), *zip(data.column_names, fit.coefficients)]
    else:
        _need_two(data)
        spec = equal_weights_spec(data.p, args.alpha, std)
        eq = EqualWeightsFit.from_linear(
            fit_penalized(augmented_dataset(data), PenaltySpec(spec.alpha, args.lam, spec.penalty_factors, std)))
        implied = implied_coefficients(eq)
        cols = ("term", "estimate", "implied")
        rows = [("Intercept", eq.intercept, eq.intercept), (SUM_LABEL, eq.xi, np.nan)]
        rows += list(zip(data.column_names, eq.gammas, implied.coefficients))
    _emit(render_table(cols, rows, _header(args, "fit", cfg), args.precision), args.out)


def _need_two(data: Dataset) -> None:
    if data.p < 2:
        raise UsageError("the equal-weights model needs at least 2 predictors")


# -- cv ----------------------------------------------------------------------

def cmd_cv(args) -> None:
    data = read_dataset(args.data, args.response)
    if args.model == "equal":
        _need_two(data)
    if not 2 <= args.folds <= data.n:
        raise UsageError(f"--folds must lie in [2, {data.n}]")
    std = _standardize_default(args.model, args.standardize)
    cfg = {**_data_config(args), "model": args.model, "alpha": args.alpha, "folds": args.folds,
           "n_lambda": args.n_lambda, "standardize": std}
    _ensure_dir(args.out)
    design, spec = model_setup(data, args.model, args.alpha, std)
    grid = default_lambda_grid(design, spec, args.n_lambda)
    folds = kfold_split(data.n, args.folds, args.seed)
    curve = cross_validate_path(data, args.model, args.alpha, grid, folds, std, threads=args.threads)
    path = fit_path(design, spec, grid)
    header = _header(args, "cv", cfg)

    rows = [(g, m, s, k == curve.chosen_min, k == curve.chosen_1se)
            for k, (g, m, s) in enumerate(zip(curve.grid, curve.mean_error, curve.std_error))]
    _emit(render_table(("grid_value", "mean_error", "std_error", "is_min", "is_1se"), rows,
                       header, args.precision),
          os.path.join(args.out, "cv_curve.csv"))

    fmin, f1se = path.fit_at(curve.chosen_min), path.fit_at(curve.chosen_1se)
    if args.model == "lasso":
        cols = ("term", "min", "1se")
        coef_rows = [("Intercept", fmin.intercept, f1se.intercept),
                     *zip(data.column_names, fmin.coefficients, f1se.coefficients)]
    else:
        emin, e1se = EqualWeightsFit.from_linear(fmin), EqualWeightsFit.from_linear(f1se)
        imin, i1se = implied_coefficients(emin), implied_coefficients(e1se)
        cols = ("term", "min", "1se", "implied_min", "implied_1se")
        coef_rows = [("Intercept", emin.intercept, e1se.intercept, imin.intercept, i1se.intercept),
                     (SUM_LABEL, emin.xi, e1se.xi, np.nan, np.nan)]
        coef_rows += list(zip(data.column_names, emin.gammas, e1se.gammas,
                              imin.coefficients, i1se.coefficients))
    lam_lines = [f"# lambda_min: {curve.value_min!r}", f"# lambda_1se: {curve.value_1se!r}",
                 f"# min_cv_mse: {curve.min_error!r}"]
    _emit(render_table(cols, coef_rows, header + lam_lines, args.precision),
          os.path.join(args.out, "coefficients.csv"))


# -- compare -----------------------------------------------------------------

def cmd_compare(args) -> None:
    data = read_dataset(args.data, args.response)
    _need_two(data)
    if not 2 <= args.folds <= data.n:
        raise UsageError(f"--folds must lie in [2, {data.n}]")
    cfg = {**_data_config(args), "alpha": args.alpha, "folds": args.folds, "n_lambda": args.n_lambda}
    _ensure_dir(args.out)
    report = compare_models(data, args.alpha, args.folds, args.seed, args.n_lambda, args.threads)
    header = _header(args, "compare", cfg)
    mins = [f"# min_cv_mse {k}: {v!r}" for k, v in report.min_mse.items()]
    _emit(render_table(TABLE_COLUMNS, report.coefficient_table(), header + mins, args.precision),
          os.path.join(args.out, "coefficients.csv"))
    for name, run in (("standard", report.standard), ("equal", report.equal)):
        c = run.curve
        rows = zip(c.grid, c.mean_error, c.std_error, run.path.n_nonzero())
        _emit(render_table(("lambda", "mean_mse", "se", "n_nonzero"), rows, header, args.precision),
              os.path.join(args.out, f"cv_{name}.csv"))


# -- simulate ----------------------------------------------------------------

SIM_KEYS = {
    "n-grid": ("n_grid", lambda v: tuple(int(x) for x in v.split(","))),
    "r-grid": ("r_grid", lambda v: tuple(float(x) for x in v.split(","))),
    "rho-grid": ("rho_grid", lambda v: tuple(float(x) for x in v.split(","))),
    "reps": ("replications", int),
    "validation-n": ("validation_n", int),
    "folds": ("folds", int),
    "seed": ("master_seed", int),
}


def resolve_sim_config(args) -> SimConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    values = {}
    if args.config:
        try:
            file_values = read_key_values(args.config)
        except OSError as exc:
            raise DataFormatError(f"cannot read config {args.config}: {exc}") from exc
        for key, raw in file_values.items():
            if key == "threads":
                continue
            if key not in SIM_KEYS:
                raise UsageError(f"unknown config key {key!r} in {args.config}")
            field, conv = SIM_KEYS[key]
            try:
                values[field] = conv(raw)
            except ValueError as exc:
                raise DataFormatError(f"{args.config}: bad value for {key}: {raw!r}") from exc
    for key, (field, conv) in SIM_KEYS.items():
        raw = getattr(args, key.replace("-", "_"))
        if raw is not None:
            try:
                values[field] = conv(raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise UsageError(f"bad value for --{key}: {raw!r}") from exc
    try:
        return SimConfig(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _config_text(config: SimConfig) -> str:
    lines = [f"# shrinkreg {__version__} resolved simulation config"]
    for key, (field, _) in SIM_KEYS.items():
        v = getattr(config, field)
        lines.append(f"{key} = {','.join(repr(x) for x in v) if isinstance(v, tuple) else v}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> None:
    config = resolve_sim_config(args)
    _ensure_dir(args.out)
    partial = os.path.join(args.out, "summary.partial.csv")
    log = (lambda s: print(f"cell n={s.n} r={s.r} rho={s.rho} done", file=sys.stderr)) if args.verbose else None
    summaries = run_experiment(config, threads=args.threads, checkpoint=partial, progress=log)
    cfg = config.as_dict()
    cfg.pop("s_grid")
    cfg["s_grid"] = f"{config.s_grid[0]}..{config.s_grid[-1]} ({len(config.s_grid)} points)"
    header = provenance_lines("simulate", cfg, config.master_seed, __version__)
    header.append(f"# center: median over {config.replications} replications; "
                  "q25/q75 are the 25th/75th percentiles")
    rows = [[getattr(s, c) for c in SUMMARY_COLUMNS] for s in summaries]
    _emit(render_table(SUMMARY_COLUMNS, rows, header, args.precision),
          os.path.join(args.out, "summary.csv"))
    _emit(_config_text(config), os.path.join(args.out, "config.txt"))
    if os.path.exists(partial):
        os.remove(partial)


# -- compare-weights ---------------------------------------------------------

def cmd_compare_weights(args) -> None:
    data = read_dataset(args.data, args.response)
    if not 0 < args.train_frac < 1:
        raise UsageError("--train-frac must lie strictly between 0 and 1")
    n_train = int(round(args.train_frac * data.n))
    if n_train < max(3, data.p + 1) or data.n - n_train < 2:
        raise UsageError(f"split of {data.n} rows leaves too few rows for training or testing")
    perm = np.random.Generator(np.random.PCG64(args.seed)).permutation(data.n)
    train, test = data.subset(np.sort(perm[:n_train])), data.subset(np.sort(perm[n_train:]))
    cfg = {**_data_config(args), "train_frac": args.train_frac}
    results = evaluate_schemes(train, test)
    rows = [(k.value, m.mse, m.pearson_r) for k, m in results.items()]
    _emit(render_table(("scheme", "mse", "pearson_r"), rows, _header(args, "compare-weights", cfg),
                       args.precision), args.out)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shrinkreg", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"shrinkreg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out_help="write to this file instead of stdout"):
        p.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
        p.add_argument("--precision", type=int, default=6, help="significant digits in output")
        p.add_argument("--out", default=None, help=out_help)

    def data_args(p):
        p.add_argument("data", help="CSV file with a header row")
        p.add_argument("--response", default="y", help="name of the criterion column (default: y)")

    def model_args(p):
        p.add_argument("--alpha", type=float, default=1.0,
                       help="elastic-net mixing: 1 = lasso, 0 = ridge")
        p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                       help="standardize columns (default: on for lasso, off for equal)")

    p = sub.add_parser("fit", help="fit one model at one lambda")
    data_args(p)
    p.add_argument("--model", choices=("ols", "lasso", "equal"), default="ols")
    model_args(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="penalty strength for (1/2n)*RSS + lambda*penalty")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cv", help="K-fold CV along a lambda path")
    data_args(p)
    p.add_argument("--model", choices=("lasso", "equal"), default="lasso")
    model_args(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--n-lambda", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)
    common(p, "output directory for cv_curve.csv and coefficients.csv")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("compare", help="standard lasso vs equal-weights lasso on shared folds")
    data_args(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--n-lambda", type=int, default=100)
    p.add_argument("--threads", type=int, default=1)
    common(p, "output directory for coefficients.csv, cv_standard.csv and cv_equal.csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="reliability / shrinkage simulation")
    p.add_argument("--config", default=None, help="key = value file; flags override it")
    p.add_argument("--n-grid", default=None, help="comma-separated calibration sizes")
    p.add_argument("--r-grid", default=None, help="comma-separated effect sizes")
    p.add_argument("--rho-grid", default=None, help="comma-separated reliabilities")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--validation-n", type=int, default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--precision", type=int, default=6)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare-weights", help="four composite weighting schemes out of sample")
    data_args(p)
    p.add_argument("--train-frac", type=float, default=0.5)
    common(p)
    p.set_defaults(func=cmd_compare_weights)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "precision", 6) < 1:
        parser.error("--precision must be at least 1")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    if args.command in ("cv", "compare") and args.out is None:
        parser.error(f"{args.command} needs --out DIR")
    try:
        args.func(args)
    except DataFormatError as exc:
        print(f"shrinkreg: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OutputError as exc:
        print(f"shrinkreg: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (UsageError, ColumnError, ValueError) as exc:
        print(f"shrinkreg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
