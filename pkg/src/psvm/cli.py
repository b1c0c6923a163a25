"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import __version__
from .baselines import fit_dr, fit_save, fit_sir
from .benchmark import TABLES, default_campaign, run_campaign, write_outputs
from .dataset import read_csv, read_matrix_csv, standardize
from .exceptions import DataError, NumericError
from .kernel import KernelFit, KernelSpec, evaluate_predictor, fit_kernel, gamma_population, gamma_sample
from .linear import DEFAULT_LVR_SLICES, COST_FORMS, fit, project
from .order import BicConfig, cvbic, write_misclassification_csv
from .serialize import load_fit, save_fit

log = logging.getLogger("psvm")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _slices(args, default: int = DEFAULT_LVR_SLICES) -> int:
    if args.dividing_points is not None:
        return args.dividing_points + 1
    return default if args.slices is None else args.slices


def _load(args):
    d, names = read_csv(args.csv, args.response, categorical=args.categorical)
    if d is None:
        raise DataError(f"{args.csv} has no data rows")
    return d, names


def _fmt_vec(v) -> str:
    return " ".join(f"{x:.4f}" for x in np.ravel(v))


def cmd_fit_linear(args) -> int:
    d, names = _load(args)
    h = _slices(args, {"psvm": DEFAULT_LVR_SLICES, "sir": 8}.get(args.method, 4))
    if args.categorical and (args.scheme == "ova" or args.method != "psvm"):
        h = np.unique(d.y).size
    if args.method == "psvm":
        res = fit(d, scheme=args.scheme, h=h, lam=args.cost, dim=args.dim, cost_form=args.cost_form)
    else:
        fitter = {"sir": fit_sir, "save": fit_save, "dr": fit_dr}[args.method]
        res = fitter(d, h=h, dim=args.dim)
    save_fit(res, args.out, predictor_names=names, cost_form=args.cost_form, seed=args.seed)
    print(f"method {res.method}  n={d.n} p={d.p} dim={res.dim}")
    print(f"eigenvalues {_fmt_vec(res.eigvals[: min(d.p, 10)])}")
    for j in range(res.dim):
        print(f"direction {j + 1} {_fmt_vec(res.directions[:, j])}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _resolve_gamma(args, d) -> float:
    g = args.gamma
    if g == "auto-pop":
        p = args.p if args.p is not None else d.p
        value = gamma_population(p, seed=args.seed)
        log.info("gamma (population, p=%d) = %.6g", p, value)
        return value
    if g in ("auto-sample", "auto-median"):
        x = standardize(d).x if args.standardize else d.x
        value = gamma_sample(x, "median" if g == "auto-median" else "mean")
        log.info("gamma (sample %s) = %.6g", "median" if g == "auto-median" else "mean", value)
        return value
    try:
        return float(g)
    except ValueError:
        raise ValueError(f"--gamma must be auto-sample, auto-median, auto-pop or a number, not {g!r}") from None


def cmd_fit_kernel(args) -> int:
    d, names = _load(args)
    h = _slices(args)
    if args.scheme == "ova" and args.categorical:
        h = np.unique(d.y).size
    if args.kernel == "gaussian":
        spec = KernelSpec("gaussian", gamma=_resolve_gamma(args, d))
    else:
        spec = KernelSpec("polynomial", coef0=args.coef0, degree=args.degree)
    res = fit_kernel(d, spec, k=args.basis_k, scheme=args.scheme, h=h, lam=args.cost, dim=args.dim,
                     standardize_x=args.standardize)
    save_fit(res, args.out, predictor_names=names, seed=args.seed)
    print(f"method kpsvm  n={d.n} p={d.p} k={res.basis.k} dim={res.dim} kernel={spec.to_dict()}")
    print(f"eigenvalues {_fmt_vec(res.eigvals[: min(res.basis.k, 10)])}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_fit(args.fit)
    x, names = read_matrix_csv(args.csv)
    if args.response is not None and names:
        if args.response in names:
            idx = names.index(args.response)
        elif args.response.lstrip("-").isdigit():
            idx = int(args.response)
        else:
            raise DataError(f"column {args.response!r} not found")
        x = np.delete(x, idx, axis=1)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        if x.shape[0] == 0:
            return EXIT_OK
        vals = evaluate_predictor(model, x) if isinstance(model, KernelFit) else project(model, x)
        w = csv.writer(out, lineterminator="\n")
        w.writerow([f"u{j + 1}" for j in range(vals.shape[1])])
        w.writerows([repr(float(v)) for v in row] for row in vals)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_select_dim(args) -> int:
    d, _ = _load(args)
    grid = BicConfig() if args.a_grid is None else BicConfig(a_grid=tuple(args.a_grid))
    res = cvbic(d, method=args.method, bic=grid, seed=args.seed, h=_slices(args), cost=args.cost)
    if args.misclass_csv:
        write_misclassification_csv(res, args.misclass_csv)
    print(f"d_hat {res.d}")
    print(f"a {res.a:.6g}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    c = default_campaign(
        args.table,
        reps=args.reps,
        seed=args.seed,
        models=tuple(args.models) if args.models else None,
        ps=tuple(args.p) if args.p else None,
        ns=tuple(args.n) if args.n else None,
        methods=tuple(args.methods) if args.methods else None,
    )
    rows = run_campaign(c, jobs=args.jobs)
    paths = write_outputs(c, rows, args.out)
    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        log.warning("%d of %d fits failed and were excluded", failed, len(rows))
    with open(paths["layout"], encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    print(f"wrote {args.out}")
    return EXIT_OK


def _add_fit_args(sp, kernel: bool) -> None:
    sp.add_argument("csv", help="comma-delimited input with a header")
    sp.add_argument("--response", required=True, help="response column name or 0-based index")
    sp.add_argument("--scheme", choices=("lvr", "ova"), default="lvr")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--slices", type=int, default=None, help="number of slices h (PSVM default 21)")
    g.add_argument("--dividing-points", type=int, default=None, help="number of dividing points (h - 1)")
    sp.add_argument("--cost", type=float, default=1.0)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--categorical", action="store_true", help="treat the response as class labels")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="JSON fit artifact")
    if kernel:
        sp.add_argument("--kernel", choices=("gaussian", "poly"), default="gaussian")
        sp.add_argument("--gamma", default="auto-sample", help="auto-sample, auto-median, auto-pop or a number")
        sp.add_argument("--p", type=int, default=None, help="dimension used by --gamma auto-pop")
        sp.add_argument("--coef0", type=float, default=1.0)
        sp.add_argument("--degree", type=int, default=2)
        sp.add_argument("--basis-k", type=int, default=None, help="number of eigenfunctions (default n // 2)")
        sp.add_argument("--no-standardize", dest="standardize", action="store_false")
    else:
        sp.add_argument("--method", choices=("psvm", "sir", "save", "dr"), default="psvm")
        sp.add_argument("--cost-form", choices=COST_FORMS, default="package")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psvm", description="Principal support vector machines for dimension reduction")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fit-linear", help="linear PSVM or an inverse-regression baseline")
    _add_fit_args(sp, kernel=False)
    sp.set_defaults(func=cmd_fit_linear)

    sp = sub.add_parser("fit-kernel", help="kernel PSVM")
    _add_fit_args(sp, kernel=True)
    sp.set_defaults(func=cmd_fit_kernel)

    sp = sub.add_parser("predict", help="apply a saved fit to new rows")
    sp.add_argument("fit", help="JSON fit artifact")
    sp.add_argument("csv", help="predictor columns, same order as in training")
    sp.add_argument("--response", default=None, help="column to drop before predicting")
    sp.add_argument("--out", default=None, help="output CSV (default stdout)")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("select-dim", help="structural dimension by cross-validated BIC")
    sp.add_argument("csv")
    sp.add_argument("--response", required=True)
    sp.add_argument("--method", choices=("psvm", "sir", "save", "dr"), default="psvm")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--slices", type=int, default=None)
    g.add_argument("--dividing-points", type=int, default=None)
    sp.add_argument("--cost", type=float, default=1.0)
    sp.add_argument("--a-grid", type=float, nargs="+", default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--misclass-csv", default=None, help="write the per-a misclassification table here")
    sp.add_argument("--categorical", action="store_true")
    sp.set_defaults(func=cmd_select_dim)

    sp = sub.add_parser("benchmark", help="simulation campaign for one of the comparison tables")
    sp.add_argument("table", choices=TABLES)
    sp.add_argument("--reps", type=int, default=None)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--models", nargs="+", default=None)
    sp.add_argument("--p", type=int, nargs="+", default=None)
    sp.add_argument("--n", type=int, nargs="+", default=None)
    sp.add_argument("--methods", nargs="+", default=None)
    sp.set_defaults(func=cmd_benchmark)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="psvm: %(message)s", force=True)
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"psvm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"psvm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"psvm: {exc}", file=sys.stderr)
        return EXIT_DATA
    except np.linalg.LinAlgError as exc:
        print(f"psvm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # values that pass argparse but not the library's own checks
        print(f"psvm: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
