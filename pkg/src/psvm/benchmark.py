"""Seeded Monte Carlo campaigns for the three comparison tables.

Replication ``r`` of every cell draws its data from the substream
``(seed, r)``; the cell shares it (common random numbers across methods and
models of the same ``p``).  Results therefore do not depend on the number
of worker processes.  The summary file holds no timing so that reruns are
byte-identical; wall-clock seconds go to the raw file and ``timing.csv``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .baselines import fit_dr, fit_save, fit_sir
from .exceptions import PSVMError
from .kernel import KernelSpec, fit_kernel, gamma_population
from .linear import DEFAULT_LVR_SLICES, fit
from .metrics import quadratic_recovery_score, spearman_abs, subspace_distance
from .order import cvbic
from .serialize import SPEC_VERSION
from .simulate import RNG_NAME, ModelSpec, generate, rng_for

__all__ = ["Campaign", "TABLES", "default_campaign", "run_campaign", "summarize", "write_outputs"]

log = logging.getLogger(__name__)

TABLES = ("table1", "table2", "table3")
_METRIC = {"table1": "distance", "table2": "spearman", "table3": "correct"}
_FAILURES = (PSVMError, ArithmeticError, ValueError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class Campaign:
    table: str
    models: tuple[str, ...]
    ps: tuple[int, ...]
    ns: tuple[int, ...]
    methods: tuple[str, ...]
    reps: int = 100
    seed: int = 2024
    cost: float = 1.0
    h: int = DEFAULT_LVR_SLICES
    basis_k: int = 60

    def cells(self):
        for model in self.models:
            for p in self.ps:
                for n in self.ns:
                    yield model, p, n


def default_campaign(table: str, **overrides) -> Campaign:
    if table == "table1":
        base = dict(models=("I", "II", "III"), ps=(10, 20, 30), ns=(100,), methods=("sir", "save", "dr", "psvm"))
    elif table == "table2":
        base = dict(models=("II", "III"), ps=(10, 20, 30), ns=(100,), methods=("save", "dr", "kpsvm"))
    elif table == "table3":
        base = dict(models=("I", "II", "IV", "V"), ps=(10, 20, 30), ns=(200, 300, 400, 500), methods=("psvm",), reps=50)
    else:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    base.update({k: v for k, v in overrides.items() if v is not None})
    return Campaign(table=table, **base)


def _linear_fit(method: str, d, dim: int, cost: float, h: int):
    if method == "psvm":
        return fit(d, h=h, lam=cost, dim=dim)
    return {"sir": fit_sir, "save": fit_save, "dr": fit_dr}[method](d, dim=dim)


def _evaluate(c: Campaign, method: str, d, truth, rng, gamma: float | None) -> float:
    if c.table == "table1":
        return subspace_distance(_linear_fit(method, d, truth.d, c.cost, c.h).directions, truth.basis)
    if c.table == "table2":
        if method == "kpsvm":
            kf = fit_kernel(d, KernelSpec("gaussian", gamma=gamma), k=c.basis_k, h=c.h, lam=c.cost, dim=1)
            return spearman_abs(kf.training_predictors()[:, 0], truth.nonlinear)
        U = d.x @ _linear_fit(method, d, 2, c.cost, c.h).directions
        return quadratic_recovery_score(U[:, 0], U[:, 1], d.x[:, 0] ** 2 + d.x[:, 1] ** 2)
    res = cvbic(d, method=method, seed=rng, h=c.h, cost=c.cost)
    return float(res.d == truth.d)


def _run_task(args) -> list[dict]:
    c, model, p, n, rep, gamma = args
    rng = rng_for(c.seed, rep)
    d, truth = generate(ModelSpec(model, p, n), rng)
    rows = []
    for method in c.methods:
        row = {"table": c.table, "model": model, "p": p, "n": n, "method": method, "rep": rep,
               "metric": _METRIC[c.table], "value": math.nan, "status": "ok", "warnings": 0}
        start = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                row["value"] = _evaluate(c, method, d, truth, rng, gamma)
            except _FAILURES as exc:
                row["status"] = f"failed: {type(exc).__name__}"
                log.warning("%s %s p=%d n=%d rep=%d %s failed: %s", c.table, model, p, n, rep, method, exc)
        row["warnings"] = len(caught)
        row["seconds"] = time.perf_counter() - start
        rows.append(row)
    return rows


def run_campaign(c: Campaign, jobs: int = 1) -> list[dict]:
    """All per-replication rows, in (cell, rep, method) order."""
    if c.reps < 1:
        raise ValueError("reps must be at least 1")
    if c.reps < 10:
        log.warning("only %d replications; summaries will be noisy", c.reps)
    gammas = {p: gamma_population(p) for p in c.ps} if c.table == "table2" else {}
    tasks = [(c, m, p, n, r, gammas.get(p)) for m, p, n in c.cells() for r in range(c.reps)]
    if jobs <= 1:
        chunks = map(_run_task, tasks)
        return [row for chunk in chunks for row in chunk]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunks = pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * jobs)))
        return [row for chunk in chunks for row in chunk]


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and sd (ddof 1; ``None`` with fewer than two values) per cell and method."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["table"], r["model"], r["p"], r["n"], r["method"], r["metric"]), []).append(r)
    out = []
    for key, grp in groups.items():
        vals = np.array([g["value"] for g in grp if g["status"] == "ok"], dtype=float)
        mean = float(np.mean(vals)) if vals.size else None
        sd = float(np.std(vals, ddof=1)) if vals.size > 1 else None
        out.append(dict(zip(("table", "model", "p", "n", "method", "metric"), key),
                        reps_ok=int(vals.size), reps_failed=len(grp) - int(vals.size), mean=mean, sd=sd))
    return out


def _fmt(x) -> str:
    return "NA" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6f}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_outputs(c: Campaign, rows: list[dict], out_dir: str | Path) -> dict[str, Path]:
    """Write ``raw.csv``, ``summary.csv``, ``layout.csv``, ``timing.csv`` and ``meta.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw_cols = ["table", "model", "p", "n", "method", "rep", "metric", "value", "status", "warnings", "seconds"]
    _write_csv(out / "raw.csv", raw_cols,
               ([r[k] if k not in ("value", "seconds") else _fmt(r[k]) for k in raw_cols] for r in rows))
    summ = summarize(rows)
    sum_cols = ["table", "model", "p", "n", "method", "metric", "reps_ok", "reps_failed", "mean", "sd"]
    _write_csv(out / "summary.csv", sum_cols,
               ([s[k] if k not in ("mean", "sd") else _fmt(s[k]) for k in sum_cols] for s in summ))

    # one row per (model, p, n), one "mean (sd)" column per method, as in the printed tables
    by_cell: dict[tuple, dict] = {}
    for s in summ:
        cell = by_cell.setdefault((s["model"], s["p"], s["n"]), {})
        sd = "NA" if s["sd"] is None else f"{s['sd']:.2f}"
        cell[s["method"]] = "NA" if s["mean"] is None else f"{s['mean']:.2f} ({sd})"
    _write_csv(out / "layout.csv", ["model", "p", "n", *c.methods],
               ([m, p, n, *(cell.get(meth, "NA") for meth in c.methods)] for (m, p, n), cell in by_cell.items()))

    secs: dict[str, list[float]] = {}
    for r in rows:
        secs.setdefault(r["method"], []).append(r["seconds"])
    _write_csv(out / "timing.csv", ["method", "fits", "mean_seconds"],
               ([m, len(v), _fmt(float(np.mean(v)))] for m, v in secs.items()))

    meta = {"spec_version": SPEC_VERSION, "rng": RNG_NAME, "campaign": asdict(c)}
    with open(out / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return {k: out / f"{k}.csv" for k in ("raw", "summary", "layout", "timing")} | {"meta": out / "meta.json"}
