"""Desk-scale acceptance checks.

Each test prints one PASS/FAIL line and asserts the same condition, so a
failing criterion shows up both in the summary section and as a test failure.
"""

import warnings

import numpy as np
import pytest

from oracles import exhaustive_dual, primal_qp
from psvm.benchmark import default_campaign, run_campaign, summarize
from psvm.cli import main
from psvm.dataset import Dataset
from psvm.exceptions import ConvergenceWarning, RankDeficientWarning
from psvm.kernel import KernelSpec, basis_functions, build_basis, gamma_population
from psvm.linear import fit
from psvm.metrics import subspace_distance
from psvm.qp import DualProblem, dual_gradient, dual_objective, solve_dual
from psvm.simulate import ModelSpec, generate

pytestmark = pytest.mark.acceptance


def means(campaign, jobs=1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        rows = run_campaign(campaign, jobs=jobs)
    return {(s["model"], s["p"], s["n"], s["method"]): s["mean"] for s in summarize(rows)}


@pytest.fixture(scope="module")
def table1():
    return means(default_campaign("table1", models=("I", "III"), ps=(10,), methods=("sir", "dr", "psvm")))


def test_ac1_table1_model_i(table1, report):
    psvm, sir, dr = (table1[("I", 10, 100, m)] for m in ("psvm", "sir", "dr"))
    ok = abs(psvm - 0.65) <= 0.10 and abs(sir - 0.84) <= 0.10 and psvm < sir < dr
    detail = f"Model I p=10 mean distance PSVM {psvm:.3f} (0.65+-0.10), SIR {sir:.3f} (0.84+-0.10), DR {dr:.3f}"
    assert report("AC1 table 1 model I", ok, detail)


def test_ac2_table1_model_iii(table1, report):
    psvm, sir = table1[("III", 10, 100, "psvm")], table1[("III", 10, 100, "sir")]
    ok = psvm > 1.4 and sir > 1.6
    assert report("AC2 table 1 model III", ok, f"PSVM {psvm:.3f} (> 1.4), SIR {sir:.3f} (> 1.6)")


def test_ac3_table2(report):
    m = means(default_campaign("table2", ps=(10, 30)))
    checks = [
        m[("II", 10, 100, "kpsvm")] >= 0.87,
        m[("III", 10, 100, "kpsvm")] >= 0.85,
        *(m[(model, 30, 100, "kpsvm")] >= 0.70 for model in ("II", "III")),
        *(m[(model, 30, 100, meth)] <= 0.60 for model in ("II", "III") for meth in ("save", "dr")),
    ]
    detail = (
        f"p=10 KPSVM II {m[('II', 10, 100, 'kpsvm')]:.3f} (>=0.87) III {m[('III', 10, 100, 'kpsvm')]:.3f} (>=0.85); "
        + "; ".join(
            f"p=30 {model} KPSVM {m[(model, 30, 100, 'kpsvm')]:.3f} SAVE {m[(model, 30, 100, 'save')]:.3f} "
            f"DR {m[(model, 30, 100, 'dr')]:.3f}"
            for model in ("II", "III")
        )
    )
    assert report("AC3 table 2", all(checks), detail)


def test_ac4_table3(report):
    m = means(default_campaign("table3", models=("IV",), ps=(10,), ns=(200, 500)))
    r200, r500 = m[("IV", 10, 200, "psvm")], m[("IV", 10, 500, "psvm")]
    ok = 0.70 <= r200 <= 0.95 and r500 >= r200 - 0.05
    assert report("AC4 table 3", ok, f"Model IV p=10 correct rate n=200 {r200:.2f} (in [0.70, 0.95]), n=500 {r500:.2f}")


def test_ac5_oracle_equivalence(report):
    rng = np.random.default_rng(20240501)
    worst_coef = worst_obj = 0.0
    for _ in range(50):
        m = int(rng.integers(3, 9))
        Z = rng.standard_normal((m, int(rng.integers(1, 5))))
        y = rng.choice([-1.0, 1.0], m)
        y[:2] = 1.0, -1.0
        C = float(rng.uniform(0.1, 4.0))
        G = Z @ Z.T
        sol = solve_dual(DualProblem(G, y, C), tol=1e-9)
        zeta = 0.5 * (sol.alpha * y) @ Z
        a_ex, v_ex = exhaustive_dual(G, y, C)
        z_pr, _, v_pr = primal_qp(Z, y, C)
        worst_coef = max(worst_coef, np.abs(zeta - 0.5 * (a_ex * y) @ Z).max(), np.abs(zeta - z_pr).max())
        worst_obj = max(worst_obj, abs(sol.objective - v_ex), abs(sol.objective - v_pr))
    ok = worst_coef <= 1e-3 and worst_obj <= 1e-4
    assert report("AC5 oracle equivalence", ok, f"50 instances, max coef gap {worst_coef:.2e}, max objective gap {worst_obj:.2e}")


def test_ac6_eigenfunction_identity(report):
    rng = np.random.default_rng(6)
    worst_id = worst_p = 0.0
    for trial in range(10):
        n = int(rng.integers(10, 61))
        x = rng.standard_normal((n, int(rng.integers(1, 6))))
        for spec in (KernelSpec(gamma=float(rng.uniform(0.05, 2))), KernelSpec("polynomial", coef0=1.0, degree=2)):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RankDeficientWarning)
                b = build_basis(x, spec, k=max(1, n // 2))
            raw = basis_functions(b, x, normalized=False)
            worst_id = max(worst_id, np.abs(raw - b.w * b.eigvals).max())
            P = b.projection
            worst_p = max(worst_p, np.abs(P - P.T).max(), np.abs(P @ P - P).max())
    ok = worst_id <= 1e-8 and worst_p <= 1e-8
    detail = f"20 bases (n <= 60, gaussian and polynomial): identity gap {worst_id:.1e}, projection gap {worst_p:.1e}"
    assert report("AC6 eigenfunction identity", ok, detail)


def test_ac7_affine_equivariance(report):
    rng = np.random.default_rng(7)
    d, _ = generate(ModelSpec("I", 6, 100), 2024)
    base = fit(d, dim=2, tol=1e-9)
    worst = 0.0
    for _ in range(20):
        while True:
            A = rng.standard_normal((6, 6))
            if np.linalg.cond(A) < 100:
                break
        moved = fit(Dataset(d.x @ A.T + 5 * rng.standard_normal(6), d.y), dim=2, tol=1e-9)
        worst = max(worst, subspace_distance(A.T @ moved.directions, base.directions))
    assert report("AC7 affine equivariance", worst < 1e-3, f"20 random maps, max back-mapped distance {worst:.2e}")


def test_ac8_gamma_constants(report):
    got = {p: gamma_population(p) for p in (10, 20, 30)}
    target = {10: 0.0526, 20: 0.0257, 30: 0.0169}
    rel = {p: abs(got[p] / target[p] - 1) for p in got}
    detail = ", ".join(f"p={p} {got[p]:.5f} ({100 * rel[p]:.2f}%)" for p in got)
    assert report("AC8 gamma constants", max(rel.values()) <= 0.02, detail)


def test_ac9_gradient_check(report):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(3, 12))
        Z = rng.standard_normal((m, 3))
        y = rng.choice([-1.0, 1.0], m)
        y[:2] = 1.0, -1.0
        p = DualProblem(Z @ Z.T, y, 2.0)
        a = rng.uniform(0, 2.0, m)
        g = dual_gradient(p, a)
        h = 1e-5
        fd = np.array([(dual_objective(p, a + h * e) - dual_objective(p, a - h * e)) / (2 * h) for e in np.eye(m)])
        worst = max(worst, float(np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1e-8))))
    assert report("AC9 gradient check", worst <= 1e-6, f"20 points, max relative error {worst:.1e}")


def test_ac10_determinism(tmp_path, report):
    same = []
    for table, extra in (("table1", ["--models", "I", "--p", "10"]), ("table3", ["--models", "IV", "--p", "5", "--n", "200"])):
        outs = []
        for jobs in ("1", "4"):
            out = tmp_path / f"{table}-{jobs}"
            assert main(["-q", "benchmark", table, "--reps", "10", "--jobs", jobs, "--out", str(out), *extra]) == 0
            outs.append((out / "summary.csv").read_bytes())
        same.append(outs[0] == outs[1])
    assert report("AC10 determinism", all(same), f"summary.csv identical for --jobs 1 and 4: table1 {same[0]}, table3 {same[1]}")
