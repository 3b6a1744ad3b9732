"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing criterion still shows what was measured.
"""

import time

import numpy as np

from oracles import brute_force_min_norm
from mosubgrad.core import TRACE_PARAMS, SolverParams
from mosubgrad.experiments import RunConfig, build_front, grid_starts, random_starts, run_ws_baseline
from mosubgrad.metrics import dominates, front_metrics
from mosubgrad.minnorm import min_norm_point
from mosubgrad.problems import composite_problem, count_zero, fl_g, fl_problem, get_problem
from mosubgrad.solver import solve

VERDICTS = []


def verdict(number, title, checks, detail=""):
    """``checks`` maps a short description to a boolean."""
    failed = [name for name, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    line = f"[{status}] criterion {number:>2}: {title}"
    if detail:
        line += f" ({detail})"
    if failed:
        line += " -- failed: " + "; ".join(failed)
    VERDICTS.append(line)
    print(line)
    assert not failed, line


def test_criterion_01_first_trace_iterate():
    t = time.perf_counter()
    trace = []
    solve(get_problem("P1"), [-0.6, 0.2], TRACE_PARAMS, trace=trace)
    elapsed = time.perf_counter() - t
    row = trace[0]
    verdict(1, "first trace iterate on P1", {
        "nu=0,k=0": (row.nu, row.k) == (0, 0),
        "|xi*|=1.3416": abs(row.xi_norm - 1.3416) <= 1e-3,
        "d0=(0.8944,0.4472)": np.allclose(row.direction, [0.8944, 0.4472], atol=1e-3),
        "null step with failing set {1}": row.step == 0.0 and row.failing == (0,),
        "f=(0.2,0.4)": np.allclose(row.f_prev, [0.2, 0.4], atol=1e-4),
        "runtime < 1 s": elapsed < 1.0,
    }, f"|xi*|={row.xi_norm:.4f}, d={np.round(row.direction, 4)}, {elapsed:.3f}s")


def test_criterion_02_trace_endpoint():
    t = time.perf_counter()
    rec = solve(get_problem("P1"), [-0.6, 0.2], TRACE_PARAMS)
    elapsed = time.perf_counter() - t
    f1, f2 = rec.final_values
    verdict(2, "trace run endpoint", {
        "converged": rec.converged,
        "nu=6": rec.outer_iters == 6,
        "f1 <= 0.01": f1 <= 0.01,
        "f2 <= 0.05": f2 <= 0.05,
        "runtime < 5 s": elapsed < 5.0,
    }, f"nu={rec.outer_iters}, f=({f1:.4g}, {f2:.4g}), {elapsed:.3f}s")


def test_criterion_03_min_norm_oracle():
    rng = np.random.default_rng(2024)
    worst, cert_ok, solver_time = 0.0, True, 0.0
    for _ in range(200):
        n, m = rng.integers(1, 6), rng.integers(1, 9)
        G = rng.normal(size=(m, n)) * rng.choice([0.1, 1.0, 10.0])
        t = time.perf_counter()
        res = min_norm_point(G)
        solver_time += time.perf_counter() - t
        ref = np.linalg.norm(brute_force_min_norm(G))
        worst = max(worst, abs(res.norm - ref))
        cert_ok &= res.certificate_ok()
    verdict(3, "min-norm point vs brute-force oracle", {
        "norm within 1e-6": worst <= 1e-6,
        "certificate holds": cert_ok,
        "runtime < 10 s": solver_time < 10.0,
    }, f"max deviation {worst:.2e}, {solver_time:.3f}s")


def test_criterion_04_kink(abs_problem):
    t = time.perf_counter()
    trace = []
    rec = solve(abs_problem, [0.0], SolverParams(), trace=trace)
    elapsed = time.perf_counter() - t
    rounds = rec.outer_iters + 1
    per_round = {nu: [r for r in trace if r.nu == nu and r.direction is not None] for nu in range(rounds)}
    one_null = all(len(rows) == 1 and rows[0].failing for rows in per_round.values())
    verdict(4, "kink certification for |x|", {
        "converged": rec.converged,
        "one null step per round": one_null and rec.null_steps == rounds and rec.serious_steps == 0,
        "final min-norm exactly 0": rec.final_xi_norm == 0.0,
        "runtime < 0.1 s": elapsed < 0.1,
    }, f"{rounds} rounds, {elapsed:.4f}s")


def _sweep_p1_p15(starts_for, check=True):
    out = []
    for pid in range(1, 16):
        problem = composite_problem(pid)
        for x0 in starts_for(problem):
            trace = []
            rec = solve(problem, x0, SolverParams(), trace=trace, check=check)
            out.append((pid, rec, trace))
    return out


def test_criterion_05_sufficient_decrease():
    t = time.perf_counter()
    runs = _sweep_p1_p15(lambda p: random_starts(10, p.dim, (-2.0, 2.0), seed=p.p * 100 + int(p.name[1:])))
    elapsed = time.perf_counter() - t
    beta = SolverParams().beta
    decrease_ok, monotone_ok, serious = True, True, 0
    for _, rec, trace in runs:
        steps = [r for r in trace if r.direction is not None]
        for r in steps:
            if not r.failing:
                serious += 1
                decrease_ok &= bool(np.all(r.f_next - r.f_prev <= -beta * r.step * r.xi_norm))
            monotone_ok &= bool(np.all(r.f_next <= r.f_prev))
    verdict(5, "sufficient decrease on P1-P15", {
        "all runs converged": all(rec.converged for _, rec, _ in runs),
        "every serious step decreases": decrease_ok,
        "values non-increasing": monotone_ok,
        "runtime < 60 s": elapsed < 60.0,
    }, f"{len(runs)} runs, {serious} serious steps, {elapsed:.2f}s")


def test_criterion_06_fes_contract():
    runs = _sweep_p1_p15(lambda p: random_starts(10, p.dim, (-2.0, 2.0), seed=7 + int(p.name[1:])), check=False)
    c = SolverParams().c
    calls, accept_ok, window_ok, worst_iters = 0, True, True, 0
    for _, _, trace in runs:
        for row in trace:
            for _, fr in row.fes:
                calls += 1
                accept_ok &= bool(fr.xi @ row.direction >= -c * row.xi_norm)
                window_ok &= 0.0 < fr.t < row.eps
                worst_iters = max(worst_iters, fr.iters)
    verdict(6, "effective subgradient search contract", {
        "acceptance test holds": accept_ok,
        "sample step in (0, eps)": window_ok,
        "at most 100 probes": worst_iters <= 100,
        "search was exercised": calls > 0,
    }, f"{calls} calls, max {worst_iters} probes")


def test_criterion_07_endpoint_substationarity():
    hrs, cert_ok, converged, total = {}, True, 0, 0
    for pid in range(1, 6):
        problem = composite_problem(pid)
        recs = [solve(problem, x0, SolverParams()) for x0 in random_starts(50, 2, (0.0, 2.0), seed=7)]
        total += len(recs)
        for rec in recs:
            if rec.converged:
                converged += 1
                cert_ok &= rec.certificate_ok and rec.final_xi_norm <= rec.final_delta
        front, _ = build_front(recs)
        hrs[pid] = front_metrics(front)["HRS"]
    verdict(7, "substationary endpoints on P1-P5", {
        "every converged endpoint certified": cert_ok,
        "some runs converged": converged > 0,
        "HRS finite": all(np.isfinite(v) for v in hrs.values()),
        "HRS < 50 on P1": hrs[1] < 50,
    }, f"{converged}/{total} converged, HRS " + ", ".join(f"P{k}={v:.2f}" for k, v in hrs.items()))


def test_criterion_08_fl_stationarity():
    t = time.perf_counter()
    problem = fl_problem()
    recs = [solve(problem, x0, SolverParams()) for x0 in np.linspace(0, 2 * np.pi, 200).reshape(-1, 1)]
    done = [r for r in recs if r.converged]
    g_max = max(fl_g(r.final_point) for r in done)
    front, _ = build_front(recs, filter_dominated=True)
    cfg = RunConfig(problem="FL", grid=20, box=(0.0, 2 * np.pi))
    ws = run_ws_baseline(cfg, 11)
    margin = 1e-6
    violations = sum(
        dominates(w.values + margin, y) for w in ws if w.converged for y in front
    )
    elapsed = time.perf_counter() - t
    verdict(8, "FL stationarity and weighted-sum comparison", {
        "some runs converged": len(done) > 0,
        "G(x) <= 1e-6 at endpoints": g_max <= 1e-6,
        "no weighted-sum point dominates the front": violations == 0,
        "runtime < 30 s": elapsed < 30.0,
    }, f"{len(done)}/200 converged, max G={g_max:.3g}, {violations} violations, {elapsed:.2f}s")


def test_criterion_09_sparse_tradeoff():
    t = time.perf_counter()
    problem = get_problem("SPARSE:42")
    params = SolverParams(rho=1e-2)
    recs = [solve(problem, x0, params) for x0 in random_starts(5, problem.dim, (0.0, 1.0), seed=42)]
    elapsed = time.perf_counter() - t
    l1 = np.array([r.final_values[0] for r in recs])
    res = np.array([r.final_values[1] for r in recs])
    tradeoff = int(np.argmin(l1)) != int(np.argmin(res))
    zeros = [count_zero(r.final_point) for r in recs]
    detail = f"#Zero={zeros}, trade-off {'seen' if tradeoff else 'not seen on this instance'}, {elapsed:.1f}s"
    verdict(9, "sparse recovery records", {
        "5 records": len(recs) == 5,
        "every endpoint certified": all(r.converged and r.certificate_ok for r in recs),
        "runtime < 120 s": elapsed < 120.0,
    }, detail)


def test_criterion_10_evaluation_accounting():
    t = time.perf_counter()
    starts = grid_starts(5, 2, (-3.0, 3.0))
    runs = _sweep_p1_p15(lambda p: starts, check=False)
    elapsed = time.perf_counter() - t
    totals, per_run_ok = {}, True
    for pid, rec, _ in runs:
        f, g = totals.get(pid, (0, 0))
        totals[pid] = (f + rec.fun_evals, g + rec.sub_evals)
        per_run_ok &= rec.sub_evals <= rec.fun_evals
    ratio = min(f / g for f, g in totals.values())
    verdict(10, "function vs subgradient evaluations", {
        "sub_evals <= fun_evals in every run": per_run_ok,
        "fun_evals > sub_evals on every problem": all(f > g for f, g in totals.values()),
        "runtime < 60 s": elapsed < 60.0,
    }, f"{len(runs)} runs, smallest per-problem #Fun/#Sub {ratio:.2f}, {elapsed:.2f}s")
