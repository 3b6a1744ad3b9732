"""Experiment drivers: single runs with traces, multi-start sweeps, weighted-sum baseline."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import Problem, RunRecord, SolverParams
from .metrics import filter_nondominated, front_metrics
from .problems import count_zero, get_problem, weighted_sum_problem
from .solver import TraceRow, solve, solve_safe


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


# --- start points -------------------------------------------------------------


def parse_point(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)


def random_starts(n_starts: int, dim: int, box: tuple, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(box[0], box[1], size=(n_starts, dim))


def grid_starts(k: int, dim: int, box: tuple) -> np.ndarray:
    if k < 1:
        raise ValueError("grid size must be positive")
    if k**dim > 10**6:
        raise ValueError(f"a {k}^{dim} grid is too large")
    axis = np.linspace(box[0], box[1], k)
    return np.array(list(itertools.product(axis, repeat=dim)), dtype=float)


@dataclass
class RunConfig:
    problem: str
    start: Optional[np.ndarray] = None
    random: Optional[int] = None
    grid: Optional[int] = None
    box: tuple = (0.0, 2.0)
    seed: int = 0
    params: SolverParams = field(default_factory=SolverParams)
    out: Optional[Path] = None
    trace: bool = False
    filter_dominated: bool = False
    metrics: bool = True
    ws_lambdas: Optional[int] = None
    jobs: int = 1

    def starts(self, dim: int) -> np.ndarray:
        if self.start is not None:
            x = np.asarray(self.start, dtype=float).reshape(1, -1)
            if x.shape[1] != dim:
                raise ValueError(f"start point has {x.shape[1]} coordinates, problem needs {dim}")
            return x
        if self.grid is not None:
            return grid_starts(self.grid, dim, self.box)
        if self.random is not None:
            if self.random < 1:
                raise ValueError("--random needs N >= 1")
            return random_starts(self.random, dim, self.box, self.seed)
        raise ValueError("no start specification: give a start point, --random N or --grid K")


# --- single and multi-start runs ----------------------------------------------


def _solve_by_id(args):
    problem_id, x0, params = args
    return solve_safe(get_problem(problem_id), x0, params)


def run_starts(problem_id: str, starts: np.ndarray, params: SolverParams, jobs: int = 1) -> list:
    """Solve from every start; failures come back as unconverged records."""
    tasks = [(problem_id, x0, params) for x0 in starts]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_by_id, tasks))
    problem = get_problem(problem_id)
    return [solve_safe(problem, x0, params) for x0 in starts]


def run_single(config: RunConfig) -> tuple:
    """Solve once from the configured start; returns ``(record, trace rows or None)``."""
    problem = get_problem(config.problem)
    x0 = config.starts(problem.dim)[0]
    trace = [] if config.trace else None
    rec = solve(problem, x0, config.params, trace=trace)
    return rec, trace


@dataclass
class MultiStartResult:
    records: list
    front: np.ndarray  # objective vectors of converged runs
    front_ids: list
    metrics: Optional[dict]
    metrics_error: Optional[str] = None


def build_front(records: Sequence[RunRecord], filter_dominated: bool = False) -> tuple:
    ids = [j for j, r in enumerate(records) if r.converged]
    if not ids:
        return np.empty((0, records[0].p if records else 0)), []
    Y = np.array([records[j].final_values for j in ids])
    if filter_dominated:
        kept = filter_nondominated(Y)
        # map rows back to run ids (first match wins)
        out_ids, used = [], set()
        for y in kept:
            for j, yy in zip(ids, Y):
                if j not in used and np.array_equal(y, yy):
                    out_ids.append(j)
                    used.add(j)
                    break
        return kept, out_ids
    return Y, ids


def run_multistart(config: RunConfig) -> MultiStartResult:
    problem = get_problem(config.problem)
    starts = config.starts(problem.dim)
    records = run_starts(config.problem, starts, config.params, config.jobs)
    front, ids = build_front(records, config.filter_dominated)
    metrics, err = None, None
    if config.metrics:
        try:
            metrics = front_metrics(front)
        except ValueError as exc:
            err = str(exc)
    return MultiStartResult(records, front, ids, metrics, err)


@dataclass
class WsPoint:
    lam: float
    x: np.ndarray
    values: np.ndarray
    converged: bool


def run_ws_baseline(config: RunConfig, n_lambdas: int) -> list:
    """Weighted-sum baseline: for each weight on a uniform grid of ``[0, 1]``,
    minimize the scalarized objective from every configured start and keep the
    best converged endpoint."""
    problem = get_problem(config.problem)
    if problem.p != 2:
        raise ValueError("the weighted-sum baseline needs a bi-objective problem")
    if n_lambdas < 1:
        raise ValueError("need at least one weight")
    starts = config.starts(problem.dim)
    lams = np.linspace(1.0, 0.0, n_lambdas) if n_lambdas > 1 else np.array([0.5])
    out = []
    for lam in lams:
        ws = weighted_sum_problem(problem, float(lam))
        best = None
        for x0 in starts:
            rec = solve_safe(ws, x0, config.params)
            if not rec.converged:
                continue
            if best is None or rec.final_values[0] < best.final_values[0]:
                best = rec
        if best is None:
            out.append(WsPoint(float(lam), starts[0], problem.values(starts[0]), False))
        else:
            out.append(WsPoint(float(lam), best.final_point, problem.values(best.final_point), True))
    return out


# --- CSV emitters ---------------------------------------------------------------


def runs_header(dim: int, p: int) -> list:
    return (
        ["run_id"]
        + [f"x0_{j + 1}" for j in range(dim)]
        + [f"x_{j + 1}" for j in range(dim)]
        + [f"f_{i + 1}" for i in range(p)]
        + ["converged", "outer_iters", "serious_steps", "null_steps", "fun_evals", "sub_evals", "wall_time_s"]
    )


def runs_rows(records: Sequence[RunRecord]):
    for j, r in enumerate(records):
        yield (
            [j]
            + list(r.start_point)
            + list(r.final_point)
            + list(r.final_values)
            + [r.converged, r.outer_iters, r.serious_steps, r.null_steps, r.fun_evals, r.sub_evals, r.wall_time]
        )


def write_runs(path: Path, records: Sequence[RunRecord], dim: int, p: int) -> None:
    write_csv(path, runs_header(dim, p), runs_rows(records))


def write_front(path: Path, front: np.ndarray, ids: Sequence[int], p: int) -> None:
    write_csv(path, ["run_id"] + [f"f_{i + 1}" for i in range(p)], ([j] + list(y) for j, y in zip(ids, front)))


def write_metrics(path: Path, problem_id: str, result: MultiStartResult) -> None:
    m = result.metrics or {}
    write_csv(
        path,
        ["problem", "runs", "converged", "front_size", "HAS", "HRS", "error"],
        [[
            problem_id,
            len(result.records),
            sum(r.converged for r in result.records),
            len(result.front),
            m.get("HAS", math.nan),
            m.get("HRS", math.nan),
            result.metrics_error or "",
        ]],
    )


def trace_header(dim: int, p: int) -> list:
    return (
        ["nu", "k", "xi_norm"]
        + [f"d_{j + 1}" for j in range(dim)]
        + ["failing"]
        + [f"x_next_{j + 1}" for j in range(dim)]
        + [f"f_{i + 1}" for i in range(p)]
    )


def trace_rows(trace: Sequence[TraceRow], dim: int, p: int):
    for row in trace:
        if row.direction is None:
            yield [row.nu, row.k, row.xi_norm] + [None] * dim + [None] + [None] * dim + [None] * p
            continue
        failing = "{" + ",".join(str(i + 1) for i in row.failing) + "}"
        yield (
            [row.nu, row.k, row.xi_norm]
            + list(row.direction)
            + [failing]
            + list(row.x_next)
            + list(row.f_next)
        )


def write_trace(path: Path, trace: Sequence[TraceRow], dim: int, p: int) -> None:
    write_csv(path, trace_header(dim, p), trace_rows(trace, dim, p))


def sparse_summary(problem: Problem, records: Sequence[RunRecord]) -> list:
    """Per-run l1 norm, squared residual, near-zero count and evaluation totals."""
    rows = []
    for j, r in enumerate(records):
        rows.append({
            "run": j + 1,
            "l1_norm": float(r.final_values[0]),
            "residual_sq": float(r.final_values[1]),
            "n_zero": count_zero(r.final_point),
            "time_s": r.wall_time,
            "fun_evals": r.fun_evals,
            "sub_evals": r.sub_evals,
            "converged": r.converged,
        })
    return rows


def write_sparse(path: Path, rows: Sequence[dict]) -> None:
    header = ["run", "l1_norm", "residual_sq", "n_zero", "time_s", "fun_evals", "sub_evals", "converged"]
    write_csv(path, header, ([row[h] for h in header] for row in rows))


def write_ws(path: Path, points: Sequence[WsPoint], dim: int) -> None:
    header = ["lambda"] + [f"x_{j + 1}" for j in range(dim)] + ["f_1", "f_2", "converged"]
    write_csv(path, header, ([w.lam] + list(w.x) + list(w.values) + [w.converged] for w in points))

