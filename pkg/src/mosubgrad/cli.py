"""Command-line driver.

Exit codes: 0 success, 2 configuration error, 3 solver nonconvergence,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .core import InvariantViolation, SolverError, SolverParams
from .problems import get_problem

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_INVARIANT = 0, 2, 3, 4

# flag name -> SolverParams field
PARAM_FLAGS = {
    "rho": "rho",
    "eps0": "eps0",
    "delta0": "delta0",
    "gamma": "gamma",
    "beta": "beta",
    "c": "c",
    "tbar_frac": "tbar_fraction",
    "t0": "t0",
    "r": "r",
}


class ConfigError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mosubgrad",
        description="Descent subgradient solver for nonsmooth multiobjective problems.",
    )
    ap.add_argument("--config", type=Path, help="key=value file; command-line flags take precedence")
    ap.add_argument("--problem", help="P1..P15, FL or SPARSE:<seed>")
    ap.add_argument("--start", help="explicit start point, comma separated")
    ap.add_argument("--random", type=int, metavar="N", help="N uniform random starts in the box")
    ap.add_argument("--grid", type=int, metavar="K", help="K points per axis on a uniform grid over the box")
    ap.add_argument("--box", help="lo,hi bounds applied to every coordinate")
    ap.add_argument("--seed", type=int)
    for flag in PARAM_FLAGS:
        ap.add_argument("--" + flag.replace("_", "-"), dest=flag, type=float)
    ap.add_argument("--trace", action="store_true", default=None, help="write trace.csv for a single run")
    ap.add_argument("--filter-dominated", action="store_true", default=None)
    ap.add_argument("--metrics", action="store_true", default=None, help="compute |Y|, HAS and HRS (default on)")
    ap.add_argument("--ws-lambdas", type=int, metavar="N", help="also run the weighted-sum baseline on N weights")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--out", type=Path, help="output directory (default: results)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def read_config_file(path: Path) -> dict:
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def merged_settings(args: argparse.Namespace) -> dict:
    """CLI flags over config-file values over defaults."""
    settings = {}
    if args.config is not None:
        try:
            settings.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(str(exc)) from exc
    for key, val in vars(args).items():
        if key in ("config", "verbose") or val is None:
            continue
        settings[key] = val
    return settings


def to_config(settings: dict) -> ex.RunConfig:
    known = set(PARAM_FLAGS) | {
        "problem", "start", "random", "grid", "box", "seed", "trace",
        "filter_dominated", "metrics", "ws_lambdas", "jobs", "out",
    }
    unknown = set(settings) - known
    if unknown:
        raise ConfigError(f"unknown settings: {sorted(unknown)}")
    if "problem" not in settings:
        raise ConfigError("--problem is required")

    def flag(name, default=False):
        v = settings.get(name, default)
        if isinstance(v, str):
            if v.lower() not in _BOOL:
                raise ConfigError(f"{name} must be a boolean, got {v!r}")
            return _BOOL[v.lower()]
        return bool(v)

    try:
        overrides = {PARAM_FLAGS[k]: float(settings[k]) for k in PARAM_FLAGS if k in settings}
        params = SolverParams().with_overrides(**overrides)
        box = settings.get("box", "0,2")
        lo, hi = (float(v) for v in str(box).split(","))
        if not lo < hi:
            raise ConfigError("--box needs lo < hi")
        start = settings.get("start")
        n_modes = sum(settings.get(k) is not None for k in ("start", "random", "grid"))
        if n_modes > 1:
            raise ConfigError("use only one of --start, --random, --grid")
        return ex.RunConfig(
            problem=str(settings["problem"]),
            start=ex.parse_point(start) if start is not None else None,
            random=int(settings["random"]) if settings.get("random") is not None else None,
            grid=int(settings["grid"]) if settings.get("grid") is not None else None,
            box=(lo, hi),
            seed=int(settings.get("seed", 0)),
            params=params,
            out=Path(settings.get("out", "results")),
            trace=flag("trace"),
            filter_dominated=flag("filter_dominated"),
            metrics=flag("metrics", True),
            ws_lambdas=int(settings["ws_lambdas"]) if settings.get("ws_lambdas") is not None else None,
            jobs=int(settings.get("jobs", 1)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _print_record_summary(records) -> None:
    for j, r in enumerate(records):
        fs = " ".join(f"{v:.6g}" for v in r.final_values)
        status = "converged" if r.converged else f"NOT converged {r.error or ''}".rstrip()
        print(f"run {j}: f=({fs}) nu={r.outer_iters} serious={r.serious_steps} null={r.null_steps} "
              f"#Fun={r.fun_evals} #Sub={r.sub_evals} {status}")


def execute(config: ex.RunConfig) -> int:
    problem = get_problem(config.problem)
    out = config.out
    if config.start is not None:
        rec, trace = ex.run_single(config)
        records = [rec]
        ex.write_runs(out / "runs.csv", records, problem.dim, problem.p)
        if trace is not None:
            ex.write_trace(out / "trace.csv", trace, problem.dim, problem.p)
    else:
        result = ex.run_multistart(config)
        records = result.records
        ex.write_runs(out / "runs.csv", records, problem.dim, problem.p)
        ex.write_front(out / "front.csv", result.front, result.front_ids, problem.p)
        if config.metrics:
            ex.write_metrics(out / "metrics.csv", config.problem, result)
            if result.metrics is not None:
                m = result.metrics
                print(f"|Y|={m['size']} HAS={m['HAS']:.6g} HRS={m['HRS']:.6g}")
            else:
                print(f"metrics unavailable: {result.metrics_error}", file=sys.stderr)

    _print_record_summary(records)
    if problem.name.startswith("SPARSE"):
        rows = ex.sparse_summary(problem, records)
        ex.write_sparse(out / "sparse.csv", rows)
        for row in rows:
            print(f"run {row['run']}: ||x*||_1={row['l1_norm']:.4f} ||Ax*-b||^2={row['residual_sq']:.4f} "
                  f"#Zero={row['n_zero']} #Fun={row['fun_evals']} #Sub={row['sub_evals']}")

    if config.ws_lambdas:
        ws = ex.run_ws_baseline(config, config.ws_lambdas)
        ex.write_ws(out / "ws_front.csv", ws, problem.dim)
        print(f"weighted-sum baseline: {sum(w.converged for w in ws)}/{len(ws)} weights converged")

    if config.start is not None and not records[0].converged:
        return EXIT_NONCONVERGED
    return EXIT_OK


def _join_negative_values(argv: list) -> list:
    # argparse would read "-0.6,0.2" or "-3,3" as an option; glue such values to their flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--start", "--box") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        config = to_config(merged_settings(args))
        get_problem(config.problem)
    except (ConfigError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return execute(config)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
