"""Batch experiment driver: configuration, execution, persistence, reports.

A batch is a grid of (algorithm, problem, run) cells.  Each cell owns the
seed base_seed + run_index, so results are independent of execution order
and worker count.  Workers return plain rows; all files are written by the
parent, deterministically ordered.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .optimizers import (
    ALGORITHMS,
    OptimizerConfig,
    RunResult,
    run_algorithm,
)
from .problems import EvaluationBudget, make_problem
from .stats import ComparisonReport, build_report

LZG_NAMES = ("Ellipsoid", "Rosenbrock", "Ackley", "Griewank")

SUMMARY_COLUMNS = ("problem", "dim", "algo", "seed", "best_f", "fes_used", "wall_ms")


@dataclass
class AlgorithmEntry:
    id: str
    config: OptimizerConfig


@dataclass
class ExperimentSpec:
    problems: list[tuple[str, int]]
    algorithms: list[AlgorithmEntry]
    runs: int
    budget: int
    base_seed: int
    baseline_id: str
    output_dir: Path

    def validate(self) -> None:
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if self.budget < 1:
            raise ConfigurationError("budget must be >= 1")
        ids = [a.id for a in self.algorithms]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("algorithm ids must be unique")
        if self.baseline_id not in ids:
            raise ConfigurationError(
                f"baseline_id {self.baseline_id!r} not among algorithm ids"
            )
        for name, dim in self.problems:
            make_problem(name, dim)  # raises on unknown name / bad dim


def _require(obj: dict, key: str, typ, where: str):
    if key not in obj:
        raise ConfigurationError(f"{where}: missing key {key!r}")
    val = obj[key]
    if typ is int and isinstance(val, bool) or not isinstance(val, typ):
        raise ConfigurationError(
            f"{where}: key {key!r} must be {typ.__name__}, got {type(val).__name__}"
        )
    return val


def load_spec(path: Path, output_dir: Optional[Path] = None) -> ExperimentSpec:
    """Parse and validate a JSON experiment config."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config is not valid JSON: {e}")

    problems = []
    for i, entry in enumerate(_require(raw, "problems", list, "config")):
        where = f"problems[{i}]"
        name = _require(entry, "name", str, where)
        dim = _require(entry, "dim", int, where)
        problems.append((name, dim))

    algorithms = []
    known_fields = {
        "algorithm", "surrogate", "pop_size", "o_all_size", "archive_cap",
        "acquisition", "init_samples", "rf_trees", "rf_min_leaf", "lcb_beta",
    }
    for i, entry in enumerate(_require(raw, "algorithms", list, "config")):
        where = f"algorithms[{i}]"
        algo_id = _require(entry, "id", str, where)
        kwargs = {k: v for k, v in entry.items() if k in known_fields}
        unknown = set(entry) - known_fields - {"id"}
        if unknown:
            raise ConfigurationError(f"{where}: unknown keys {sorted(unknown)}")
        try:
            config = OptimizerConfig(**kwargs)
        except (TypeError, ConfigurationError) as e:
            raise ConfigurationError(f"{where}: {e}")
        algorithms.append(AlgorithmEntry(id=algo_id, config=config))

    spec = ExperimentSpec(
        problems=problems,
        algorithms=algorithms,
        runs=_require(raw, "runs", int, "config"),
        budget=_require(raw, "budget", int, "config"),
        base_seed=_require(raw, "base_seed", int, "config"),
        baseline_id=_require(raw, "baseline_id", str, "config"),
        output_dir=Path(output_dir) if output_dir else Path(raw.get("output_dir", "results")),
    )
    spec.validate()
    return spec


@dataclass
class CellResult:
    problem: str
    dim: int
    algo_id: str
    seed: int
    best_f: float
    fes_used: int
    wall_ms: float
    trace_f: np.ndarray
    trace_best: np.ndarray


def _run_cell(args) -> CellResult:
    problem_name, dim, algo_id, config, budget, seed = args
    problem = make_problem(problem_name, dim)
    cfg = replace(config, seed=seed)
    result = run_algorithm(problem, cfg, EvaluationBudget(max_fes=budget))
    return CellResult(
        problem=problem_name,
        dim=dim,
        algo_id=algo_id,
        seed=seed,
        best_f=result.best_f,
        fes_used=len(result.trace),
        wall_ms=result.wall_s * 1000.0,
        trace_f=np.array(result.trace.fs),
        trace_best=np.array(result.trace.best_so_far),
    )


def _execute(tasks: list, threads: Optional[int]) -> list[CellResult]:
    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        return [_run_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, tasks))


def _trace_path(out_dir: Path, algo: str, problem: str, dim: int, seed: int) -> Path:
    return out_dir / "traces" / f"{algo}__{problem}__d{dim}__s{seed}.csv"


def write_trace(path: Path, cell: CellResult) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(
            f"# algo={cell.algo_id},problem={cell.problem},"
            f"dim={cell.dim},seed={cell.seed}\n"
        )
        w = csv.writer(fh)
        w.writerow(["fe", "f", "best_so_far"])
        best = np.minimum.accumulate(cell.trace_f)
        for i, (f, b) in enumerate(zip(cell.trace_f, best), start=1):
            w.writerow([i, repr(float(f)), repr(float(b))])


def write_summary(path: Path, cells: list[CellResult]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(cells, key=lambda c: (c.problem, c.dim, c.algo_id, c.seed))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for c in rows:
            w.writerow([
                c.problem, c.dim, c.algo_id, c.seed,
                repr(float(c.best_f)), c.fes_used, f"{c.wall_ms:.3f}",
            ])


def read_summary(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def report_from_rows(rows: list[dict], baseline: str) -> ComparisonReport:
    samples: dict[tuple[str, int], dict[str, list[float]]] = {}
    for row in rows:
        key = (row["problem"], int(row["dim"]))
        samples.setdefault(key, {}).setdefault(row["algo"], []).append(
            float(row["best_f"])
        )
    arrays = {
        key: {a: np.array(v) for a, v in per.items()}
        for key, per in samples.items()
    }
    return build_report(arrays, baseline=baseline)


def render_report_text(report: ComparisonReport) -> str:
    lines = [
        f"baseline={report.baseline} alpha={report.alpha} "
        f"direction={report.direction_statistic}",
    ]
    algos = sorted(report.mean_ranks)
    header = f"{'problem':<16}{'dim':>5}  " + "  ".join(f"{a:>22}" for a in algos)
    lines.append(header)
    for (problem, dim), cell in sorted(report.cells.items()):
        parts = []
        for a in algos:
            e = cell[a]
            mark = e.get("mark", " ")
            parts.append(f"{e['mean']:>10.3e}[{e['rank']:.0f}]({mark})"
                         f"±{e['std']:.1e}"[:22].rjust(22))
        lines.append(f"{problem:<16}{dim:>5}  " + "  ".join(parts))
    lines.append(
        "mean rank: " + "  ".join(f"{a}={report.mean_ranks[a]:.2f}" for a in algos)
    )
    for a, t in sorted(report.tallies.items()):
        lines.append(f"{a}: +{t['+']} / -{t['-']} / ~{t['~']}")
    return "\n".join(lines) + "\n"


def run_experiment(spec: ExperimentSpec,
                   threads: Optional[int] = None) -> ComparisonReport:
    """Execute the full grid, persist traces/summary/report, return the report."""
    spec.validate()
    tasks = []
    for name, dim in spec.problems:
        for entry in spec.algorithms:
            for r in range(spec.runs):
                tasks.append((
                    name, dim, entry.id, entry.config,
                    spec.budget, spec.base_seed + r,
                ))
    cells = _execute(tasks, threads)

    out = spec.output_dir
    out.mkdir(parents=True, exist_ok=True)
    for cell in cells:
        write_trace(
            _trace_path(out, cell.algo_id, cell.problem, cell.dim, cell.seed),
            cell,
        )
    write_summary(out / "summary.csv", cells)

    rows = read_summary(out / "summary.csv")
    report = report_from_rows(rows, baseline=spec.baseline_id)
    with open(out / "report.json", "w") as fh:
        json.dump(report.to_jsonable(), fh, indent=2)
    with open(out / "report.txt", "w") as fh:
        fh.write(render_report_text(report))
    return report


ABLATION_ALGORITHMS = (
    ("UEDA-RF", OptimizerConfig(algorithm="UEDA", surrogate="RF")),
    ("UEDA-RF-AL", OptimizerConfig(algorithm="UEDA_AL", surrogate="RF")),
    ("UEDA-RF-NS", OptimizerConfig(algorithm="UEDA_NS", surrogate="RF")),
    ("EDA-LS", OptimizerConfig(algorithm="EDALS", pop_size=30)),
)


def run_ablation(
    out_dir: Path,
    dims: tuple[int, ...] = (20, 50),
    runs: int = 30,
    budget: int = 500,
    base_seed: int = 0,
    threads: Optional[int] = None,
    problems: tuple[str, ...] = LZG_NAMES,
) -> dict[tuple[str, int], dict[str, np.ndarray]]:
    """Run the four variants on the LZG suite under shared per-run seeds.

    Persists per-run traces, a summary, and one convergence CSV per
    (problem, dim) with mean/std best-so-far per algorithm per FE.  Returns
    the final best values: (problem, dim) -> algo -> per-run array.
    """
    tasks = []
    for name in problems:
        for dim in dims:
            for algo_id, config in ABLATION_ALGORITHMS:
                for r in range(runs):
                    tasks.append((name, dim, algo_id, config, budget,
                                  base_seed + r))
    cells = _execute(tasks, threads)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for cell in cells:
        write_trace(
            _trace_path(out_dir, cell.algo_id, cell.problem, cell.dim, cell.seed),
            cell,
        )
    write_summary(out_dir / "summary.csv", cells)

    grouped: dict[tuple[str, int], dict[str, list[CellResult]]] = {}
    for cell in cells:
        grouped.setdefault((cell.problem, cell.dim), {}).setdefault(
            cell.algo_id, []
        ).append(cell)

    finals: dict[tuple[str, int], dict[str, np.ndarray]] = {}
    for (name, dim), per_algo in sorted(grouped.items()):
        algo_ids = [a for a, _ in ABLATION_ALGORITHMS]
        curves = {}
        for algo_id in algo_ids:
            runs_sorted = sorted(per_algo[algo_id], key=lambda c: c.seed)
            stack = np.stack([c.trace_best for c in runs_sorted])
            curves[algo_id] = (stack.mean(axis=0), stack.std(axis=0))
        path = out_dir / f"ablation__{name}__d{dim}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            header = ["fe"]
            for algo_id in algo_ids:
                header += [f"{algo_id}_mean", f"{algo_id}_std"]
            w.writerow(header)
            for fe in range(budget):
                row = [fe + 1]
                for algo_id in algo_ids:
                    mean, std = curves[algo_id]
                    row += [repr(float(mean[fe])), repr(float(std[fe]))]
                w.writerow(row)
        finals[(name, dim)] = {
            a: np.array([c.best_f for c in sorted(per_algo[a], key=lambda c: c.seed)])
            for a in algo_ids
        }
    return finals
