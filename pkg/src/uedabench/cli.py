"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError
from . import analysis, harness
from .problems import PROBLEM_NAMES, make_problem


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="uedabench",
        description="Expensive black-box optimization benchmark toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list-problems", help="print the problem registry")

    run = sub.add_parser("run", help="run a batch experiment from a JSON config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", type=Path, default=None,
                     help="output directory (overrides config)")
    run.add_argument("--threads", type=int, default=None)

    abl = sub.add_parser("ablation", help="run the UEDA ablation on the LZG suite")
    abl.add_argument("--dims", default="20,50",
                     help="comma-separated dimensions")
    abl.add_argument("--runs", type=int, default=30)
    abl.add_argument("--budget", type=int, default=500)
    abl.add_argument("--seed", type=int, default=0)
    abl.add_argument("--out", type=Path, default=Path("ablation_out"))
    abl.add_argument("--threads", type=int, default=None)

    d1 = sub.add_parser("demo-1d", help="GP/RF fit + EI curves on x*sin(x)")
    d1.add_argument("--seed", type=int, default=0)
    d1.add_argument("--noise", type=float, default=analysis.DEFAULT_NOISE_STD)
    d1.add_argument("--out", type=Path, default=Path("demo_out"))

    dd = sub.add_parser("demo-density", help="offspring density comparison")
    dd.add_argument("--seed", type=int, default=0)
    dd.add_argument("--samples", type=int, default=10000)
    dd.add_argument("--out", type=Path, default=Path("demo_out"))

    st = sub.add_parser("stats", help="recompute the report from stored summaries")
    st.add_argument("--dir", required=True, type=Path)
    st.add_argument("--baseline", default=None,
                    help="baseline algorithm id (default: from report.json)")
    return p


def _cmd_list_problems() -> int:
    print(f"{'name':<12}{'dims':<10}{'bounds':<22}{'noisy':<7}{'f_star'}")
    for name in PROBLEM_NAMES:
        prob = make_problem(name, 2)
        bounds = f"[{prob.lower[0]:g}, {prob.upper[0]:g}]^n"
        f_star = "-" if prob.f_star is None else f"{prob.f_star:g}"
        print(f"{name:<12}{'>=2':<10}{bounds:<22}{str(prob.noisy).lower():<7}{f_star}")
    return 0


def _cmd_run(args) -> int:
    spec = harness.load_spec(args.config, output_dir=args.out)
    report = harness.run_experiment(spec, threads=args.threads)
    print(harness.render_report_text(report))
    return 0


def _cmd_ablation(args) -> int:
    try:
        dims = tuple(int(d) for d in args.dims.split(","))
    except ValueError:
        raise ConfigurationError(f"bad --dims value {args.dims!r}")
    harness.run_ablation(
        out_dir=args.out,
        dims=dims,
        runs=args.runs,
        budget=args.budget,
        base_seed=args.seed,
        threads=args.threads,
    )
    print(f"ablation artifacts written to {args.out}")
    return 0


def _cmd_demo_1d(args) -> int:
    grid = analysis.demo_fit_1d(args.seed, noise_std=args.noise)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"demo1d_seed{args.seed}.csv"
    grid.write_csv(path)
    print(f"wrote {path} (next_gp={grid.next_gp:.3f}, next_rf={grid.next_rf:.3f})")
    return 0


def _cmd_demo_density(args) -> int:
    fit = analysis.demo_fit_1d(args.seed)
    demos = [
        analysis.demo_offspring_density(args.seed, args.samples, surrogate=s)
        for s in ("GP", "RF")
    ]
    analysis.write_density_outputs(demos, args.out, fit)
    for d in demos:
        print(
            f"{d.surrogate}: mass in {analysis.OPT_REGION} "
            f"all={d.fraction_all:.3f} best={d.fraction_best:.3f}"
        )
    return 0


def _cmd_stats(args) -> int:
    summary = args.dir / "summary.csv"
    if not summary.exists():
        raise ConfigurationError(f"no summary.csv under {args.dir}")
    baseline = args.baseline
    if baseline is None:
        report_path = args.dir / "report.json"
        if not report_path.exists():
            raise ConfigurationError(
                "no report.json to take the baseline from; pass --baseline"
            )
        with open(report_path) as fh:
            baseline = json.load(fh)["baseline"]
    rows = harness.read_summary(summary)
    report = harness.report_from_rows(rows, baseline=baseline)
    print(harness.render_report_text(report))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-problems":
            return _cmd_list_problems()
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "ablation":
            return _cmd_ablation(args)
        if args.command == "demo-1d":
            return _cmd_demo_1d(args)
        if args.command == "demo-density":
            return _cmd_demo_density(args)
        if args.command == "stats":
            return _cmd_stats(args)
        return 1
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
