# wallopt/harness_cli.py - Command-line driver for experiments, statistics and design checks

import argparse
import logging
import os
import re
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from wallopt import faglsud_optimizer
from wallopt.batch_processing import RunBatchManager, RunStatus
from wallopt.benchmark import (
    REFERENCE_ALGORITHMS,
    REFERENCE_MEANS,
    RunRecord,
    StatsResult,
    compare,
    run_de,
    run_pso,
)
from wallopt.config import PROFILES, ExperimentConfig, get_output_directory, load_config_file
from wallopt.errors import ConfigError, DesignParseError, OutputError, StatsInputError, WallOptError
from wallopt.limit_states import N_CONSTRAINTS
from wallopt.monitoring import performance_monitor, setup_logging
from wallopt.objective import Evaluation, WallProblem, all_objectives, evaluate_design
from wallopt.wall_model import (
    CATALOG_SIZE,
    N_GEOMETRY,
    N_VARIABLES,
    DesignVector,
    build_catalog,
    example_bounds,
    example_parameters,
    seismic_case,
)

logger = logging.getLogger(__name__)

CONVERGENCE_FILE = "convergence.csv"
MEAN_CONVERGENCE_FILE = "convergence_mean.csv"
DESIGNS_FILE = "designs.csv"
SUMMARY_FILE = "summary.csv"

GEOMETRY_COLUMNS = [f"X{k}" for k in range(1, N_GEOMETRY + 1)]
REBAR_COLUMNS = [f"R{k}" for k in range(1, N_VARIABLES - N_GEOMETRY + 1)]
SUMMARY_COLUMNS = ["case", "mean", "sd", "best", "worst", "feasible_runs",
                   "algorithm", "objective", "example"]

ALGORITHM_RUNNERS: Dict[str, Callable[[WallProblem, ExperimentConfig, int], RunRecord]] = {
    "faglsud": faglsud_optimizer.run,
    "pso": run_pso,
    "de": run_de,
}

# performance_timer component names of the runners above
TIMED_COMPONENTS = {
    "faglsud": "faglsud.run",
    "pso": "benchmark.pso",
    "de": "benchmark.de",
}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: Dict[int, List[RunRecord]]  # case -> runs in index order
    files: Dict[str, str]
    summary: pd.DataFrame
    best_designs: pd.DataFrame


# ------------------------- Configuration ------------------------- #

def build_problem(config: ExperimentConfig, case: int) -> WallProblem:
    params = example_parameters(config.example, config.parameter_overrides)
    return WallProblem(params, example_bounds(config.example), seismic_case(case), config.objective)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults < profile < command-line flags < config file"""
    values = {
        "example": args.example,
        "cases": args.case,
        "objective": args.objective,
        "algorithm": args.algo,
        "runs": args.runs,
        "iterations": args.iters,
        "population": args.pop,
        "empires": getattr(args, "empires", None),
        "seed": args.seed,
        "output_directory": args.out,
    }
    values = {k: v for k, v in values.items() if v is not None}
    profile = args.profile

    if args.config:
        experiment, parameters = load_config_file(args.config)
        profile = experiment.pop("profile", profile)
        values.update(experiment)
        if parameters:
            values["parameter_overrides"] = parameters

    try:
        if profile:
            return ExperimentConfig.from_profile(profile, **values)
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration: {e}")


# ------------------------- run ------------------------- #

def run_case(config: ExperimentConfig, case: int, workers: int = None) -> List[RunRecord]:
    runner = ALGORITHM_RUNNERS[config.algorithm]
    # One problem per run; the evaluation counter is per instance
    task = lambda seed: runner(build_problem(config, case), config, seed)

    manager = RunBatchManager(max_workers=workers)
    tasks = manager.run(f"{config.algorithm}/ex{config.example}/case{case}", config.runs, config.seed, task,
                        metadata={"case": case, "example": config.example})
    failed = [t for t in tasks if t.status == RunStatus.FAILED]
    if failed:
        raise WallOptError(f"{len(failed)} of {len(tasks)} runs failed for case {case}: {failed[0].error}")
    return [t.result for t in tasks]


def convergence_frame(case: int, records: Sequence[RunRecord]) -> pd.DataFrame:
    frames = []
    for run_id, record in enumerate(records):
        frames.append(pd.DataFrame({
            "case": case,
            "run_id": run_id,
            "iteration": np.arange(1, len(record.history) + 1),
            "best_penalized": record.history,
            "best_raw": record.raw_history,
        }))
    return pd.concat(frames, ignore_index=True)


def mean_convergence_frame(convergence: pd.DataFrame) -> pd.DataFrame:
    """Per-case, per-iteration mean of the best-so-far values over all runs"""
    grouped = convergence.groupby(["case", "iteration"], sort=False)
    frame = grouped[["best_penalized", "best_raw"]].mean().add_prefix("mean_")
    frame["runs"] = grouped.size()
    return frame.reset_index()


def designs_frame(case: int, records: Sequence[RunRecord]) -> pd.DataFrame:
    rows = []
    for run_id, record in enumerate(records):
        row = {"case": case, "run_id": run_id, "seed": record.seed}
        row.update(zip(GEOMETRY_COLUMNS, record.design.x))
        row.update(zip(REBAR_COLUMNS, record.design.r))
        row["objective"] = record.raw
        row["feasible"] = record.feasible
        rows.append(row)
    return pd.DataFrame(rows)


def summary_row(config: ExperimentConfig, case: int, records: Sequence[RunRecord]) -> Dict[str, object]:
    """Objective statistics over the feasible runs; NaN when the case has none"""
    values = np.array([r.raw for r in records if r.feasible])
    if len(values) == 0:
        logger.warning(f"Case {case}: none of {len(records)} runs is feasible, statistics left as NaN")
        mean = sd = best = worst = float("nan")
    else:
        mean, best, worst = values.mean(), values.min(), values.max()
        sd = values.std(ddof=1) if len(values) > 1 else 0.0
    return {
        "case": case,
        "mean": mean,
        "sd": sd,
        "best": best,
        "worst": worst,
        "feasible_runs": len(values),
        "algorithm": config.algorithm,
        "objective": config.objective,
        "example": config.example,
    }


def best_record(records: Sequence[RunRecord]) -> RunRecord:
    """Cheapest feasible run, or the lowest penalized run when none is feasible"""
    feasible = [r for r in records if r.feasible]
    if feasible:
        return min(feasible, key=lambda r: r.raw)
    return min(records, key=lambda r: r.best_penalized)


def best_design_frame(config: ExperimentConfig, records: Dict[int, List[RunRecord]]) -> pd.DataFrame:
    """One row per case: X1..X8, bar groups R1..R4 and the objective of the best run"""
    rows = []
    for case, case_records in records.items():
        best = best_record(case_records)
        row = {"case": case}
        row.update(zip(GEOMETRY_COLUMNS, best.design.x))
        row.update(zip(REBAR_COLUMNS, (choice.label() for choice in best.design.rebar())))
        row[config.objective] = best.raw
        row["feasible"] = best.feasible
        rows.append(row)
    return pd.DataFrame(rows)


def format_run_report(result: ExperimentResult) -> str:
    summary = result.summary.to_string(index=False, float_format=lambda v: f"{v:.2f}")
    designs = result.best_designs.round(2).set_index("case").T
    designs.columns = [f"case {c}" for c in designs.columns]
    return "\n".join([
        "Summary",
        summary,
        "",
        "Best designs",
        designs.to_string(),
    ])


def timing_summary(algorithm: str) -> str:
    component = TIMED_COMPONENTS[algorithm]
    stats = performance_monitor.get_statistics(f"{component}.execution_time")
    if not stats:
        return f"{component}: no timings recorded"
    return (f"{component}: {stats['count']} runs, avg {stats['avg']:.3f}s, "
            f"min {stats['min']:.3f}s, max {stats['max']:.3f}s")


def write_frame(frame: pd.DataFrame, path: str):
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e}")


def run_experiment(config: ExperimentConfig, workers: int = None) -> ExperimentResult:
    """Execute every case of the batch and write the three CSV artifacts"""
    example_parameters(config.example, config.parameter_overrides)
    out = get_output_directory(config.output_directory)
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory {out}: {e}")
    if not os.access(out, os.W_OK):
        raise OutputError(f"Output directory {out} is not writable")

    logger.info(f"Experiment: example {config.example}, cases {config.cases}, {config.objective}, "
                f"{config.algorithm}, {config.runs} runs x {config.iterations} iterations")

    records: Dict[int, List[RunRecord]] = {}
    for case in config.cases:
        records[case] = run_case(config, case, workers)
        best = best_record(records[case])
        logger.info(f"Case {case}: best {best.raw:.4f} (feasible={best.feasible}), "
                    f"{sum(r.feasible for r in records[case])}/{len(records[case])} feasible runs")

    convergence = pd.concat([convergence_frame(c, r) for c, r in records.items()], ignore_index=True)
    designs = pd.concat([designs_frame(c, r) for c, r in records.items()], ignore_index=True)
    summary = pd.DataFrame([summary_row(config, c, r) for c, r in records.items()], columns=SUMMARY_COLUMNS)

    files = {
        "convergence": os.path.join(out, CONVERGENCE_FILE),
        "convergence_mean": os.path.join(out, MEAN_CONVERGENCE_FILE),
        "designs": os.path.join(out, DESIGNS_FILE),
        "summary": os.path.join(out, SUMMARY_FILE),
    }
    write_frame(convergence, files["convergence"])
    write_frame(mean_convergence_frame(convergence), files["convergence_mean"])
    write_frame(designs, files["designs"])
    write_frame(summary, files["summary"])
    return ExperimentResult(config, records, files, summary, best_design_frame(config, records))


# ------------------------- stats ------------------------- #

def load_summaries(paths: Sequence[str]) -> Dict[str, pd.DataFrame]:
    """Summary tables keyed by algorithm; repeated algorithm names get a file-position suffix"""
    tables: Dict[str, pd.DataFrame] = {}
    for position, path in enumerate(paths, start=1):
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise StatsInputError(f"Cannot read summary {path}: {e}")
        missing = {"case", "mean", "algorithm"} - set(frame.columns)
        if missing:
            raise StatsInputError(f"{path} lacks columns {sorted(missing)}")

        for algorithm, group in frame.groupby("algorithm", sort=False):
            name = str(algorithm)
            if name in tables:
                name = f"{name}[{position}]"
            tables[name] = group.sort_values("case").reset_index(drop=True)
    return tables


def means_from_summaries(tables: Dict[str, pd.DataFrame]):
    case_sets = {name: tuple(t["case"]) for name, t in tables.items()}
    if len(set(case_sets.values())) != 1:
        raise StatsInputError(f"Summaries cover different case sets: {case_sets}")
    means = {name: t["mean"].to_numpy(dtype=float) for name, t in tables.items()}
    for name, values in means.items():
        if np.isnan(values).any():
            empty = [c for c, v in zip(case_sets[name], values) if np.isnan(v)]
            raise StatsInputError(f"{name} has no feasible runs for cases {empty}")
    sds = {name: t["sd"].to_numpy(dtype=float) for name, t in tables.items() if "sd" in t}
    cases = list(next(iter(case_sets.values())))
    return cases, means, sds


def format_report(result: StatsResult, cases: Sequence[int]) -> str:
    lines = []
    ranks = pd.DataFrame(result.friedman.ranks, index=result.friedman.algorithms,
                         columns=[f"case {c}" for c in cases])
    ranks["average"] = result.friedman.average_ranks
    ranks["overall"] = result.friedman.overall_ranks
    lines.append("Friedman ranks")
    lines.append(ranks.to_string(float_format=lambda v: f"{v:.2f}"))

    for name, test in result.wilcoxon.items():
        lines.append("")
        lines.append(f"Wilcoxon signed-rank: {result.reference} vs {name}")
        signed = np.sign(test.differences) * test.absolute_ranks
        table = pd.DataFrame({
            "case": list(cases),
            result.reference: result.means[result.reference],
            name: result.means[name],
            "difference": test.differences,
            "rank": signed,
        })
        lines.append(table.to_string(index=False, float_format=lambda v: f"{v:.2f}"))
        w_crit = "n/a" if test.w_crit is None else f"{test.w_crit:g}"
        lines.append(f"T+ = {test.t_plus:g}  T- = {test.t_minus:g}  "
                     f"W_stat = {test.w_stat:g}  W_crit = {w_crit}  -> {test.verdict}")
    return "\n".join(lines)


def stats_command(paths: Sequence[str] = (), reference_table: bool = False, baseline: str = None,
                  alpha: float = 0.05) -> StatsResult:
    if reference_table:
        means = {name: REFERENCE_MEANS[name] for name in REFERENCE_ALGORITHMS}
        sds = {}
        cases = list(range(1, 10))
        baseline = baseline or "FAGLSUD"
    else:
        if len(paths) < 1:
            raise StatsInputError("Give summary files or --reference")
        cases, means, sds = means_from_summaries(load_summaries(paths))
        if baseline is None:
            baseline = "faglsud" if "faglsud" in means else next(iter(means))

    result = compare(means, baseline, sds, alpha)
    print(format_report(result, cases))
    return result


# ------------------------- check ------------------------- #

def parse_design(path: str) -> DesignVector:
    """12 numbers separated by commas or whitespace; the last four are catalog indices"""
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise DesignParseError(f"Cannot read design file {path}: {e}")

    tokens = [t for t in re.split(r"[,\s;]+", text.strip()) if t]
    try:
        values = [float(t) for t in tokens]
    except ValueError:
        raise DesignParseError(f"Design file {path} contains non-numeric values")
    if len(values) != N_VARIABLES:
        raise DesignParseError(f"Design needs {N_VARIABLES} values, got {len(values)}")

    # Fractional rebar entries are relaxed indices, rounded as during search
    rebar = [int(np.rint(v)) for v in values[N_GEOMETRY:]]
    if any(not 1 <= r <= CATALOG_SIZE for r in rebar):
        raise DesignParseError(f"Rebar indices must lie in 1..{CATALOG_SIZE}, got {values[N_GEOMETRY:]}")
    return DesignVector(tuple(values[:N_GEOMETRY]), tuple(rebar))


def format_check(evaluation: Evaluation, objectives: Dict[str, float], out_of_bounds: List[str]) -> str:
    lines = []
    if out_of_bounds:
        lines.append(f"WARNING: outside bounds: {', '.join(out_of_bounds)}")
    for j in range(1, N_CONSTRAINTS + 1):
        value = evaluation.constraints[j]
        flag = "  VIOLATED" if value > 0 else ""
        lines.append(f"g{j:<2} = {value: .6f}{flag}")
    stability = evaluation.stability
    if stability is not None:
        lines.append(f"FS_O = {stability.FS_O:.4f}  FS_S = {stability.FS_S:.4f}  FS_B = {stability.FS_B:.4f}")
        lines.append(f"q_max = {stability.q_max:.3f} kPa  q_min = {stability.q_min:.3f} kPa")
    else:
        lines.append("No admissible earth-pressure wedge for this case")
    lines.append(f"cost = {objectives['cost']:.2f} USD/m  weight = {objectives['weight']:.2f} kg/m  "
                 f"co2 = {objectives['co2']:.2f} kg/m")
    lines.append("feasible" if evaluation.feasible else "infeasible")
    return "\n".join(lines)


def check_design(path: str, example: int, case: int, parameter_overrides: Dict[str, float] = None) -> Evaluation:
    design = parse_design(path)
    params = example_parameters(example, parameter_overrides)
    bounds = example_bounds(example)
    names = GEOMETRY_COLUMNS + REBAR_COLUMNS
    values = design.to_array()
    out_of_bounds = [names[k] for k in range(N_VARIABLES)
                     if values[k] < bounds.lower[k] - 1e-9 or values[k] > bounds.upper[k] + 1e-9]

    evaluation = evaluate_design(design, params, seismic_case(case), "cost")
    print(format_check(evaluation, all_objectives(design, params), out_of_bounds))
    return evaluation


def catalog_table() -> pd.DataFrame:
    return pd.DataFrame([
        {"index": k, "bars": c.label(), "count": c.count, "diameter_mm": c.diameter, "area_cm2": c.area}
        for k, c in enumerate(build_catalog(), start=1)
    ])


# ------------------------- entry point ------------------------- #

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wallopt", description="Seismic retaining wall optimization harness")
    parser.add_argument("--log-level", default=None, help="Override WALLOPT_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a seeded experiment batch")
    run.add_argument("--example", type=int)
    run.add_argument("--case", type=int, nargs="+", help="Seismic case numbers 1..9")
    run.add_argument("--objective", choices=["cost", "weight", "co2"])
    run.add_argument("--algo", choices=sorted(ALGORITHM_RUNNERS))
    run.add_argument("--runs", type=int)
    run.add_argument("--iters", type=int)
    run.add_argument("--pop", type=int)
    run.add_argument("--empires", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--profile", choices=sorted(PROFILES))
    run.add_argument("--config", help="KEY=value file; its values override flags")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--verbose", action="store_true", help="Print per-run timing statistics")

    stats = sub.add_parser("stats", help="Friedman ranks and Wilcoxon tests over summary files")
    stats.add_argument("summaries", nargs="*")
    stats.add_argument("--reference", action="store_true", help="Use the built-in reference means")
    stats.add_argument("--baseline", default=None)
    stats.add_argument("--alpha", type=float, default=0.05)

    check = sub.add_parser("check", help="Evaluate one design against all constraints")
    check.add_argument("design")
    check.add_argument("--example", type=int, default=1)
    check.add_argument("--case", type=int, default=1)
    check.add_argument("--config", help="KEY=value file with design-parameter overrides")

    sub.add_parser("catalog", help="Print the rebar catalog")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        if args.command == "run":
            if args.verbose:
                performance_monitor.enabled = True
                performance_monitor.reset()
            result = run_experiment(resolve_config(args), args.workers)
            print(format_run_report(result))
            if args.verbose:
                print(timing_summary(result.config.algorithm))
        elif args.command == "stats":
            stats_command(args.summaries, args.reference, args.baseline, args.alpha)
        elif args.command == "check":
            overrides = load_config_file(args.config)[1] if args.config else None
            check_design(args.design, args.example, args.case, overrides)
        elif args.command == "catalog":
            print(catalog_table().to_string(index=False, float_format=lambda v: f"{v:.3f}"))
        return 0
    except WallOptError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
