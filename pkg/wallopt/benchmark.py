# wallopt/benchmark.py - PSO / DE baselines and the nonparametric comparison statistics

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from wallopt.config import ExperimentConfig, settings
from wallopt.errors import StatsInputError
from wallopt.limit_states import ConstraintVector
from wallopt.monitoring import performance_timer
from wallopt.objective import Evaluation, WallProblem
from wallopt.wall_model import DesignVector

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    """Outcome of one seeded optimizer run"""

    algorithm: str
    seed: int
    history: np.ndarray  # best penalized value after each iteration
    raw_history: np.ndarray  # raw objective of that best
    design: DesignVector
    raw: float
    feasible: bool
    constraints: ConstraintVector
    wall_time: float
    evaluations: int
    probability_trace: List[Tuple[float, ...]] = field(default_factory=list)

    @property
    def best_penalized(self) -> float:
        return float(self.history[-1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "raw": self.raw,
            "best_penalized": self.best_penalized,
            "feasible": self.feasible,
            "design": list(self.design.x) + list(self.design.r),
            "wall_time": self.wall_time,
            "evaluations": self.evaluations,
            "iterations": len(self.history),
        }


class _BestTracker:
    def __init__(self):
        self.evaluation: Optional[Evaluation] = None

    def offer(self, evaluation: Evaluation) -> bool:
        if self.evaluation is None or evaluation.penalized < self.evaluation.penalized:
            self.evaluation = evaluation
            return True
        return False


def _record(algorithm: str, seed: int, best: Evaluation, history, raw_history,
            started: float, evaluations: int) -> RunRecord:
    return RunRecord(
        algorithm=algorithm,
        seed=seed,
        history=np.asarray(history),
        raw_history=np.asarray(raw_history),
        design=best.design,
        raw=best.raw,
        feasible=best.feasible,
        constraints=best.constraints,
        wall_time=time.perf_counter() - started,
        evaluations=evaluations,
    )


# ------------------------- Particle swarm ------------------------- #

@performance_timer("benchmark.pso")
def run_pso(problem: WallProblem, config: ExperimentConfig, seed: int,
            inertia: float = None, damping: float = None, c1: float = None, c2: float = None,
            velocity_fraction: float = None) -> RunRecord:
    """Global-best PSO with damped inertia and mirrored velocities at the bounds"""
    w = settings.pso_inertia_start if inertia is None else inertia
    damping = settings.pso_inertia_damping if damping is None else damping
    c1 = settings.pso_c1 if c1 is None else c1
    c2 = settings.pso_c2 if c2 is None else c2
    fraction = settings.pso_velocity_fraction if velocity_fraction is None else velocity_fraction

    rng = np.random.default_rng(seed)
    bounds = problem.bounds
    n, dimension = config.population, problem.dimension
    vel_max = fraction * bounds.span
    started = time.perf_counter()
    evaluations_before = problem.evaluations
    logger.info(f"PSO run seed={seed} on {problem}")

    x = bounds.lower + rng.random((n, dimension)) * bounds.span
    v = np.zeros((n, dimension))
    cost = np.empty(n)
    best = _BestTracker()
    for i in range(n):
        evaluation = problem.evaluate(x[i])
        cost[i] = evaluation.penalized
        best.offer(evaluation)
    p, p_cost = x.copy(), cost.copy()
    g = x[int(np.argmin(cost))].copy()

    history, raw_history = [], []
    for _ in range(config.iterations):
        for i in range(n):
            r1, r2 = rng.random(dimension), rng.random(dimension)
            v[i] = w * v[i] + c1 * r1 * (p[i] - x[i]) + c2 * r2 * (g - x[i])
            v[i] = np.clip(v[i], -vel_max, vel_max)
            x[i] = x[i] + v[i]

            outside = (x[i] < bounds.lower) | (x[i] > bounds.upper)
            v[i] = np.where(outside, -v[i], v[i])
            x[i] = bounds.clamp(x[i])

            evaluation = problem.evaluate(x[i])
            cost[i] = evaluation.penalized
            if cost[i] < p_cost[i]:
                p[i], p_cost[i] = x[i].copy(), cost[i]
            if best.offer(evaluation):
                g = x[i].copy()

        w *= damping
        history.append(best.evaluation.penalized)
        raw_history.append(best.evaluation.raw)

    record = _record("pso", seed, best.evaluation, history, raw_history, started,
                     problem.evaluations - evaluations_before)
    logger.info(f"PSO seed={seed} finished: best={record.raw:.4f} feasible={record.feasible}")
    return record


# ------------------------- Differential evolution ------------------------- #

def parent_ids(n: int, target: int, rng: np.random.Generator) -> Tuple[int, int, int]:
    """Three distinct indices, all different from the target"""
    candidates = [i for i in range(n) if i != target]
    r1, r2, r3 = rng.choice(candidates, size=3, replace=len(candidates) < 3)
    return int(r1), int(r2), int(r3)


@performance_timer("benchmark.de")
def run_de(problem: WallProblem, config: ExperimentConfig, seed: int,
           scale_factor: float = None, crossover: float = None) -> RunRecord:
    """DE/rand/1/bin over the whole population"""
    F = settings.de_scale_factor if scale_factor is None else scale_factor
    CR = settings.de_crossover if crossover is None else crossover

    rng = np.random.default_rng(seed)
    bounds = problem.bounds
    n, dimension = config.population, problem.dimension
    started = time.perf_counter()
    evaluations_before = problem.evaluations
    logger.info(f"DE run seed={seed} on {problem}")

    x = bounds.lower + rng.random((n, dimension)) * bounds.span
    cost = np.empty(n)
    best = _BestTracker()
    for i in range(n):
        evaluation = problem.evaluate(x[i])
        cost[i] = evaluation.penalized
        best.offer(evaluation)

    history, raw_history = [], []
    for _ in range(config.iterations):
        for i in range(n):
            r1, r2, r3 = parent_ids(n, i, rng)
            mutant = x[r1] + F * (x[r2] - x[r3])
            mask = rng.random(dimension) < CR
            mask[rng.integers(dimension)] = True
            trial = bounds.clamp(np.where(mask, mutant, x[i]))

            evaluation = problem.evaluate(trial)
            if evaluation.penalized <= cost[i]:
                x[i], cost[i] = trial, evaluation.penalized
            best.offer(evaluation)

        history.append(best.evaluation.penalized)
        raw_history.append(best.evaluation.raw)

    record = _record("de", seed, best.evaluation, history, raw_history, started,
                     problem.evaluations - evaluations_before)
    logger.info(f"DE seed={seed} finished: best={record.raw:.4f} feasible={record.feasible}")
    return record


# ------------------------- Statistics ------------------------- #

# Two-tailed critical values of the signed-rank statistic, keyed by alpha then n
WILCOXON_CRITICAL = {
    0.05: {6: 0, 7: 2, 8: 3, 9: 5, 10: 8, 11: 10, 12: 13, 13: 17, 14: 21, 15: 25,
           16: 29, 17: 34, 18: 40, 19: 46, 20: 52, 21: 58, 22: 65, 23: 73, 24: 81,
           25: 89, 26: 98, 27: 107, 28: 116, 29: 126, 30: 137},
    0.01: {8: 0, 9: 1, 10: 3, 11: 5, 12: 7, 13: 9, 14: 12, 15: 15, 16: 19, 17: 23,
           18: 27, 19: 32, 20: 37, 21: 42, 22: 48, 23: 54, 24: 61, 25: 68, 26: 75,
           27: 83, 28: 91, 29: 100, 30: 109},
}

DIFFERENCE_DECIMALS = 10

# Printed example-1 cost means (USD/m), seismic cases 1..9
REFERENCE_ALGORITHMS = ("FPA", "GWO", "ICA", "PSO", "LFBBO", "BBO", "DE", "MSA", "IHS", "FAGLSUD")
REFERENCE_MEANS: Dict[str, Tuple[float, ...]] = {
    "FPA": (83.66, 97.78, 133.92, 81.71, 92.89, 136.73, 81.62, 89.53, 152.26),
    "GWO": (86.10, 102.94, 140.60, 84.15, 97.79, 143.03, 84.08, 94.16, 157.01),
    "ICA": (73.84, 91.06, 126.17, 72.64, 86.13, 128.12, 71.09, 82.00, 142.61),
    "PSO": (62.86, 84.01, 117.36, 59.78, 79.51, 119.63, 57.15, 75.49, 131.80),
    "LFBBO": (63.16, 89.08, 121.31, 59.37, 82.33, 121.33, 56.89, 77.21, 131.83),
    "BBO": (62.96, 84.65, 118.84, 59.36, 80.19, 121.26, 56.96, 75.76, 133.90),
    "DE": (86.06, 102.86, 140.97, 84.94, 98.57, 142.84, 84.19, 94.11, 157.75),
    "MSA": (62.50, 83.98, 116.97, 59.38, 79.62, 119.00, 56.89, 75.67, 131.89),
    "IHS": (63.80, 84.34, 118.39, 60.52, 79.87, 120.75, 57.83, 75.60, 133.05),
    "FAGLSUD": (62.45, 83.93, 116.71, 59.35, 79.51, 118.90, 56.88, 75.44, 131.06),
}


@dataclass
class FriedmanResult:
    algorithms: List[str]
    ranks: np.ndarray  # algorithms x cases
    average_ranks: np.ndarray
    overall_ranks: np.ndarray

    def average_rank(self, algorithm: str) -> float:
        return float(self.average_ranks[self.algorithms.index(algorithm)])

    def overall_rank(self, algorithm: str) -> float:
        return float(self.overall_ranks[self.algorithms.index(algorithm)])


@dataclass
class WilcoxonResult:
    differences: np.ndarray
    absolute_ranks: np.ndarray  # 0 where the difference is zero
    t_plus: float
    t_minus: float
    w_stat: float
    w_crit: Optional[float]
    significant: bool
    undefined: bool = False
    p_value: Optional[float] = None

    @property
    def verdict(self) -> str:
        if self.undefined:
            return "undefined (no nonzero differences)"
        return "significant" if self.significant else "not significant"


@dataclass
class StatsResult:
    algorithms: List[str]
    means: Dict[str, np.ndarray]
    sds: Dict[str, np.ndarray]
    friedman: FriedmanResult
    wilcoxon: Dict[str, WilcoxonResult]
    reference: str


def friedman_ranks(means: Mapping[str, Sequence[float]]) -> FriedmanResult:
    """Per-case ranks (1 = lowest mean, ties averaged) and their average per algorithm"""
    algorithms = list(means)
    if not algorithms:
        raise StatsInputError("No algorithms to rank")
    lengths = {len(v) for v in means.values()}
    if len(lengths) != 1:
        raise StatsInputError(f"Algorithms cover different numbers of cases: {sorted(lengths)}")

    matrix = np.array([np.asarray(means[a], dtype=float) for a in algorithms])
    ranks = np.apply_along_axis(stats.rankdata, 0, matrix)
    average = ranks.mean(axis=1)
    overall = stats.rankdata(average, method="min")
    return FriedmanResult(algorithms, ranks, average, overall)


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float], alpha: float = 0.05) -> WilcoxonResult:
    """Two-tailed signed-rank test on paired values; differences are a - b"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise StatsInputError("Wilcoxon test needs two paired 1-D samples of equal length")
    if alpha not in WILCOXON_CRITICAL:
        raise StatsInputError(f"No critical-value table for alpha={alpha}")

    differences = np.round(a - b, DIFFERENCE_DECIMALS)
    nonzero = differences != 0
    n = int(nonzero.sum())
    absolute_ranks = np.zeros_like(differences)

    if n == 0:
        return WilcoxonResult(differences, absolute_ranks, 0.0, 0.0, 0.0, None,
                              significant=False, undefined=True)

    absolute_ranks[nonzero] = stats.rankdata(np.abs(differences[nonzero]))
    t_plus = float(absolute_ranks[differences > 0].sum())
    t_minus = float(absolute_ranks[differences < 0].sum())
    w_stat = min(t_plus, t_minus)
    w_crit = WILCOXON_CRITICAL[alpha].get(n)
    significant = w_crit is not None and w_stat < w_crit

    try:
        p_value = float(stats.wilcoxon(differences[nonzero]).pvalue)
    except ValueError:
        p_value = None

    return WilcoxonResult(differences, absolute_ranks, t_plus, t_minus, w_stat,
                          None if w_crit is None else float(w_crit), significant, False, p_value)


def compare(means: Mapping[str, Sequence[float]], reference: str,
            sds: Mapping[str, Sequence[float]] = None, alpha: float = 0.05) -> StatsResult:
    """Friedman ranking of every algorithm plus reference-vs-each Wilcoxon tests"""
    if reference not in means:
        raise StatsInputError(f"Reference algorithm '{reference}' not among {list(means)}")
    if len(means) < 2:
        raise StatsInputError("At least two algorithms are needed for a comparison")

    friedman = friedman_ranks(means)
    tests = {
        name: wilcoxon_signed_rank(means[reference], values, alpha)
        for name, values in means.items() if name != reference
    }
    return StatsResult(
        algorithms=list(means),
        means={k: np.asarray(v, dtype=float) for k, v in means.items()},
        sds={k: np.asarray(v, dtype=float) for k, v in (sds or {}).items()},
        friedman=friedman,
        wilcoxon=tests,
        reference=reference,
    )
