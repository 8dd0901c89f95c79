# wallopt/faglsud_optimizer.py - Fuzzy adaptive empire search (GLVA / UDVD / EDELS)

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Sequence, Tuple

import numpy as np

from wallopt.benchmark import RunRecord
from wallopt.config import ExperimentConfig, settings
from wallopt.fuzzy_engine import adapt_edels, adapt_glva, adapt_udvd, select_operators
from wallopt.monitoring import performance_timer
from wallopt.objective import Evaluation, WallProblem
from wallopt.wall_model import Bounds

logger = logging.getLogger(__name__)

IMPERIALIST = "imperialist"
COLONY = "colony"
INITIAL_PROBABILITY = 0.5


# ------------------------- State types ------------------------- #

@dataclass
class Country:
    """Snapshot of one agent"""

    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_power: float
    power: float
    role: str
    empire: int


@dataclass
class Population:
    positions: np.ndarray
    velocities: np.ndarray
    powers: np.ndarray
    best_positions: np.ndarray
    best_powers: np.ndarray

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    def country(self, index: int, layout: "EmpireLayout") -> Country:
        empire = layout.empire_of(index)
        role = IMPERIALIST if layout.imperialists[empire] == index else COLONY
        return Country(
            position=self.positions[index].copy(),
            velocity=self.velocities[index].copy(),
            best_position=self.best_positions[index].copy(),
            best_power=float(self.best_powers[index]),
            power=float(self.powers[index]),
            role=role,
            empire=empire,
        )


@dataclass
class EmpireLayout:
    imperialists: List[int]
    colonies: List[List[int]]

    @property
    def n_colonies(self) -> int:
        return sum(len(c) for c in self.colonies)

    def all_colonies(self) -> List[int]:
        return [c for group in self.colonies for c in group]

    def empire_of(self, agent: int) -> int:
        for k, imperialist in enumerate(self.imperialists):
            if imperialist == agent or agent in self.colonies[k]:
                return k
        raise KeyError(f"Agent {agent} belongs to no empire")

    def swap(self, empire: int, colony: int):
        """Exchange roles of an empire's imperialist and one of its colonies"""
        members = self.colonies[empire]
        position = members.index(colony)
        members[position] = self.imperialists[empire]
        self.imperialists[empire] = colony


@dataclass
class OperatorProbabilities:
    glva: float = INITIAL_PROBABILITY
    udvd: float = INITIAL_PROBABILITY
    edels: float = INITIAL_PROBABILITY
    window: int = 10
    history: Deque[float] = field(default_factory=deque)

    def __post_init__(self):
        for name in ("glva", "udvd", "edels"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} probability must lie in [0, 1], got {value}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        self.history = deque(self.history, maxlen=self.window)

    def record(self, global_best_power: float):
        self.history.append(float(global_best_power))

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.glva, self.udvd, self.edels

    def update(self, values: Sequence[float]):
        self.glva, self.udvd, self.edels = (min(max(float(v), 0.0), 1.0) for v in values)


@dataclass(frozen=True)
class VelocityLimits:
    vel_max: np.ndarray
    vel_min: np.ndarray
    alpha: float


# ------------------------- Population and empires ------------------------- #

def initialize(bounds: Bounds, n_pop: int, rng: np.random.Generator) -> Population:
    """Uniform positions inside the bounds, zero velocities, powers not yet evaluated"""
    if n_pop < 2:
        raise ValueError("population must have at least two countries")
    dimension = len(bounds.lower)
    positions = bounds.lower + rng.random((n_pop, dimension)) * bounds.span
    return Population(
        positions=positions,
        velocities=np.zeros((n_pop, dimension)),
        powers=np.zeros(n_pop),
        best_positions=positions.copy(),
        best_powers=np.zeros(n_pop),
    )


def normalized_power(powers: Sequence[float]) -> np.ndarray:
    """Imperialist power relative to the weakest imperialist"""
    p = np.asarray(powers, dtype=float)
    return p - p.min()


def allocate_colonies(normalized: Sequence[float], n_colonies: int) -> np.ndarray:
    """Colony counts from rounded power shares; the residue goes to the strongest empire"""
    weights = np.asarray(normalized, dtype=float)
    n_imp = len(weights)
    total = weights.sum()

    if total <= 0 or not np.isfinite(total):
        counts = np.full(n_imp, n_colonies // n_imp, dtype=int)
        counts[: n_colonies % n_imp] += 1
        return counts

    counts = np.floor(weights / total * n_colonies + 0.5).astype(int)
    strongest = int(np.argmax(weights))
    counts[strongest] += n_colonies - counts.sum()
    # Negative residue larger than the strongest share spills onto the next largest
    while counts[strongest] < 0:
        deficit = -counts[strongest]
        counts[strongest] = 0
        donor = int(np.argmax(counts))
        counts[donor] -= deficit
        strongest = donor
    return counts


def form_empires(powers: Sequence[float], n_imp: int, rng: np.random.Generator) -> EmpireLayout:
    """Strongest countries become imperialists; colonies are dealt out at random"""
    p = np.asarray(powers, dtype=float)
    if not 1 <= n_imp <= len(p):
        raise ValueError(f"Need 1 <= empires <= population, got {n_imp}")

    order = np.argsort(-p, kind="stable")
    imperialists = [int(i) for i in order[:n_imp]]
    colonies = order[n_imp:]

    counts = allocate_colonies(normalized_power(p[imperialists]), len(colonies))
    shuffled = rng.permutation(colonies)
    groups, start = [], 0
    for count in counts:
        groups.append([int(i) for i in shuffled[start:start + count]])
        start += count
    return EmpireLayout(imperialists=imperialists, colonies=groups)


# ------------------------- Operator arithmetic ------------------------- #

def relative_power(a: float, b: float, global_best_power: float) -> float:
    if global_best_power <= 0:
        return 0.0
    return min(max(abs(a - b) / global_best_power, 0.0), 1.0)


def compute_nrp(pairs: Sequence[Tuple[float, float]], global_best_power: float) -> Tuple[float, ...]:
    """Normalized relative powers |a - b| / power(global best), each clamped to [0, 1]"""
    return tuple(relative_power(a, b, global_best_power) for a, b in pairs)


def compute_stagnation(window: Sequence[float]) -> float:
    """1 - (max - min) / max over the recorded global-best powers; empty window counts as stagnant"""
    if len(window) == 0:
        return 1.0
    values = np.asarray(window, dtype=float)
    top = values.max()
    if top <= 0:
        return 1.0
    return float(min(max(1.0 - (top - values.min()) / top, 0.0), 1.0))


def glva_velocity(position: np.ndarray, leader: np.ndarray, own_best: np.ndarray,
                  beta: float, c: float, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    return beta * r1 * (leader - position) + c * r2 * (own_best - position)


def udvd_velocity(velocity: np.ndarray, position: np.ndarray, exemplar: np.ndarray,
                  w: float, r: np.ndarray) -> np.ndarray:
    return w * (velocity + r * (exemplar - position))


def edels_mutant(factors: Sequence[float], p_r1: np.ndarray, p_r2: np.ndarray, p_r3: np.ndarray,
                 leader: np.ndarray, worst: np.ndarray) -> np.ndarray:
    """Difference pair, pull of r3 toward its leader, push of r3 away from the worst member"""
    f_a, f_b, f_c = factors
    return f_a * (p_r1 - p_r2) + f_b * (leader - p_r3) + f_c * (p_r3 - worst)


def binomial_crossover(mutant: np.ndarray, base: np.ndarray, rate: float,
                       rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(len(mutant)) < rate
    mask[rng.integers(len(mutant))] = True
    return np.where(mask, mutant, base)


def velocity_limits(position: np.ndarray, global_best: np.ndarray, t: int, bounds: Bounds,
                    alpha: float = None) -> VelocityLimits:
    if t < 1:
        raise ValueError("iteration counter starts at 1")
    alpha = settings.velocity_alpha if alpha is None else alpha
    upper = np.where(bounds.upper == 0, 1.0, np.abs(bounds.upper))
    vel_max = alpha * (bounds.span / upper) * np.abs(global_best - position) / t
    return VelocityLimits(vel_max=vel_max, vel_min=-vel_max, alpha=alpha)


def apply_velocity_limits(position: np.ndarray, velocity: np.ndarray, global_best: np.ndarray,
                          t: int, bounds: Bounds, alpha: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """Clamp the velocity, move, and reflect any component leaving the bounds.

    Returns (velocity, position).
    """
    limits = velocity_limits(position, global_best, t, bounds, alpha)
    v = np.clip(velocity, limits.vel_min, limits.vel_max)
    p = position + v

    above = p > bounds.upper
    below = p < bounds.lower
    p = np.where(above, bounds.upper, np.where(below, bounds.lower, p))
    v = np.where(above | below, -v, v)
    return v, p


def roulette(candidates: Sequence[int], weights: np.ndarray, rng: np.random.Generator) -> int:
    """Power-proportional choice; uniform when the weights carry no information"""
    w = np.clip(np.asarray([weights[c] for c in candidates], dtype=float), 0.0, None)
    total = w.sum()
    if total <= 0 or not np.isfinite(total):
        return int(candidates[rng.integers(len(candidates))])
    return int(candidates[rng.choice(len(candidates), p=w / total)])


# ------------------------- Optimizer ------------------------- #

class FaglsudOptimizer:
    """Single seeded run over a WallProblem.

    Random draws come from one numpy Generator in a fixed order so that a
    seed fully determines the run.
    """

    def __init__(self, problem: WallProblem, config: ExperimentConfig, seed: int,
                 probabilities: Optional[OperatorProbabilities] = None,
                 adapt_probabilities: bool = True, alpha: float = None):
        if not 1 <= config.empires < config.population:
            raise ValueError("empires must satisfy 1 <= empires < population")
        self.problem = problem
        self.bounds = problem.bounds
        self.n_pop = config.population
        self.n_imp = config.empires
        self.iterations = config.iterations
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.alpha = settings.velocity_alpha if alpha is None else alpha
        self.probabilities = probabilities or OperatorProbabilities(window=settings.selection_window)
        self.adapt_probabilities = adapt_probabilities

        self.population: Optional[Population] = None
        self.layout: Optional[EmpireLayout] = None
        self.best_position: Optional[np.ndarray] = None
        self.best_power = -np.inf
        self.best_evaluation: Optional[Evaluation] = None
        self.t = 0

    # --- bookkeeping ---

    def _evaluate(self, index: int) -> Evaluation:
        pop = self.population
        evaluation = self.problem.evaluate(pop.positions[index])
        pop.powers[index] = evaluation.power
        if evaluation.power > pop.best_powers[index]:
            pop.best_powers[index] = evaluation.power
            pop.best_positions[index] = pop.positions[index].copy()
        if evaluation.power > self.best_power:
            self.best_power = evaluation.power
            self.best_position = pop.positions[index].copy()
            self.best_evaluation = evaluation
        return evaluation

    def _move(self, index: int, velocity: np.ndarray):
        pop = self.population
        v, p = apply_velocity_limits(pop.positions[index], velocity, self.best_position,
                                     self.t, self.bounds, self.alpha)
        pop.velocities[index] = v
        pop.positions[index] = p
        self._evaluate(index)

    def global_best_agent(self) -> int:
        imps = self.layout.imperialists
        return int(imps[int(np.argmax(self.population.powers[imps]))])

    def _colony_side_nrp(self, colony: int, imperialist: int) -> Tuple[float, float]:
        pop = self.population
        return compute_nrp(
            [(pop.powers[imperialist], pop.powers[colony]),
             (pop.best_powers[colony], pop.powers[colony])],
            self.best_power,
        )

    def _imperialist_side_nrp(self, imperialist: int) -> Tuple[float, float]:
        pop = self.population
        return compute_nrp(
            [(self.best_power, pop.powers[imperialist]),
             (pop.best_powers[imperialist], pop.powers[imperialist])],
            self.best_power,
        )

    def _mean_colony_nrp(self, empire: int) -> Tuple[float, float]:
        # An imperialist sees its colonies through their average relative power
        imperialist = self.layout.imperialists[empire]
        members = self.layout.colonies[empire]
        if not members:
            return 0.0, 0.0
        values = np.array([self._colony_side_nrp(c, imperialist) for c in members])
        return tuple(values.mean(axis=0))

    def glva_inputs(self, agent: int, empire: int) -> Tuple[float, float, float, float]:
        imperialist = self.layout.imperialists[empire]
        if agent == imperialist:
            colony_side = self._mean_colony_nrp(empire)
        else:
            colony_side = self._colony_side_nrp(agent, imperialist)
        return (*colony_side, *self._imperialist_side_nrp(imperialist))

    def edels_inputs(self, agent: int, empire: int, worst_colony: Optional[int],
                     worst_imperialist: int) -> Tuple[float, float, float, float]:
        pop = self.population
        imperialist = self.layout.imperialists[empire]
        gb = self.best_power

        def colony_pair(colony):
            worst = pop.powers[worst_colony] if worst_colony is not None else pop.powers[colony]
            return compute_nrp([(pop.powers[imperialist], pop.powers[colony]),
                                (pop.powers[colony], worst)], gb)

        if agent == imperialist:
            members = self.layout.colonies[empire]
            colony_side = tuple(np.mean([colony_pair(c) for c in members], axis=0)) if members else (0.0, 0.0)
        else:
            colony_side = colony_pair(agent)
        imperial_side = compute_nrp([(gb, pop.powers[imperialist]),
                                     (pop.powers[imperialist], pop.powers[worst_imperialist])], gb)
        return (*colony_side, *imperial_side)

    def nit(self) -> float:
        return min(max(self.t / self.iterations, 0.0), 1.0)

    # --- operators ---

    def glva_step(self):
        """Global-learning velocity adaptation toward leaders and personal bests"""
        pop, rng, nit = self.population, self.rng, self.nit()
        rate = self.probabilities.glva
        for k, imperialist in enumerate(self.layout.imperialists):
            for colony in self.layout.colonies[k]:
                if rng.random() >= rate:
                    continue
                beta1, c1, _, _ = adapt_glva(*self.glva_inputs(colony, k), nit)
                r1, r2 = rng.random(pop.dimension), rng.random(pop.dimension)
                velocity = glva_velocity(pop.positions[colony], pop.positions[imperialist],
                                         pop.best_positions[colony], beta1, c1, r1, r2)
                self._move(colony, velocity)

            if rng.random() >= rate:
                continue
            _, _, beta2, c2 = adapt_glva(*self.glva_inputs(imperialist, k), nit)
            r1, r2 = rng.random(pop.dimension), rng.random(pop.dimension)
            velocity = glva_velocity(pop.positions[imperialist], self.best_position,
                                     pop.best_positions[imperialist], beta2, c2, r1, r2)
            self._move(imperialist, velocity)

    def udvd_step(self):
        """Diversity-driven velocity divergence toward roulette-chosen personal bests"""
        pop, rng, nit = self.population, self.rng, self.nit()
        rate = self.probabilities.udvd
        colonies = self.layout.all_colonies()
        imperialists = list(self.layout.imperialists)
        leader = self.global_best_agent()

        for k, imperialist in enumerate(self.layout.imperialists):
            for colony in self.layout.colonies[k]:
                if rng.random() >= rate or len(colonies) < 2:
                    continue
                w1, _, _ = adapt_udvd(*self.glva_inputs(colony, k), nit)
                exemplar = roulette([c for c in colonies if c != colony], pop.best_powers, rng)
                r = rng.random(pop.dimension)
                velocity = udvd_velocity(pop.velocities[colony], pop.positions[colony],
                                         pop.best_positions[exemplar], w1, r)
                self._move(colony, velocity)

        for k, imperialist in enumerate(self.layout.imperialists):
            if rng.random() >= rate or len(imperialists) < 2:
                continue
            _, w2, w3 = adapt_udvd(*self.glva_inputs(imperialist, k), nit)
            weight = w3 if imperialist == leader else w2
            exemplar = roulette([j for j in imperialists if j != imperialist], pop.best_powers, rng)
            r = rng.random(pop.dimension)
            velocity = udvd_velocity(pop.velocities[imperialist], pop.positions[imperialist],
                                     pop.best_positions[exemplar], weight, r)
            self._move(imperialist, velocity)

    def _differential_members(self, pool: List[int], target: int, worst: int) -> Optional[Tuple[int, int]]:
        candidates = [i for i in pool if i != target and i != worst]
        if not candidates:
            return None
        replace = len(candidates) < 2
        r1, r2 = self.rng.choice(candidates, size=2, replace=replace)
        return int(r1), int(r2)

    def _try_trial(self, target: int, mutant: np.ndarray):
        pop = self.population
        rate = self.probabilities.edels
        trial_velocity = binomial_crossover(mutant, pop.velocities[target], rate, self.rng)
        v, p = apply_velocity_limits(pop.positions[target], trial_velocity, self.best_position,
                                     self.t, self.bounds, self.alpha)
        evaluation = self.problem.evaluate(p)
        if evaluation.power > pop.powers[target]:
            pop.positions[target] = p
            pop.velocities[target] = v
            pop.powers[target] = evaluation.power
            if evaluation.power > pop.best_powers[target]:
                pop.best_powers[target] = evaluation.power
                pop.best_positions[target] = p.copy()
            if evaluation.power > self.best_power:
                self.best_power = evaluation.power
                self.best_position = p.copy()
                self.best_evaluation = evaluation

    def edels_step(self):
        """Differential local search inside each empire and among imperialists, with greedy selection"""
        pop, rng, nit = self.population, self.rng, self.nit()
        rate = self.probabilities.edels
        imperialists = list(self.layout.imperialists)
        worst_imperialist = imperialists[int(np.argmin(pop.powers[imperialists]))]

        for k, imperialist in enumerate(self.layout.imperialists):
            members = self.layout.colonies[k]
            if len(members) < 2:
                continue
            worst = members[int(np.argmin(pop.powers[members]))]
            for target in list(members):
                if target == worst or rng.random() >= rate:
                    continue
                picked = self._differential_members(members, target, worst)
                if picked is None:
                    continue
                f = adapt_edels(*self.edels_inputs(target, k, worst, worst_imperialist), nit)
                mutant = edels_mutant(f[:3], pop.positions[picked[0]], pop.positions[picked[1]],
                                      pop.positions[target], pop.positions[imperialist],
                                      pop.positions[worst])
                self._try_trial(target, mutant)

        for k, target in enumerate(self.layout.imperialists):
            if target == worst_imperialist or rng.random() >= rate:
                continue
            picked = self._differential_members(imperialists, target, worst_imperialist)
            if picked is None:
                continue
            members = self.layout.colonies[k]
            worst_colony = members[int(np.argmin(pop.powers[members]))] if members else None
            f = adapt_edels(*self.edels_inputs(target, k, worst_colony, worst_imperialist), nit)
            mutant = edels_mutant(f[3:], pop.positions[picked[0]], pop.positions[picked[1]],
                                  pop.positions[target], self.best_position,
                                  pop.positions[worst_imperialist])
            self._try_trial(target, mutant)

    def swap_roles(self):
        pop = self.population
        for k, imperialist in enumerate(self.layout.imperialists):
            members = self.layout.colonies[k]
            if not members:
                continue
            challenger = members[int(np.argmax(pop.powers[members]))]
            if pop.powers[challenger] > pop.powers[imperialist]:
                self.layout.swap(k, challenger)

    def update_selection(self):
        self.probabilities.record(self.best_power)
        if not self.adapt_probabilities or self.t % self.probabilities.window != 0:
            return
        stagnation = compute_stagnation(self.probabilities.history)
        self.probabilities.update(select_operators(self.nit(), stagnation, self.probabilities.as_tuple()))
        logger.debug(f"t={self.t} stagnation={stagnation:.3f} probabilities={self.probabilities.as_tuple()}")

    # --- main loop ---

    def run(self) -> RunRecord:
        started = time.perf_counter()
        evaluations_before = self.problem.evaluations

        self.population = initialize(self.bounds, self.n_pop, self.rng)
        for i in range(self.n_pop):
            self._evaluate(i)
        self.layout = form_empires(self.population.powers, self.n_imp, self.rng)

        history = np.empty(self.iterations)
        raw_history = np.empty(self.iterations)
        trace = [(0, *self.probabilities.as_tuple())]

        for t in range(1, self.iterations + 1):
            self.t = t
            self.glva_step()
            self.udvd_step()
            self.edels_step()
            self.swap_roles()

            history[t - 1] = self.best_evaluation.penalized
            raw_history[t - 1] = self.best_evaluation.raw

            before = self.probabilities.as_tuple()
            self.update_selection()
            if self.probabilities.as_tuple() != before:
                trace.append((t, *self.probabilities.as_tuple()))

        best = self.best_evaluation
        return RunRecord(
            algorithm="faglsud",
            seed=self.seed,
            history=history,
            raw_history=raw_history,
            design=best.design,
            raw=best.raw,
            feasible=best.feasible,
            constraints=best.constraints,
            wall_time=time.perf_counter() - started,
            evaluations=self.problem.evaluations - evaluations_before,
            probability_trace=trace,
        )


@performance_timer("faglsud.run")
def run(problem: WallProblem, config: ExperimentConfig, seed: int,
        probabilities: Optional[OperatorProbabilities] = None,
        adapt_probabilities: bool = True) -> RunRecord:
    logger.info(f"FAGLSUD run seed={seed} on {problem}")
    record = FaglsudOptimizer(problem, config, seed, probabilities, adapt_probabilities).run()
    logger.info(f"FAGLSUD seed={seed} finished: best={record.raw:.4f} feasible={record.feasible}")
    return record
