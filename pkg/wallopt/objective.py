# wallopt/objective.py - Cost/weight/CO2 objectives, penalty and fitness

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np

from wallopt.config import settings
from wallopt.earth_pressure import PressureState, earth_forces
from wallopt.errors import InfeasiblePressureError
from wallopt.limit_states import (
    ConstraintVector,
    SectionCheck,
    StabilityReport,
    assemble_constraints,
    check_sections,
    factors_of_safety,
)
from wallopt.wall_model import Bounds, DesignParameters, DesignVector, SeismicCase

logger = logging.getLogger(__name__)

STEEL_DENSITY = 7850.0  # kg/m^3


class ObjectiveKind(str, Enum):
    COST = "cost"
    WEIGHT = "weight"
    CO2 = "co2"


@dataclass(frozen=True)
class ObjectiveBreakdown:
    steel_weight: float  # kg/m
    concrete_volume: float  # m^3/m
    value: float
    kind: ObjectiveKind


@dataclass(frozen=True)
class PenalizedFitness:
    penalized: float
    power: float
    penalty_factor: float


def concrete_volume(design: DesignVector, params: DesignParameters) -> float:
    """Stem trapezoid + base slab + shear key, per metre of wall"""
    X1, X2, X3, X4, X5, X6, X7, X8 = design.x
    return 0.5 * (X3 + X4) * params.H + X1 * X5 + X7 * X8


def bar_lengths(design: DesignVector, params: DesignParameters) -> Dict[str, float]:
    """Main bar lengths (m); each bar runs through the member it anchors into"""
    cover2 = 2.0 * params.cover
    X5 = design.base_thickness
    return {
        "stem": max(params.H + X5 - cover2, 0.0),
        "toe": max(design.toe_width + design.stem_bottom - cover2, 0.0),
        "heel": max(design.heel_width + design.stem_bottom - cover2, 0.0),
        "key": max(design.key_height + X5 - cover2, 0.0),
    }


def steel_weight(design: DesignVector, params: DesignParameters, volume: Optional[float] = None) -> float:
    """Main bars plus shrinkage/temperature steel, kg per metre of wall"""
    lengths = bar_lengths(design, params)
    main = sum(bar.area_m2 * lengths[name]
               for name, bar in zip(("stem", "toe", "heel", "key"), design.rebar()))
    if volume is None:
        volume = concrete_volume(design, params)
    shrinkage = params.rho_st * volume
    return STEEL_DENSITY * (main + shrinkage)


def evaluate_objective(design: DesignVector, params: DesignParameters, kind) -> ObjectiveBreakdown:
    kind = ObjectiveKind(kind)
    V_c = concrete_volume(design, params)
    W_s = steel_weight(design, params, V_c)

    if kind is ObjectiveKind.COST:
        value = params.steel_cost * W_s + params.concrete_cost * V_c
    elif kind is ObjectiveKind.WEIGHT:
        value = W_s + 100.0 * params.gamma_c * V_c
    else:
        value = params.steel_emission * W_s + params.concrete_emission * V_c

    return ObjectiveBreakdown(steel_weight=W_s, concrete_volume=V_c, value=value, kind=kind)


def all_objectives(design: DesignVector, params: DesignParameters) -> Dict[str, float]:
    return {kind.value: evaluate_objective(design, params, kind).value for kind in ObjectiveKind}


def penalize(raw: float, g: ConstraintVector, penalty_factor: float = None) -> PenalizedFitness:
    """raw + lambda * sum of squared violations; power is its reciprocal"""
    if raw <= 0:
        raise ValueError(f"Objective value must be positive, got {raw}")
    lam = settings.penalty_factor if penalty_factor is None else penalty_factor
    violations = np.clip(g.as_array(), 0.0, None)
    penalized = raw + lam * float(np.sum(violations ** 2))
    return PenalizedFitness(penalized=penalized, power=1.0 / penalized, penalty_factor=lam)


@dataclass(frozen=True)
class Evaluation:
    design: DesignVector
    breakdown: ObjectiveBreakdown
    constraints: ConstraintVector
    fitness: PenalizedFitness
    pressure: Optional[PressureState] = None
    stability: Optional[StabilityReport] = None
    sections: Optional[Dict[str, SectionCheck]] = None

    @property
    def raw(self) -> float:
        return self.breakdown.value

    @property
    def penalized(self) -> float:
        return self.fitness.penalized

    @property
    def power(self) -> float:
        return self.fitness.power

    @property
    def feasible(self) -> bool:
        return self.constraints.feasible


def evaluate_design(design: DesignVector, params: DesignParameters, case: SeismicCase,
                    kind="cost", penalty_factor: float = None) -> Evaluation:
    """Single evaluation path shared by every optimizer and the design checker"""
    breakdown = evaluate_objective(design, params, kind)
    try:
        pressure = earth_forces(design, params, case)
    except InfeasiblePressureError as e:
        logger.debug(f"Pressure infeasible for {design}: {e.detail}")
        constraints = ConstraintVector.all_violated()
        return Evaluation(design, breakdown, constraints, penalize(breakdown.value, constraints, penalty_factor))

    stability = factors_of_safety(pressure, design, params)
    sections = check_sections(pressure, stability, design, params)
    constraints = assemble_constraints(stability, sections, design, params)
    fitness = penalize(breakdown.value, constraints, penalty_factor)
    return Evaluation(design, breakdown, constraints, fitness, pressure, stability, sections)


class WallProblem:
    """One example/case/objective combination as seen by a search algorithm"""

    def __init__(self, params: DesignParameters, bounds: Bounds, case: SeismicCase,
                 kind="cost", penalty_factor: float = None):
        self.params = params
        self.bounds = bounds
        self.case = case
        self.kind = ObjectiveKind(kind)
        self.penalty_factor = settings.penalty_factor if penalty_factor is None else penalty_factor
        self.evaluations = 0

    @property
    def dimension(self) -> int:
        return len(self.bounds.lower)

    def decode(self, position: Sequence[float]) -> DesignVector:
        return DesignVector.from_position(position, self.bounds)

    def evaluate(self, position: Sequence[float]) -> Evaluation:
        self.evaluations += 1
        return evaluate_design(self.decode(position), self.params, self.case, self.kind, self.penalty_factor)

    def power(self, position: Sequence[float]) -> float:
        return self.evaluate(position).power

    def __repr__(self) -> str:
        return (f"WallProblem(kind={self.kind.value}, k_h={self.case.k_h}, "
                f"k_v={self.case.k_v}, H={self.params.H})")
