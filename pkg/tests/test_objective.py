# tests/test_objective.py - Objectives, penalty and the shared evaluation path

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from wallopt.limit_states import ConstraintVector, N_CONSTRAINTS
from wallopt.objective import (
    STEEL_DENSITY,
    ObjectiveKind,
    WallProblem,
    all_objectives,
    bar_lengths,
    concrete_volume,
    evaluate_design,
    evaluate_objective,
    penalize,
    steel_weight,
)
from wallopt.wall_model import example_bounds, example_parameters, seismic_case


def constraints_with(value, index=1):
    g = [-0.5] * N_CONSTRAINTS
    g[index - 1] = value
    return ConstraintVector(tuple(g))


class TestQuantities:
    """Concrete volume and steel weight"""

    def test_concrete_volume(self, params1, printed_design1):
        """Stem trapezoid, base slab and key"""
        expected = 0.5 * (0.20 + 0.20) * 3.0 + 1.51 * 0.27 + 0.20 * 0.20
        assert concrete_volume(printed_design1, params1) == pytest.approx(expected)

    def test_bar_lengths(self, params1, printed_design1):
        """Bars run through their member minus both covers"""
        lengths = bar_lengths(printed_design1, params1)
        assert lengths["stem"] == pytest.approx(3.0 + 0.27 - 0.14)
        assert lengths["toe"] == pytest.approx(0.78 + 0.20 - 0.14)
        assert lengths["key"] == pytest.approx(0.20 + 0.27 - 0.14)

    def test_steel_weight(self, params1, printed_design1):
        """Main bars plus shrinkage steel"""
        lengths = bar_lengths(printed_design1, params1)
        main = sum(bar.area_m2 * lengths[name]
                   for name, bar in zip(("stem", "toe", "heel", "key"), printed_design1.rebar()))
        volume = concrete_volume(printed_design1, params1)
        expected = STEEL_DENSITY * (main + params1.rho_st * volume)
        assert steel_weight(printed_design1, params1) == pytest.approx(expected)


class TestObjectives:
    """Cost, weight and CO2"""

    def test_hand_arithmetic(self):
        """W_s = 100 kg and V_c = 1 m3 under example 1 prices"""
        W_s, V_c = 100.0, 1.0
        assert 0.4 * W_s + 40.0 * V_c == pytest.approx(80.0)
        assert W_s + 100.0 * 23.5 * V_c == pytest.approx(2450.0)
        assert 2.82 * W_s + 224.94 * V_c == pytest.approx(506.94)

    @pytest.mark.parametrize("kind", ["cost", "weight", "co2"])
    def test_formulas(self, params1, printed_design1, kind):
        """Each objective combines the same steel weight and volume"""
        b = evaluate_objective(printed_design1, params1, kind)
        expected = {
            "cost": params1.steel_cost * b.steel_weight + params1.concrete_cost * b.concrete_volume,
            "weight": b.steel_weight + 100.0 * params1.gamma_c * b.concrete_volume,
            "co2": params1.steel_emission * b.steel_weight + params1.concrete_emission * b.concrete_volume,
        }[kind]
        assert b.value == pytest.approx(expected)
        assert b.kind is ObjectiveKind(kind)

    def test_all_objectives(self, params1, printed_design1):
        """All three objectives are reported"""
        values = all_objectives(printed_design1, params1)
        assert set(values) == {"cost", "weight", "co2"}
        assert all(v > 0 for v in values.values())

    def test_unknown_kind(self, params1, printed_design1):
        """Unknown objective names raise ValueError"""
        with pytest.raises(ValueError):
            evaluate_objective(printed_design1, params1, "volume")

    def test_printed_design_cost(self, params1, printed_design1):
        """Example 1 printed optimum costs about 62.3 per metre"""
        assert evaluate_objective(printed_design1, params1, "cost").value == pytest.approx(62.33, rel=0.03)

    def test_printed_design_cost_example2(self, params2, printed_design2):
        """Example 2 case 9 printed optimum"""
        assert evaluate_objective(printed_design2, params2, "cost").value == pytest.approx(377.77, rel=0.05)


class TestPenalty:
    """Static penalty and power"""

    def test_feasible_unpenalized(self):
        """No violation leaves the objective unchanged"""
        fitness = penalize(100.0, constraints_with(-0.1), 1e15)
        assert fitness.penalized == 100.0
        assert fitness.power == pytest.approx(0.01)

    def test_single_violation(self):
        """g = 0.1 adds lambda * 0.01"""
        fitness = penalize(100.0, constraints_with(0.1), 1e15)
        assert fitness.penalized == pytest.approx(100.0 + 1e13)

    def test_squared_sum(self):
        """Violations add in squares"""
        g = [-1.0] * N_CONSTRAINTS
        g[0], g[5] = 0.2, 0.3
        fitness = penalize(10.0, ConstraintVector(tuple(g)), 100.0)
        assert fitness.penalized == pytest.approx(10.0 + 100.0 * (0.04 + 0.09))

    def test_default_factor(self):
        """Default lambda comes from settings"""
        assert penalize(1.0, constraints_with(0.0)).penalty_factor == 1e15

    def test_non_positive_objective(self):
        """Objective values must be positive"""
        with pytest.raises(ValueError):
            penalize(0.0, constraints_with(0.0))

    def test_infeasible_always_worse(self, params1, bounds1, rng):
        """Any violation pushes the penalized value above the raw one"""
        for _ in range(100):
            position = bounds1.lower + rng.random(12) * bounds1.span
            evaluation = evaluate_design(WallProblem(params1, bounds1, seismic_case(1)).decode(position),
                                         params1, seismic_case(1))
            if evaluation.feasible:
                assert evaluation.penalized == evaluation.raw
            else:
                assert evaluation.penalized > evaluation.raw
            assert evaluation.power == pytest.approx(1.0 / evaluation.penalized)


class TestEvaluation:
    """Shared evaluation path"""

    def test_full_evaluation(self, params1, printed_design1, static_case):
        """Evaluation carries every intermediate result"""
        evaluation = evaluate_design(printed_design1, params1, static_case)
        assert evaluation.pressure is not None
        assert evaluation.stability is not None
        assert set(evaluation.sections) == {"stem", "toe", "heel", "key"}
        assert len(evaluation.constraints.g) == N_CONSTRAINTS

    def test_no_active_wedge(self, printed_design1):
        """Missing wedge marks every constraint violated"""
        params = example_parameters(1, {"phi": 20.0, "i": 15.0})
        evaluation = evaluate_design(printed_design1, params, seismic_case(3))
        assert evaluation.pressure is None
        assert evaluation.constraints.violated() == list(range(1, 27))
        assert evaluation.penalized == pytest.approx(evaluation.raw + 26 * 1e15)

    def test_problem_counts_evaluations(self, params1, bounds1, static_case):
        """Every evaluate call is counted"""
        problem = WallProblem(params1, bounds1, static_case, "weight")
        for _ in range(3):
            problem.evaluate(bounds1.lower)
        assert problem.evaluations == 3
        assert problem.dimension == 12
        assert problem.kind is ObjectiveKind.WEIGHT

    def test_problem_clamps(self, params1, static_case):
        """Out-of-bounds positions are clamped before decoding"""
        bounds = example_bounds(1)
        problem = WallProblem(params1, bounds, static_case)
        design = problem.decode(bounds.upper + 10.0)
        np.testing.assert_allclose(design.to_array(), bounds.upper)

    def test_power_matches_evaluation(self, params1, bounds1, static_case):
        """power() is the reciprocal of the penalized value"""
        problem = WallProblem(params1, bounds1, static_case)
        midpoint = (bounds1.lower + bounds1.upper) / 2.0
        assert problem.power(midpoint) == pytest.approx(1.0 / problem.evaluate(midpoint).penalized)

    def test_penalty_dominance(self, params1, bounds1, static_case, rng):
        """Any design violating by at least 1e-4 is weaker than every feasible one"""
        problem = WallProblem(params1, bounds1, static_case)
        feasible, infeasible = [], []
        for _ in range(2000):
            evaluation = problem.evaluate(bounds1.lower + rng.random(12) * bounds1.span)
            if evaluation.feasible:
                feasible.append(evaluation.power)
            elif evaluation.constraints.max_violation >= 1e-4:
                infeasible.append(evaluation.power)
        if feasible and infeasible:
            assert max(infeasible) < min(feasible)
