# tests/test_faglsud_optimizer.py - Empire formation, operators and full runs

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from wallopt import faglsud_optimizer
from wallopt.config import ExperimentConfig
from wallopt.faglsud_optimizer import (
    EmpireLayout,
    FaglsudOptimizer,
    OperatorProbabilities,
    allocate_colonies,
    apply_velocity_limits,
    binomial_crossover,
    compute_nrp,
    compute_stagnation,
    edels_mutant,
    form_empires,
    glva_velocity,
    initialize,
    normalized_power,
    roulette,
    udvd_velocity,
    velocity_limits,
)
from wallopt.objective import WallProblem


@pytest.fixture
def small_config():
    return ExperimentConfig(runs=1, population=10, empires=3, iterations=6)


@pytest.fixture
def problem(params1, bounds1, static_case):
    return WallProblem(params1, bounds1, static_case, "cost")


class TestInitialization:
    """Initial population"""

    def test_zero_velocities(self, bounds1, rng):
        """Every country starts at rest inside the bounds"""
        pop = initialize(bounds1, 20, rng)
        assert np.all(pop.velocities == 0)
        assert np.all(pop.positions >= bounds1.lower)
        assert np.all(pop.positions <= bounds1.upper)
        np.testing.assert_array_equal(pop.best_positions, pop.positions)

    def test_uniform_spread(self, bounds1, rng):
        """Base width is centred on the middle of its range"""
        pop = initialize(bounds1, 20000, rng)
        assert pop.positions[:, 0].mean() == pytest.approx(2.405, abs=0.02)

    def test_too_small(self, bounds1, rng):
        """A single country is rejected"""
        with pytest.raises(ValueError):
            initialize(bounds1, 1, rng)


class TestEmpires:
    """Imperialists and colony allocation"""

    def test_normalized_power(self):
        """Powers are shifted by the weakest imperialist"""
        np.testing.assert_allclose(normalized_power([3.0, 1.0, 2.0]), [2.0, 0.0, 1.0])

    def test_allocate_proportional(self):
        """Shares 2:1 over three colonies"""
        assert list(allocate_colonies([2.0, 1.0], 3)) == [2, 1]

    def test_allocate_residue_to_strongest(self):
        """Rounding residue goes to the strongest empire"""
        counts = allocate_colonies([1.0, 1.0, 1.0], 10)
        assert counts.sum() == 10
        assert counts[0] == 4

    def test_allocate_uniform_fallback(self):
        """Equal powers give a round-robin split"""
        assert list(allocate_colonies([0.0, 0.0, 0.0], 7)) == [3, 2, 2]

    def test_form_empires(self, rng):
        """50 countries and 20 empires leave 30 colonies"""
        powers = rng.random(50)
        layout = form_empires(powers, 20, rng)
        assert len(layout.imperialists) == 20
        assert layout.n_colonies == 30
        assert set(layout.imperialists) == set(np.argsort(-powers)[:20].tolist())
        members = layout.imperialists + layout.all_colonies()
        assert sorted(members) == list(range(50))

    def test_single_empire(self, rng):
        """One empire owns every colony"""
        layout = form_empires(rng.random(8), 1, rng)
        assert len(layout.colonies[0]) == 7

    def test_invalid_empire_count(self, rng):
        """More empires than countries is rejected"""
        with pytest.raises(ValueError):
            form_empires(rng.random(4), 5, rng)

    def test_swap(self):
        """Roles are exchanged in place"""
        layout = EmpireLayout(imperialists=[0, 1], colonies=[[2, 3], [4]])
        layout.swap(0, 3)
        assert layout.imperialists == [3, 1]
        assert layout.colonies[0] == [2, 0]
        assert layout.empire_of(0) == 0
        with pytest.raises(KeyError):
            layout.empire_of(9)


class TestOperatorArithmetic:
    """Velocity and mutant formulas"""

    def test_glva_velocity(self):
        """beta r1 (leader - x) + c r2 (best - x)"""
        one = np.ones(2)
        v = glva_velocity(np.zeros(2), one, 2 * one, 0.5, 1.0, one, one)
        np.testing.assert_allclose(v, [2.5, 2.5])

    def test_udvd_velocity(self):
        """w (v + r (exemplar - x))"""
        v = udvd_velocity(np.ones(2), np.zeros(2), np.full(2, 4.0), 0.5, np.full(2, 0.5))
        np.testing.assert_allclose(v, [1.5, 1.5])

    def test_edels_mutant(self):
        """Difference, leader pull and worst push"""
        m = edels_mutant((1.0, 1.0, 1.0), np.array([3.0]), np.array([1.0]), np.array([0.0]),
                         np.array([2.0]), np.array([-1.0]))
        np.testing.assert_allclose(m, [5.0])

    def test_crossover_keeps_one_component(self, rng):
        """Zero rate still takes one component from the mutant"""
        trial = binomial_crossover(np.ones(12), np.zeros(12), 0.0, rng)
        assert trial.sum() == 1.0

    def test_crossover_full_rate(self, rng):
        """Rate one takes the whole mutant"""
        np.testing.assert_array_equal(binomial_crossover(np.ones(12), np.zeros(12), 1.0, rng), np.ones(12))

    def test_nrp(self):
        """|a - b| / global best, clamped"""
        assert compute_nrp([(0.5, 0.1)], 1.0) == pytest.approx((0.4,))
        assert compute_nrp([(5.0, 0.0)], 1.0) == (1.0,)
        assert compute_nrp([(0.5, 0.1)], 0.0) == (0.0,)

    @pytest.mark.parametrize("window, expected", [
        ([], 1.0),
        ([2.0, 2.0, 2.0], 1.0),
        ([1.0, 2.0], 0.5),
        ([0.0, 0.0], 1.0),
    ])
    def test_stagnation(self, window, expected):
        """1 - spread / max over the window"""
        assert compute_stagnation(window) == pytest.approx(expected)

    def test_roulette(self, rng):
        """Only positive weights are chosen"""
        weights = np.array([0.0, 0.0, 3.0, 0.0])
        assert all(roulette([0, 1, 2, 3], weights, rng) == 2 for _ in range(20))

    def test_roulette_uniform(self, rng):
        """All-zero weights still pick a candidate"""
        assert roulette([5, 6], np.zeros(7), rng) in (5, 6)


class TestVelocityLimits:
    """Adaptive velocity limits and boundary reflection"""

    def test_zero_at_global_best(self, bounds1):
        """An agent at the global best cannot move"""
        x = (bounds1.lower + bounds1.upper) / 2
        v, p = apply_velocity_limits(x, np.ones(12), x.copy(), 1, bounds1)
        np.testing.assert_array_equal(v, np.zeros(12))
        np.testing.assert_array_equal(p, x)

    def test_decays_with_iterations(self, bounds1):
        """Limits shrink as 1/t"""
        x, gb = bounds1.lower.copy(), bounds1.upper.copy()
        first = velocity_limits(x, gb, 1, bounds1, 10.0)
        fifth = velocity_limits(x, gb, 5, bounds1, 10.0)
        np.testing.assert_allclose(fifth.vel_max * 5, first.vel_max)
        np.testing.assert_allclose(first.vel_min, -first.vel_max)

    def test_reflection(self, bounds1):
        """Leaving the box clamps the position and reverses the velocity"""
        x = bounds1.upper - 1e-3
        gb = bounds1.lower.copy()
        v, p = apply_velocity_limits(x, np.full(12, 1e3), gb, 1, bounds1, 10.0)
        np.testing.assert_allclose(p, bounds1.upper)
        assert np.all(v < 0)

    def test_iteration_counter(self, bounds1):
        """t starts at 1"""
        with pytest.raises(ValueError):
            velocity_limits(bounds1.lower, bounds1.upper, 0, bounds1)


class TestOperatorProbabilities:
    """Operator selection probabilities"""

    def test_defaults(self):
        """All operators start at one half"""
        assert OperatorProbabilities().as_tuple() == (0.5, 0.5, 0.5)

    def test_out_of_range(self):
        """Probabilities outside [0, 1] are rejected"""
        with pytest.raises(ValueError):
            OperatorProbabilities(glva=1.2)

    def test_window(self):
        """Only the last window values are kept"""
        probabilities = OperatorProbabilities(window=3)
        for value in range(5):
            probabilities.record(value)
        assert list(probabilities.history) == [2.0, 3.0, 4.0]

    def test_update_clamps(self):
        """Updates are clamped to [0, 1]"""
        probabilities = OperatorProbabilities()
        probabilities.update((1.5, -0.1, 0.3))
        assert probabilities.as_tuple() == (1.0, 0.0, 0.3)


class TestRun:
    """Complete seeded runs"""

    def test_deterministic(self, problem, small_config):
        """Same seed, same trajectory"""
        a = FaglsudOptimizer(problem, small_config, 7).run()
        b = FaglsudOptimizer(problem, small_config, 7).run()
        np.testing.assert_array_equal(a.history, b.history)
        assert a.design == b.design
        assert a.probability_trace == b.probability_trace

    def test_history_monotone(self, problem, small_config):
        """Best penalized fitness never worsens"""
        record = FaglsudOptimizer(problem, small_config, 3).run()
        assert len(record.history) == small_config.iterations
        assert np.all(np.diff(record.history) <= 0)

    def test_design_within_bounds(self, problem, small_config, bounds1):
        """Returned design lies inside the box"""
        record = FaglsudOptimizer(problem, small_config, 11).run()
        assert record.design.within(bounds1)
        assert record.raw > 0
        assert record.evaluations >= small_config.population

    def test_trace_starts_at_half(self, problem, small_config):
        """Trace begins with the initial probabilities"""
        record = FaglsudOptimizer(problem, small_config, 5).run()
        assert record.probability_trace[0] == (0, 0.5, 0.5, 0.5)
        assert record.algorithm == "faglsud"

    def test_zero_probabilities_freeze_population(self, problem, small_config):
        """With every operator off nothing moves after initialization"""
        frozen = OperatorProbabilities(glva=0.0, udvd=0.0, edels=0.0)
        optimizer = FaglsudOptimizer(problem, small_config, 9, frozen, adapt_probabilities=False)
        record = optimizer.run()
        assert record.evaluations == small_config.population
        assert np.all(record.history == record.history[0])
        assert record.probability_trace == [(0, 0.0, 0.0, 0.0)]

    def test_probabilities_adapt(self, problem):
        """Probabilities are revised at the end of each window"""
        config = ExperimentConfig(runs=1, population=8, empires=2, iterations=20)
        record = FaglsudOptimizer(problem, config, 13).run()
        assert all(t % 10 == 0 for t, *_ in record.probability_trace)
        for _, *values in record.probability_trace:
            assert all(0.0 <= v <= 1.0 for v in values)

    def test_module_run(self, problem, small_config):
        """Module-level run wraps the optimizer"""
        record = faglsud_optimizer.run(problem, small_config, 21)
        assert record.seed == 21
        assert record.wall_time >= 0

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_population_stays_in_bounds(self, problem, small_config, bounds1, seed):
        """Every country ends inside the box"""
        optimizer = FaglsudOptimizer(problem, small_config, seed)
        record = optimizer.run()
        positions = optimizer.population.positions
        assert np.all(positions >= bounds1.lower - 1e-12)
        assert np.all(positions <= bounds1.upper + 1e-12)
        assert np.all(np.diff(record.history) <= 0)
