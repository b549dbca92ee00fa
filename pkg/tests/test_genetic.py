"""Tests for the genetic weighting of rule features."""

import numpy as np
import pytest

import config
from core.errors import (
    BadPopulationSizeError,
    DimensionMismatchError,
    InvalidParameterError,
    LengthMismatchError,
    MissingArtifactsError,
)
from core.data.data_ingest import synthesize
from core.metrics.performance_metrics import log_returns, ssr, strategy_returns
from core.optimize.genetic import (
    Chromosome,
    FitnessContext,
    GAConfig,
    fitness_mr,
    fitness_mssr,
    ga_evolve,
    ga_step,
    initial_population,
    load_chromosome,
    positions_from_weights,
    save_chromosome,
)
from core.rules.rule_catalog import SignalMatrix
from utils.constants import FitnessKind

RULE_IDS = tuple(config.RULE_CATALOG)
ORACLE_COLUMN = 7


def random_matrix(rows, seed=0):
    rng = np.random.default_rng(seed)
    return SignalMatrix(rng.integers(-1, 2, size=(rows, config.CATALOG_SIZE)), RULE_IDS)


def one_hot(index):
    weights = np.zeros(config.CATALOG_SIZE)
    weights[index] = 1.0
    return Chromosome(weights)


def planted_matrix(returns):
    """Fifteen silent columns and one column that knows the next return's sign"""
    values = np.zeros((len(returns), config.CATALOG_SIZE), dtype=np.int8)
    values[:-1, ORACLE_COLUMN] = np.sign(returns.values[1:])
    return SignalMatrix(values, RULE_IDS)


@pytest.fixture(scope="module")
def long_returns():
    """Log returns of a 5000-bar synthetic series"""
    return log_returns(synthesize(seed=5, n=5000, regime="random-walk"))


class TestPositions:
    """Weighted, normalized positions."""

    def test_one_hot_selects_column(self):
        signals = random_matrix(50)
        v = positions_from_weights(one_hot(3), signals)
        np.testing.assert_array_equal(v.values, signals.values[:, 3])
        assert v.scale == 1.0

    def test_zero_weights_hold_cash(self):
        v = positions_from_weights(Chromosome(np.zeros(config.CATALOG_SIZE)), random_matrix(20))
        np.testing.assert_array_equal(v.values, 0.0)
        assert v.scale == 0.0

    def test_positive_rescaling_is_invisible(self):
        signals = random_matrix(80, seed=1)
        w = np.random.default_rng(2).uniform(-1, 1, config.CATALOG_SIZE)
        a = positions_from_weights(Chromosome(w), signals)
        b = positions_from_weights(Chromosome(3.5 * w), signals)
        np.testing.assert_allclose(a.values, b.values)

    def test_max_position_is_one(self):
        signals = random_matrix(80, seed=3)
        w = np.random.default_rng(4).uniform(-1, 1, config.CATALOG_SIZE)
        v = positions_from_weights(Chromosome(w), signals)
        assert np.abs(v.values).max() == pytest.approx(1.0)

    def test_reused_scale_is_clipped(self):
        signals = random_matrix(30, seed=5)
        v = positions_from_weights(one_hot(0), signals, scale=0.5)
        assert set(np.unique(v.values)) <= {-1.0, 0.0, 1.0}
        assert v.scale == 0.5

    def test_wrong_weight_count(self):
        with pytest.raises(DimensionMismatchError):
            positions_from_weights(Chromosome(np.ones(15)), random_matrix(10))


class TestFitness:
    """MR and MSSR fitness."""

    def test_fitness_delegates_to_returns(self, walk_candles):
        r = log_returns(walk_candles)
        signals = random_matrix(len(r), seed=6)
        v = positions_from_weights(one_hot(2), signals)
        assert fitness_mr(v, r) == strategy_returns(v, r).total
        assert fitness_mssr(v, r) == ssr(strategy_returns(v, r))

    def test_context_caches_by_weights(self, walk_candles):
        r = log_returns(walk_candles)
        ctx = FitnessContext(random_matrix(len(r)), r, FitnessKind.MR)
        first = ctx.evaluate(one_hot(1))
        assert ctx.evaluate(one_hot(1)) == first
        assert len(ctx._cache) == 1

    def test_context_length_mismatch(self, walk_candles):
        r = log_returns(walk_candles)
        with pytest.raises(LengthMismatchError):
            FitnessContext(random_matrix(len(r) - 1), r, FitnessKind.MSSR)


class TestGAConfig:
    """Hyperparameter validation."""

    @pytest.mark.parametrize("population, parents", [(1, 1), (10, 0), (10, 11)])
    def test_bad_population(self, population, parents):
        with pytest.raises(BadPopulationSizeError):
            GAConfig(population_size=population, parents_mating=parents)

    @pytest.mark.parametrize("field, value", [("generations", -1), ("mutation_prob", 1.5),
                                              ("crossover_prob", -0.1), ("mutation_step", -1.0)])
    def test_bad_parameters(self, field, value):
        with pytest.raises(InvalidParameterError):
            GAConfig(**{field: value})

    def test_fitness_from_string(self):
        assert GAConfig(fitness="MR").fitness is FitnessKind.MR


class TestGaStep:
    """One generation."""

    @pytest.fixture
    def ctx(self, walk_candles):
        r = log_returns(walk_candles)
        return FitnessContext(random_matrix(len(r), seed=9), r, FitnessKind.MSSR)

    def test_without_operators_children_copy_parents(self, ctx):
        cfg = GAConfig(population_size=10, parents_mating=4, mutation_prob=0.0, crossover_prob=0.0)
        rng = np.random.default_rng(0)
        population = initial_population(cfg, config.CATALOG_SIZE, rng)
        order = np.argsort(-ctx.evaluate_all(population), kind="stable")
        parent_keys = {population[i].key() for i in order[:4]}

        offspring = ga_step(population, cfg, ctx, rng)

        assert len(offspring) == 10
        assert offspring[0] is population[order[0]]
        assert {c.key() for c in offspring} <= parent_keys

    def test_elite_fitness_never_drops(self, ctx):
        cfg = GAConfig(population_size=10, parents_mating=4, mutation_prob=1.0, crossover_prob=1.0)
        rng = np.random.default_rng(1)
        population = initial_population(cfg, config.CATALOG_SIZE, rng)
        best = ctx.evaluate_all(population).max()
        for _ in range(5):
            population = ga_step(population, cfg, ctx, rng)
            assert ctx.evaluate_all(population).max() >= best
            best = ctx.evaluate_all(population).max()

    def test_same_rng_state_same_offspring(self, ctx):
        cfg = GAConfig(population_size=6, parents_mating=3)
        population = initial_population(cfg, config.CATALOG_SIZE, np.random.default_rng(2))
        a = ga_step(population, cfg, ctx, np.random.default_rng(3))
        b = ga_step(population, cfg, ctx, np.random.default_rng(3))
        assert [c.key() for c in a] == [c.key() for c in b]

    def test_population_size_is_checked(self, ctx):
        cfg = GAConfig(population_size=6, parents_mating=3)
        population = initial_population(GAConfig(population_size=5, parents_mating=3),
                                        config.CATALOG_SIZE, np.random.default_rng(0))
        with pytest.raises(BadPopulationSizeError):
            ga_step(population, cfg, ctx, np.random.default_rng(0))


class TestGaEvolve:
    """Full evolution."""

    def test_zero_generations_returns_initial_best(self, walk_candles):
        r = log_returns(walk_candles)
        signals = random_matrix(len(r), seed=10)
        cfg = GAConfig(generations=0, seed=4)
        best, trace = ga_evolve(signals, r, cfg)

        population = initial_population(cfg, config.CATALOG_SIZE, np.random.default_rng(4))
        fitness = FitnessContext(signals, r, cfg.fitness).evaluate_all(population)
        assert len(trace) == 1
        assert best.key() == population[int(np.argmax(fitness))].key()
        assert best.scale == positions_from_weights(best, signals).scale

    def test_same_seed_same_result(self, walk_candles):
        r = log_returns(walk_candles)
        signals = random_matrix(len(r), seed=11)
        cfg = GAConfig(generations=15, seed=42)
        first, trace_a = ga_evolve(signals, r, cfg)
        second, trace_b = ga_evolve(signals, r, cfg)
        assert first.key() == second.key()
        assert trace_a.best == trace_b.best

    def test_trace_is_non_decreasing(self, walk_candles):
        r = log_returns(walk_candles)
        generations = []
        _, trace = ga_evolve(random_matrix(len(r), seed=12), r,
                             GAConfig(generations=25, seed=7, fitness=FitnessKind.MR),
                             progress_cb=lambda g, total: generations.append(g))
        assert len(trace) == 26
        assert trace.is_non_decreasing()
        assert generations[-1] == 25

    @pytest.mark.parametrize("fitness", [FitnessKind.MR, FitnessKind.MSSR])
    @pytest.mark.parametrize("seed", range(5))
    def test_finds_planted_column(self, long_returns, fitness, seed):
        signals = planted_matrix(long_returns)
        ctx = FitnessContext(signals, long_returns, fitness)
        target = ctx.evaluate(one_hot(ORACLE_COLUMN))

        best, trace = ga_evolve(signals, long_returns, GAConfig(seed=seed, fitness=fitness))

        assert len(trace) == config.GA_GENERATIONS + 1
        assert trace.is_non_decreasing()
        assert target > 0
        assert ctx.evaluate(best) >= 0.95 * target
        assert best.weights[ORACLE_COLUMN] > 0


class TestPersistence:
    """Chromosome files."""

    def test_save_and_load(self, tmp_path):
        chromosome = Chromosome(np.linspace(-1, 1, config.CATALOG_SIZE), scale=2.5)
        path = save_chromosome(chromosome, FitnessKind.MSSR, RULE_IDS, tmp_path / "c.json")
        loaded, rule_ids = load_chromosome(path)
        np.testing.assert_array_equal(loaded.weights, chromosome.weights)
        assert loaded.scale == 2.5
        assert rule_ids == list(RULE_IDS)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingArtifactsError):
            load_chromosome(tmp_path / "absent.json")

    def test_weights_must_be_finite(self):
        with pytest.raises(InvalidParameterError):
            Chromosome([0.1, np.nan])
