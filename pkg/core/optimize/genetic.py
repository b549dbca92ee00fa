"""
Genetic Weighting of Rule Features
Evolves a weight vector over the feature matrix. The weighted signal sum,
normalized to a maximum absolute value of 1, is the position series; fitness is
either its total log return (MR) or its SSR (MSSR).

Operators: rank-weighted selection among the top ``parents_mating``, uniform
crossover, Gaussian per-gene mutation, and one elite carried over unchanged.
All randomness comes from one seeded numpy Generator advanced in a fixed order.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

import config
from core.errors import (
    BadPopulationSizeError,
    DimensionMismatchError,
    InvalidParameterError,
    LengthMismatchError,
    MissingArtifactsError,
    SeriesTooShortError,
)
from core.metrics.performance_metrics import PositionSeries, ReturnSeries, ssr, strategy_returns
from core.rules.rule_catalog import SignalMatrix
from utils.constants import ERROR_MISSING_ARTIFACTS, FitnessKind
from utils.logger import get_logger


logger = get_logger(__name__)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class Chromosome:
    """
    Weight vector over the rule features.

    ``scale`` is the training-time normalization divisor, set once the
    chromosome has been fitted.
    """
    weights: np.ndarray
    scale: Optional[float] = None

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 1 or not np.isfinite(weights).all():
            raise InvalidParameterError("chromosome weights must be a finite vector")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def key(self) -> bytes:
        return self.weights.tobytes()

    def to_dict(self) -> Dict:
        return {"weights": [float(w) for w in self.weights], "scale": self.scale}

    @classmethod
    def from_dict(cls, data: Dict) -> "Chromosome":
        return cls(weights=data["weights"], scale=data.get("scale"))


@dataclass(frozen=True)
class GAConfig:
    """Genetic algorithm hyperparameters"""
    population_size: int = config.GA_POPULATION_SIZE
    parents_mating: int = config.GA_PARENTS_MATING
    generations: int = config.GA_GENERATIONS
    mutation_prob: float = config.GA_MUTATION_PROB
    crossover_prob: float = config.GA_CROSSOVER_PROB
    seed: Optional[int] = None
    fitness: FitnessKind = FitnessKind.MSSR
    mutation_step: float = config.GA_MUTATION_STEP

    def __post_init__(self):
        object.__setattr__(self, "fitness", FitnessKind(self.fitness))
        if self.population_size < 2:
            raise BadPopulationSizeError(
                f"population_size must be >= 2, got {self.population_size}"
            )
        if not 1 <= self.parents_mating <= self.population_size:
            raise BadPopulationSizeError(
                f"parents_mating must lie in [1, {self.population_size}], got {self.parents_mating}"
            )
        if self.generations < 0:
            raise InvalidParameterError(f"generations must be >= 0, got {self.generations}")
        for name in ("mutation_prob", "crossover_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {value}")
        if self.mutation_step < 0:
            raise InvalidParameterError(f"mutation_step must be >= 0, got {self.mutation_step}")


@dataclass
class FitnessTrace:
    """Per-generation best and mean fitness with the best weights"""
    best: List[float] = field(default_factory=list)
    mean: List[float] = field(default_factory=list)
    best_weights: List[np.ndarray] = field(default_factory=list)

    def record(self, fitness: np.ndarray, population: List[Chromosome]):
        top = int(np.argmax(fitness))
        self.best.append(float(fitness[top]))
        self.mean.append(float(np.mean(fitness)))
        self.best_weights.append(population[top].weights)

    def __len__(self) -> int:
        return len(self.best)

    def is_non_decreasing(self) -> bool:
        return all(b >= a for a, b in zip(self.best, self.best[1:]))

    def rows(self) -> List[List]:
        return [
            [generation, best, mean, " ".join(f"{w:.12g}" for w in weights)]
            for generation, (best, mean, weights)
            in enumerate(zip(self.best, self.mean, self.best_weights))
        ]


# ============================================================================
# POSITIONS AND FITNESS
# ============================================================================

def positions_from_weights(w: Chromosome, signals: SignalMatrix,
                           scale: Optional[float] = None) -> PositionSeries:
    """
    Weighted signal sum normalized to max |v| = 1.

    Args:
        w: Weights, one per column
        signals: Feature matrix
        scale: Divisor to reuse (out-of-sample); results are clipped to [-1, 1].
            When None the in-sample max |raw| is used.

    Returns:
        PositionSeries whose ``scale`` is the divisor applied (0.0 when the
        weighted sum is identically zero)
    """
    weights = w.weights if isinstance(w, Chromosome) else np.asarray(w, dtype=np.float64)
    if len(weights) != signals.width:
        raise DimensionMismatchError(
            f"{len(weights)} weights for {signals.width} feature columns"
        )
    raw = signals.values.astype(np.float64) @ weights

    if scale is None:
        scale = float(np.abs(raw).max()) if raw.size else 0.0
    if scale <= 0:
        return PositionSeries(np.zeros(len(raw)), scale=0.0)
    return PositionSeries(np.clip(raw / scale, -1.0, 1.0), scale=scale)


def fitness_mr(v: PositionSeries, r: ReturnSeries) -> float:
    """Total strategy log return"""
    return strategy_returns(v, r).total


def fitness_mssr(v: PositionSeries, r: ReturnSeries) -> float:
    """SSR of the strategy returns"""
    return ssr(strategy_returns(v, r))


FITNESS_FUNCTIONS: Dict[FitnessKind, Callable[[PositionSeries, ReturnSeries], float]] = {
    FitnessKind.MR: fitness_mr,
    FitnessKind.MSSR: fitness_mssr,
}


class FitnessContext:
    """
    Read-only training data plus a fitness cache keyed by chromosome weights.
    """

    def __init__(self, signals: SignalMatrix, returns: ReturnSeries, fitness: FitnessKind):
        if len(signals) != len(returns):
            raise LengthMismatchError(
                f"feature matrix has {len(signals)} rows, returns have {len(returns)}"
            )
        if len(returns) < 2:
            raise SeriesTooShortError("evolution needs at least 2 bars")
        self.signals = signals
        self.returns = returns
        self.fitness = FitnessKind(fitness)
        self._function = FITNESS_FUNCTIONS[self.fitness]
        self._cache: Dict[bytes, float] = {}

    def evaluate(self, chromosome: Chromosome) -> float:
        key = chromosome.key()
        if key not in self._cache:
            positions = positions_from_weights(chromosome, self.signals)
            self._cache[key] = self._function(positions, self.returns)
        return self._cache[key]

    def evaluate_all(self, population: List[Chromosome]) -> np.ndarray:
        return np.array([self.evaluate(c) for c in population])


# ============================================================================
# EVOLUTION
# ============================================================================

def _rank_order(fitness: np.ndarray) -> np.ndarray:
    """Indices from best to worst; equal fitness keeps population order"""
    return np.argsort(-fitness, kind="stable")


def ga_step(population: List[Chromosome], cfg: GAConfig, ctx: FitnessContext,
            rng: np.random.Generator) -> List[Chromosome]:
    """
    Produce the next generation.

    The best chromosome survives unchanged; the rest are offspring of
    rank-weighted parents drawn from the top ``cfg.parents_mating``.
    """
    if len(population) != cfg.population_size:
        raise BadPopulationSizeError(
            f"population has {len(population)} members, expected {cfg.population_size}"
        )
    order = _rank_order(ctx.evaluate_all(population))
    elite = population[order[0]]
    parents = [population[i] for i in order[:cfg.parents_mating]]

    ranks = np.arange(len(parents), 0, -1, dtype=np.float64)
    selection = ranks / ranks.sum()
    genes = len(elite)

    offspring = [elite]
    for _ in range(cfg.population_size - config.GA_ELITE_COUNT):
        first, second = rng.choice(len(parents), size=2, p=selection)
        child = parents[first].weights.copy()
        if rng.random() < cfg.crossover_prob:
            take_second = rng.random(genes) < 0.5
            child = np.where(take_second, parents[second].weights, child)
        mutate = rng.random(genes) < cfg.mutation_prob
        child = child + mutate * rng.normal(0.0, cfg.mutation_step, genes)
        offspring.append(Chromosome(child))
    return offspring


def initial_population(cfg: GAConfig, genes: int, rng: np.random.Generator) -> List[Chromosome]:
    draws = rng.uniform(config.GA_INIT_LOW, config.GA_INIT_HIGH, size=(cfg.population_size, genes))
    return [Chromosome(row) for row in draws]


def ga_evolve(signals: SignalMatrix, returns: ReturnSeries, cfg: GAConfig,
              progress_cb: Optional[Callable[[int, int], None]] = None) -> Tuple[Chromosome, FitnessTrace]:
    """
    Run the genetic algorithm.

    Args:
        signals: Training feature matrix
        returns: Training log returns
        cfg: Hyperparameters, seed and fitness kind
        progress_cb: Called with (generation, total) after each generation

    Returns:
        (best chromosome with its training scale, trace). Trace entry 0 is the
        initial population.
    """
    ctx = FitnessContext(signals, returns, cfg.fitness)
    rng = np.random.default_rng(cfg.seed)
    population = initial_population(cfg, signals.width, rng)

    trace = FitnessTrace()
    fitness = ctx.evaluate_all(population)
    trace.record(fitness, population)
    best = population[int(np.argmax(fitness))]
    best_fitness = float(fitness.max())

    for generation in range(1, cfg.generations + 1):
        population = ga_step(population, cfg, ctx, rng)
        fitness = ctx.evaluate_all(population)
        trace.record(fitness, population)
        if trace.best[-1] > best_fitness:
            best_fitness = trace.best[-1]
            best = population[int(np.argmax(fitness))]
        if generation % 50 == 0:
            logger.debug(f"GA-{cfg.fitness.value} generation {generation}: best={best_fitness:.6g}")
        if progress_cb:
            progress_cb(generation, cfg.generations)

    scale = positions_from_weights(best, signals).scale
    logger.info(f"GA-{cfg.fitness.value} finished: fitness={best_fitness:.6g} after {cfg.generations} generations")
    return Chromosome(best.weights, scale=scale), trace


# ============================================================================
# PERSISTENCE
# ============================================================================

def save_chromosome(chromosome: Chromosome, fitness: FitnessKind, rule_ids, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"fitness": FitnessKind(fitness).value, "rule_ids": list(rule_ids), **chromosome.to_dict()}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def load_chromosome(path) -> Tuple[Chromosome, List[str]]:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactsError(ERROR_MISSING_ARTIFACTS.format(path))
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return Chromosome.from_dict(data), list(data.get("rule_ids", []))
