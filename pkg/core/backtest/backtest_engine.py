"""
Backtest Engine
Zero-fee simulation of benchmark and GA-weighted strategies on held-out
candles, and the side-by-side comparison of their performance reports.

Trades fill at the close of the bar the position is decided on. Indicators
for the test segment are recomputed from the segment's first bar, so the
leading warmup of every rule reads neutral.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import pandas as pd

from core.data.data_ingest import CandleSeries
from core.errors import ConfigError, InvalidParameterError
from core.metrics.performance_metrics import (
    EquityCurve,
    PerformanceReport,
    PositionSeries,
    ReturnSeries,
    build_report,
    equity_curve,
    log_returns,
    strategy_returns,
)
from core.optimize.genetic import Chromosome, positions_from_weights
from core.rules.rule_catalog import RuleParams, RuleSpec, build_features, default_catalog
from utils.constants import REPORT_COLUMNS, StrategyKind
from utils.logger import get_logger


logger = get_logger(__name__)

WEIGHTED_KINDS = (StrategyKind.GA_MR, StrategyKind.GA_MSSR, StrategyKind.FIXED_WEIGHTS)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass
class StrategySpec:
    """
    A strategy to simulate.

    Weighted kinds need the per-rule parameters from grid search and a
    chromosome. A chromosome without a training scale (FixedWeights supplied
    by hand) is normalized on the segment it runs on.
    """
    kind: StrategyKind
    leverage: float = 1.0
    rule_params: Optional[Dict[str, RuleParams]] = None
    chromosome: Optional[Chromosome] = None
    label: Optional[str] = None

    def __post_init__(self):
        self.kind = StrategyKind(self.kind)
        if not self.leverage > 0:
            raise InvalidParameterError(f"leverage must be > 0, got {self.leverage}")
        if self.kind in WEIGHTED_KINDS and (self.chromosome is None or not self.rule_params):
            raise InvalidParameterError(
                f"{self.kind.value} needs trained rule parameters and a chromosome"
            )
        if self.label is None:
            self.label = self.kind.value


@dataclass
class BacktestResult:
    """Report plus the series it was computed from"""
    report: PerformanceReport
    equity: EquityCurve
    positions: PositionSeries
    per_period: ReturnSeries


@dataclass
class ComparisonTable:
    """Comparison rows in strategy order"""
    results: List[BacktestResult] = field(default_factory=list)

    @property
    def rows(self) -> List[PerformanceReport]:
        return [r.report for r in self.results]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.rows], columns=REPORT_COLUMNS)

    def __len__(self) -> int:
        return len(self.results)


# ============================================================================
# SIMULATION
# ============================================================================

def strategy_positions(strategy: StrategySpec, candles: CandleSeries,
                       catalog: Optional[Sequence[RuleSpec]] = None) -> PositionSeries:
    """Position series a strategy holds over ``candles``"""
    n = len(candles)
    if strategy.kind is StrategyKind.BUY_HOLD:
        return PositionSeries.constant(1.0, n)
    if strategy.kind is StrategyKind.SELL_HOLD:
        return PositionSeries.constant(-1.0, n)

    catalog = list(catalog) if catalog is not None else default_catalog()
    features = build_features(candles, catalog, strategy.rule_params, short_series_neutral=True)
    return positions_from_weights(strategy.chromosome, features, scale=strategy.chromosome.scale)


def run(strategy: StrategySpec, candles: CandleSeries,
        catalog: Optional[Sequence[RuleSpec]] = None) -> BacktestResult:
    """
    Simulate one strategy.

    Args:
        strategy: What to trade and at which leverage
        candles: Test segment, chronologically after any training data
        catalog: Rule catalog matching the chromosome's columns

    Raises:
        AccountBlownError: leverage wiped out the balance
    """
    positions = strategy_positions(strategy, candles, catalog)
    returns = log_returns(candles)
    per_period = strategy_returns(positions, returns)
    curve = equity_curve(positions, returns, candles.timestamps, strategy.leverage)
    report = build_report(strategy.label, curve, positions, per_period)
    logger.debug(
        f"{strategy.label} L{strategy.leverage:g}: ROI={report.roi:.4%} "
        f"MD={report.max_drawdown:.4%} AP={report.avg_position:.4f}"
    )
    return BacktestResult(report=report, equity=curve, positions=positions, per_period=per_period)


def compare(strategies: Sequence[StrategySpec], candles: CandleSeries,
            catalog: Optional[Sequence[RuleSpec]] = None) -> ComparisonTable:
    """Run every strategy on the same candles; rows keep the input order"""
    if not strategies:
        raise InvalidParameterError("nothing to compare: empty strategy list")
    labels = [s.label for s in strategies]
    if len(set(zip(labels, (s.leverage for s in strategies)))) != len(strategies):
        raise ConfigError(f"duplicate strategies in comparison: {labels}")
    return ComparisonTable([run(s, candles, catalog) for s in strategies])


def benchmark_strategies(leverage: float = 1.0) -> List[StrategySpec]:
    return [StrategySpec(StrategyKind.BUY_HOLD, leverage), StrategySpec(StrategyKind.SELL_HOLD, leverage)]


def trained_strategies(rule_params: Mapping[str, RuleParams], chromosomes: Mapping[StrategyKind, Chromosome],
                       leverage: float = 1.0) -> List[StrategySpec]:
    """B&H, S&H, then one weighted strategy per trained chromosome"""
    specs = benchmark_strategies(leverage)
    for kind, chromosome in chromosomes.items():
        specs.append(StrategySpec(kind, leverage, dict(rule_params), chromosome))
    return specs
