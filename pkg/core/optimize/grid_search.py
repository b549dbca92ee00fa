"""
Rule Parameter Grid Search
Exhaustive SSR-maximizing sweep over each rule's parameter grid.

The rule's raw signal is the position (s_t = v_t) during the sweep. Grid
points are visited in lexicographic order and only a strictly better score
replaces the incumbent, so ties resolve to the smallest parameter tuple.
"""

import multiprocessing
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import psutil

import config
from core.data.data_ingest import CandleSeries
from core.errors import EmptyGridError, WindowExceedsSeriesError
from core.metrics.performance_metrics import PositionSeries, log_returns, ssr, strategy_returns
from core.rules.rule_catalog import FeatureContext, RuleParams, RuleSpec
from utils.logger import get_logger


logger = get_logger(__name__)


@dataclass
class GridResult:
    """Best parameters of one rule plus the score of every evaluated grid point"""
    rule_id: str
    param_names: tuple
    best_params: RuleParams
    best_score: float
    all_scores: Dict[tuple, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "rule_id": self.rule_id,
            "param_names": list(self.param_names),
            "best_params": dict(self.best_params),
            "best_score": self.best_score,
            "evaluated": len(self.all_scores),
        }

    def score_rows(self) -> List[List]:
        """(rule_id, params, score) rows in evaluation order"""
        return [
            [self.rule_id, ";".join(f"{n}={v:g}" for n, v in zip(self.param_names, point)), score]
            for point, score in self.all_scores.items()
        ]


def resolve_workers(workers: Optional[int]) -> int:
    """0 or None means one worker per physical core"""
    if workers:
        return max(1, int(workers))
    return psutil.cpu_count(logical=False) or 1


# ============================================================================
# SINGLE RULE
# ============================================================================

def grid_search_rule(rule: RuleSpec, candles: CandleSeries) -> GridResult:
    """
    Score every grid point of one rule with SSR and keep the best.

    Grid points whose windows do not fit the series are skipped.

    Args:
        rule: Rule to sweep
        candles: Training candles

    Returns:
        GridResult with the argmax and every evaluated score

    Raises:
        EmptyGridError: no grid point could be evaluated
    """
    returns = log_returns(candles)
    ctx = FeatureContext(candles)

    best_params = None
    best_score = float("-inf")
    all_scores: Dict[tuple, float] = {}
    skipped = 0

    for params in rule.grid_points():
        try:
            signal = rule.evaluate(ctx, params)
        except WindowExceedsSeriesError:
            skipped += 1
            continue
        score = ssr(strategy_returns(PositionSeries(signal.values), returns))
        all_scores[rule.param_tuple(params)] = score
        if score > best_score:
            best_params, best_score = params, score

    if best_params is None:
        raise EmptyGridError(f"{rule.rule_id}: no evaluable grid point on {len(candles)} bars")
    if skipped:
        logger.debug(f"{rule.rule_id}: skipped {skipped} grid points longer than the series")
    logger.debug(f"{rule.rule_id}: best {best_params} SSR={best_score:.6g} over {len(all_scores)} points")
    return GridResult(rule_id=rule.rule_id, param_names=rule.param_names,
                      best_params=dict(best_params), best_score=best_score,
                      all_scores=all_scores)


# ============================================================================
# WHOLE CATALOG
# ============================================================================

def optimize_catalog(catalog: Sequence[RuleSpec], candles: CandleSeries,
                     workers: Optional[int] = config.DEFAULT_WORKERS,
                     progress_cb: Optional[Callable[[int, int], None]] = None) -> List[GridResult]:
    """
    Grid-search every rule; results keep the catalog order.

    Args:
        catalog: Rules to optimize
        candles: Training candles
        workers: Process count (1 runs inline, 0 uses every physical core)
        progress_cb: Called with (completed, total) after each rule
    """
    total = len(catalog)
    workers = min(resolve_workers(workers), max(total, 1))
    results: List[Optional[GridResult]] = [None] * total

    if workers == 1:
        for index, rule in enumerate(catalog):
            results[index] = grid_search_rule(rule, candles)
            if progress_cb:
                progress_cb(index + 1, total)
        return results

    ctx = multiprocessing.get_context("spawn")
    completed = 0
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as executor:
        futures = {
            executor.submit(grid_search_rule, rule, candles): index
            for index, rule in enumerate(catalog)
        }
        for future in as_completed(futures):
            results[futures[future]] = future.result()
            completed += 1
            if progress_cb:
                progress_cb(completed, total)

    logger.info(f"Grid search finished for {total} rules with {workers} workers")
    return results
