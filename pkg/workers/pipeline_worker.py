"""
Pipeline Worker
Runs the optimize and backtest stages for each configured pair and persists
their artifacts. Progress is reported through an optional callback.

Per-pair artifact layout under <output_dir>/<pair>/:
    grid_results.json, grid_scores.csv, features_train.csv,
    chromosome_{MR,MSSR}.json, fitness_trace_{MR,MSSR}.csv,
    comparison_L<lev>.{csv,txt}, equity_<strategy>_L<lev>.csv, comparison.xlsx
"""

import csv
import json
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from core.backtest.backtest_engine import compare, trained_strategies
from core.backtest.backtest_summary import ComparisonSummaryGenerator
from core.data.data_ingest import CandleSeries, split
from core.errors import MissingArtifactsError, RoboTradingError
from core.metrics.performance_metrics import log_returns
from core.optimize.genetic import ga_evolve, load_chromosome, save_chromosome
from core.optimize.grid_search import GridResult, optimize_catalog
from core.rules.rule_catalog import RuleParams, RuleSpec, build_features, default_catalog, signal_matrix_to_csv
from core.run_config import RunConfig
from core.state_manager import pipeline_state
from utils.constants import (
    CHROMOSOME_JSON,
    ERROR_MISSING_ARTIFACTS,
    FEATURES_CSV,
    FITNESS_TRACE_CSV,
    GRID_RESULTS_JSON,
    GRID_SCORES_CSV,
    STATUS_BACKTESTING,
    STATUS_EVOLVING,
    STATUS_GRID_SEARCH,
    FitnessKind,
    StrategyKind,
)
from utils.logger import get_logger


logger = get_logger(__name__)

ProgressCallback = Callable[[str, int, int], None]

STRATEGY_FOR_FITNESS = {FitnessKind.MR: StrategyKind.GA_MR, FitnessKind.MSSR: StrategyKind.GA_MSSR}


def _write_json(data: Dict, path: Path) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def load_artifacts(out_dir: Path, catalog: List[RuleSpec]):
    """
    Rule parameters and both chromosomes persisted by optimize.

    Raises:
        MissingArtifactsError: grid results or a chromosome file is absent, or a
            chromosome was trained on a different catalog
    """
    out_dir = Path(out_dir)
    grid_path = out_dir / GRID_RESULTS_JSON
    if not grid_path.exists():
        raise MissingArtifactsError(ERROR_MISSING_ARTIFACTS.format(grid_path))
    with open(grid_path, "r", encoding="utf-8") as f:
        grid = json.load(f)
    params = {entry["rule_id"]: entry["best_params"] for entry in grid["rules"]}

    chromosomes = {}
    for fitness in FitnessKind:
        chromosome, rule_ids = load_chromosome(out_dir / CHROMOSOME_JSON.format(fitness=fitness.value))
        if rule_ids and rule_ids != [r.rule_id for r in catalog]:
            raise MissingArtifactsError(
                f"{fitness.value} chromosome was trained on a different rule catalog"
            )
        chromosomes[STRATEGY_FOR_FITNESS[fitness]] = chromosome
    return params, chromosomes


class PipelineWorker:
    """
    Drives the optimize and backtest stages for the pairs of a RunConfig.

    Args:
        run_config: Validated configuration (CLI overrides already applied)
        progress_cb: Called with (status message, completed, total)
    """

    def __init__(self, run_config: RunConfig, progress_cb: Optional[ProgressCallback] = None):
        self.run_config = run_config
        self.progress_cb = progress_cb
        self.catalog: List[RuleSpec] = default_catalog(run_config.catalog)
        logger.info(f"Pipeline worker initialized for pairs: {', '.join(run_config.pairs)}")

    def _progress(self, status: str, done: int, total: int):
        pipeline_state.update_progress(done, total)
        if self.progress_cb:
            self.progress_cb(status, done, total)

    def load_segments(self, pair: str) -> Tuple[CandleSeries, CandleSeries]:
        source = self.run_config.pairs[pair]
        candles = source.load(self.run_config.bar_interval)
        return split(candles, self.run_config.split)

    # ========================================================================
    # OPTIMIZE
    # ========================================================================

    def optimize(self, pair: str) -> List[Path]:
        """
        Grid-search rule parameters and evolve GA-MR and GA-MSSR chromosomes on
        the training segment of one pair.
        """
        seed = self.run_config.require_seed()
        out_dir = self.run_config.pair_dir(pair)
        out_dir.mkdir(parents=True, exist_ok=True)
        session = pipeline_state.start_stage(pair, "optimize", out_dir)

        try:
            train, _ = self.load_segments(pair)
            logger.info(f"[{pair}] {STATUS_GRID_SEARCH} ({len(train)} training bars)")

            searched = [r for r in self.catalog
                        if self.run_config.rules is None or r.rule_id in self.run_config.rules]
            results = optimize_catalog(
                searched, train, workers=self.run_config.workers,
                progress_cb=lambda done, total: self._progress(STATUS_GRID_SEARCH, done, total),
            )
            params = self._rule_params(results)

            written = [self._write_grid_results(pair, results, params, out_dir),
                       self._write_grid_scores(results, out_dir)]

            features = build_features(train, self.catalog, params)
            written.append(signal_matrix_to_csv(features, train.timestamps, out_dir / FEATURES_CSV))

            returns = log_returns(train)
            for fitness in FitnessKind:
                cfg = self.run_config.ga_settings(fitness)
                logger.info(f"[{pair}] {STATUS_EVOLVING} GA-{fitness.value}, seed {seed}")
                chromosome, trace = ga_evolve(
                    features, returns, cfg,
                    progress_cb=lambda done, total: self._progress(STATUS_EVOLVING, done, total),
                )
                written.append(save_chromosome(chromosome, fitness, features.rule_ids,
                                               out_dir / CHROMOSOME_JSON.format(fitness=fitness.value)))
                written.append(self._write_trace(trace, out_dir / FITNESS_TRACE_CSV.format(fitness=fitness.value)))
        except RoboTradingError as e:
            pipeline_state.set_stage_error(str(e))
            raise

        pipeline_state.add_artifacts(written)
        pipeline_state.complete_stage()
        logger.info(f"[{pair}] optimize wrote {len(written)} artifacts to {session.output_dir}")
        return written

    def _rule_params(self, results: List[GridResult]) -> Dict[str, RuleParams]:
        """Searched rules take their argmax; the rest take their first grid point"""
        params = {r.rule_id: r.best_params for r in results}
        for rule in self.catalog:
            if rule.rule_id not in params:
                params[rule.rule_id] = next(rule.grid_points())
        return params

    def _write_grid_results(self, pair: str, results: List[GridResult],
                            params: Dict[str, RuleParams], out_dir: Path) -> Path:
        by_rule = {r.rule_id: r for r in results}
        rules = []
        for rule in self.catalog:
            if rule.rule_id in by_rule:
                entry = dict(by_rule[rule.rule_id].to_dict(), searched=True)
            else:
                entry = {"rule_id": rule.rule_id, "param_names": list(rule.param_names),
                         "best_params": params[rule.rule_id], "best_score": None,
                         "evaluated": 0, "searched": False}
            entry["category"] = rule.category
            rules.append(entry)
        return _write_json({"pair": pair, "rules": rules}, out_dir / GRID_RESULTS_JSON)

    def _write_grid_scores(self, results: List[GridResult], out_dir: Path) -> Path:
        path = out_dir / GRID_SCORES_CSV
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["rule_id", "params", "ssr"])
            for result in results:
                writer.writerows(result.score_rows())
        return path

    @staticmethod
    def _write_trace(trace, path: Path) -> Path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["generation", "best_fitness", "mean_fitness", "best_weights"])
            writer.writerows(trace.rows())
        return path

    # ========================================================================
    # BACKTEST
    # ========================================================================

    def load_artifacts(self, pair: str):
        return load_artifacts(self.run_config.pair_dir(pair), self.catalog)

    def backtest(self, pair: str, leverages: Optional[List[float]] = None) -> ComparisonSummaryGenerator:
        """Compare B&H, S&H, GA-MR and GA-MSSR on the test segment at each leverage"""
        leverages = leverages or self.run_config.leverage
        out_dir = self.run_config.pair_dir(pair)
        pipeline_state.start_stage(pair, "backtest", out_dir, total_steps=len(leverages))

        try:
            params, chromosomes = self.load_artifacts(pair)
            _, test = self.load_segments(pair)
            summary = ComparisonSummaryGenerator(out_dir)
            for index, leverage in enumerate(leverages, start=1):
                logger.info(f"[{pair}] {STATUS_BACKTESTING} leverage 1:{leverage:g} on {len(test)} bars")
                table = compare(trained_strategies(params, chromosomes, leverage), test, self.catalog)
                pipeline_state.add_artifacts(summary.add_table(table, leverage))
                self._progress(STATUS_BACKTESTING, index, len(leverages))
            pipeline_state.add_artifacts([summary.write_workbook()])
        except RoboTradingError as e:
            pipeline_state.set_stage_error(str(e))
            raise

        pipeline_state.complete_stage()
        return summary
