"""Tests for the per-rule grid search."""

import itertools

import numpy as np
import pytest

import config
from core.data.data_ingest import synthesize
from core.errors import EmptyGridError
from core.indicators.technical_indicators import moving_average
from core.metrics.performance_metrics import log_returns, ssr
from core.optimize.grid_search import grid_search_rule, optimize_catalog, resolve_workers
from core.rules.rule_catalog import RuleSpec, default_catalog
from core.rules.trading_rules import signal_cat1


def single_point_overrides(rule_params):
    return {rule: {name: [value] for name, value in params.items()}
            for rule, params in rule_params.items()}


class TestGridSearchRule:
    """One rule, every grid point."""

    def test_single_point_grid(self, walk_candles):
        rule = RuleSpec("close_x_sma", 1, {"window": [10]})
        result = grid_search_rule(rule, walk_candles)
        assert result.best_params == {"window": 10}
        assert list(result.all_scores) == [(10,)]
        assert result.best_score == result.all_scores[(10,)]

    def test_matches_brute_force(self):
        candles = synthesize(seed=21, n=2000, regime="mean-revert")
        fast_grid = list(range(2, 22))
        slow_grid = list(range(5, 45, 2))
        rule = RuleSpec("sma_fast_x_slow", 1, {"fast": fast_grid, "slow": slow_grid})
        result = grid_search_rule(rule, candles)

        returns = log_returns(candles).values
        points, scores = [], []
        for fast, slow in itertools.product(fast_grid, slow_grid):
            if fast >= slow:
                continue
            s = signal_cat1(moving_average(candles.close, fast),
                            moving_average(candles.close, slow)).values
            p = np.full(len(returns), np.nan)
            p[1:] = s[:-1] * returns[1:]
            points.append((fast, slow))
            scores.append(ssr(p))

        best = int(np.argmax(scores))
        assert len(result.all_scores) == len(points) <= 400
        assert result.best_params == {"fast": points[best][0], "slow": points[best][1]}
        assert result.best_score == pytest.approx(scores[best])

    def test_tie_keeps_first_point(self, make_candles):
        flat = make_candles(np.full(50, 1.1))
        rule = RuleSpec("close_x_sma", 1, {"window": [7, 3, 5]})
        result = grid_search_rule(rule, flat)
        assert result.best_params == {"window": 3}
        assert result.best_score == 0.0

    def test_long_windows_are_skipped(self, walk_candles):
        rule = RuleSpec("close_x_sma", 1, {"window": [5, 10_000]})
        result = grid_search_rule(rule, walk_candles)
        assert list(result.all_scores) == [(5,)]

    def test_no_evaluable_point(self, walk_candles):
        rule = RuleSpec("close_x_sma", 1, {"window": [10_000]})
        with pytest.raises(EmptyGridError):
            grid_search_rule(rule, walk_candles)

    def test_result_serialization(self, walk_candles):
        rule = RuleSpec("rsi_band", 3, {"window": [14], "hi": [70], "lo": [30]})
        result = grid_search_rule(rule, walk_candles)
        data = result.to_dict()
        assert data["param_names"] == ["window", "hi", "lo"]
        assert data["evaluated"] == 1
        assert result.score_rows()[0][:2] == ["rsi_band", "window=14;hi=70;lo=30"]


class TestOptimizeCatalog:
    """Every rule of the catalog."""

    def test_keeps_catalog_order(self, walk_candles, rule_params):
        overrides = single_point_overrides(rule_params)
        overrides["close_x_sma"] = {"window": [5, 10, 20]}
        catalog = default_catalog(overrides)
        progress = []

        results = optimize_catalog(catalog, walk_candles, workers=1,
                                   progress_cb=lambda done, total: progress.append((done, total)))

        assert [r.rule_id for r in results] == list(config.RULE_CATALOG)
        assert len(results[0].all_scores) == 3
        assert all(len(r.all_scores) == 1 for r in results[1:])
        assert progress[-1] == (config.CATALOG_SIZE, config.CATALOG_SIZE)
        for result in results[1:]:
            assert result.best_params == rule_params[result.rule_id]

    def test_process_pool_matches_inline(self, walk_candles, rule_params):
        overrides = single_point_overrides(rule_params)
        overrides["close_x_sma"] = {"window": [5, 10, 20]}
        overrides["rsi_x_level"] = {"window": [7, 14], "threshold": [40, 50, 60]}
        catalog = default_catalog(overrides)
        progress = []

        inline = optimize_catalog(catalog, walk_candles, workers=1)
        pooled = optimize_catalog(catalog, walk_candles, workers=2,
                                  progress_cb=lambda done, total: progress.append(done))

        assert [r.rule_id for r in pooled] == list(config.RULE_CATALOG)
        assert [r.best_params for r in pooled] == [r.best_params for r in inline]
        assert [r.all_scores for r in pooled] == [r.all_scores for r in inline]
        assert progress == list(range(1, config.CATALOG_SIZE + 1))

    def test_explicit_worker_count(self):
        assert resolve_workers(3) == 3
        assert resolve_workers(0) >= 1
