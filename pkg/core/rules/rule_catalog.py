"""
Rule Catalog and Feature Matrix
The 16 parameterized trading rules, their search grids, and the builder that
evaluates all of them into the ternary feature matrix.

The default catalog and grids live in config.RULE_CATALOG; a run
configuration may narrow any grid or select a subset for grid searching.
"""

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import config
from core.data.data_ingest import CandleSeries
from core.errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyGridError,
    InvalidParameterError,
    WindowExceedsSeriesError,
)
from core.indicators import technical_indicators as ti
from core.rules.trading_rules import SignalSeries, signal_cat1, signal_cat2, signal_cat3, signal_cat4
from utils.constants import MAKind
from utils.logger import get_logger


logger = get_logger(__name__)

RuleParams = Dict[str, float]

MAX_RULE_PARAMS = 3


# ============================================================================
# EVALUATION CONTEXT
# ============================================================================

class FeatureContext:
    """
    Candles plus a memo of indicator results.

    A grid sweep evaluates one rule many times; indicators depending only on
    a subset of the parameters (e.g. RSI window while thresholds vary) are
    computed once.
    """

    def __init__(self, candles: CandleSeries):
        self.candles = candles
        self.close = candles.close
        self._memo: Dict[tuple, object] = {}

    def _cached(self, key: tuple, compute: Callable):
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def ma(self, window, kind: MAKind) -> ti.IndicatorSeries:
        window = int(window)
        return self._cached(("ma", kind, window), lambda: ti.moving_average(self.close, window, kind))

    def rsi(self, window) -> ti.IndicatorSeries:
        window = int(window)
        return self._cached(("rsi", window), lambda: ti.rsi(self.close, window))

    def stochastic(self, k_window, d_window=1):
        k_window, d_window = int(k_window), int(d_window)
        return self._cached(("stoch", k_window, d_window),
                            lambda: ti.stochastic(self.candles, k_window, d_window))

    def vortex(self, window):
        window = int(window)
        return self._cached(("vortex", window), lambda: ti.vortex(self.candles, window))

    def bollinger(self, window, k):
        window = int(window)
        return self._cached(("bollinger", window, k), lambda: ti.bollinger(self.close, window, k))

    def keltner(self, window, k):
        window = int(window)
        return self._cached(("keltner", window, k), lambda: ti.keltner(self.candles, window, k))

    def cloud(self, tenkan, kijun, senkou_b) -> Tuple[np.ndarray, np.ndarray]:
        key = ("cloud", int(tenkan), int(kijun), int(senkou_b))

        def compute():
            _, _, span_a, span_b = ti.ichimoku(self.candles, int(tenkan), int(kijun), int(senkou_b))
            # NaN-propagating max/min keep the warmup undefined
            return np.maximum(span_a.values, span_b.values), np.minimum(span_a.values, span_b.values)

        return self._cached(key, compute)


# ============================================================================
# RULE EVALUATORS
# ============================================================================

def _close_x_sma(ctx: FeatureContext, p: RuleParams) -> SignalSeries:
    return signal_cat1(ctx.close, ctx.ma(p["window"], MAKind.SMA))


def _sma_fast_x_slow(ctx, p):
    return signal_cat1(ctx.ma(p["fast"], MAKind.SMA), ctx.ma(p["slow"], MAKind.SMA))


def _close_x_ema(ctx, p):
    return signal_cat1(ctx.close, ctx.ma(p["window"], MAKind.EMA))


def _ema_fast_x_slow(ctx, p):
    return signal_cat1(ctx.ma(p["fast"], MAKind.EMA), ctx.ma(p["slow"], MAKind.EMA))


def _close_x_dema(ctx, p):
    return signal_cat1(ctx.close, ctx.ma(p["window"], MAKind.DEMA))


def _close_x_tema(ctx, p):
    return signal_cat1(ctx.close, ctx.ma(p["window"], MAKind.TEMA))


def _stoch_k_x_d(ctx, p):
    k_line, d_line = ctx.stochastic(p["k_window"], p["d_window"])
    return signal_cat1(k_line, d_line)


def _vortex_plus_x_minus(ctx, p):
    vi_plus, vi_minus = ctx.vortex(p["window"])
    return signal_cat1(vi_plus, vi_minus)


def _rsi_x_level(ctx, p):
    return signal_cat2(ctx.rsi(p["window"]), p["threshold"])


def _stoch_k_x_level(ctx, p):
    k_line, _ = ctx.stochastic(p["k_window"])
    return signal_cat2(k_line, p["threshold"])


def _rsi_band(ctx, p):
    return signal_cat3(ctx.rsi(p["window"]), p["hi"], p["lo"])


def _stoch_k_band(ctx, p):
    k_line, _ = ctx.stochastic(p["k_window"])
    return signal_cat3(k_line, p["hi"], p["lo"])


def _close_x_bollinger(ctx, p):
    upper, _, lower = ctx.bollinger(p["window"], p["k"])
    return signal_cat4(ctx.close, upper, lower)


def _close_x_keltner(ctx, p):
    upper, _, lower = ctx.keltner(p["window"], p["k"])
    return signal_cat4(ctx.close, upper, lower)


def _close_x_cloud(ctx, p):
    upper, lower = ctx.cloud(p["tenkan"], p["kijun"], p["senkou_b"])
    return signal_cat4(ctx.close, upper, lower)


def _sma_x_bollinger(ctx, p):
    upper, _, lower = ctx.bollinger(p["window"], p["k"])
    return signal_cat4(ctx.ma(p["sma_window"], MAKind.SMA), upper, lower)


# Grid-point constraints (module-level so specs pickle into worker processes)

def _fast_below_slow(p: RuleParams) -> bool:
    return p["fast"] < p["slow"]


def _hi_above_lo(p: RuleParams) -> bool:
    return p["hi"] > p["lo"]


def _cloud_order(p: RuleParams) -> bool:
    return p["tenkan"] <= p["kijun"] <= p["senkou_b"]


EVALUATORS: Dict[str, Tuple[Callable, Optional[Callable]]] = {
    "close_x_sma": (_close_x_sma, None),
    "sma_fast_x_slow": (_sma_fast_x_slow, _fast_below_slow),
    "close_x_ema": (_close_x_ema, None),
    "ema_fast_x_slow": (_ema_fast_x_slow, _fast_below_slow),
    "close_x_dema": (_close_x_dema, None),
    "close_x_tema": (_close_x_tema, None),
    "stoch_k_x_d": (_stoch_k_x_d, None),
    "vortex_plus_x_minus": (_vortex_plus_x_minus, None),
    "rsi_x_level": (_rsi_x_level, None),
    "stoch_k_x_level": (_stoch_k_x_level, None),
    "rsi_band": (_rsi_band, _hi_above_lo),
    "stoch_k_band": (_stoch_k_band, _hi_above_lo),
    "close_x_bollinger": (_close_x_bollinger, None),
    "close_x_keltner": (_close_x_keltner, None),
    "close_x_cloud": (_close_x_cloud, _cloud_order),
    "sma_x_bollinger": (_sma_x_bollinger, None),
}


# ============================================================================
# RULE SPEC
# ============================================================================

@dataclass(frozen=True)
class RuleSpec:
    """One catalog rule: its category, evaluator and finite parameter grid"""
    rule_id: str
    category: int
    param_grid: Dict[str, Tuple[float, ...]]
    description: str = ""
    evaluator: Callable = field(default=None, compare=False, repr=False)
    constraint: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.category not in (1, 2, 3, 4):
            raise InvalidParameterError(f"{self.rule_id}: category must be 1-4")
        if not self.param_grid or len(self.param_grid) > MAX_RULE_PARAMS:
            raise InvalidParameterError(
                f"{self.rule_id}: a rule needs 1 to {MAX_RULE_PARAMS} parameters"
            )
        grid = {}
        for name, values in self.param_grid.items():
            values = tuple(sorted(set(values)))
            if not values:
                raise EmptyGridError(f"{self.rule_id}: empty grid for '{name}'")
            grid[name] = values
        object.__setattr__(self, "param_grid", grid)
        if self.evaluator is None:
            if self.rule_id not in EVALUATORS:
                raise ConfigError(f"unknown rule '{self.rule_id}'")
            evaluator, constraint = EVALUATORS[self.rule_id]
            object.__setattr__(self, "evaluator", evaluator)
            object.__setattr__(self, "constraint", constraint)

    @property
    def param_names(self) -> Tuple[str, ...]:
        return tuple(self.param_grid)

    def grid_points(self) -> Iterator[RuleParams]:
        """Grid points in lexicographic order of the parameter tuple, constraint applied"""
        names = self.param_names
        for values in itertools.product(*(self.param_grid[n] for n in names)):
            params = dict(zip(names, values))
            if self.constraint is None or self.constraint(params):
                yield params

    def param_tuple(self, params: RuleParams) -> tuple:
        return tuple(params[n] for n in self.param_names)

    def evaluate(self, ctx: FeatureContext, params: RuleParams) -> SignalSeries:
        return self.evaluator(ctx, params)


def default_catalog(overrides: Optional[Mapping[str, Mapping[str, Sequence[float]]]] = None) -> List[RuleSpec]:
    """
    Build the 16-rule catalog from config.RULE_CATALOG.

    Args:
        overrides: {rule_id: {param: [values]}} replacing individual grids
    """
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(config.RULE_CATALOG)
    if unknown:
        raise ConfigError(f"grid overrides for unknown rules: {sorted(unknown)}")

    catalog = []
    for rule_id, entry in config.RULE_CATALOG.items():
        grid = dict(entry["grid"])
        for name, values in overrides.get(rule_id, {}).items():
            if name not in grid:
                raise ConfigError(f"{rule_id} has no parameter '{name}'")
            grid[name] = list(values)
        catalog.append(RuleSpec(rule_id=rule_id, category=entry["category"],
                                param_grid=grid, description=entry["description"]))
    return catalog


# ============================================================================
# FEATURE MATRIX
# ============================================================================

@dataclass(frozen=True, eq=False)
class SignalMatrix:
    """Bars x rules matrix of ternary signals; column order follows rule_ids"""
    values: np.ndarray
    rule_ids: Tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int8)
        if values.ndim != 2 or values.shape[1] != len(self.rule_ids):
            raise DimensionMismatchError(
                f"matrix shape {values.shape} does not match {len(self.rule_ids)} rule ids"
            )
        if len(self.rule_ids) != config.CATALOG_SIZE:
            raise DimensionMismatchError(
                f"a feature matrix has {config.CATALOG_SIZE} columns, got {len(self.rule_ids)}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rule_ids", tuple(self.rule_ids))

    @classmethod
    def from_columns(cls, columns: Sequence[SignalSeries], rule_ids: Sequence[str]) -> "SignalMatrix":
        lengths = {len(c) for c in columns}
        if len(lengths) > 1:
            raise DimensionMismatchError(f"column lengths differ: {sorted(lengths)}")
        return cls(values=np.column_stack([c.values for c in columns]), rule_ids=tuple(rule_ids))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def column(self, index: int) -> SignalSeries:
        return SignalSeries(self.values[:, index])


def build_features(candles: CandleSeries, catalog: Sequence[RuleSpec],
                   params: Mapping[str, RuleParams], short_series_neutral: bool = False) -> SignalMatrix:
    """
    Evaluate every catalog rule with its chosen parameters.

    Args:
        candles: Series to evaluate on
        catalog: The 16 rules, in column order
        params: {rule_id: RuleParams}
        short_series_neutral: Emit an all-0 column for a rule whose window
            exceeds the series instead of raising (test segments shorter
            than a trained window)

    Returns:
        SignalMatrix with column i = rule i

    Raises:
        WindowExceedsSeriesError: a window exceeds the series and
            short_series_neutral is False
    """
    if len(catalog) != config.CATALOG_SIZE:
        raise DimensionMismatchError(
            f"catalog must hold {config.CATALOG_SIZE} rules, got {len(catalog)}"
        )
    ctx = FeatureContext(candles)
    columns = []
    for rule in catalog:
        if rule.rule_id not in params:
            raise ConfigError(f"no parameters for rule '{rule.rule_id}'")
        try:
            columns.append(rule.evaluate(ctx, params[rule.rule_id]))
        except WindowExceedsSeriesError as e:
            if not short_series_neutral:
                raise
            logger.warning(f"Rule '{rule.rule_id}' stays neutral: {e}")
            columns.append(SignalSeries(np.zeros(len(candles), dtype=np.int8)))
    logger.debug(f"Built {len(columns)} feature columns over {len(candles)} bars")
    return SignalMatrix.from_columns(columns, [r.rule_id for r in catalog])


def signal_matrix_to_csv(matrix: SignalMatrix, timestamps: np.ndarray, path) -> Path:
    """Write timestamp + one integer column per rule"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if len(timestamps) != len(matrix):
        raise DimensionMismatchError("timestamps and matrix rows differ in length")
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["timestamp", *matrix.rule_ids])
        for ts, row in zip(timestamps, matrix.values):
            writer.writerow([int(ts), *(int(v) for v in row)])
    return path
