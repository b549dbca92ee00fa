"""
Performance Metrics
Return accounting, the Sharpe-and-Sterling ratio (SSR), and the evaluation
metrics reported for every backtest: ROI, Sharpe ratio, maximum drawdown and
average position.

Alignment convention: the position decided at bar t earns the log return from
t to t+1, so strategy return p[t+1] = v[t] * r[t+1]. Index 0 of every return
series is undefined (NaN) and counts as 0 in sums.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Union

import numpy as np
import pandas as pd

import config
from core.data.data_ingest import CandleSeries
from core.errors import (
    AccountBlownError,
    InvalidParameterError,
    LengthMismatchError,
    SeriesTooShortError,
    TooFewDaysError,
    ZeroVolatilityError,
)
from utils.constants import REPORT_COLUMNS
from utils.logger import get_logger


logger = get_logger(__name__)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Per-bar log returns aligned with the candles; NaN where undefined"""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        return float(np.nansum(self.values))


@dataclass(frozen=True, eq=False)
class PositionSeries:
    """
    Signed fraction of capital held at each bar, |v| <= 1.

    ``scale`` is the divisor that normalized the raw weighted signal (1.0 for
    positions that were never normalized).
    """
    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if np.isnan(values).any():
            raise InvalidParameterError("positions must be defined at every bar")
        if values.size and np.abs(values).max() > 1.0:
            raise InvalidParameterError(
                f"position magnitude {np.abs(values).max()} exceeds 1"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def constant(cls, value: float, length: int) -> "PositionSeries":
        return cls(np.full(length, float(value)))


@dataclass(frozen=True, eq=False)
class EquityCurve:
    """Account balance per bar, starting at INITIAL_BALANCE"""
    timestamps: np.ndarray
    balance: np.ndarray
    leverage: float = 1.0

    def __post_init__(self):
        timestamps = np.array(self.timestamps, dtype=np.int64)
        balance = np.array(self.balance, dtype=np.float64)
        if len(timestamps) != len(balance):
            raise LengthMismatchError("timestamps and balances differ in length")
        if not self.leverage > 0:
            raise InvalidParameterError(f"leverage must be > 0, got {self.leverage}")
        timestamps.setflags(write=False)
        balance.setflags(write=False)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "balance", balance)

    def __len__(self) -> int:
        return len(self.balance)

    @property
    def initial(self) -> float:
        return float(self.balance[0])

    @property
    def final(self) -> float:
        return float(self.balance[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"timestamp": self.timestamps, "balance": self.balance})


@dataclass
class PerformanceReport:
    """One row of the comparison table"""
    strategy: str
    leverage: float
    roi: float
    sharpe: float
    max_drawdown: float
    avg_position: float
    ssr: float
    total_log_return: float
    trading_days: int

    def to_dict(self) -> Dict:
        return asdict(self)

    def row(self) -> List:
        data = self.to_dict()
        return [data[column] for column in REPORT_COLUMNS]


ReturnInput = Union[ReturnSeries, np.ndarray, list]


def _return_values(series: ReturnInput) -> np.ndarray:
    if isinstance(series, ReturnSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


# ============================================================================
# RETURN ACCOUNTING
# ============================================================================

def log_returns(candles: CandleSeries) -> ReturnSeries:
    """r[t] = ln(close[t] / close[t-1]); r[0] is NaN"""
    if len(candles) < 2:
        raise SeriesTooShortError(f"log returns need >= 2 bars, got {len(candles)}")
    close = candles.close
    values = np.empty(len(close))
    values[0] = np.nan
    values[1:] = np.log(close[1:] / close[:-1])
    return ReturnSeries(values)


def strategy_returns(positions: PositionSeries, returns: ReturnInput) -> ReturnSeries:
    """
    Per-bar strategy log returns p[t+1] = v[t] * r[t+1].

    Raises:
        LengthMismatchError: positions and returns differ in length
    """
    v = positions.values if isinstance(positions, PositionSeries) else np.asarray(positions, dtype=np.float64)
    r = _return_values(returns)
    if len(v) != len(r):
        raise LengthMismatchError(f"{len(v)} positions vs {len(r)} returns")
    out = np.full(len(r), np.nan)
    if len(r) > 1:
        out[1:] = v[:-1] * r[1:]
    return ReturnSeries(out)


def ssr(per_period: ReturnInput, epsilon: float = config.SSR_EPSILON) -> float:
    """
    Sharpe-and-Sterling ratio of per-period strategy returns.

    SSR = sum(p) / (sigma(p) * |sum of negative p|), sigma the population
    standard deviation over defined periods. A zero sigma or zero negative sum
    is replaced by ``epsilon``.

    Raises:
        SeriesTooShortError: fewer than 2 periods
    """
    values = _return_values(per_period)
    if len(values) < 2:
        raise SeriesTooShortError(f"SSR needs >= 2 periods, got {len(values)}")
    defined = values[~np.isnan(values)]
    if defined.size == 0:
        return 0.0
    total = defined.sum()
    sigma = defined.std()
    negative_sum = abs(defined[defined < 0].sum())
    return float(total / max(sigma, epsilon) / max(negative_sum, epsilon))


# ============================================================================
# EQUITY
# ============================================================================

def equity_curve(positions: PositionSeries, returns: ReturnInput, timestamps,
                 leverage: float = 1.0) -> EquityCurve:
    """
    Compound the account: balance[t+1] = balance[t] * exp(L * v[t] * r[t+1]).

    Raises:
        AccountBlownError: the leveraged simple return of one bar loses the
            whole balance; ``partial`` holds the curve up to the bar before.
    """
    if not leverage > 0:
        raise InvalidParameterError(f"leverage must be > 0, got {leverage}")
    bar_log = leverage * np.nan_to_num(strategy_returns(positions, returns).values, nan=0.0)
    timestamps = np.asarray(timestamps, dtype=np.int64)
    if len(timestamps) != len(bar_log):
        raise LengthMismatchError("timestamps and returns differ in length")

    # Leverage scales the simple return of the held position
    simple = leverage * np.expm1(bar_log / leverage)
    blown = np.flatnonzero(simple <= -1.0)
    log_balance = math.log(config.INITIAL_BALANCE) + np.cumsum(bar_log)
    balance = np.exp(log_balance)

    if blown.size:
        halt = int(blown[0])
        partial = EquityCurve(timestamps[:halt], balance[:halt], leverage)
        logger.warning(f"Account blown at bar {halt} (leverage {leverage})")
        raise AccountBlownError(halt, partial)
    return EquityCurve(timestamps, balance, leverage)


def daily_returns(curve: EquityCurve) -> pd.Series:
    """
    Log return of the balance per UTC calendar day.

    Each day's return runs from the previous day's closing balance (the
    initial balance for the first day) to that day's last balance.
    """
    dates = pd.to_datetime(curve.timestamps, unit="s", utc=True).normalize()
    closing = pd.Series(np.log(curve.balance), index=dates).groupby(level=0).last()
    previous = closing.shift(1)
    previous.iloc[0] = math.log(curve.initial)
    return closing - previous


def trading_days(curve: EquityCurve) -> int:
    """UTC calendar days spanned by the curve, both ends included"""
    first, last = pd.to_datetime([curve.timestamps[0], curve.timestamps[-1]], unit="s", utc=True)
    return int((last.normalize() - first.normalize()).days) + 1


# ============================================================================
# EVALUATION METRICS
# ============================================================================

def roi(curve: EquityCurve, trading_days: int) -> float:
    """Annualized return (final / initial) ** (365 / trading_days) - 1"""
    if trading_days < 1:
        raise InvalidParameterError(f"trading_days must be >= 1, got {trading_days}")
    with np.errstate(over="ignore"):
        growth = np.power(curve.final / curve.initial, config.DAYS_PER_YEAR / trading_days)
    return float(growth - 1.0)


def sharpe_from_daily(daily) -> float:
    """Accumulated daily log return over the population std of daily returns"""
    daily = np.asarray(daily, dtype=np.float64)
    if daily.size < 2:
        raise TooFewDaysError(f"Sharpe needs >= 2 calendar days, got {daily.size}")
    sigma = daily.std()
    if sigma < config.ZERO_VOLATILITY_TOLERANCE:
        raise ZeroVolatilityError("daily returns have zero volatility")
    return float(daily.sum() / sigma)


def sharpe(curve: EquityCurve) -> float:
    """
    Sharpe ratio on UTC-daily log returns.

    Raises:
        TooFewDaysError: the curve spans fewer than 2 calendar days
        ZeroVolatilityError: every day returned the same amount
    """
    return sharpe_from_daily(daily_returns(curve).to_numpy())


def max_drawdown(curve: EquityCurve) -> float:
    """Lowest balance as a fraction of the initial one, minus 1 (always <= 0)"""
    if len(curve) == 0:
        raise SeriesTooShortError("max drawdown of an empty curve")
    return float(curve.balance.min() / curve.initial - 1.0)


def average_position(positions: PositionSeries) -> float:
    """Mean absolute position, in [0, 1]"""
    if len(positions) == 0:
        raise SeriesTooShortError("average position of an empty series")
    return float(np.abs(positions.values).mean())


def build_report(strategy: str, curve: EquityCurve, positions: PositionSeries,
                 per_period: ReturnInput) -> PerformanceReport:
    """
    Assemble the comparison row for one strategy.

    Args:
        strategy: Row label
        curve: Equity curve at the row's leverage
        positions: Positions that produced the curve
        per_period: Unleveraged strategy returns (SSR input)

    An undefined Sharpe ratio (too few days, zero volatility) is reported as
    NaN with a warning.
    """
    days = trading_days(curve)
    try:
        sharpe_ratio = sharpe(curve)
    except (TooFewDaysError, ZeroVolatilityError) as e:
        logger.warning(f"{strategy}: Sharpe ratio undefined ({e})")
        sharpe_ratio = float("nan")

    return PerformanceReport(
        strategy=strategy,
        leverage=float(curve.leverage),
        roi=roi(curve, days),
        sharpe=sharpe_ratio,
        max_drawdown=max_drawdown(curve),
        avg_position=average_position(positions),
        ssr=ssr(per_period),
        total_log_return=float(math.log(curve.final / curve.initial)),
        trading_days=days,
    )
