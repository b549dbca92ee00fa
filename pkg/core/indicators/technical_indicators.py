"""
Technical Indicators
Trend, momentum and volatility indicators computed from OHLC candles.

Every indicator is causal: the value at bar t only uses bars <= t. Undefined
warmup entries are NaN and form a leading prefix; IndicatorSeries.warmup
counts them. Rolling windows are evaluated window-locally (sliding views), so
truncating or prefixing the input never perturbs already-defined values.
"""

from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from core.data.data_ingest import CandleSeries, series_to_frame
from core.errors import InvalidParameterError, InvalidWindowOrderError, WindowExceedsSeriesError
from utils.constants import MAKind
from utils.logger import get_logger


logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class IndicatorSeries:
    """Indicator values aligned with the source candles; NaN marks warmup"""
    values: np.ndarray
    warmup: int

    def __len__(self) -> int:
        return len(self.values)

    @property
    def defined(self) -> np.ndarray:
        return self.values[self.warmup:]


PriceInput = Union[IndicatorSeries, np.ndarray, list, pd.Series]


# ============================================================================
# HELPERS
# ============================================================================

def _as_array(series: PriceInput) -> np.ndarray:
    if isinstance(series, IndicatorSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _finish(values: np.ndarray) -> IndicatorSeries:
    values = np.asarray(values, dtype=np.float64)
    undefined = np.isnan(values)
    warmup = len(values) if undefined.all() else int(np.argmin(undefined))
    values.setflags(write=False)
    return IndicatorSeries(values=values, warmup=warmup)


def _check_window(window: int, length: int, minimum: int = 1, name: str = "window"):
    if int(window) != window or window < minimum:
        raise InvalidParameterError(f"{name} must be an integer >= {minimum}, got {window}")
    if length == 0:
        raise WindowExceedsSeriesError(window, length)
    if window > length:
        raise WindowExceedsSeriesError(window, length)


def _check_multiplier(k: float):
    if not k > 0:
        raise InvalidParameterError(f"band multiplier must be > 0, got {k}")


def _rolling(values: np.ndarray, window: int, reducer) -> np.ndarray:
    """Apply ``reducer`` over each trailing window; the first window-1 entries are NaN"""
    out = np.full(len(values), np.nan)
    if window <= len(values):
        out[window - 1:] = reducer(sliding_window_view(values, window), axis=1)
    return out


def _first_defined(values: np.ndarray) -> int:
    defined = ~np.isnan(values)
    return int(np.argmax(defined)) if defined.any() else len(values)


def _smooth(values: np.ndarray, window: int, alpha: float) -> np.ndarray:
    """
    Recursive smoothing y_t = alpha*x_t + (1-alpha)*y_{t-1}, seeded with the mean
    of the first ``window`` defined inputs. Leading NaNs in the input are skipped.
    """
    n = len(values)
    first = _first_defined(values)
    seed_index = first + window - 1
    if seed_index >= n:
        return np.full(n, np.nan)
    seeded = values.copy()
    seeded[:seed_index] = np.nan
    seeded[seed_index] = values[first:seed_index + 1].mean()
    return pd.Series(seeded).ewm(alpha=alpha, adjust=False).mean().to_numpy()


def _ema_values(values: np.ndarray, window: int) -> np.ndarray:
    return _smooth(values, window, 2.0 / (window + 1))


def _wilder_values(values: np.ndarray, window: int) -> np.ndarray:
    return _smooth(values, window, 1.0 / window)


def _true_range(candles: CandleSeries) -> np.ndarray:
    """TR_t against the previous close; TR_0 is the first bar's range"""
    prev_close = np.concatenate(([np.nan], candles.close[:-1]))
    tr = np.fmax(candles.high, prev_close) - np.fmin(candles.low, prev_close)
    return tr


def _midpoint(candles: CandleSeries, window: int) -> np.ndarray:
    return (_rolling(candles.high, window, np.max) + _rolling(candles.low, window, np.min)) / 2.0


# ============================================================================
# TREND INDICATORS
# ============================================================================

def moving_average(series: PriceInput, window: int, kind=MAKind.SMA) -> IndicatorSeries:
    """
    SMA / EMA / DEMA / TEMA of a price series.

    EMA uses alpha = 2/(window+1) seeded by the SMA of the first window;
    DEMA = 2*EMA - EMA(EMA); TEMA = 3*EMA - 3*EMA(EMA) + EMA(EMA(EMA)).
    """
    values = _as_array(series)
    _check_window(window, len(values))
    kind = MAKind(kind)

    if kind is MAKind.SMA:
        return _finish(_rolling(values, window, np.mean))

    ema1 = _ema_values(values, window)
    if kind is MAKind.EMA:
        return _finish(ema1)
    ema2 = _ema_values(ema1, window)
    if kind is MAKind.DEMA:
        return _finish(2.0 * ema1 - ema2)
    ema3 = _ema_values(ema2, window)
    return _finish(3.0 * ema1 - 3.0 * ema2 + ema3)


def vortex(candles: CandleSeries, window: int) -> Tuple[IndicatorSeries, IndicatorSeries]:
    """
    Vortex indicator (VI+, VI-).

    A window whose true-range sum is zero (perfectly flat candles) reads 1.0
    on both lines.
    """
    _check_window(window, len(candles))
    prev_high = np.concatenate(([np.nan], candles.high[:-1]))
    prev_low = np.concatenate(([np.nan], candles.low[:-1]))
    prev_close = np.concatenate(([np.nan], candles.close[:-1]))

    vm_plus = np.abs(candles.high - prev_low)
    vm_minus = np.abs(candles.low - prev_high)
    tr = np.maximum(candles.high, prev_close) - np.minimum(candles.low, prev_close)

    sum_plus = _rolling(vm_plus, window, np.sum)
    sum_minus = _rolling(vm_minus, window, np.sum)
    sum_tr = _rolling(tr, window, np.sum)

    with np.errstate(divide="ignore", invalid="ignore"):
        flat = sum_tr == 0
        vi_plus = np.where(flat, 1.0, sum_plus / sum_tr)
        vi_minus = np.where(flat, 1.0, sum_minus / sum_tr)
    return _finish(vi_plus), _finish(vi_minus)


# ============================================================================
# MOMENTUM INDICATORS
# ============================================================================

def rsi(series: PriceInput, window: int) -> IndicatorSeries:
    """
    Wilder's relative strength index in [0, 100].

    Average gain/loss are smoothed with factor 1/window after an SMA seed over
    the first ``window`` changes. No losses reads 100, no gains reads 0, and a
    window with neither reads 50.
    """
    values = _as_array(series)
    _check_window(window, len(values))
    delta = np.concatenate(([np.nan], np.diff(values)))
    gains = np.clip(delta, 0.0, None)
    losses = np.clip(-delta, 0.0, None)

    avg_gain = _wilder_values(gains, window)
    avg_loss = _wilder_values(losses, window)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
    out = np.where(avg_loss == 0, np.where(avg_gain == 0, 50.0, 100.0), ratio)
    out = np.where(np.isnan(avg_gain), np.nan, out)
    return _finish(out)


def stochastic(candles: CandleSeries, k_window: int, d_window: int) -> Tuple[IndicatorSeries, IndicatorSeries]:
    """
    Stochastic oscillator %K and %D = SMA(%K, d_window).

    A flat look-back window (highest high == lowest low) reads 50.
    """
    _check_window(k_window, len(candles), name="k_window")
    _check_window(d_window, len(candles), name="d_window")
    lowest = _rolling(candles.low, k_window, np.min)
    highest = _rolling(candles.high, k_window, np.max)
    span = highest - lowest

    with np.errstate(divide="ignore", invalid="ignore"):
        k_line = np.where(span == 0, 50.0, 100.0 * (candles.close - lowest) / span)
    k_line = np.where(np.isnan(span), np.nan, k_line)
    d_line = _rolling(k_line, d_window, np.mean)
    return _finish(k_line), _finish(d_line)


# ============================================================================
# VOLATILITY INDICATORS
# ============================================================================

def bollinger(series: PriceInput, window: int, k: float) -> Tuple[IndicatorSeries, IndicatorSeries, IndicatorSeries]:
    """Bollinger bands: SMA +/- k x rolling population standard deviation"""
    values = _as_array(series)
    _check_window(window, len(values), minimum=2)
    _check_multiplier(k)
    middle = _rolling(values, window, np.mean)
    sigma = _rolling(values, window, np.std)
    return _finish(middle + k * sigma), _finish(middle), _finish(middle - k * sigma)


def atr(candles: CandleSeries, window: int) -> IndicatorSeries:
    """Average true range, Wilder-smoothed"""
    _check_window(window, len(candles))
    return _finish(_wilder_values(_true_range(candles), window))


def keltner(candles: CandleSeries, window: int, k: float) -> Tuple[IndicatorSeries, IndicatorSeries, IndicatorSeries]:
    """Keltner channel: EMA(close) +/- k x ATR"""
    _check_window(window, len(candles))
    _check_multiplier(k)
    middle = _ema_values(candles.close, window)
    half_width = k * _wilder_values(_true_range(candles), window)
    return _finish(middle + half_width), _finish(middle), _finish(middle - half_width)


def ichimoku(candles: CandleSeries, tenkan: int, kijun: int,
             senkou_b: int) -> Tuple[IndicatorSeries, IndicatorSeries, IndicatorSeries, IndicatorSeries]:
    """
    Ichimoku lines without forward displacement.

    Returns (tenkan_sen, kijun_sen, senkou_a, senkou_b); Senkou spans stay on
    the bar they are computed from.
    """
    if not 0 < tenkan <= kijun <= senkou_b:
        raise InvalidWindowOrderError(
            f"need 0 < tenkan <= kijun <= senkou_b, got {tenkan}, {kijun}, {senkou_b}"
        )
    for window in (tenkan, kijun, senkou_b):
        _check_window(window, len(candles))
    tenkan_sen = _midpoint(candles, tenkan)
    kijun_sen = _midpoint(candles, kijun)
    senkou_a = (tenkan_sen + kijun_sen) / 2.0
    senkou_b_line = _midpoint(candles, senkou_b)
    return _finish(tenkan_sen), _finish(kijun_sen), _finish(senkou_a), _finish(senkou_b_line)


# ============================================================================
# DEBUG DUMP
# ============================================================================

DUMP_PARAMS = {
    "ma_window": 20,
    "rsi_window": 14,
    "stoch_k": 14,
    "stoch_d": 3,
    "band_window": 20,
    "band_k": 2.0,
    "vortex_window": 14,
    "ichimoku": (9, 26, 52),
}


def indicator_frame(candles: CandleSeries, params: Dict = None) -> pd.DataFrame:
    """All indicators at fixed parameters as columns of one frame"""
    p = dict(DUMP_PARAMS, **(params or {}))
    frame = series_to_frame(candles)
    close = candles.close

    for kind in MAKind:
        frame[f"{kind.value.lower()}_{p['ma_window']}"] = moving_average(close, p["ma_window"], kind).values
    frame["rsi"] = rsi(close, p["rsi_window"]).values
    k_line, d_line = stochastic(candles, p["stoch_k"], p["stoch_d"])
    frame["stoch_k"], frame["stoch_d"] = k_line.values, d_line.values
    vi_plus, vi_minus = vortex(candles, p["vortex_window"])
    frame["vi_plus"], frame["vi_minus"] = vi_plus.values, vi_minus.values
    for prefix, bands in (("bb", bollinger(close, p["band_window"], p["band_k"])),
                          ("kc", keltner(candles, p["band_window"], p["band_k"]))):
        for suffix, band in zip(("upper", "middle", "lower"), bands):
            frame[f"{prefix}_{suffix}"] = band.values
    for name, line in zip(("tenkan_sen", "kijun_sen", "senkou_a", "senkou_b"),
                          ichimoku(candles, *p["ichimoku"])):
        frame[name] = line.values

    logger.debug(f"Indicator frame built: {frame.shape[1]} columns x {len(frame)} bars")
    return frame
