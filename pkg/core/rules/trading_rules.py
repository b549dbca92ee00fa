"""
Crossover Trading Rules
The four rule categories that turn indicator series into ternary signals:

    1. series vs series       (+1 / -1, ties carry the previous signal)
    2. series vs threshold    (+1 / -1, ties carry the previous signal)
    3. series vs two thresholds (+1 above upper, -1 below lower, 0 between)
    4. series vs upper/lower series (+1 above upper, -1 below lower, 0 between)

Undefined (NaN) inputs always emit 0.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import pandas as pd

from core.errors import BandOrderViolationError, LengthMismatchError, ThresholdOrderViolationError
from core.indicators.technical_indicators import IndicatorSeries
from utils.constants import LONG, NEUTRAL, SHORT


SeriesInput = Union[IndicatorSeries, np.ndarray, list]


@dataclass(frozen=True, eq=False)
class SignalSeries:
    """Ternary {-1, 0, +1} signal aligned with the candles"""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int8)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def _values(series: SeriesInput) -> np.ndarray:
    if isinstance(series, IndicatorSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _same_length(*arrays: np.ndarray):
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise LengthMismatchError(f"series lengths differ: {sorted(lengths)}")


def _sign_with_carry(diff: np.ndarray) -> SignalSeries:
    """sign(diff); exact ties repeat the previous emitted value, undefined emits 0"""
    marked = np.sign(diff)
    marked = np.where(marked == 0, np.nan, marked)
    marked = np.where(np.isnan(diff), 0.0, marked)
    carried = pd.Series(marked).ffill().fillna(0.0).to_numpy()
    return SignalSeries(carried)


def _banded(a: np.ndarray, upper, lower) -> SignalSeries:
    with np.errstate(invalid="ignore"):
        out = np.where(a > upper, LONG, np.where(a < lower, SHORT, NEUTRAL))
    return SignalSeries(out)


# ============================================================================
# RULE CATEGORIES
# ============================================================================

def signal_cat1(a: SeriesInput, b: SeriesInput) -> SignalSeries:
    """Category 1: +1 where a > b, -1 where a < b"""
    a, b = _values(a), _values(b)
    _same_length(a, b)
    return _sign_with_carry(a - b)


def signal_cat2(a: SeriesInput, threshold: float) -> SignalSeries:
    """Category 2: +1 where a > threshold, -1 where a < threshold"""
    return _sign_with_carry(_values(a) - threshold)


def signal_cat3(a: SeriesInput, threshold_hi: float, threshold_lo: float) -> SignalSeries:
    """Category 3: +1 above threshold_hi, -1 below threshold_lo, 0 in between"""
    if not threshold_hi > threshold_lo:
        raise ThresholdOrderViolationError(
            f"upper threshold {threshold_hi} must exceed lower threshold {threshold_lo}"
        )
    return _banded(_values(a), threshold_hi, threshold_lo)


def signal_cat4(a: SeriesInput, upper: SeriesInput, lower: SeriesInput) -> SignalSeries:
    """Category 4: +1 above the upper series, -1 below the lower series, 0 in between"""
    a, upper, lower = _values(a), _values(upper), _values(lower)
    _same_length(a, upper, lower)
    with np.errstate(invalid="ignore"):
        crossed = np.flatnonzero(upper < lower)
    if crossed.size:
        raise BandOrderViolationError(int(crossed[0]))
    return _banded(a, upper, lower)
