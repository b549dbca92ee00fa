"""
Shared pytest fixtures
"""

import os

# Keep test runs out of the user's log directory
os.environ.setdefault("ROBOTRADING_LOG_TO_FILE", "0")

import numpy as np
import pytest

from core.data.data_ingest import CandleSeries, synthesize
from utils.constants import Regime


START = 1514764800  # 2018-01-01 00:00:00 UTC


def _candles_from_closes(closes, interval=300, start=START, pair="TEST", spread=0.0):
    closes = np.asarray(closes, dtype=np.float64)
    opens = np.concatenate(([closes[0]], closes[:-1]))
    high = np.maximum(opens, closes) * (1.0 + spread)
    low = np.minimum(opens, closes) * (1.0 - spread)
    timestamps = start + interval * np.arange(len(closes))
    return CandleSeries(pair=pair, timestamps=timestamps, open=opens, high=high,
                        low=low, close=closes, bar_interval=interval)


@pytest.fixture
def make_candles():
    """Factory: candles whose open is the previous close"""
    return _candles_from_closes


@pytest.fixture
def trend_candles():
    return synthesize(seed=3, n=600, regime=Regime.TREND_UP, pair="EURUSD")


@pytest.fixture
def walk_candles():
    return synthesize(seed=5, n=600, regime=Regime.RANDOM_WALK, pair="GBPUSD")


@pytest.fixture
def write_text(tmp_path):
    """Factory: write text into a file under tmp_path and return its path"""
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def rule_params():
    """A fixed parameter choice for every catalog rule"""
    return {
        "close_x_sma": {"window": 10},
        "sma_fast_x_slow": {"fast": 5, "slow": 20},
        "close_x_ema": {"window": 10},
        "ema_fast_x_slow": {"fast": 5, "slow": 20},
        "close_x_dema": {"window": 10},
        "close_x_tema": {"window": 10},
        "stoch_k_x_d": {"k_window": 14, "d_window": 3},
        "vortex_plus_x_minus": {"window": 14},
        "rsi_x_level": {"window": 14, "threshold": 50},
        "stoch_k_x_level": {"k_window": 14, "threshold": 50},
        "rsi_band": {"window": 14, "hi": 70, "lo": 30},
        "stoch_k_band": {"k_window": 14, "hi": 80, "lo": 20},
        "close_x_bollinger": {"window": 20, "k": 2.0},
        "close_x_keltner": {"window": 20, "k": 2.0},
        "close_x_cloud": {"tenkan": 9, "kijun": 26, "senkou_b": 52},
        "sma_x_bollinger": {"sma_window": 5, "window": 20, "k": 2.0},
    }
