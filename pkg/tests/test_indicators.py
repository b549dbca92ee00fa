"""Tests for the technical indicators."""

import math

import numpy as np
import pytest

from core.errors import InvalidParameterError, InvalidWindowOrderError, WindowExceedsSeriesError
from core.indicators.technical_indicators import (
    atr,
    bollinger,
    ichimoku,
    indicator_frame,
    keltner,
    moving_average,
    rsi,
    stochastic,
    vortex,
)
from utils.constants import MAKind


class TestMovingAverage:
    """SMA / EMA / DEMA / TEMA."""

    def test_sma_values_and_warmup(self):
        sma = moving_average([1, 2, 3, 4, 5], 3)
        assert sma.warmup == 2
        np.testing.assert_allclose(sma.defined, [2.0, 3.0, 4.0])
        assert np.isnan(sma.values[:2]).all()

    def test_ema_seeded_by_sma(self):
        ema = moving_average([1, 2, 3, 4, 5], 3, MAKind.EMA)
        assert ema.warmup == 2
        np.testing.assert_allclose(ema.defined, [2.0, 3.0, 4.0])

    def test_ema_window_one_is_identity(self):
        values = [1.0, 3.0, 2.0, 5.0]
        np.testing.assert_allclose(moving_average(values, 1, "EMA").values, values)

    @pytest.mark.parametrize("kind, warmup", [(MAKind.SMA, 2), (MAKind.EMA, 2),
                                              (MAKind.DEMA, 4), (MAKind.TEMA, 6)])
    def test_constant_series(self, kind, warmup):
        ma = moving_average(np.full(20, 1.25), 3, kind)
        assert ma.warmup == warmup
        np.testing.assert_allclose(ma.defined, 1.25)

    def test_composed_average_on_short_series_is_undefined(self):
        tema = moving_average([1.0, 2.0, 3.0], 3, MAKind.TEMA)
        assert tema.warmup == 3
        assert np.isnan(tema.values).all()

    def test_window_longer_than_series(self):
        with pytest.raises(WindowExceedsSeriesError):
            moving_average([1.0, 2.0], 3)

    @pytest.mark.parametrize("window", [0, -1, 2.5])
    def test_invalid_window(self, window):
        with pytest.raises(InvalidParameterError):
            moving_average([1.0, 2.0, 3.0], window)

    def test_values_are_read_only(self):
        sma = moving_average([1, 2, 3], 2)
        with pytest.raises(ValueError):
            sma.values[0] = 1.0


class TestRsi:
    """Wilder RSI."""

    def test_worked_example(self):
        out = rsi([1.0, 2.0, 1.0, 2.0], 2)
        assert out.warmup == 2
        assert out.values[2] == pytest.approx(50.0)
        assert out.values[3] == pytest.approx(75.0)

    def test_rising_series_reads_100(self):
        assert rsi(np.arange(1.0, 30.0), 14).defined == pytest.approx(100.0)

    def test_falling_series_reads_0(self):
        assert rsi(np.arange(30.0, 1.0, -1.0), 14).defined == pytest.approx(0.0)

    def test_flat_series_reads_50(self):
        assert rsi(np.full(30, 1.1), 14).defined == pytest.approx(50.0)

    def test_bounded(self, walk_candles):
        values = rsi(walk_candles.close, 14).defined
        assert values.min() >= 0.0
        assert values.max() <= 100.0


class TestStochastic:
    """%K and %D."""

    def test_close_at_high_reads_100(self, make_candles):
        k_line, d_line = stochastic(make_candles([1.0, 2.0, 3.0]), 2, 2)
        assert k_line.warmup == 1
        np.testing.assert_allclose(k_line.defined, [100.0, 100.0])
        assert d_line.values[2] == pytest.approx(100.0)

    def test_flat_window_reads_50(self, make_candles):
        k_line, _ = stochastic(make_candles(np.full(10, 1.2)), 3, 1)
        np.testing.assert_allclose(k_line.defined, 50.0)

    def test_bounded(self, walk_candles):
        k_line, d_line = stochastic(walk_candles, 14, 3)
        for line in (k_line, d_line):
            assert line.defined.min() >= 0.0
            assert line.defined.max() <= 100.0


class TestBands:
    """Bollinger bands, ATR and Keltner channel."""

    def test_bollinger_worked_example(self):
        upper, middle, lower = bollinger([1.0, 2.0, 3.0], 3, 2.0)
        sigma = math.sqrt(2.0 / 3.0)
        assert middle.values[2] == pytest.approx(2.0)
        assert upper.values[2] == pytest.approx(2.0 + 2.0 * sigma)
        assert lower.values[2] == pytest.approx(2.0 - 2.0 * sigma)

    def test_bollinger_constant_series_collapses(self):
        upper, middle, lower = bollinger(np.full(10, 1.3), 4, 2.0)
        np.testing.assert_allclose(upper.defined, middle.defined)
        np.testing.assert_allclose(lower.defined, middle.defined)

    def test_bollinger_needs_two_bars(self):
        with pytest.raises(InvalidParameterError):
            bollinger([1.0, 2.0, 3.0], 1, 2.0)

    @pytest.mark.parametrize("k", [0.0, -1.0])
    def test_non_positive_multiplier(self, k):
        with pytest.raises(InvalidParameterError):
            bollinger([1.0, 2.0, 3.0], 2, k)

    def test_atr_first_true_range_is_bar_range(self, make_candles):
        candles = make_candles([1.0, 1.0, 1.0], spread=0.01)
        out = atr(candles, 1)
        assert out.values[0] == pytest.approx(candles.high[0] - candles.low[0])

    def test_keltner_ordering(self, walk_candles):
        upper, middle, lower = keltner(walk_candles, 20, 2.0)
        assert np.all(upper.defined >= middle.defined)
        assert np.all(middle.defined >= lower.defined)


class TestVortexAndIchimoku:
    """Vortex indicator and Ichimoku lines."""

    def test_vortex_flat_candles_read_one(self, make_candles):
        vi_plus, vi_minus = vortex(make_candles(np.full(10, 1.1)), 3)
        assert vi_plus.warmup == 3
        np.testing.assert_allclose(vi_plus.defined, 1.0)
        np.testing.assert_allclose(vi_minus.defined, 1.0)

    def test_vortex_uptrend_favours_plus(self, make_candles):
        vi_plus, vi_minus = vortex(make_candles(np.linspace(1.0, 2.0, 30), spread=0.001), 5)
        assert np.all(vi_plus.defined > vi_minus.defined)

    def test_ichimoku_window_order(self, walk_candles):
        with pytest.raises(InvalidWindowOrderError):
            ichimoku(walk_candles, 26, 9, 52)

    def test_ichimoku_midpoints(self, make_candles):
        candles = make_candles(np.arange(1.0, 11.0))
        tenkan, kijun, span_a, span_b = ichimoku(candles, 2, 3, 4)
        # high = close, low = previous close on a rising series
        assert tenkan.values[9] == pytest.approx((10.0 + 8.0) / 2)
        assert kijun.values[9] == pytest.approx((10.0 + 7.0) / 2)
        assert span_a.values[9] == pytest.approx((tenkan.values[9] + kijun.values[9]) / 2)
        assert span_b.values[9] == pytest.approx((10.0 + 6.0) / 2)
        assert span_b.warmup == 3


def test_indicator_frame_has_every_indicator(walk_candles):
    frame = indicator_frame(walk_candles)
    expected = {"sma_20", "ema_20", "dema_20", "tema_20", "rsi", "stoch_k", "stoch_d",
                "vi_plus", "vi_minus", "bb_upper", "bb_middle", "bb_lower",
                "kc_upper", "kc_middle", "kc_lower", "tenkan_sen", "kijun_sen",
                "senkou_a", "senkou_b"}
    assert expected <= set(frame.columns)
    assert len(frame) == len(walk_candles)
