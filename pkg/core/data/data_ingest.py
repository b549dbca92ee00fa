"""
Candle Data Ingestion
Loads, validates, writes, splits and synthesizes OHLC candle series.

CSV layout is fixed: ``timestamp,open,high,low,close`` with integer UTC epoch
seconds and decimal prices. Session gaps (weekends) wider than
SESSION_GAP_FACTOR x bar interval are tolerated; any other spacing that
differs from the declared interval is an invariant violation.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

import config
from core.errors import (
    InvalidParameterError,
    InvariantViolationError,
    MalformedRowError,
    MissingFileError,
    NonMonotonicTimestampError,
    RowError,
    SeriesTooShortError,
)
from utils.constants import ERROR_BAD_HEADER, ERROR_EMPTY_FILE, Regime
from utils.logger import get_logger


logger = get_logger(__name__)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class Candle:
    """One OHLC bar"""
    timestamp: int
    open: float
    high: float
    low: float
    close: float


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CandleSeries:
    """
    Ordered candles of one pair, stored column-wise.

    Arrays are read-only; slicing returns a new series sharing no mutable state.
    """
    pair: str
    timestamps: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    bar_interval: int = config.DEFAULT_BAR_INTERVAL

    def __post_init__(self):
        object.__setattr__(self, "timestamps", _frozen(self.timestamps, np.int64))
        for name in ("open", "high", "low", "close"):
            object.__setattr__(self, name, _frozen(getattr(self, name), np.float64))
        n = len(self.timestamps)
        if any(len(getattr(self, c)) != n for c in ("open", "high", "low", "close")):
            raise InvalidParameterError("candle columns must have equal length")

    @classmethod
    def from_candles(cls, pair: str, bars: List[Candle],
                     bar_interval: int = config.DEFAULT_BAR_INTERVAL) -> "CandleSeries":
        return cls(
            pair=pair,
            timestamps=[b.timestamp for b in bars],
            open=[b.open for b in bars],
            high=[b.high for b in bars],
            low=[b.low for b in bars],
            close=[b.close for b in bars],
            bar_interval=bar_interval,
        )

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def bars(self) -> List[Candle]:
        return [self[i] for i in range(len(self))]

    def __getitem__(self, index: int) -> Candle:
        return Candle(
            timestamp=int(self.timestamps[index]),
            open=float(self.open[index]),
            high=float(self.high[index]),
            low=float(self.low[index]),
            close=float(self.close[index]),
        )

    def slice(self, start: int, stop: Optional[int] = None) -> "CandleSeries":
        """Contiguous sub-series [start, stop)"""
        return CandleSeries(
            pair=self.pair,
            timestamps=self.timestamps[start:stop],
            open=self.open[start:stop],
            high=self.high[start:stop],
            low=self.low[start:stop],
            close=self.close[start:stop],
            bar_interval=self.bar_interval,
        )

    def equals(self, other: "CandleSeries") -> bool:
        return (
            self.pair == other.pair
            and self.bar_interval == other.bar_interval
            and np.array_equal(self.timestamps, other.timestamps)
            and all(np.array_equal(getattr(self, c), getattr(other, c))
                    for c in ("open", "high", "low", "close"))
        )


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/test split"""
    train_fraction: float = config.DEFAULT_TRAIN_FRACTION

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidParameterError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}"
            )


@dataclass
class IngestSummary:
    """Result of scanning a candle file end to end"""
    path: Path
    bars: int = 0
    gaps: int = 0
    max_gap_seconds: int = 0
    violations: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and self.bars > 0


# ============================================================================
# CSV READING
# ============================================================================

def _check_candle(line: int, ts: int, o: float, h: float, l: float, c: float):
    if not all(math.isfinite(p) for p in (o, h, l, c)):
        raise InvariantViolationError(line, "prices must be finite")
    if min(o, h, l, c) <= 0:
        raise InvariantViolationError(line, "prices must be positive")
    if l > min(o, c):
        raise InvariantViolationError(line, f"low {l} above min(open, close)")
    if h < max(o, c):
        raise InvariantViolationError(line, f"high {h} below max(open, close)")


def _scan_csv(path: Path, bar_interval: int, collect: bool):
    """
    Parse and validate every row of a candle file.

    Returns (rows, issues, gaps, max_gap). With ``collect`` False the first
    issue is raised instead of recorded.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFileError(path)

    rows = []
    issues: List[RowError] = []
    gaps = 0
    max_gap = 0

    def record(error: RowError):
        if not collect:
            raise error
        issues.append(error)

    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            record(MalformedRowError(1, ERROR_EMPTY_FILE))
            return rows, issues, gaps, max_gap
        if [col.strip().lower() for col in header] != config.CSV_COLUMNS:
            record(MalformedRowError(1, ERROR_BAD_HEADER))
            return rows, issues, gaps, max_gap

        prev_ts = None
        for line, raw in enumerate(reader, start=2):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(config.CSV_COLUMNS):
                record(MalformedRowError(line, f"expected 5 fields, got {len(raw)}"))
                continue
            try:
                ts = int(raw[0].strip())
                o, h, l, c = (float(cell) for cell in raw[1:])
            except ValueError:
                record(MalformedRowError(line, f"unparseable row: {','.join(raw)}"))
                continue

            try:
                step = None if prev_ts is None else ts - prev_ts
                if step is not None and step <= 0:
                    raise NonMonotonicTimestampError(
                        line, f"timestamp {ts} not after {prev_ts}"
                    )
                _check_candle(line, ts, o, h, l, c)
                if step is not None and step != bar_interval:
                    if step <= config.SESSION_GAP_FACTOR * bar_interval:
                        raise InvariantViolationError(
                            line, f"spacing {step}s breaks the {bar_interval}s interval"
                        )
                    gaps += 1
                    max_gap = max(max_gap, step)
            except RowError as error:
                record(error)
                if not isinstance(error, NonMonotonicTimestampError):
                    prev_ts = ts
                continue

            rows.append((ts, o, h, l, c))
            prev_ts = ts

    return rows, issues, gaps, max_gap


def load_csv(path, pair: str, bar_interval: int = config.DEFAULT_BAR_INTERVAL) -> CandleSeries:
    """
    Load and validate a candle CSV.

    Args:
        path: CSV file with header ``timestamp,open,high,low,close``
        pair: Symbol identifier, e.g. "EURUSD"
        bar_interval: Declared bar spacing in seconds

    Returns:
        Validated CandleSeries

    Raises:
        MissingFileError, MalformedRowError, NonMonotonicTimestampError,
        InvariantViolationError, SeriesTooShortError (no data rows)
    """
    rows, _, gaps, _ = _scan_csv(Path(path), bar_interval, collect=False)
    if not rows:
        raise SeriesTooShortError(f"{path}: no candle rows")

    ts, o, h, l, c = zip(*rows)
    logger.debug(f"Loaded {len(rows)} bars for {pair} from {path} ({gaps} session gaps)")
    return CandleSeries(pair=pair, timestamps=ts, open=o, high=h, low=l, close=c,
                        bar_interval=bar_interval)


def validate_csv(path, bar_interval: int = config.DEFAULT_BAR_INTERVAL) -> IngestSummary:
    """Scan a whole candle file and report bar count, gaps and every violation"""
    rows, issues, gaps, max_gap = _scan_csv(Path(path), bar_interval, collect=True)
    summary = IngestSummary(path=Path(path), bars=len(rows), gaps=gaps, max_gap_seconds=max_gap)
    summary.violations = [(e.line, str(e)) for e in issues]
    if not rows and not issues:
        summary.violations.append((2, "no candle rows"))
    return summary


# ============================================================================
# CSV WRITING
# ============================================================================

def _format_price(value: float) -> str:
    text = f"{value:.{config.PRICE_DECIMALS}f}".rstrip("0")
    return text.rstrip(".") if text.endswith(".") else text


def write_csv(series: CandleSeries, path) -> Path:
    """Write a series in the canonical CSV layout"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(config.CSV_COLUMNS)
        for i in range(len(series)):
            writer.writerow([
                int(series.timestamps[i]),
                _format_price(series.open[i]),
                _format_price(series.high[i]),
                _format_price(series.low[i]),
                _format_price(series.close[i]),
            ])
    return path


def series_to_frame(series: CandleSeries) -> pd.DataFrame:
    """OHLC frame indexed by UTC timestamp"""
    index = pd.to_datetime(series.timestamps, unit="s", utc=True)
    return pd.DataFrame(
        {"open": series.open, "high": series.high, "low": series.low, "close": series.close},
        index=index,
    )


# ============================================================================
# SPLIT
# ============================================================================

def split(series: CandleSeries, spec: SplitSpec = SplitSpec()) -> Tuple[CandleSeries, CandleSeries]:
    """
    Chronological split; the training segment gets floor(train_fraction * N) bars.

    Raises:
        SeriesTooShortError: fewer than 2 bars, or a segment would be empty
    """
    n = len(series)
    if n < 2:
        raise SeriesTooShortError(f"cannot split a series of {n} bar(s)")
    cut = math.floor(spec.train_fraction * n)
    if cut == 0 or cut == n:
        raise SeriesTooShortError(
            f"train_fraction {spec.train_fraction} leaves an empty segment for N={n}"
        )
    return series.slice(0, cut), series.slice(cut)


# ============================================================================
# SYNTHETIC DATA
# ============================================================================

def synthesize(seed: int, n: int, regime, pair: str = "SYNTH",
               bar_interval: int = config.DEFAULT_BAR_INTERVAL,
               start_price: float = config.SYNTHETIC_START_PRICE,
               start_timestamp: int = config.SYNTHETIC_START_TIMESTAMP) -> CandleSeries:
    """
    Deterministic synthetic candles.

    Close follows a geometric random walk in log price with the regime's drift
    and volatility (mean-revert adds a pull back toward the start price).
    Open is the previous close; high/low extend max/min(open, close) by a
    half-normal wick. Prices are rounded to PRICE_DECIMALS so a CSV round trip
    is exact.

    Args:
        seed: RNG seed
        n: Number of bars (>= 1)
        regime: Regime or its string value
    """
    if n < 1:
        raise InvalidParameterError(f"bar count must be >= 1, got {n}")
    regime = Regime(regime)
    params = config.SYNTHETIC_REGIMES[regime.value]
    rng = np.random.default_rng(seed)

    shocks = rng.standard_normal(n)
    wick_up = np.abs(rng.standard_normal(n)) * config.SYNTHETIC_WICK_SCALE
    wick_down = np.abs(rng.standard_normal(n)) * config.SYNTHETIC_WICK_SCALE

    anchor = math.log(start_price)
    log_close = np.empty(n)
    level = anchor
    for t in range(n):
        level = (level + params["drift"] - params["reversion"] * (level - anchor)
                 + params["volatility"] * shocks[t])
        log_close[t] = level

    decimals = config.PRICE_DECIMALS
    close = np.round(np.exp(log_close), decimals)
    open_ = np.concatenate(([round(start_price, decimals)], close[:-1]))
    high = np.round(np.maximum(open_, close) * np.exp(wick_up), decimals)
    low = np.round(np.minimum(open_, close) * np.exp(-wick_down), decimals)
    timestamps = start_timestamp + bar_interval * np.arange(n, dtype=np.int64)

    return CandleSeries(pair=pair, timestamps=timestamps, open=open_, high=high,
                        low=low, close=close, bar_interval=bar_interval)
