"""
Application Configuration
Central configuration file for the RoboTrading toolkit
"""

import os
from pathlib import Path

# ============================================================================
# APPLICATION INFO
# ============================================================================
APP_NAME = "RoboTrading"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = (
    "Rule-feature engineering, grid search, genetic weighting and "
    "zero-fee backtesting for intraday forex candles"
)

# ============================================================================
# PATHS
# ============================================================================
# Application root directory
BASE_DIR = Path(__file__).parent

# User data directory (overridable for CI and tests)
USER_HOME = Path.home()
APP_DATA_DIR = Path(os.environ.get("ROBOTRADING_HOME", USER_HOME / APP_NAME))

# Logs
LOGS_DIR = APP_DATA_DIR / "logs"

# Default output directory for optimization artifacts and reports
DEFAULT_OUTPUT_DIR = Path("runs")

# Committed example run configuration
EXAMPLE_RUN_CONFIG = BASE_DIR / "configs" / "example_run.json"

# ============================================================================
# LOGGING SETTINGS
# ============================================================================
LOG_LEVEL = os.environ.get("ROBOTRADING_LOG_LEVEL", "INFO")  # DEBUG, INFO, WARNING, ERROR
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_TO_FILE = os.environ.get("ROBOTRADING_LOG_TO_FILE", "1") != "0"
MAX_LOG_FILES = 5
MAX_LOG_SIZE_MB = 10

# ============================================================================
# DATA SETTINGS
# ============================================================================
CSV_COLUMNS = ["timestamp", "open", "high", "low", "close"]
PRICE_DECIMALS = 6

# 5-minute bars
DEFAULT_BAR_INTERVAL = 300

# Spacing checks skip gaps larger than this many intervals (weekends, holidays)
SESSION_GAP_FACTOR = 2

DEFAULT_TRAIN_FRACTION = 0.5

# Synthetic generator: per-bar log drift and volatility per regime
SYNTHETIC_START_PRICE = 1.15
SYNTHETIC_START_TIMESTAMP = 1514764800  # 2018-01-01 00:00:00 UTC
SYNTHETIC_REGIMES = {
    "trend-up": {"drift": 2e-5, "volatility": 4e-4, "reversion": 0.0},
    "trend-down": {"drift": -2e-5, "volatility": 4e-4, "reversion": 0.0},
    "mean-revert": {"drift": 0.0, "volatility": 4e-4, "reversion": 0.05},
    "random-walk": {"drift": 0.0, "volatility": 4e-4, "reversion": 0.0},
}
SYNTHETIC_WICK_SCALE = 2e-4

# ============================================================================
# METRIC SETTINGS
# ============================================================================
SSR_EPSILON = 1e-12
ZERO_VOLATILITY_TOLERANCE = 1e-15
DAYS_PER_YEAR = 365
INITIAL_BALANCE = 1.0

# ============================================================================
# GENETIC ALGORITHM DEFAULTS
# ============================================================================
GA_POPULATION_SIZE = 10
GA_PARENTS_MATING = 4
GA_GENERATIONS = 200
GA_MUTATION_PROB = 0.5
GA_CROSSOVER_PROB = 0.4
GA_MUTATION_STEP = 0.2
GA_INIT_LOW = -1.0
GA_INIT_HIGH = 1.0
GA_ELITE_COUNT = 1

# ============================================================================
# BACKTEST SETTINGS
# ============================================================================
DEFAULT_LEVERAGE = [1.0]

# ============================================================================
# RULE CATALOG
# ============================================================================
# Windows searched from 1 to 100; multi-window rules with three parameters use
# a step of 5 so the grid stays tractable.
WINDOWS = list(range(1, 101))
WINDOWS_BAND = list(range(2, 101))
WINDOWS_COARSE = list(range(5, 101, 5))
THRESHOLDS = list(range(5, 100, 5))
BAND_MULTIPLIERS = [1.0, 1.5, 2.0, 2.5, 3.0]

# Ordered catalog: column i of the feature matrix is the i-th entry.
RULE_CATALOG = {
    "close_x_sma": {
        "category": 1,
        "description": "Close crosses simple moving average",
        "grid": {"window": WINDOWS},
    },
    "sma_fast_x_slow": {
        "category": 1,
        "description": "Fast SMA crosses slow SMA",
        "grid": {"fast": WINDOWS, "slow": WINDOWS},
    },
    "close_x_ema": {
        "category": 1,
        "description": "Close crosses exponential moving average",
        "grid": {"window": WINDOWS},
    },
    "ema_fast_x_slow": {
        "category": 1,
        "description": "Fast EMA crosses slow EMA",
        "grid": {"fast": WINDOWS, "slow": WINDOWS},
    },
    "close_x_dema": {
        "category": 1,
        "description": "Close crosses double exponential moving average",
        "grid": {"window": WINDOWS},
    },
    "close_x_tema": {
        "category": 1,
        "description": "Close crosses triple exponential moving average",
        "grid": {"window": WINDOWS},
    },
    "stoch_k_x_d": {
        "category": 1,
        "description": "Stochastic %K crosses %D",
        "grid": {"k_window": WINDOWS, "d_window": list(range(1, 21))},
    },
    "vortex_plus_x_minus": {
        "category": 1,
        "description": "VI+ crosses VI-",
        "grid": {"window": WINDOWS},
    },
    "rsi_x_level": {
        "category": 2,
        "description": "RSI against the 50 level",
        "grid": {"window": WINDOWS, "threshold": [50]},
    },
    "stoch_k_x_level": {
        "category": 2,
        "description": "Stochastic %K against the 50 level",
        "grid": {"k_window": WINDOWS, "threshold": [50]},
    },
    "rsi_band": {
        "category": 3,
        "description": "RSI above upper / below lower threshold",
        "grid": {"window": WINDOWS_COARSE, "hi": THRESHOLDS, "lo": THRESHOLDS},
    },
    "stoch_k_band": {
        "category": 3,
        "description": "Stochastic %K above upper / below lower threshold",
        "grid": {"k_window": WINDOWS_COARSE, "hi": THRESHOLDS, "lo": THRESHOLDS},
    },
    "close_x_bollinger": {
        "category": 4,
        "description": "Close against Bollinger bands",
        "grid": {"window": WINDOWS_BAND, "k": BAND_MULTIPLIERS},
    },
    "close_x_keltner": {
        "category": 4,
        "description": "Close against Keltner channel",
        "grid": {"window": WINDOWS, "k": BAND_MULTIPLIERS},
    },
    "close_x_cloud": {
        "category": 4,
        "description": "Close against the Ichimoku cloud (Senkou A / B, ordered per bar)",
        "grid": {"tenkan": WINDOWS_COARSE, "kijun": WINDOWS_COARSE, "senkou_b": WINDOWS_COARSE},
    },
    "sma_x_bollinger": {
        "category": 4,
        "description": "SMA of close against Bollinger bands",
        "grid": {"sma_window": WINDOWS_COARSE, "window": WINDOWS_COARSE, "k": BAND_MULTIPLIERS},
    },
}

CATALOG_SIZE = 16

# ============================================================================
# WORKERS
# ============================================================================
# 0 means "one worker per physical core"
DEFAULT_WORKERS = 0

# ============================================================================
# EXIT CODES
# ============================================================================
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_DATA_ERROR = 2
EXIT_MISSING_ARTIFACTS = 3
EXIT_NUMERIC_FAILURE = 4
