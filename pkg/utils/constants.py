"""
Constants and Enumerations
Centralized constants for the toolkit
"""

from enum import Enum, auto


# ============================================================================
# ENUMS
# ============================================================================

class Regime(Enum):
    """Synthetic market regimes"""
    TREND_UP = "trend-up"
    TREND_DOWN = "trend-down"
    MEAN_REVERT = "mean-revert"
    RANDOM_WALK = "random-walk"


class MAKind(Enum):
    """Moving average flavours"""
    SMA = "SMA"
    EMA = "EMA"
    DEMA = "DEMA"
    TEMA = "TEMA"


class FitnessKind(Enum):
    """Genetic algorithm fitness functions"""
    MR = "MR"        # maximize total return
    MSSR = "MSSR"    # maximize Sharpe-and-Sterling ratio


class StrategyKind(Enum):
    """Strategies the backtester can run"""
    BUY_HOLD = "B&H"
    SELL_HOLD = "S&H"
    GA_MR = "GA-MR"
    GA_MSSR = "GA-MSSR"
    FIXED_WEIGHTS = "FixedWeights"


class StageStatus(Enum):
    """Status of a pipeline stage"""
    IDLE = auto()
    RUNNING = auto()
    COMPLETED = auto()
    ERROR = auto()


# ============================================================================
# SIGNAL VALUES
# ============================================================================

LONG = 1
NEUTRAL = 0
SHORT = -1


# ============================================================================
# ARTIFACT FILE NAMES
# ============================================================================

GRID_RESULTS_JSON = "grid_results.json"
GRID_SCORES_CSV = "grid_scores.csv"
CHROMOSOME_JSON = "chromosome_{fitness}.json"
FITNESS_TRACE_CSV = "fitness_trace_{fitness}.csv"
FEATURES_CSV = "features_train.csv"
COMPARISON_CSV = "comparison_L{leverage}.csv"
COMPARISON_TXT = "comparison_L{leverage}.txt"
EQUITY_CSV = "equity_{strategy}_L{leverage}.csv"
COMPARISON_XLSX = "comparison.xlsx"


# ============================================================================
# REPORT LAYOUT
# ============================================================================

REPORT_COLUMNS = ["strategy", "leverage", "roi", "sharpe", "max_drawdown",
                  "avg_position", "ssr", "total_log_return", "trading_days"]
REPORT_HEADERS = {
    "strategy": "Model",
    "leverage": "Lev",
    "roi": "ROI",
    "sharpe": "SR",
    "max_drawdown": "MD",
    "avg_position": "AP",
    "ssr": "SSR",
    "total_log_return": "LogRet",
    "trading_days": "Days",
}


# ============================================================================
# STATUS MESSAGES
# ============================================================================

STATUS_GRID_SEARCH = "Grid-searching rule parameters..."
STATUS_EVOLVING = "Evolving feature weights..."
STATUS_BACKTESTING = "Backtesting strategies..."


# ============================================================================
# ERROR MESSAGES
# ============================================================================

ERROR_BAD_HEADER = "Expected header 'timestamp,open,high,low,close'"
ERROR_EMPTY_FILE = "Candle file is empty"
ERROR_MISSING_ARTIFACTS = "Optimization artifacts missing: {}"
ERROR_SEED_REQUIRED = "A seed is required (--seed or 'seed' in the run config)"
