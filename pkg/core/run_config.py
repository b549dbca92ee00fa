"""
Run Configuration
JSON run configuration: which pairs to trade, how to split them, grid
overrides, GA hyperparameters, leverage list, output directory and seed.

Example (see configs/example_run.json):

    {
      "pairs": {"EURUSD": {"path": "data/EURUSD_5m.csv"},
                "SYNTH": {"synthetic": {"seed": 7, "n": 4000, "regime": "trend-up"}}},
      "split": {"train_fraction": 0.5},
      "catalog": {"close_x_sma": {"window": [5, 10, 20]}},
      "ga": {"generations": 200},
      "leverage": [1, 20],
      "output_dir": "runs/example",
      "seed": 42
    }

Relative data paths resolve against the configuration file's directory.
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

import config
from core.data.data_ingest import CandleSeries, SplitSpec, load_csv, synthesize
from core.errors import ConfigError, MissingFileError
from core.optimize.genetic import GAConfig
from utils.constants import ERROR_SEED_REQUIRED, FitnessKind, Regime
from utils.logger import get_logger


logger = get_logger(__name__)

TOP_LEVEL_KEYS = {"pairs", "split", "catalog", "rules", "ga", "leverage",
                  "output_dir", "seed", "workers", "bar_interval"}
GA_KEYS = {"population_size", "parents_mating", "generations", "mutation_prob",
           "crossover_prob", "mutation_step"}
SYNTHETIC_KEYS = {"seed", "n", "regime"}


@dataclass(frozen=True)
class PairSource:
    """Where a pair's candles come from: a CSV file or the synthetic generator"""
    symbol: str
    path: Optional[Path] = None
    synthetic: Optional[Dict] = None

    def load(self, bar_interval: int) -> CandleSeries:
        if self.path is not None:
            return load_csv(self.path, self.symbol, bar_interval)
        spec = self.synthetic
        return synthesize(seed=spec["seed"], n=spec["n"], regime=spec["regime"],
                          pair=self.symbol, bar_interval=bar_interval)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration"""
    pairs: Dict[str, PairSource]
    split: SplitSpec = field(default_factory=SplitSpec)
    catalog: Dict[str, Dict[str, List[float]]] = field(default_factory=dict)
    rules: Optional[List[str]] = None
    ga: Dict = field(default_factory=dict)
    leverage: List[float] = field(default_factory=lambda: list(config.DEFAULT_LEVERAGE))
    output_dir: Path = config.DEFAULT_OUTPUT_DIR
    seed: Optional[int] = None
    workers: int = config.DEFAULT_WORKERS
    bar_interval: int = config.DEFAULT_BAR_INTERVAL

    def with_overrides(self, seed: Optional[int] = None, leverage: Optional[List[float]] = None,
                       output_dir=None, pair: Optional[str] = None) -> "RunConfig":
        """Apply command-line flags on top of the file values"""
        updated = self
        if seed is not None:
            updated = replace(updated, seed=int(seed))
        if leverage:
            updated = replace(updated, leverage=_leverage_list(leverage))
        if output_dir is not None:
            updated = replace(updated, output_dir=Path(output_dir))
        if pair is not None:
            if pair not in self.pairs:
                raise ConfigError(f"pair '{pair}' is not in the run config ({sorted(self.pairs)})")
            updated = replace(updated, pairs={pair: self.pairs[pair]})
        return updated

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(ERROR_SEED_REQUIRED)
        return self.seed

    def ga_settings(self, fitness: FitnessKind) -> GAConfig:
        return GAConfig(seed=self.require_seed(), fitness=fitness, **self.ga)

    def pair_dir(self, symbol: str) -> Path:
        return Path(self.output_dir) / symbol


# ============================================================================
# LOADING
# ============================================================================

def _leverage_list(values) -> List[float]:
    try:
        leverage = [float(v) for v in values]
    except (TypeError, ValueError):
        raise ConfigError(f"leverage must be a list of numbers, got {values!r}")
    if not leverage or any(not v > 0 for v in leverage):
        raise ConfigError(f"leverage values must be > 0, got {values!r}")
    return leverage


def _reject_unknown(section: str, data: Dict, allowed):
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {section}: {sorted(unknown)}")


def _parse_pair(symbol: str, entry, base_dir: Path) -> PairSource:
    if not isinstance(entry, dict) or len(entry) != 1 or not set(entry) <= {"path", "synthetic"}:
        raise ConfigError(f"pair {symbol}: give exactly one of 'path' or 'synthetic'")
    if "path" in entry:
        path = Path(entry["path"])
        return PairSource(symbol, path=path if path.is_absolute() else base_dir / path)

    synthetic = entry["synthetic"]
    if not isinstance(synthetic, dict):
        raise ConfigError(f"pair {symbol}: 'synthetic' must be an object")
    _reject_unknown(f"pairs.{symbol}.synthetic", synthetic, SYNTHETIC_KEYS)
    missing = SYNTHETIC_KEYS - set(synthetic)
    if missing:
        raise ConfigError(f"pair {symbol}: synthetic source missing {sorted(missing)}")
    try:
        Regime(synthetic["regime"])
    except ValueError:
        raise ConfigError(f"pair {symbol}: unknown regime '{synthetic['regime']}'")
    return PairSource(symbol, synthetic=dict(synthetic))


def parse_run_config(data: Dict, base_dir: Path = Path(".")) -> RunConfig:
    """Validate a decoded JSON document"""
    if not isinstance(data, dict):
        raise ConfigError("run config must be a JSON object")
    _reject_unknown("run config", data, TOP_LEVEL_KEYS)

    pairs = data.get("pairs")
    if not isinstance(pairs, dict) or not pairs:
        raise ConfigError("run config needs at least one entry under 'pairs'")
    sources = {symbol: _parse_pair(symbol, entry, base_dir) for symbol, entry in pairs.items()}

    split = data.get("split", {})
    _reject_unknown("split", split, {"train_fraction"})

    catalog = data.get("catalog", {})
    if not isinstance(catalog, dict):
        raise ConfigError("'catalog' must map rule ids to grid overrides")
    unknown_rules = set(catalog) - set(config.RULE_CATALOG)
    if unknown_rules:
        raise ConfigError(f"catalog overrides for unknown rules: {sorted(unknown_rules)}")

    rules = data.get("rules")
    if rules is not None:
        unknown_rules = set(rules) - set(config.RULE_CATALOG)
        if unknown_rules:
            raise ConfigError(f"unknown rules selected: {sorted(unknown_rules)}")

    ga = data.get("ga", {})
    _reject_unknown("ga", ga, GA_KEYS)

    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")

    return RunConfig(
        pairs=sources,
        split=SplitSpec(**split),
        catalog={rule: {p: list(v) for p, v in grid.items()} for rule, grid in catalog.items()},
        rules=list(rules) if rules is not None else None,
        ga=dict(ga),
        leverage=_leverage_list(data.get("leverage", config.DEFAULT_LEVERAGE)),
        output_dir=Path(data.get("output_dir", config.DEFAULT_OUTPUT_DIR)),
        seed=seed,
        workers=int(data.get("workers", config.DEFAULT_WORKERS)),
        bar_interval=int(data.get("bar_interval", config.DEFAULT_BAR_INTERVAL)),
    )


def load_run_config(path) -> RunConfig:
    """
    Load and validate a run configuration file.

    Raises:
        MissingFileError: the file does not exist
        ConfigError: invalid JSON, unknown keys or bad values
    """
    path = Path(path)
    if not path.exists():
        raise MissingFileError(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})")
    run_config = parse_run_config(data, base_dir=path.parent)
    logger.debug(f"Run config loaded from {path}: pairs={sorted(run_config.pairs)}")
    return run_config
