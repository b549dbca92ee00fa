"""
Command Line Interface
Subcommands: ingest, synthesize, optimize, backtest, report.

Each ``cmd_*`` function takes the parsed argparse namespace and returns a
process exit code; toolkit errors map to their own exit codes in ``main``.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import config
from core.backtest.backtest_summary import ComparisonSummaryGenerator
from core.data.data_ingest import load_csv, synthesize, validate_csv, write_csv
from core.errors import ConfigError, RoboTradingError
from core.indicators.technical_indicators import indicator_frame
from core.rules.rule_catalog import build_features, default_catalog, signal_matrix_to_csv
from core.run_config import load_run_config
from utils.constants import Regime
from utils.logger import get_logger, log_banner
from workers.pipeline_worker import PipelineWorker, load_artifacts


logger = get_logger(__name__)


def _parse_leverage(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid leverage list: {text}")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"leverage values must be > 0: {text}")
    return values


def _load_config(args):
    run_config = load_run_config(args.config)
    return run_config.with_overrides(
        seed=getattr(args, "seed", None),
        leverage=getattr(args, "leverage", None),
        output_dir=getattr(args, "out", None),
        pair=getattr(args, "pair", None),
    )


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_ingest(args) -> int:
    """Validate candle files and print bar counts, gaps and violations"""
    paths = [Path(p) for p in args.paths]
    if args.config:
        run_config = load_run_config(args.config)
        paths += [s.path for s in run_config.pairs.values() if s.path is not None]
    if not paths:
        raise ConfigError("nothing to ingest: pass CSV paths or --config with file-backed pairs")

    exit_code = config.EXIT_OK
    for path in paths:
        summary = validate_csv(path, args.bar_interval)
        print(f"{path}")
        print(f"  bars: {summary.bars}")
        print(f"  gaps: {summary.gaps} (max {summary.max_gap_seconds}s)")
        print(f"  violations: {len(summary.violations)}")
        for line, message in summary.violations:
            print(f"    {message}")
        if not summary.ok:
            exit_code = config.EXIT_DATA_ERROR

    if exit_code == config.EXIT_OK and (args.dump_indicators or args.dump_features):
        candles = load_csv(paths[0], args.pair or paths[0].stem, args.bar_interval)
        if args.dump_indicators:
            frame = indicator_frame(candles)
            frame.to_csv(args.dump_indicators, index_label="time")
            print(f"indicators written to {args.dump_indicators}")
        if args.dump_features:
            params = _artifact_params(args.artifacts)
            matrix = build_features(candles, default_catalog(), params)
            signal_matrix_to_csv(matrix, candles.timestamps, args.dump_features)
            print(f"features written to {args.dump_features}")
    return exit_code


def _artifact_params(artifacts_dir: Optional[str]):
    if not artifacts_dir:
        raise ConfigError("--dump-features needs --artifacts <pair output dir> with grid_results.json")
    params, _ = load_artifacts(Path(artifacts_dir), default_catalog())
    return params


def cmd_synthesize(args) -> int:
    """Write a deterministic synthetic candle CSV"""
    candles = synthesize(seed=args.seed, n=args.n, regime=args.regime,
                         pair=args.pair or "SYNTH", bar_interval=args.bar_interval)
    path = write_csv(candles, args.out)
    print(f"wrote {len(candles)} bars to {path}")
    return config.EXIT_OK


def cmd_optimize(args) -> int:
    """Grid search + GA-MR/GA-MSSR evolution on each pair's training segment"""
    run_config = _load_config(args)
    run_config.require_seed()
    worker = PipelineWorker(run_config)
    for pair in run_config.pairs:
        log_banner(f"OPTIMIZE {pair}")
        for path in worker.optimize(pair):
            print(path)
    return config.EXIT_OK


def cmd_backtest(args) -> int:
    """B&H / S&H / GA-MR / GA-MSSR comparison on each pair's test segment"""
    run_config = _load_config(args)
    worker = PipelineWorker(run_config)
    for pair in run_config.pairs:
        log_banner(f"BACKTEST {pair}")
        summary = worker.backtest(pair)
        print(f"== {pair}")
        print(summary.render_all())
    return config.EXIT_OK


def cmd_report(args) -> int:
    """Re-render persisted comparison tables without re-running anything"""
    run_config = _load_config(args)
    for pair in run_config.pairs:
        summary = ComparisonSummaryGenerator(run_config.pair_dir(pair))
        summary.load_tables()
        summary.write_workbook()
        print(f"== {pair}")
        print(summary.render_all())
    return config.EXIT_OK


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robotrading", description=config.APP_DESCRIPTION)
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="validate candle CSV files")
    ingest.add_argument("paths", nargs="*", help="candle CSV files")
    ingest.add_argument("--config", help="run config; its file-backed pairs are validated too")
    ingest.add_argument("--pair", help="symbol for the dumped series")
    ingest.add_argument("--bar-interval", type=int, default=config.DEFAULT_BAR_INTERVAL)
    ingest.add_argument("--dump-indicators", metavar="PATH", help="write all indicators of the first file")
    ingest.add_argument("--dump-features", metavar="PATH", help="write the rule feature matrix of the first file")
    ingest.add_argument("--artifacts", metavar="DIR", help="pair output directory holding grid_results.json")
    ingest.set_defaults(func=cmd_ingest)

    synth = sub.add_parser("synthesize", help="write synthetic candles")
    synth.add_argument("--regime", choices=[r.value for r in Regime], default=Regime.TREND_UP.value)
    synth.add_argument("--n", type=int, default=5000)
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--pair", default="SYNTH")
    synth.add_argument("--bar-interval", type=int, default=config.DEFAULT_BAR_INTERVAL)
    synth.add_argument("--out", required=True, help="output CSV path")
    synth.set_defaults(func=cmd_synthesize)

    for name, func, text in (("optimize", cmd_optimize, "grid search and evolve on the training split"),
                             ("backtest", cmd_backtest, "compare strategies on the test split"),
                             ("report", cmd_report, "re-render persisted comparison tables")):
        command = sub.add_parser(name, help=text)
        command.add_argument("--config", required=True, help="run config JSON")
        command.add_argument("--out", help="output directory (overrides output_dir)")
        command.add_argument("--pair", help="restrict to one configured pair")
        if name == "optimize":
            command.add_argument("--seed", type=int, help="RNG seed (required here or in the config)")
        if name == "backtest":
            command.add_argument("--leverage", type=_parse_leverage, help="comma-separated, e.g. 1,20")
        command.set_defaults(func=func)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command, map errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RoboTradingError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in '{args.command}': {e}")
        print(f"error: {e}", file=sys.stderr)
        return config.EXIT_UNEXPECTED
