"""
RoboTrading - Main Entry Point
Command-line toolkit: ingest candles, grid-search rules, evolve feature
weights, backtest against buy-and-hold / sell-and-hold
"""

import sys
from pathlib import Path

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

import config
from cli.commands import main as run_cli
from utils.logger import get_logger, log_info


# Initialize logger
logger = get_logger(__name__)


def main():
    """Main application entry point"""
    log_info("=" * 80)
    log_info(f"{config.APP_NAME} v{config.APP_VERSION}")
    log_info("=" * 80)

    exit_code = run_cli(sys.argv[1:])
    log_info(f"Exiting with code {exit_code}")
    sys.exit(exit_code)


if __name__ == "__main__":
    import multiprocessing
    multiprocessing.freeze_support()
    multiprocessing.set_start_method("spawn", force=True)
    main()
