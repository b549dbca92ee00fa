"""
Logging Configuration
Centralized logging setup for the toolkit
"""

import logging
import sys
from datetime import datetime
from logging.handlers import RotatingFileHandler

import config


APP_LOGGER_NAME = "robotrading"


def setup_logger(name: str = None) -> logging.Logger:
    """
    Set up the application logger and return a logger for ``name``.

    Handlers are attached once, to the application logger; module loggers
    are its children and propagate to it.

    Args:
        name: Logger name (usually __name__ of the module)

    Returns:
        Configured logger instance
    """
    app_logger = logging.getLogger(APP_LOGGER_NAME)

    if not app_logger.handlers:
        app_logger.setLevel(logging.DEBUG)
        app_logger.propagate = False

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, config.LOG_LEVEL, logging.INFO))
        console_handler.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        app_logger.addHandler(console_handler)

        if config.LOG_TO_FILE:
            try:
                config.LOGS_DIR.mkdir(parents=True, exist_ok=True)
                log_file = config.LOGS_DIR / f"robotrading_{datetime.now().strftime('%Y%m%d')}.log"
                file_handler = RotatingFileHandler(
                    log_file,
                    maxBytes=config.MAX_LOG_SIZE_MB * 1024 * 1024,
                    backupCount=config.MAX_LOG_FILES,
                    encoding='utf-8'
                )
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(logging.Formatter(
                    config.LOG_FORMAT,
                    datefmt=config.LOG_DATE_FORMAT
                ))
                app_logger.addHandler(file_handler)
            except OSError as e:
                app_logger.warning(f"File logging disabled: {e}")

    if not name or name == APP_LOGGER_NAME:
        return app_logger
    return app_logger.getChild(name)


def get_logger(name: str = None) -> logging.Logger:
    """
    Get a logger instance (shorthand for setup_logger)

    Args:
        name: Logger name (usually __name__)

    Returns:
        Logger instance
    """
    return setup_logger(name)


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================

def log_banner(title: str, logger_name: str = None):
    """Log a title framed by separator lines"""
    logger = get_logger(logger_name)
    logger.info("=" * 80)
    logger.info(title)
    logger.info("=" * 80)


def log_info(message: str, logger_name: str = None):
    """Log an info message"""
    get_logger(logger_name).info(message)
