"""Tests for the logging setup."""

import logging
import sys

from utils.logger import APP_LOGGER_NAME, get_logger


def test_child_loggers_share_the_app_handlers():
    child = get_logger("core.metrics")
    assert child.name == f"{APP_LOGGER_NAME}.core.metrics"
    assert not child.handlers
    assert child.propagate


def test_console_output_stays_off_stdout():
    app_logger = get_logger()
    consoles = [h for h in app_logger.handlers
                if isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)]
    assert len(consoles) == 1
    assert consoles[0].stream is not sys.stdout
    assert consoles[0].stream is not sys.__stdout__
