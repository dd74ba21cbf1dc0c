"""Logging utilities for labourflow."""

import logging
import sys
from typing import Optional


LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
QUIET_LOGGERS = ('numexpr', 'matplotlib', 'urllib3')


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """Route log records to stderr and, optionally, a file.

    stdout is reserved for the JSON command summaries. Python warnings (numpy
    overflow, pandas dtype notices) are captured into the ``py.warnings`` logger.
    """
    log_level = getattr(logging, level.upper(), logging.INFO)
    formatter = logging.Formatter(LOG_FORMAT)

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    for handler in handlers:
        handler.setFormatter(formatter)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)
    logging.captureWarnings(True)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    return logging.getLogger('labourflow')
