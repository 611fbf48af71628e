# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Console and file logging shared by the engines and the ``pfw`` command line.

The console carries the CLI's progress lines; the engines trace their routing at DEBUG, which
only reaches the log file unless ``PFW_LOG_LEVEL`` asks for it.
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_DIR_ENV = "PFW_LOG_DIR"
LOG_LEVEL_ENV = "PFW_LOG_LEVEL"
DEFAULT_LOG_DIR = Path("/tmp") / "pfw"
LOG_FILE_NAME = "pfw.log"

FILE_FORMAT = "%(asctime)s [%(levelname)s] [%(module)s:%(funcName)s] %(message)s"


class _ConsoleFormatter(logging.Formatter):
    """INFO records are command output and print bare; every other level carries its name."""

    _bare = logging.Formatter("%(message)s")

    def __init__(self) -> None:
        super().__init__("[%(levelname)s] %(message)s")

    def format(self, record: logging.LogRecord) -> str:  # noqa: A003
        if record.levelno == logging.INFO:
            return self._bare.format(record)
        return super().format(record)


def console_level() -> int:
    """
    Console level named by ``PFW_LOG_LEVEL``, INFO when unset.

    Raises:
        ValueError: If the variable does not name a logging level.
    """
    name = os.environ.get(LOG_LEVEL_ENV, "INFO").strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"{LOG_LEVEL_ENV}={name!r} is not a logging level")
    return level


def default_log_path() -> Path:
    """``pfw.log`` in ``PFW_LOG_DIR`` (default ``/tmp/pfw``); the directory is created."""
    log_dir = Path(os.environ.get(LOG_DIR_ENV) or DEFAULT_LOG_DIR)
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir / LOG_FILE_NAME


def setup_logger(
    name: str = "pseudofinite_workbench",
    log_file_path: str | None = None,
    file_log_level: int = logging.DEBUG,
    console_log_level: int | None = None,
) -> logging.Logger:
    """
    Set up a logger writing to stdout and to a rotating log file.

    Args:
        name: Name of the logger (module-level reuse).
        log_file_path: Optional path to a log file. Defaults to :func:`default_log_path`.
        file_log_level: Logging level for file logs (default: DEBUG).
        console_log_level: Logging level for console logs (default: :func:`console_level`).

    Returns:
        A configured logger.
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger  # Prevent adding duplicate handlers on reuse

    if console_log_level is None:
        console_log_level = console_level()
    logger.setLevel(min(console_log_level, file_log_level))

    stream_handler = logging.StreamHandler(sys.stdout)
    stream_handler.setLevel(console_log_level)
    stream_handler.setFormatter(_ConsoleFormatter())
    logger.addHandler(stream_handler)

    path = Path(log_file_path) if log_file_path else default_log_path()
    file_handler = RotatingFileHandler(path, maxBytes=5 * 1024 * 1024, backupCount=3)
    file_handler.setLevel(file_log_level)
    file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    logger.addHandler(file_handler)

    return logger
