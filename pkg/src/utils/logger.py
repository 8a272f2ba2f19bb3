"""
Logging configuration for the newsbot pipeline
"""
import logging
import sys
from typing import Optional, Union

PACKAGE_LOGGER = "src"


def _configure(logger: logging.Logger, level: Union[int, str, None]) -> None:
    if level is None:
        from src.config.settings import LOG_LEVEL
        level = LOG_LEVEL
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    logger.setLevel(level)

    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(level)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    handler.setFormatter(formatter)

    logger.addHandler(handler)


def setup_logger(name: Optional[str] = None, level: Union[int, str, None] = None) -> logging.Logger:
    """
    Set up and configure a logger for the application.

    Module loggers under the package share the package logger's handler;
    any other name gets a handler of its own.

    Args:
        name: Name of the logger (defaults to the package logger)
        level: Logging level (defaults to settings.LOG_LEVEL)

    Returns:
        Configured logger instance
    """
    package = logging.getLogger(PACKAGE_LOGGER)
    # Avoid adding multiple handlers if logger already configured
    if not package.handlers:
        _configure(package, level)

    if not name or name == PACKAGE_LOGGER:
        return package
    logger = logging.getLogger(name)
    if not name.startswith(PACKAGE_LOGGER + ".") and not logger.handlers:
        _configure(logger, level)
    return logger
