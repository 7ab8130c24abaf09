"""Centralized logging configuration for homalgebroid."""

import logging
import logging.handlers
import os
from typing import Optional

from homalgebroid.config import load_config


class AlgebroidLogger:
    """Centralized logging manager; every module logger is a child of it."""

    _instance = None
    _initialized = False

    def __new__(cls, *args, **kwargs):
        """Singleton pattern implementation."""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, log_level: Optional[str] = None, log_file: Optional[str] = None):
        """Initialize the logger.

        Args:
            log_level: Level name (DEBUG, INFO, WARNING, ERROR, CRITICAL);
                defaults to ``app_config.log_level``.
            log_file: Path to log file; defaults to ``logging.file_path``.
        """
        if not self._initialized:
            config = load_config()
            self.settings = config.logging
            self.log_level = getattr(logging, (log_level or config.log_level).upper(), logging.INFO)
            self.log_file = log_file or self.settings.file_path
            self._setup_logging()
            self._initialized = True

    def _setup_logging(self):
        """Configure logging handlers and formatters."""
        self.logger = logging.getLogger('homalgebroid')
        self.logger.setLevel(self.log_level)
        self.logger.propagate = False

        detailed_formatter = logging.Formatter(self.settings.format, datefmt='%Y-%m-%d %H:%M:%S')
        simple_formatter = logging.Formatter('%(levelname)s - %(message)s')

        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(simple_formatter)
        self.logger.addHandler(console_handler)

        # File handler (rotated)
        try:
            directory = os.path.dirname(self.log_file)
            if directory:
                os.makedirs(directory, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                self.log_file,
                maxBytes=self.settings.max_file_size_mb * 1024 * 1024,
                backupCount=self.settings.backup_count,
            )
            file_handler.setLevel(self.log_level)
            file_handler.setFormatter(detailed_formatter)
            self.logger.addHandler(file_handler)
        except OSError as e:
            self.logger.warning("File logging disabled: %s", e)

    def set_level(self, level: str) -> None:
        """Change the level of the package logger and its file handler."""
        self.log_level = getattr(logging, level.upper(), logging.INFO)
        self.logger.setLevel(self.log_level)
        for handler in self.logger.handlers:
            if isinstance(handler, logging.handlers.RotatingFileHandler):
                handler.setLevel(self.log_level)

    def get_logger(self):
        """Get the configured logger instance.

        Returns:
            Logger instance.
        """
        return self.logger

    @staticmethod
    def get_instance():
        return AlgebroidLogger()


# Module-level logger initialization
logger = AlgebroidLogger().get_logger()


def log_error(message: str, exc_info=False):
    """Log error message.

    Args:
        message: Error message.
        exc_info: Include exception info.
    """
    logger.error(message, exc_info=exc_info)


def log_warning(message: str):
    logger.warning(message)


def log_info(message: str):
    logger.info(message)


def log_debug(message: str):
    logger.debug(message)
