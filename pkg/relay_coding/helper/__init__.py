"""Helpers shared across relay_coding modules"""

from .log import setup_logging, level_from_flags, progress_enabled, LOG_FORMAT

__all__ = ["setup_logging", "level_from_flags", "progress_enabled", "LOG_FORMAT"]
