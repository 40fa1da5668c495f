"""Console logging setup shared by the CLI and the runners"""

import logging
import sys

import colorlog

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'red,bg_white',
}


def setup_logging(level: int = logging.WARNING, stream=None) -> logging.Logger:
    """Attach one coloured console handler to the ``relay_coding`` logger.

    Calling it again only changes the level; handlers are never duplicated.
    """
    log = logging.getLogger('relay_coding')
    handler = None
    for existing in log.handlers:
        if getattr(existing, '_relay_coding_console', False):
            handler = existing
            break
    if handler is None:
        handler = colorlog.StreamHandler(stream or sys.stderr)
        handler.setFormatter(colorlog.ColoredFormatter(
            '%(log_color)s' + LOG_FORMAT,
            log_colors=_LOG_COLORS,
        ))
        handler._relay_coding_console = True
        log.addHandler(handler)
    log.setLevel(level)
    log.propagate = False
    return log


def level_from_flags(debug: bool = False, info: bool = False) -> int:
    """Map the ``--debug`` / ``--info`` flag pair to a logging level"""
    if debug:
        return logging.DEBUG
    if info:
        return logging.INFO
    return logging.WARNING


def progress_enabled() -> bool:
    """Progress bars are shown only when INFO messages would be"""
    return logging.getLogger('relay_coding').isEnabledFor(logging.INFO)
