import logging
import colorlog
import sys

from config import Config

ROOT = "qspace"


def _root():
    """The one logger that owns a handler; module loggers hang below it."""
    root = logging.getLogger(ROOT)
    if root.handlers:
        return root

    root.setLevel(Config.LOG_LEVEL.upper())
    root.propagate = False

    # stderr, so command results on stdout stay pipeable
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s",
        reset=True,
        log_colors={
            'DEBUG':    'cyan',
            'INFO':     'green',
            'WARNING':  'yellow',
            'ERROR':    'red',
            'CRITICAL': 'red,bg_white',
        },
    ))
    root.addHandler(handler)
    return root


def setup_logger(name=ROOT, level=None):
    """
    Logger for a module, named qspace.<name>. Records go through the qspace handler;
    LOG_LEVEL and --log-level set the level there, an explicit level overrides it here.
    """
    root = _root()
    if name == ROOT:
        logger = root
    else:
        logger = root.getChild(name.removeprefix(ROOT + "."))
    if level is not None:
        logger.setLevel(level)
    return logger


def set_level(level):
    _root().setLevel(level)
