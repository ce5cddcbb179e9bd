import functools
import sys

from utils.logger import setup_logger

logger = setup_logger(__name__)


def domain_errors():
    """Every exception a command reports as a usage problem (exit status 2)."""
    from config import ConfigError
    from grammar import ParseError
    from lattice import LatticeWindowError, ZeroNormError
    from ncalg import RewriteBoundExceeded, SpaceMismatchError, UnknownGeneratorError, UnsupportedSpaceError
    from phasespace import MissingRMatrixError
    from qexp import SingularSystemError
    from spaces import UnknownSpaceError
    from suites import UnknownSuiteError

    return (
        ConfigError,
        ParseError,
        LatticeWindowError,
        ZeroNormError,
        RewriteBoundExceeded,
        SpaceMismatchError,
        UnknownGeneratorError,
        UnsupportedSpaceError,
        MissingRMatrixError,
        SingularSystemError,
        UnknownSpaceError,
        UnknownSuiteError,
    )


def command_boundary(func):
    """Logs domain errors and exits with status 2."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except domain_errors() as e:
            logger.error(f"{type(e).__name__}: {e}")
            sys.exit(2)

    return wrapper
