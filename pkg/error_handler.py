"""
Error handling and logging utilities for the fixed-point search toolkit
"""
import sys
import logging
from typing import Optional

from config import EXIT_CODES, ERROR_MESSAGES

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class FixedPointSearchError(Exception):
    """Base exception for the toolkit"""
    pass


class ValidationError(FixedPointSearchError):
    """Custom exception for invalid parameters

    Attributes:
        parameter: name of the offending parameter, as the CLI spells it
    """

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


class DomainError(FixedPointSearchError):
    """Valid input outside the domain where an operation has an answer"""
    pass


class SimulationError(FixedPointSearchError):
    """Custom exception for statevector simulation errors"""
    pass


class SweepSpecError(FixedPointSearchError):
    """Custom exception for invalid sweep specifications"""
    pass


class VerificationFailure(FixedPointSearchError):
    """Raised when the property battery reports at least one failure"""

    def __init__(self, failed):
        super().__init__(ERROR_MESSAGES["verification_failed"].format(failed=", ".join(failed)))
        self.failed = list(failed)


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None) -> logging.Logger:
    """
    Setup logging configuration

    Logs go to stderr so that stdout stays machine-readable.

    Args:
        level: Log level name
        log_file: Optional path of an additional log file

    Returns:
        logging.Logger: the root logger
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )

    return logging.getLogger()


def exit_code_for(error: Exception) -> int:
    """Map an exception to the process exit code"""
    if isinstance(error, VerificationFailure):
        return EXIT_CODES["verification_failed"]
    return EXIT_CODES["usage"]


def handle_error(error: Exception) -> str:
    """
    Handle toolkit errors and provide user-facing messages

    Args:
        error: Exception that occurred

    Returns:
        str: Message for stderr
    """
    if isinstance(error, ValidationError) and error.parameter:
        message = str(error)
        if error.parameter not in message:
            message = f"{error.parameter}: {message}"
        return f"error: {message}"
    elif isinstance(error, FixedPointSearchError):
        return f"error: {error}"
    else:
        logger.error(f"Unexpected error: {error}")
        return "error: " + ERROR_MESSAGES["unexpected"].format(error=error)
