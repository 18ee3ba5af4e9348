from config import config
import logging
import math


# ==============================================================================
# Logging Configuration
# ==============================================================================

_PROJECT_LOGGERS: set[str] = set()


def setup_logger(name: str) -> logging.Logger:
    """Create and configure a logger with time, function name, and severity.

    Args:
        name: Name of the logger (typically __name__).

    Returns:
        Configured logger instance.
    """
    logger = logging.getLogger(name)

    # Only configure if not already configured
    if not logger.handlers:
        level = getattr(logging, config.LOG_LEVEL, logging.INFO)
        logger.setLevel(level)

        # Create console handler
        handler = logging.StreamHandler()
        handler.setLevel(logging.DEBUG)

        # Create formatter with time, name, function, severity
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(funcName)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.propagate = False

    _PROJECT_LOGGERS.add(name)
    return logger


def set_log_level(level: int | str) -> None:
    """Apply a level to every logger created through setup_logger (used by --quiet)."""
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    for name in _PROJECT_LOGGERS:
        logging.getLogger(name).setLevel(level)


# ==============================================================================
# Parsing Utilities
# ==============================================================================

def parse_float_cell(val: str) -> float | None:
    """Convert a CSV cell to float, returning None when it is not a finite number.

    Examples:
        >>> parse_float_cell("2.5")
        2.5
        >>> parse_float_cell(" 3 ")
        3.0
        >>> parse_float_cell("nan") is None
        True
    """
    if val is None:
        return None
    v = str(val).strip()
    if not v:
        return None
    try:
        number = float(v)
    except ValueError:
        return None
    if not math.isfinite(number):
        return None
    return number


def parse_direction(val: str) -> int | None:
    """Parse a cue direction cell ('+1', '1', '-1').

    Examples:
        >>> parse_direction("+1")
        1
        >>> parse_direction("-1")
        -1
        >>> parse_direction("0") is None
        True
    """
    number = parse_float_cell(val)
    if number in (1.0, -1.0):
        return int(number)
    return None


def parse_bool(val: str | None) -> bool:
    """Interpret 'true'/'1'/'yes'/'on' as True."""
    if val is None:
        return False
    return str(val).strip().lower() in ('true', '1', 'yes', 'on')


# ==============================================================================
# Formatting Utilities
# ==============================================================================

def round_sig(value: float | None, digits: int = 6) -> float | None:
    """Round to a number of significant digits; None and non-finite pass through.

    Examples:
        >>> round_sig(0.123456789)
        0.123457
        >>> round_sig(1234567.0)
        1234570.0
    """
    if value is None or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def format_sig(value: float | None, digits: int = 6) -> str:
    """Render a float with a fixed number of significant digits ('' for None)."""
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def format_number(value: float) -> str:
    """Render integral floats without a decimal point, others exactly.

    Examples:
        >>> format_number(1.0)
        '1'
        >>> format_number(0.25)
        '0.25'
    """
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))
