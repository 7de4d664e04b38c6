import logging
import sys

from walsh.config.settings import get_settings


def get_logger(name: str = "walsh") -> logging.Logger:
    """
    Get the logger for the service

    Args:
        name (str): Logger name, usually the calling module's __name__.

    Returns:
        logger: The logger for the service
    """
    # diagnostics go to stderr, stdout is reserved for records
    logging.basicConfig(
        level=get_settings().log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    return logging.getLogger(name)


def set_level(level: int | str) -> None:
    logging.getLogger("walsh").setLevel(level)
