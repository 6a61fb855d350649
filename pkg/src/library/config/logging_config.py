import logging
import logging.config
from typing import Any

DIAGNOSTIC = 18
PROGRESS = 15


def get_logging_config(logging_level: str | int) -> dict[str, Any]:
    """
    Return the logging config of all scripts.

    A single handler writes to stdout; library code logs to the root
    logger.

    :param logging_level: Logging level to use, as name or number.
    :return: Logging config for use with ``logging.config.dictConfig``.
    """
    # yapf: disable
    logging_config = {
        "version": 1,
        "formatters": {
            "stdout": {
                "format": "%(asctime)s - %(levelname)s: %(message)s"
            }
        },
        "handlers": {
            "base":
                {
                    "class": "logging.StreamHandler",
                    "level": logging_level,
                    "formatter": "stdout",
                    "stream": "ext://sys.stdout"
                }
        },
        "root": {
            "level": logging_level, "handlers": ["base"]
        },
    }
    # yapf: enable
    return logging_config


def configure(logging_level: str | int) -> None:
    """
    Set up logging and register the custom levels.

    :param logging_level: Logging level to use.
    """
    logging.addLevelName(DIAGNOSTIC, "DIAGNOSTIC")
    logging.addLevelName(PROGRESS, "PROGRESS")
    logging.config.dictConfig(get_logging_config(logging_level))


def change_level(logging_level: str | int) -> None:
    """
    Change the level of the root logger and all of its handlers.

    :param logging_level: Logging level, either as name or as integer.
    """
    root_logger = logging.getLogger("root")
    root_logger.setLevel(logging_level)
    for handler in root_logger.handlers:
        handler.setLevel(logging_level)
