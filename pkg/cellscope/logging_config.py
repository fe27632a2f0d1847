"""Console logging for the cellscope command line.

Everything under the ``cellscope`` logger goes to stderr so that report and
lint output on stdout stays machine readable. Worker processes inherit the
handler; the process name tells their records apart.
"""

import logging
import sys

HANDLER_NAME = "cellscope-console"
LOG_FORMAT = "%(asctime)s %(levelname)-7s %(processName)s %(name)s: %(message)s"
DATE_FORMAT = "%H:%M:%S"


def setup_logging(level: str | int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger("cellscope")
    for existing in list(logger.handlers):
        if existing.get_name() == HANDLER_NAME:
            logger.removeHandler(existing)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(HANDLER_NAME)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
