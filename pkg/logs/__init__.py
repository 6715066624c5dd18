import logging
import os
import sys
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from constants.constants_value import LOG_FILE_ENV

logging_str = "[%(asctime)s: %(levelname)s: %(module)s: %(message)s]"

logger = logging.getLogger("nlinv")


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Route records to stderr (rich) and optionally to a plain log file."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handlers = [RichHandler(console=Console(file=sys.stderr), show_path=False, rich_tracebacks=False)]
    log_file = log_file or os.environ.get(LOG_FILE_ENV)
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(logging_str))
        handlers.append(file_handler)

    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level.upper())
