"""Logging setup shared by the CLI entry point and the HTTP lifespan."""
import logging
import sys
from pathlib import Path

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def configure_logging(level: str = "INFO", log_file: Path | None = None) -> None:
    """
    Attach a stderr handler (plus a file handler when log_file is set) to the root
    logger. Calling again replaces the handlers installed here and leaves others alone.
    """
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, "_ervo", False)]:
        root.removeHandler(handler)
        handler.close()

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    formatter = logging.Formatter(_FORMAT)
    for handler in handlers:
        handler.setFormatter(formatter)
        handler._ervo = True
        root.addHandler(handler)
    root.setLevel(level.upper())
