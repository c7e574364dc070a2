import logging
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def setup_logging(log_dir: Optional[Path] = None, verbose: bool = False) -> logging.Logger:
    """
    Configure the root logger once: console handler plus an optional
    `<log_dir>/pbga.log` file handler.
    """
    logger = logging.getLogger()
    formatter = logging.Formatter(LOG_FORMAT)

    # Add handlers only if none exist (avoid duplicates across commands)
    if not logger.handlers:
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)

    if log_dir is not None:
        log_file = (Path(log_dir) / "pbga.log").resolve()
        known = {
            Path(h.baseFilename) for h in logger.handlers if isinstance(h, logging.FileHandler)
        }
        if log_file not in known:
            try:
                log_file.parent.mkdir(parents=True, exist_ok=True)
                file_handler = logging.FileHandler(log_file, encoding='utf-8')
                file_handler.setFormatter(formatter)
                logger.addHandler(file_handler)
            except OSError as e:
                logger.warning(f"Could not create log file: {e}")

    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return logger
