# config.py
import os
import logging
from dotenv import load_dotenv

load_dotenv()

# Output configuration
OUTPUT_DIR = os.getenv("ROM_OUTPUT_DIR", "runs")

# Worker pool configuration
WORKERS = max(1, int(os.getenv("ROM_WORKERS", 1)))

# Linear solver configuration
SOLVER_RTOL = float(os.getenv("ROM_SOLVER_RTOL", 1e-10))

# Logging configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_FILE = os.getenv("LOG_FILE", "rom_pipeline.log")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s'


def configure_logging(level=None, log_file=None):
    """Configure root logging with a console handler and an optional log file."""
    handlers = [logging.StreamHandler()]
    log_file = LOG_FILE if log_file is None else log_file
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level or LOG_LEVEL, logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )

    # Timing records go through their own logger, as in the web layer
    logging.getLogger("performance").setLevel(logging.INFO)
