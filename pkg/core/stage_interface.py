# core/stage_interface.py
from abc import ABC, abstractmethod
from contextlib import contextmanager
from functools import wraps
import logging
import time
import traceback

logger = logging.getLogger(__name__)
perf_logger = logging.getLogger("performance")


@contextmanager
def timed(label):
    """Log the wall-clock duration of a block to the performance logger."""
    start_time = time.perf_counter()
    try:
        yield
    except Exception:
        perf_logger.info(f"{label} failed after {time.perf_counter() - start_time:.2f} seconds")
        raise
    perf_logger.info(f"{label} completed in {time.perf_counter() - start_time:.2f} seconds")


def performance_log(method):
    """Decorator to log performance of stage methods."""
    @wraps(method)
    def wrapper(self, *args, **kwargs):
        label = f"[{self.name}] {method.__name__}"
        logger.debug(f"Starting {label}")
        try:
            with timed(label):
                return method(self, *args, **kwargs)
        except Exception as e:
            logger.error(f"Exception in {label}: {str(e)}")
            logger.error(traceback.format_exc())
            raise
    return wrapper


class Stage(ABC):
    """Base abstract class for all pipeline stages."""

    # Stages whose artifacts this stage reads
    requires = ()

    def __init__(self, name, description):
        self.name = name
        self.description = description

    @abstractmethod
    def run(self, context):
        """Compute the stage's artifacts, store them in the context and return a summary."""

    def restore(self, context):
        """Load persisted artifacts built under the current config; False when they must be rebuilt."""
        return False

    def format_result(self, status, data, message=""):
        """Standardized stage summary."""
        return {
            "stage": self.name,
            "status": status,
            "message": message,
            "data": data,
        }
