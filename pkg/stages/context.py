# stages/context.py
import logging
import os

from config import WORKERS
from core.errors import ArchiveError, ProvenanceError
from data.archive import load_archive, save_archive

logger = logging.getLogger(__name__)

SNAPSHOT_ARCHIVE = "snapshots.wrom"
BASIS_ARCHIVE = "basis.wrom"
SURROGATE_ARCHIVE = "surrogate.wrom"


class RunContext:
    """State shared by the stages of one pipeline run: config, output directory and in-memory artifacts."""

    def __init__(self, config, output_dir=None, workers=None):
        self.config = config
        self.output_dir = output_dir or config.output_dir
        self.workers = workers or WORKERS
        self.artifacts = {}
        self._problem = None
        os.makedirs(self.output_dir, exist_ok=True)

    @property
    def problem(self):
        if self._problem is None:
            self._problem = self.config.build_problem()
            logger.info(f"Built problem {self._problem.describe()}")
        return self._problem

    def path(self, filename):
        return os.path.join(self.output_dir, filename)

    def fingerprint(self, stage):
        return self.config.fingerprint(stage)

    def save(self, filename, records, stage):
        save_archive(self.path(filename), records, self.fingerprint(stage))

    def load(self, filename, stage):
        """Archive built under the current config, or None when absent, stale or unreadable."""
        path = self.path(filename)
        if not os.path.exists(path):
            return None
        try:
            return load_archive(path, expected_hash=self.fingerprint(stage))
        except ProvenanceError as e:
            logger.warning(f"{filename} is stale ({e}); rebuilding")
        except ArchiveError as e:
            logger.warning(f"{filename} is unreadable ({e}); rebuilding")
        return None
