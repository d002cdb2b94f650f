# stages/snapshot_stage.py
import logging

from core.pod import assemble_snapshots
from core.stage_interface import Stage, performance_log
from data.archive import pack_snapshots, unpack_snapshots
from data.reports import write_decay_coefficients
from stages.context import SNAPSHOT_ARCHIVE

logger = logging.getLogger(__name__)

DECAY_COEFFICIENTS_CSV = "coefficients.csv"


class SnapshotStage(Stage):
    """High-fidelity solutions at the Halton training set and the Latin Hypercube test set."""

    def __init__(self):
        super().__init__("snapshots", "Solves the full-order problem at every training and test parameter")

    def restore(self, context):
        archive = context.load(SNAPSHOT_ARCHIVE, "snapshots")
        if archive is None:
            return False
        context.artifacts["train_snapshots"] = unpack_snapshots(archive, "train/")
        context.artifacts["test_snapshots"] = unpack_snapshots(archive, "test/")
        self._write_coefficients(context)
        logger.info(f"[{self.name}] Restored {archive['train/snapshots'].shape[1]} training and "
                    f"{archive['test/snapshots'].shape[1]} test snapshots")
        return True

    @performance_log
    def run(self, context):
        config = context.config
        fingerprint = context.fingerprint("snapshots")
        problem = context.problem

        logger.info(f"[{self.name}] Solving {config.sampling['train']['count']} training problems")
        train = assemble_snapshots(problem, config.train_set(), fingerprint, context.workers)
        logger.info(f"[{self.name}] Solving {config.sampling['test']['count']} test problems")
        test = assemble_snapshots(problem, config.test_set(), fingerprint, context.workers)

        records = pack_snapshots(train, "train/")
        records.update(pack_snapshots(test, "test/"))
        context.save(SNAPSHOT_ARCHIVE, records, "snapshots")
        self._write_coefficients(context)

        context.artifacts["train_snapshots"] = train
        context.artifacts["test_snapshots"] = test
        return self.format_result("success", {"problem": problem.describe(), "train": train.shape, "test": test.shape})

    def _write_coefficients(self, context):
        """Deformation-mode amplitudes mu_j, the decay curve behind the snapshots."""
        write_decay_coefficients(context.path(DECAY_COEFFICIENTS_CSV), context.config.decay_spec().coefficients())
