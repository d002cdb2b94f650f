# stages/pod_stage.py
import logging

from core.pod import centered_pod
from core.stage_interface import Stage, performance_log
from data.archive import pack_basis, unpack_basis
from data.reports import write_singular_values
from stages.context import BASIS_ARCHIVE

logger = logging.getLogger(__name__)

SINGULAR_VALUES_CSV = "singular_values.csv"


class PodStage(Stage):
    """Reduced basis from the training snapshots."""

    requires = ("snapshots",)

    def __init__(self):
        super().__init__("pod", "Computes the (centered) POD basis of the training snapshots")

    def restore(self, context):
        archive = context.load(BASIS_ARCHIVE, "basis")
        if archive is None:
            return False
        context.artifacts["basis"] = unpack_basis(archive)
        logger.info(f"[{self.name}] Restored basis of size L={context.artifacts['basis'].L}")
        return True

    @performance_log
    def run(self, context):
        pod = context.config.pod
        snapshots = context.artifacts["train_snapshots"]
        basis = centered_pod(
            snapshots,
            L=pod["L"],
            tolerance=pod["tolerance"],
            centered=pod["centered"],
            method=pod["method"],
        )
        context.save(BASIS_ARCHIVE, pack_basis(basis), "basis")
        write_singular_values(context.path(SINGULAR_VALUES_CSV), basis.singular_values)

        context.artifacts["basis"] = basis
        logger.info(f"[{self.name}] Basis size L={basis.L} of rank {basis.rank}")
        return self.format_result("success", {"L": basis.L, "rank": basis.rank})
