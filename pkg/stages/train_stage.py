# stages/train_stage.py
import logging

from core.stage_interface import Stage, performance_log
from core.surrogate import TrainingSet, train_surrogate
from core.task_manager import TaskManager
from data.archive import pack_surrogate, unpack_surrogate
from data.reports import write_loss_history
from stages.context import SURROGATE_ARCHIVE

logger = logging.getLogger(__name__)

LOSS_HISTORY_CSV = "loss_history.csv"


def usable_L_list(L_list, basis):
    """Entries of L_list that the basis supports."""
    usable = [L for L in L_list if L <= basis.L]
    dropped = [L for L in L_list if L > basis.L]
    if dropped:
        logger.warning(f"Basis has only {basis.L} columns; skipping L={dropped}")
    return usable


def _prefix(L):
    return f"L{L}/"


class TrainStage(Stage):
    """One POD-NN per requested basis size L."""

    requires = ("snapshots", "pod")

    def __init__(self):
        super().__init__("train", "Trains the POD-NN surrogates on the projected training snapshots")

    def restore(self, context):
        archive = context.load(SURROGATE_ARCHIVE, "surrogate")
        if archive is None:
            return False
        L_list = archive["surrogates"]["L_list"]
        context.artifacts["surrogates"] = {L: unpack_surrogate(archive, _prefix(L)) for L in L_list}
        logger.info(f"[{self.name}] Restored surrogates for L={L_list}")
        return True

    @performance_log
    def run(self, context):
        config = context.config
        nn = config.nn
        train_config = config.train_config()
        snapshots = context.artifacts["train_snapshots"]
        basis = context.artifacts["basis"]
        L_list = usable_L_list(config.L_list, basis)

        manager = TaskManager(context.workers)
        for L in L_list:
            training_set = TrainingSet.from_snapshots(snapshots.params.points, snapshots.data, basis.truncate(L))
            manager.add_task(
                train_surrogate, training_set, nn["D"], nn["H"], train_config, nn["separate"], nn["standardize"],
                task_id=f"train-L{L}",
            )
        results = manager.run_all()

        surrogates = {L: surrogate for L, (surrogate, _) in zip(L_list, results)}
        histories = {L: history for L, (_, history) in zip(L_list, results)}

        records = {"surrogates": {"L_list": L_list, "D": nn["D"], "H": nn["H"]}}
        for L, surrogate in surrogates.items():
            records.update(pack_surrogate(surrogate, _prefix(L)))
        context.save(SURROGATE_ARCHIVE, records, "surrogate")
        write_loss_history(context.path(LOSS_HISTORY_CSV), histories)

        context.artifacts["surrogates"] = surrogates
        final = {L: float(h[-1][-1]) for L, h in histories.items() if h}
        return self.format_result("success", {"L_list": L_list, "final_loss": final})
