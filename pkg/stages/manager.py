# stages/manager.py
import logging
import traceback

import numpy as np

from core.errors import ArgumentError, RomError, StageError
from core.galerkin import galerkin_pod_solve
from core.pod import reconstruct
from core.stage_interface import timed
from core.surrogate import predict_solution
from stages.bench_stage import BenchStage
from stages.context import RunContext
from stages.eval_stage import EvalStage
from stages.pod_stage import PodStage
from stages.snapshot_stage import SnapshotStage
from stages.train_stage import TrainStage

logger = logging.getLogger(__name__)

OFFLINE_STAGES = ("snapshots", "pod", "train")
PIPELINE_STAGES = OFFLINE_STAGES + ("eval",)

HF = "hf"
GPOD = "gpod"
PODNN = "podnn"
METHODS = (HF, GPOD, PODNN)


class PipelineManager:
    """
    Coordinates the pipeline stages. Each stage first tries to restore its
    persisted artifacts; only stale or missing artifacts are rebuilt.
    """

    def __init__(self, config, output_dir=None, workers=None):
        self.context = RunContext(config, output_dir, workers)
        self.stages = {stage.name: stage for stage in (
            SnapshotStage(), PodStage(), TrainStage(), EvalStage(), BenchStage(),
        )}
        self.completed = {}

    def ensure(self, name, force=False):
        """Make the artifacts of stage `name` (and its prerequisites) available."""
        if name not in self.stages:
            raise ArgumentError(f"Unknown stage '{name}', expected one of {list(self.stages)}")
        if name in self.completed and not force:
            return self.completed[name]

        stage = self.stages[name]
        for dependency in stage.requires:
            self.ensure(dependency)

        try:
            if not force and stage.restore(self.context):
                summary = stage.format_result("restored", {})
            else:
                logger.info(f"[{name}] Running: {stage.description}")
                summary = stage.run(self.context)
        except RomError as e:
            logger.error(f"[{name}] Stage failed: {str(e)}")
            logger.error(traceback.format_exc())
            raise StageError(name, e) from e
        except Exception as e:
            logger.error(f"[{name}] Unexpected failure: {str(e)}")
            logger.error(traceback.format_exc())
            raise StageError(name, e) from e

        self.completed[name] = summary
        return summary

    def run_pipeline(self):
        """snapshots -> pod -> train -> eval; returns the ErrorReport."""
        with timed("Pipeline"):
            for name in PIPELINE_STAGES:
                self.ensure(name)
        return self.context.artifacts["report"]

    def solve(self, y, method=PODNN, L=None):
        """Online query at y with the high-fidelity, G-POD or POD-NN solver."""
        if method not in METHODS:
            raise ArgumentError(f"Unknown method '{method}', expected one of {METHODS}")
        problem = self.context.problem
        y = problem.check_parameter(y)
        if method == HF:
            return problem.solve_hf(y)

        self.ensure("pod")
        basis = self.context.artifacts["basis"]
        if method == GPOD:
            sub = basis.truncate(basis.L if L is None else L)
            return reconstruct(galerkin_pod_solve(problem, y, sub), sub)

        self.ensure("train")
        surrogates = self.context.artifacts["surrogates"]
        L = max(surrogates) if L is None else L
        if L not in surrogates:
            raise ArgumentError(f"No trained surrogate for L={L}; available: {sorted(surrogates)}")
        return predict_solution(surrogates[L], y, basis.truncate(L))


def run_pipeline(config, output_dir=None, workers=None):
    """Run all offline stages and the evaluation; returns (ErrorReport, manager)."""
    manager = PipelineManager(config, output_dir, workers)
    return manager.run_pipeline(), manager


def parse_parameter(text, J):
    """Parameter point from a file (whitespace/comma separated) or an inline comma list."""
    try:
        with open(text, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError:
        pass
    try:
        values = np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError as e:
        raise ArgumentError(f"Cannot parse parameter point: {e}") from e
    if values.shape != (J,):
        raise ArgumentError(f"Parameter point must have {J} components, got {values.shape[0]}")
    return values
