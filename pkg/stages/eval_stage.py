# stages/eval_stage.py
"""
Test-set evaluation: per point and per L, the G-POD, POD-NN and projection
errors against the stored high-fidelity solutions, plus the per-mode
coefficient errors of the surrogates.
"""
import logging
import time

import numpy as np

from core.galerkin import reduced_system, solve_reduced
from core.measures import ErrorReport, error_measures
from core.pod import project, reconstruct
from core.stage_interface import Stage, performance_log
from core.surrogate import predict_solution
from core.task_manager import TaskManager
from data.reports import write_coefficient_errors, write_error_curve, write_errors_per_point

logger = logging.getLogger(__name__)

ERROR_CURVE_CSV = "error_curve.csv"
ERRORS_PER_POINT_CSV = "errors_per_point.csv"
COEFFICIENT_ERRORS_CSV = "coefficient_errors.csv"


def evaluate_point(problem, y, u, basis, surrogates, L_list):
    """Errors at one test point; returns (E_G, E_NN, E_V, |c - c_nn| per L, |c| per L)."""
    A, b = problem.assemble(y)
    A_L, r_L = reduced_system(A, b, basis)
    rows = np.zeros((3, len(L_list)))
    coefficient_gaps, coefficient_sizes = {}, {}
    for k, L in enumerate(L_list):
        sub = basis.truncate(L)
        c = project(u, sub)
        g_pod = reconstruct(solve_reduced(A_L, r_L, L), sub)
        pod_nn = predict_solution(surrogates[L], y, sub)
        measures = error_measures(u, g_pod=g_pod, pod_nn=pod_nn, projection=reconstruct(c, sub))
        rows[:, k] = measures.E_G, measures.E_NN, measures.E_V
        c_nn = surrogates[L].coefficients(y) if L > 0 else np.zeros(0, dtype=complex)
        coefficient_gaps[L] = np.abs(c - c_nn)
        coefficient_sizes[L] = np.abs(c)
    return rows, coefficient_gaps, coefficient_sizes


def coefficient_errors(gaps, sizes):
    """Per-mode mean |c_k - c_nn_k| over the test set relative to mean |c_k|."""
    errors = {}
    for L in gaps[0]:
        gap = np.mean([g[L] for g in gaps], axis=0)
        size = np.mean([s[L] for s in sizes], axis=0)
        errors[L] = np.divide(gap, size, out=np.zeros_like(gap), where=size > 0)
    return errors


class EvalStage(Stage):
    """Error curves on the test set."""

    requires = ("snapshots", "pod", "train")

    def __init__(self):
        super().__init__("eval", "Measures G-POD, POD-NN and projection errors on the test set")

    @performance_log
    def run(self, context):
        problem = context.problem
        test = context.artifacts["test_snapshots"]
        basis = context.artifacts["basis"]
        surrogates = context.artifacts["surrogates"]
        L_list = sorted(surrogates)

        start_time = time.perf_counter()
        manager = TaskManager(context.workers)
        for i, y in enumerate(test.params.points):
            manager.add_task(evaluate_point, problem, y, test.data[:, i], basis, surrogates, L_list,
                             task_id=f"eval-{i}")
        results = manager.run_all()
        elapsed = time.perf_counter() - start_time

        per_point = np.stack([rows for rows, _, _ in results])
        report = ErrorReport(
            L_list=L_list,
            E_G=per_point[:, 0, :],
            E_NN=per_point[:, 1, :],
            E_V=per_point[:, 2, :],
            timings={"eval_seconds": elapsed},
        )
        report.check_ordering()
        mode_errors = coefficient_errors([g for _, g, _ in results], [s for _, _, s in results])

        write_error_curve(context.path(ERROR_CURVE_CSV), report)
        write_errors_per_point(context.path(ERRORS_PER_POINT_CSV), report)
        write_coefficient_errors(context.path(COEFFICIENT_ERRORS_CSV), mode_errors)

        for L, e_g, e_v, e_nn in report.rows():
            logger.info(f"[{self.name}] L={L}: mean E_G={e_g:.4e}, mean E_NN={e_nn:.4e}, mean E_V={e_v:.4e}")

        context.artifacts["report"] = report
        context.artifacts["coefficient_errors"] = mode_errors
        return self.format_result("success", {"rows": report.rows()})
