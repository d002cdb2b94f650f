# stages/bench_stage.py
import logging
import time

import numpy as np

from core.errors import ArgumentError
from core.galerkin import galerkin_pod_solve
from core.pod import reconstruct
from core.stage_interface import Stage, performance_log
from core.surrogate import predict_solution
from data.reports import write_bench

logger = logging.getLogger(__name__)

BENCH_CSV = "bench.csv"


def _elapsed(fn, *args):
    start_time = time.perf_counter()
    fn(*args)
    return time.perf_counter() - start_time


def _gpod_online(problem, y, basis):
    # Full assembly is part of the online G-POD cost
    return reconstruct(galerkin_pod_solve(problem, y, basis), basis)


def bench_speedup(problem, basis, surrogate, queries, seed=7):
    """
    Median wall-clock times of the three online solvers over fresh uniform
    parameters. The POD-NN time excludes any assembly.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    points = rng.uniform(-1.0, 1.0, size=(queries, problem.spec.J))

    # Warm caches (quadrature rules, factorization code paths) before timing
    problem.solve_hf(points[0])
    predict_solution(surrogate, points[0], basis)

    times = np.zeros((queries, 3))
    for i, y in enumerate(points):
        times[i, 0] = _elapsed(problem.solve_hf, y)
        times[i, 1] = _elapsed(_gpod_online, problem, y, basis)
        times[i, 2] = _elapsed(predict_solution, surrogate, y, basis)

    t_hf, t_gpod, t_podnn = np.median(times, axis=0)
    return {
        "t_HF": float(t_hf),
        "t_GPOD": float(t_gpod),
        "t_PODNN": float(t_podnn),
        "ratio_HF_PODNN": float(t_hf / t_podnn),
        "ratio_GPOD_PODNN": float(t_gpod / t_podnn),
    }


class BenchStage(Stage):
    """Online speedup of the surrogate over the full-order and G-POD solvers."""

    requires = ("pod", "train")

    def __init__(self):
        super().__init__("bench", "Times online queries of the HF, G-POD and POD-NN solvers")

    @performance_log
    def run(self, context):
        bench = context.config.bench
        surrogates = context.artifacts["surrogates"]
        L = bench["L"] if bench["L"] is not None else max(surrogates)
        if L not in surrogates:
            raise ArgumentError(f"No trained surrogate for L={L}; available: {sorted(surrogates)}")
        basis = context.artifacts["basis"].truncate(L)

        result = bench_speedup(context.problem, basis, surrogates[L], bench["queries"], bench["seed"])
        write_bench(context.path(BENCH_CSV), [(
            L, bench["queries"], result["t_HF"], result["t_GPOD"], result["t_PODNN"],
            result["ratio_HF_PODNN"], result["ratio_GPOD_PODNN"],
        )])
        logger.info(
            f"[{self.name}] L={L}: t_HF={result['t_HF']:.3e}s, t_GPOD={result['t_GPOD']:.3e}s, "
            f"t_PODNN={result['t_PODNN']:.3e}s, t_GPOD/t_PODNN={result['ratio_GPOD_PODNN']:.1f}"
        )
        context.artifacts["bench"] = result
        return self.format_result("success", dict(result, L=L))
