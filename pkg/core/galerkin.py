# core/galerkin.py
"""Galerkin-POD online solver with the mean-shifted right-hand side."""
import logging

import numpy as np
import scipy.linalg

from core.errors import SolverError
from core.measures import error_measures
from core.pod import project, reconstruct

logger = logging.getLogger(__name__)


def reduced_system(A, b, basis):
    """
    Project the full-order system: A_L = V^H A V, r_L = V^H (b - A mean).

    Bases are nested, so the leading L' x L' block and the first L' entries
    give the system of every truncation L' <= L.
    """
    AV = A @ basis.V
    A_L = basis.V.conj().T @ AV
    r_L = basis.V.conj().T @ (b - A @ basis.mean)
    return A_L, r_L


def solve_reduced(A_L, r_L, L=None):
    """Dense solve of the leading L x L block."""
    L = A_L.shape[0] if L is None else L
    if L == 0:
        return np.zeros(0, dtype=complex)
    block = A_L[:L, :L]
    try:
        c = scipy.linalg.solve(block, r_L[:L])
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise SolverError(f"Reduced system of size L={L} is singular: {e}", condition=np.inf) from e
    if not np.all(np.isfinite(c)):
        condition = float(np.linalg.cond(block))
        raise SolverError(f"Reduced system of size L={L} gave non-finite coefficients (condition {condition:.3e})",
                          condition=condition)
    return c


def galerkin_pod_solve(problem, y, basis):
    """Assemble the full-order system at y, project it onto the basis and solve."""
    A, b = problem.assemble(y)
    A_L, r_L = reduced_system(A, b, basis)
    return solve_reduced(A_L, r_L)


def gpod_error_curve(problem, basis, test_set, L_list, hf_solutions=None):
    """
    Mean G-POD and projection errors over a test set for every L in L_list.

    Returns rows (L, mean_E_G, mean_E_V). High-fidelity solutions are
    computed when not supplied (one column per test point).
    """
    points = test_set.points
    per_point = np.zeros((len(points), len(L_list), 2))
    for i, y in enumerate(points):
        A, b = problem.assemble(y)
        u = hf_solutions[:, i] if hf_solutions is not None else problem.solve_hf(y)
        A_L, r_L = reduced_system(A, b, basis)
        for k, L in enumerate(L_list):
            sub = basis.truncate(L)
            g_pod = reconstruct(solve_reduced(A_L, r_L, L), sub)
            projected = reconstruct(project(u, sub), sub)
            measures = error_measures(u, g_pod=g_pod, projection=projected)
            per_point[i, k] = measures.E_G, measures.E_V

    means = per_point.mean(axis=0)
    rows = [(int(L), float(means[k, 0]), float(means[k, 1])) for k, L in enumerate(L_list)]
    for L, e_g, e_v in rows:
        logger.info(f"G-POD L={L}: mean E_G={e_g:.4e}, mean E_V={e_v:.4e}")
    return rows
