# data/reports.py
"""Plot-ready CSV reports. Headers are fixed; floats carry 17 significant digits."""
import logging
import os

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

ERROR_CURVE_COLUMNS = ["L", "mean_E_G", "mean_E_V", "mean_E_NN"]
ERRORS_PER_POINT_COLUMNS = ["point", "L", "E_G", "E_NN", "E_V"]
SINGULAR_VALUE_COLUMNS = ["j", "sigma", "tail_energy"]
COEFFICIENT_ERROR_COLUMNS = ["L", "mode", "relative_error"]
LOSS_HISTORY_COLUMNS = ["L", "network", "epoch", "loss"]
BENCH_COLUMNS = ["L", "queries", "t_HF", "t_GPOD", "t_PODNN", "ratio_HF_PODNN", "ratio_GPOD_PODNN"]
DECAY_COEFFICIENT_COLUMNS = ["j", "mu"]
SWEEP_COLUMNS = ["variant", "L", "mean_E_G", "mean_E_V", "mean_E_NN"]


def write_csv(path, columns, rows):
    """Write rows under a fixed header; returns the frame that was written."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return frame


def read_csv(path):
    return pd.read_csv(path, float_precision="round_trip")


def write_error_curve(path, report):
    return write_csv(path, ERROR_CURVE_COLUMNS, report.rows())


def write_errors_per_point(path, report):
    rows = []
    for i in range(report.E_G.shape[0]):
        for k, L in enumerate(report.L_list):
            rows.append((i, int(L), float(report.E_G[i, k]), float(report.E_NN[i, k]), float(report.E_V[i, k])))
    return write_csv(path, ERRORS_PER_POINT_COLUMNS, rows)


def write_singular_values(path, singular_values):
    energy = np.asarray(singular_values, dtype=float) ** 2
    total = energy.sum()
    tails = np.cumsum(energy[::-1])[::-1] - energy
    tails = tails / total if total > 0 else tails
    rows = [(j + 1, float(s), float(t)) for j, (s, t) in enumerate(zip(singular_values, tails))]
    return write_csv(path, SINGULAR_VALUE_COLUMNS, rows)


def write_decay_coefficients(path, coefficients):
    return write_csv(path, DECAY_COEFFICIENT_COLUMNS, [(j + 1, float(mu)) for j, mu in enumerate(coefficients)])


def write_coefficient_errors(path, coefficient_errors):
    """coefficient_errors maps L to the per-mode relative errors of the surrogate."""
    rows = [
        (int(L), k + 1, float(e))
        for L, errors in sorted(coefficient_errors.items())
        for k, e in enumerate(errors)
    ]
    return write_csv(path, COEFFICIENT_ERROR_COLUMNS, rows)


def write_loss_history(path, histories):
    """histories maps L to the list of loss curves of its networks."""
    rows = [
        (int(L), net, epoch, float(loss))
        for L, curves in sorted(histories.items())
        for net, curve in enumerate(curves)
        for epoch, loss in enumerate(curve)
    ]
    return write_csv(path, LOSS_HISTORY_COLUMNS, rows)


def write_bench(path, rows):
    return write_csv(path, BENCH_COLUMNS, rows)


def write_sweep_summary(path, curves):
    """curves maps a variant name to its error-curve rows (L, mean_E_G, mean_E_V, mean_E_NN)."""
    rows = [(name,) + tuple(row) for name, rows in curves.items() for row in rows]
    return write_csv(path, SWEEP_COLUMNS, rows)
