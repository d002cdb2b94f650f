# core/measures.py
"""Relative error measures against high-fidelity solutions and their aggregation."""
import logging
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from core.errors import MeasureError, NumericDomainError

logger = logging.getLogger(__name__)

ORDERING_SLACK = 1e-12

ErrorMeasures = namedtuple("ErrorMeasures", ["E_G", "E_NN", "E_V"])


def relative_error(hf, candidate):
    """||hf - candidate|| / ||hf|| in the Euclidean norm on DoF vectors."""
    hf = np.asarray(hf)
    norm = np.linalg.norm(hf)
    if norm == 0.0:
        raise MeasureError("High-fidelity solution has zero norm; relative errors are undefined")
    return float(np.linalg.norm(hf - np.asarray(candidate)) / norm)


def error_measures(hf, g_pod=None, pod_nn=None, projection=None):
    """E_G, E_NN and E_V for whichever candidates are given (None otherwise)."""
    return ErrorMeasures(
        E_G=relative_error(hf, g_pod) if g_pod is not None else None,
        E_NN=relative_error(hf, pod_nn) if pod_nn is not None else None,
        E_V=relative_error(hf, projection) if projection is not None else None,
    )


@dataclass
class ErrorReport:
    """Per-test-point errors (points x L) with their arithmetic means over the test set."""

    L_list: list
    E_G: np.ndarray
    E_NN: np.ndarray
    E_V: np.ndarray
    timings: dict = field(default_factory=dict)

    def mean(self, name):
        return getattr(self, name).mean(axis=0)

    def rows(self):
        """Rows (L, mean_E_G, mean_E_V, mean_E_NN) of the error curve."""
        e_g, e_v, e_nn = self.mean("E_G"), self.mean("E_V"), self.mean("E_NN")
        return [(int(L), float(e_g[k]), float(e_v[k]), float(e_nn[k])) for k, L in enumerate(self.L_list)]

    def check_ordering(self):
        """The projection error lower-bounds both the G-POD and the POD-NN error."""
        for name in ("E_G", "E_NN"):
            violation = self.E_V - getattr(self, name)
            if np.any(violation > ORDERING_SLACK):
                i, k = np.unravel_index(np.argmax(violation), violation.shape)
                raise NumericDomainError(
                    f"E_V exceeds {name} by {violation[i, k]:.3e} at test point {i}, L={self.L_list[k]}"
                )
        return True
