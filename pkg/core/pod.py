# core/pod.py
"""Snapshot matrices, (centered) POD bases, projection and lifting."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import ArgumentError, SnapshotError, TaskError
from core.task_manager import TaskManager

logger = logging.getLogger(__name__)

SVD = "svd"
GRAM = "gram"
# Relative singular-value floor of the Gram path; the Gram matrix squares the condition number
GRAM_RANK_FLOOR = 1e-7


@dataclass
class SnapshotMatrix:
    """Column i is the high-fidelity DoF vector at params.points[i]."""

    data: np.ndarray
    params: object
    fingerprint: str = ""

    def __post_init__(self):
        # C order on every construction path, archived or freshly solved
        self.data = np.ascontiguousarray(self.data)
        if self.data.ndim != 2 or self.data.shape[1] != len(self.params):
            raise ArgumentError(
                f"Snapshot matrix of shape {self.data.shape} does not match {len(self.params)} parameter points"
            )

    @property
    def shape(self):
        return self.data.shape


@dataclass
class ReducedBasis:
    """Mean field, orthonormal basis columns and all positive singular values."""

    mean: np.ndarray
    V: np.ndarray
    singular_values: np.ndarray
    centered: bool = True

    def __post_init__(self):
        self.mean = np.ascontiguousarray(self.mean)
        self.V = np.ascontiguousarray(self.V)
        self.singular_values = np.ascontiguousarray(self.singular_values)

    @property
    def L(self):
        return self.V.shape[1]

    @property
    def rank(self):
        return len(self.singular_values)

    @property
    def dof_count(self):
        return self.mean.shape[0]

    def truncate(self, L):
        """Nested sub-basis made of the first L columns."""
        if not 0 <= L <= self.L:
            raise ArgumentError(f"Cannot truncate a basis of size {self.L} to L={L}")
        return ReducedBasis(self.mean, self.V[:, :L], self.singular_values, self.centered)

    def tail_energy(self, L):
        """Normalized discarded energy sum_{j>L} sigma_j^2 / sum_j sigma_j^2."""
        energy = self.singular_values ** 2
        total = energy.sum()
        return float(energy[L:].sum() / total) if total > 0 else 0.0


def assemble_snapshots(problem, sample_set, fingerprint="", workers=None):
    """Solve the high-fidelity problem at every parameter point, in order."""
    manager = TaskManager(workers)
    for i, y in enumerate(sample_set.points):
        manager.add_task(problem.solve_hf, y, task_id=f"{problem.name}-snapshot-{i}")

    try:
        columns = manager.run_all()
    except TaskError as e:
        raise SnapshotError(f"High-fidelity solve failed at parameter index {e.index}: {e.cause}", index=e.index) from e

    data = np.column_stack(columns) if columns else np.zeros((problem.dof_count, 0), dtype=complex)
    logger.info(f"Assembled {data.shape[1]} {problem.name} snapshots with {data.shape[0]} DoFs")
    return SnapshotMatrix(data=data, params=sample_set, fingerprint=fingerprint)


def _fix_phase(V):
    """Scale each column so its largest-magnitude entry is real positive."""
    if V.shape[1] == 0:
        return V
    pivots = V[np.argmax(np.abs(V), axis=0), np.arange(V.shape[1])]
    return V * (np.abs(pivots) / pivots)[None, :]


def _svd(X, method):
    if method == SVD:
        W, sigma, _ = scipy.linalg.svd(X, full_matrices=False, lapack_driver="gesdd")
        floor = sigma[0] * max(X.shape) * np.finfo(float).eps if sigma.size else 0.0
        keep = sigma > floor
        return W[:, keep], sigma[keep]
    if method == GRAM:
        eigvals, Z = scipy.linalg.eigh(X.conj().T @ X)
        order = np.argsort(eigvals)[::-1]
        sigma = np.sqrt(np.clip(eigvals[order], 0.0, None))
        floor = sigma[0] * GRAM_RANK_FLOOR if sigma.size else 0.0
        keep = sigma > floor
        sigma = sigma[keep]
        W = (X @ Z[:, order][:, keep]) / sigma[None, :]
        return W, sigma
    raise ArgumentError(f"Unknown SVD method '{method}', expected '{SVD}' or '{GRAM}'")


def _rank_for_tolerance(sigma, tolerance):
    energy = sigma ** 2
    # tails[L] = sum_{j>L} sigma_j^2, exactly zero at L = rank
    tails = np.concatenate([np.cumsum(energy[::-1])[::-1], [0.0]])
    return int(np.argmax(tails <= tolerance ** 2 * energy.sum()))


def centered_pod(S, L=None, tolerance=None, centered=True, method=SVD):
    """
    POD basis of the snapshot matrix.

    With centering the SVD is taken of S - mean; otherwise the mean is zero.
    The size is either the requested L (clamped to the rank) or the smallest
    L with sum_{j>L} sigma_j^2 <= tolerance^2 sum_j sigma_j^2.
    """
    data = S.data if isinstance(S, SnapshotMatrix) else np.asarray(S)
    data = np.asarray(data, dtype=np.complex128)
    n_h, n_s = data.shape
    if L is not None and tolerance is not None:
        raise ArgumentError("Give either a basis size L or a tolerance, not both")
    if centered and n_s < 2:
        logger.warning(f"Centered POD of {n_s} snapshot(s) is empty")

    mean = data.mean(axis=1) if (centered and n_s > 0) else np.zeros(n_h, dtype=np.complex128)
    W, sigma = _svd(data - mean[:, None], method) if n_s > 0 else (np.zeros((n_h, 0)), np.zeros(0))
    rank = len(sigma)

    if tolerance is not None:
        size = _rank_for_tolerance(sigma, tolerance)
    elif L is None:
        size = rank
    else:
        if L < 0:
            raise ArgumentError(f"Basis size must be non-negative, got {L}")
        size = L
        if L > rank:
            logger.warning(f"Requested basis size L={L} exceeds snapshot rank {rank}; clamping")
            size = rank

    V = _fix_phase(W[:, :size].astype(np.complex128))
    logger.info(
        f"POD ({'centered' if centered else 'uncentered'}, {method}): rank {rank}, kept L={size}, "
        f"tail energy {float((sigma[size:] ** 2).sum() / max((sigma ** 2).sum(), 1e-300)):.3e}"
    )
    return ReducedBasis(mean=mean, V=V, singular_values=sigma, centered=centered)


def _check_dimension(rows, basis):
    if rows != basis.dof_count:
        raise ArgumentError(f"Vector of length {rows} does not match basis with {basis.dof_count} DoFs")


def project(u, basis):
    """Reduced coefficients c = V^H (u - mean); columns of a matrix are projected independently."""
    u = np.asarray(u)
    _check_dimension(u.shape[0], basis)
    shifted = u - (basis.mean if u.ndim == 1 else basis.mean[:, None])
    return basis.V.conj().T @ shifted


def reconstruct(c, basis):
    """Lift reduced coefficients: u = V c + mean."""
    c = np.asarray(c)
    if c.shape[0] != basis.L:
        raise ArgumentError(f"Coefficient vector of length {c.shape[0]} does not match basis size {basis.L}")
    lifted = basis.V @ c
    return lifted + (basis.mean if c.ndim == 1 else basis.mean[:, None])


def projection_error(u, basis):
    """Euclidean distance between u and its affine projection onto mean + range(V)."""
    return float(np.linalg.norm(u - reconstruct(project(u, basis), basis)))
