# core/fem.py
"""
Finite element plumbing shared by the Helmholtz and Maxwell problems:
structured Kuhn meshes of (-1, 1)^3, simplex quadrature, sparse
assembly helpers and the complex sparse direct solve.
"""
import itertools
import logging
import math
import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, onenormest, splu
from scipy.special import roots_jacobi

from config import SOLVER_RTOL
from core.errors import ArgumentError, SolverError

logger = logging.getLogger(__name__)

# Local vertex pairs of the six tetrahedron edges
LOCAL_EDGES = np.array([[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
# Local vertex triples of the four tetrahedron faces (face k is opposite vertex k)
LOCAL_FACES = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])

NODAL_H1 = "nodal_h1"
EDGE_HCURL = "edge_hcurl"

QUADRATURE_ORDERS = (1, 2, 3, 4)


@dataclass
class ElementGeometry:
    """Affine element maps x = v0 + B xi and the constant barycentric gradients."""

    origin: np.ndarray
    B: np.ndarray
    det: np.ndarray
    volume: np.ndarray
    grads: np.ndarray

    def map_points(self, xi):
        """Map reference points xi (Q, 3) into every element, shape (T, Q, 3)."""
        return self.origin[:, None, :] + np.einsum("tij,qj->tqi", self.B, xi)


class Mesh:
    """Conforming tetrahedral mesh of the reference cube with edge and boundary data."""

    def __init__(self, vertices, tets, n, boundary_faces, boundary_normals, boundary_face_ids,
                 edges, tet_edges, edge_local_vertices, boundary_edges, boundary_nodes):
        self.n = n
        self.vertices = vertices
        self.tets = tets
        self.boundary_faces = boundary_faces
        self.boundary_normals = boundary_normals
        self.boundary_face_ids = boundary_face_ids
        self.edges = edges
        self.tet_edges = tet_edges
        self.edge_local_vertices = edge_local_vertices
        self.boundary_edges = boundary_edges
        self.boundary_nodes = boundary_nodes

    @property
    def h(self):
        return 2.0 / self.n

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @classmethod
    def from_arrays(cls, vertices, tets, n):
        """Derive orientation, boundary faces and global edges from raw arrays."""
        vertices = np.asarray(vertices, dtype=float)
        tets = np.array(tets, dtype=np.int64, copy=True)

        B = np.stack([vertices[tets[:, k]] - vertices[tets[:, 0]] for k in (1, 2, 3)], axis=-1)
        det = np.linalg.det(B)
        if np.any(np.abs(det) < 1e-14):
            raise ArgumentError("Mesh contains degenerate tetrahedra")
        flip = det < 0
        tets[flip, 2], tets[flip, 3] = tets[flip, 3], tets[flip, 2].copy()

        faces = np.sort(tets[:, LOCAL_FACES].reshape(-1, 3), axis=1)
        unique_faces, counts = np.unique(faces, axis=0, return_counts=True)
        if np.any(counts > 2):
            raise ArgumentError("Non-manifold mesh: a face is shared by more than two tetrahedra")
        boundary_faces = unique_faces[counts == 1]

        fv = vertices[boundary_faces]
        on_plane = np.all(np.isclose(fv, fv[:, :1, :]), axis=1) & np.isclose(np.abs(fv[:, 0, :]), 1.0)
        if np.any(on_plane.sum(axis=1) != 1):
            raise ArgumentError("Boundary faces do not tile the cube surface")
        axis = np.argmax(on_plane, axis=1)
        sign = np.sign(fv[np.arange(len(axis)), 0, axis])
        normals = np.zeros((len(axis), 3))
        normals[np.arange(len(axis)), axis] = sign
        face_ids = 2 * axis + (sign > 0)

        local = tets[:, LOCAL_EDGES]
        all_edges = np.sort(local.reshape(-1, 2), axis=1)
        edges, inverse = np.unique(all_edges, axis=0, return_inverse=True)
        tet_edges = inverse.reshape(-1).reshape(len(tets), 6)

        # Local endpoints ordered by global index (low -> high)
        swap = local[..., 0] > local[..., 1]
        edge_local_vertices = np.broadcast_to(LOCAL_EDGES, local.shape).copy()
        edge_local_vertices[swap] = edge_local_vertices[swap][:, ::-1]

        nv = vertices.shape[0]
        edge_keys = edges[:, 0] * nv + edges[:, 1]
        face_edges = np.sort(boundary_faces[:, [[0, 1], [0, 2], [1, 2]]].reshape(-1, 2), axis=1)
        boundary_edges = np.zeros(len(edges), dtype=bool)
        boundary_edges[np.searchsorted(edge_keys, face_edges[:, 0] * nv + face_edges[:, 1])] = True

        boundary_nodes = np.zeros(nv, dtype=bool)
        boundary_nodes[boundary_faces.ravel()] = True

        return cls(vertices, tets, n, boundary_faces, normals, face_ids,
                   edges, tet_edges, edge_local_vertices, boundary_edges, boundary_nodes)

    @cached_property
    def geometry(self):
        origin = self.vertices[self.tets[:, 0]]
        B = np.stack([self.vertices[self.tets[:, k]] - origin for k in (1, 2, 3)], axis=-1)
        det = np.linalg.det(B)
        inv = np.linalg.inv(B)
        grads = np.concatenate([-inv.sum(axis=1, keepdims=True), inv], axis=1)
        return ElementGeometry(origin=origin, B=B, det=det, volume=np.abs(det) / 6.0, grads=grads)

    @cached_property
    def face_geometry(self):
        """Origins, edge vectors and doubled areas of the boundary triangles."""
        v = self.vertices[self.boundary_faces]
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        return v[:, 0], e1, e2, np.linalg.norm(np.cross(e1, e2), axis=1)

    def gradient_matrix(self):
        """Edge-by-vertex incidence: the discrete gradient from P1 into lowest-order Nedelec."""
        ne = self.num_edges
        rows = np.repeat(np.arange(ne), 2)
        cols = self.edges.ravel()
        vals = np.tile([-1.0, 1.0], ne)
        return sp.csr_matrix((vals, (rows, cols)), shape=(ne, self.num_vertices))


def build_cube_mesh(n):
    """Split (-1, 1)^3 into n^3 cubes and every cube into six Kuhn tetrahedra."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ArgumentError(f"Mesh resolution must be a positive integer, got {n}")

    coords = np.linspace(-1.0, 1.0, n + 1)
    X, Y, Z = np.meshgrid(coords, coords, coords, indexing="ij")
    vertices = np.column_stack([X.ravel(order="F"), Y.ravel(order="F"), Z.ravel(order="F")])

    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    base = (i + (n + 1) * j + (n + 1) ** 2 * k).ravel(order="F")
    offsets = np.array([1, n + 1, (n + 1) ** 2])

    tets = []
    for perm in itertools.permutations(range(3)):
        steps = np.cumsum(offsets[list(perm)])
        tets.append(np.column_stack([base, base + steps[0], base + steps[1], base + steps[2]]))
    tets = np.stack(tets, axis=1).reshape(-1, 4)

    mesh = Mesh.from_arrays(vertices, tets, n)
    logger.debug(f"Built cube mesh n={n}: {mesh.num_vertices} vertices, {len(mesh.tets)} tets, {mesh.num_edges} edges")
    return mesh


def _collapsed_rule(order, alphas):
    if order not in QUADRATURE_ORDERS:
        raise ArgumentError(f"Unsupported quadrature order {order}, expected one of {QUADRATURE_ORDERS}")
    m = math.ceil((order + 1) / 2)
    nodes, weights = [], []
    for alpha in alphas:
        t, w = roots_jacobi(m, alpha, 0)
        nodes.append((1.0 + t) / 2.0)
        weights.append(w / 2.0 ** (alpha + 1))
    grids = np.meshgrid(*nodes, indexing="ij")
    wgrid = np.prod(np.meshgrid(*weights, indexing="ij"), axis=0)
    return [g.ravel() for g in grids], wgrid.ravel()


def tet_quadrature(order):
    """
    Quadrature on the reference tetrahedron exact for total degree `order`.

    Collapsed-coordinate product of Gauss-Jacobi rules; weights sum to 1/6.
    """
    (a, b, c), w = _collapsed_rule(order, (2, 1, 0))
    points = np.column_stack([a, b * (1.0 - a), c * (1.0 - a) * (1.0 - b)])
    return points, w


def triangle_quadrature(order):
    """Quadrature on the reference triangle exact for total degree `order`; weights sum to 1/2."""
    (a, b), w = _collapsed_rule(order, (1, 0))
    points = np.column_stack([a, b * (1.0 - a)])
    return points, w


def line_quadrature(order):
    """Gauss-Legendre rule on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(max(1, math.ceil((order + 1) / 2)))
    return (1.0 + t) / 2.0, w / 2.0


def barycentric(points):
    """Barycentric coordinates of reference points, shape (Q, d + 1)."""
    return np.column_stack([1.0 - points.sum(axis=1), points])


def assemble_matrix(dofs, local, shape):
    """
    Scatter local element matrices (T, k, k) through dof maps (T, k).

    Duplicates are summed in element order, so the result is deterministic.
    """
    rows = np.broadcast_to(dofs[:, :, None], local.shape).ravel()
    cols = np.broadcast_to(dofs[:, None, :], local.shape).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=shape).tocsr()


def assemble_vector(dofs, local, size):
    """Scatter local element vectors (T, k) through dof maps (T, k)."""
    idx = dofs.ravel()
    vals = np.asarray(local).ravel()
    real = np.bincount(idx, weights=vals.real, minlength=size)
    imag = np.bincount(idx, weights=vals.imag, minlength=size) if np.iscomplexobj(vals) else 0.0
    return real + 1j * imag


class Factorization:
    """Sparse complex LU factorization, shareable read-only across workers."""

    def __init__(self, A):
        A = sp.csc_matrix(A, dtype=np.complex128)
        if A.shape[0] != A.shape[1]:
            raise ArgumentError(f"Cannot factorize non-square matrix of shape {A.shape}")
        self.A = A
        self._lock = threading.Lock()
        try:
            self._lu = splu(A, permc_spec="COLAMD")
        except RuntimeError as e:
            raise SolverError(f"Sparse LU failed: {e}", condition=math.inf) from e

    @property
    def shape(self):
        return self.A.shape

    def solve(self, b, trans="N"):
        b = np.asarray(b, dtype=np.complex128)
        with self._lock:
            return self._lu.solve(b, trans=trans)

    def condition_estimate(self):
        """1-norm condition number estimate via Hager/Higham estimation of ||A^{-1}||_1."""
        try:
            inverse = LinearOperator(
                self.shape,
                matvec=self.solve,
                rmatvec=lambda x: self.solve(x, trans="H"),
                dtype=np.complex128,
            )
            return float(onenormest(self.A) * onenormest(inverse))
        except Exception as e:
            logger.warning(f"Condition estimate failed: {e}")
            return math.inf


def factorize(A):
    return Factorization(A)


def solve_linear(A, b, rtol=None, factorization=None):
    """
    Solve A x = b with a sparse direct factorization and one refinement step.

    Raises SolverError when the relative residual exceeds `rtol`.
    """
    rtol = SOLVER_RTOL if rtol is None else rtol
    lu = factorization or Factorization(A)
    A = lu.A
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != A.shape[0]:
        raise ArgumentError(f"Right-hand side of length {b.shape[0]} does not match matrix of shape {A.shape}")

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)

    x = lu.solve(b)
    x = x + lu.solve(b - A @ x)
    residual = np.linalg.norm(b - A @ x) / bnorm
    if not np.isfinite(residual) or residual > rtol:
        condition = lu.condition_estimate()
        raise SolverError(
            f"Linear solve residual {residual:.3e} exceeds tolerance {rtol:.1e} (condition estimate {condition:.3e})",
            condition=condition,
            residual=residual,
        )
    return x
