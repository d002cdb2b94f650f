# core/helmholtz.py
"""
Helmholtz impedance problem pulled back to the reference cube, discretized
with continuous P1 Lagrange elements.

    A(y) = K(y) - kappa^2 M(y) - i kappa B(y)

with K the dT^{-T}-weighted stiffness matrix, M the J-weighted mass matrix
and B the J_S-weighted boundary mass matrix.
"""
import logging

import numpy as np

from core.errors import ArgumentError
from core.fem import (
    NODAL_H1,
    assemble_matrix,
    assemble_vector,
    barycentric,
    tet_quadrature,
    triangle_quadrature,
)
from core.problem_interface import ParametricProblem
from core.transform import jacobian, map_point, physical_normal, surface_jacobian
from data.cache import cube_mesh

logger = logging.getLogger(__name__)


def unit_source(x):
    return np.ones(x.shape[:-1], dtype=complex)


def zero_source(x):
    return np.zeros(x.shape[:-1], dtype=complex)


def plane_wave_data(kappa, direction=(1.0, 0.0, 0.0)):
    """
    Source-free data (f, g) whose exact solution on the undeformed cube is
    the plane wave exp(i kappa d.x): g = du/dnu - i kappa u on the boundary.
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)

    def impedance(x, normal):
        return 1j * kappa * (normal @ d - 1.0) * np.exp(1j * kappa * (x @ d))

    return zero_source, impedance


# data id -> factory kappa -> (f, g); g = None means a homogeneous impedance condition
HELMHOLTZ_DATA = {
    "unit": lambda kappa: (unit_source, None),
    "plane_wave": plane_wave_data,
}


def helmholtz_data(name, kappa):
    if name not in HELMHOLTZ_DATA:
        raise ArgumentError(f"Unknown Helmholtz data '{name}', expected one of {sorted(HELMHOLTZ_DATA)}")
    return HELMHOLTZ_DATA[name](kappa)


def _finite_difference_gradient(fn, points, step=1e-6):
    grad = np.empty(points.shape, dtype=complex)
    for k in range(3):
        shift = np.zeros(3)
        shift[k] = step
        grad[..., k] = (fn(points + shift) - fn(points - shift)) / (2.0 * step)
    return grad


class _VolumeRule:
    def __init__(self, mesh, order):
        xi, w = tet_quadrature(order)
        self.lam = barycentric(xi)
        self.points = mesh.geometry.map_points(xi)
        self.weights = w[None, :] * np.abs(mesh.geometry.det)[:, None]


class _BoundaryRule:
    def __init__(self, mesh, order, faces=None):
        xi, w = triangle_quadrature(order)
        origin, e1, e2, area2 = mesh.face_geometry
        faces = np.arange(len(mesh.boundary_faces)) if faces is None else faces
        self.faces = faces
        self.lam = barycentric(xi)
        self.points = origin[faces, None, :] + xi[None, :, 0, None] * e1[faces, None, :] + xi[None, :, 1, None] * e2[faces, None, :]
        self.weights = w[None, :] * area2[faces, None]
        self.normals = np.broadcast_to(mesh.boundary_normals[faces, None, :], self.points.shape)


class HelmholtzProblem(ParametricProblem):
    """
    Helmholtz impedance problem on D(y) solved on the reference mesh.

    f(x) is the volume source and g(x, normal) the impedance data, both
    evaluated at physical points x = T(xhat; y).
    """

    dof_kind = NODAL_H1

    def __init__(self, kappa, spec, n, f=None, g=None, volume_order=2, boundary_order=2, mesh=None):
        if not kappa > 0:
            raise ArgumentError(f"Wave number kappa must be positive, got {kappa}")
        super().__init__("helmholtz", "Helmholtz impedance problem, P1 Lagrange elements", spec, mesh or cube_mesh(n))
        self.kappa = float(kappa)
        self.f = f or unit_source
        self.g = g
        self.volume_order = volume_order
        self.boundary_order = boundary_order
        self._volume = _VolumeRule(self.mesh, volume_order)
        self._boundary = _BoundaryRule(self.mesh, boundary_order)

    @property
    def dof_count(self):
        return self.mesh.num_vertices

    def _surface_jacobian(self, rule, y):
        return surface_jacobian(rule.points, rule.normals, y, self.spec)

    def assemble_parts(self, y):
        """Return the pulled-back stiffness, mass and boundary mass matrices."""
        y = self.check_parameter(y)
        vol = self._volume
        jac = jacobian(vol.points, y, self.spec)
        wdet = vol.weights * jac.det
        grads = np.einsum("tqij,taj->tqai", jac.inv_transpose, self.mesh.geometry.grads)

        stiffness = np.einsum("tq,tqai,tqbi->tab", wdet, grads, grads)
        mass = np.einsum("tq,qa,qb->tab", wdet, vol.lam, vol.lam)

        bnd = self._boundary
        boundary = np.einsum("fq,qa,qb->fab", bnd.weights * self._surface_jacobian(bnd, y), bnd.lam, bnd.lam)

        shape = (self.dof_count, self.dof_count)
        return (
            assemble_matrix(self.mesh.tets, stiffness, shape),
            assemble_matrix(self.mesh.tets, mass, shape),
            assemble_matrix(self.mesh.boundary_faces, boundary, shape),
        )

    def assemble_load(self, y):
        """Anti-linear form b_i = l(phi_i; y)."""
        y = self.check_parameter(y)
        vol = self._volume
        jac = jacobian(vol.points, y, self.spec)
        fvals = self.f(map_point(vol.points, y, self.spec))
        local = np.einsum("tq,tq,qa->ta", vol.weights * jac.det, fvals, vol.lam)
        b = assemble_vector(self.mesh.tets, local, self.dof_count)

        if self.g is not None:
            bnd = self._boundary
            x = map_point(bnd.points, y, self.spec)
            normals = physical_normal(bnd.points, bnd.normals, y, self.spec)
            gvals = self.g(x, normals)
            local = np.einsum("fq,fq,qa->fa", bnd.weights * self._surface_jacobian(bnd, y), gvals, bnd.lam)
            b = b + assemble_vector(self.mesh.boundary_faces, local, self.dof_count)
        return b

    def assemble(self, y):
        stiffness, mass, boundary = self.assemble_parts(y)
        A = (stiffness - self.kappa ** 2 * mass - 1j * self.kappa * boundary).tocsr()
        return A, self.assemble_load(y)

    def integrate(self, w, y, order=None):
        """Integral of w over D(y), evaluated on D_0 through the change of variables."""
        y = self.check_parameter(y)
        vol = self._volume if order is None else _VolumeRule(self.mesh, order)
        jac = jacobian(vol.points, y, self.spec)
        return np.sum(vol.weights * jac.det * w(map_point(vol.points, y, self.spec)))

    def integrate_boundary(self, w, y, face_id=None, order=None):
        """Integral of w over the (deformed) boundary, optionally restricted to one cube face."""
        y = self.check_parameter(y)
        faces = None if face_id is None else np.flatnonzero(self.mesh.boundary_face_ids == face_id)
        bnd = _BoundaryRule(self.mesh, order or self.boundary_order, faces)
        weights = bnd.weights * self._surface_jacobian(bnd, y)
        return np.sum(weights * w(map_point(bnd.points, y, self.spec)))

    def interpolate(self, u):
        """Nodal interpolant of a function given on the reference domain."""
        return np.asarray(u(self.mesh.vertices), dtype=complex)

    def h1_error(self, u_h, u_exact, grad_exact=None, order=4):
        """
        L2 and full H1 errors of a nodal field against an exact function on D_0.

        The exact gradient is approximated by central differences when not given.
        """
        u_h = np.asarray(u_h)
        if u_h.shape != (self.dof_count,):
            raise ArgumentError(f"Nodal vector has shape {u_h.shape}, expected ({self.dof_count},)")
        vol = _VolumeRule(self.mesh, order)
        local = u_h[self.mesh.tets]
        values = np.einsum("qa,ta->tq", vol.lam, local)
        gradients = np.einsum("ta,tai->ti", local, self.mesh.geometry.grads)

        diff = values - u_exact(vol.points)
        exact_grad = grad_exact(vol.points) if grad_exact else _finite_difference_gradient(u_exact, vol.points)
        grad_diff = gradients[:, None, :] - exact_grad

        l2_sq = np.sum(vol.weights * np.abs(diff) ** 2)
        semi_sq = np.sum(vol.weights * np.sum(np.abs(grad_diff) ** 2, axis=-1))
        return float(np.sqrt(l2_sq)), float(np.sqrt(l2_sq + semi_sq))
