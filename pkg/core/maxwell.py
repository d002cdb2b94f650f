# core/maxwell.py
"""
Lossy Maxwell cavity problem pulled back to the reference cube with
lowest-order first-kind Nedelec edge elements and PEC walls.

    A(y) = mu^{-1} C(y) - Lambda M(y)

C(y) is the curl-curl matrix weighted by J^{-1} dT, M(y) the mass matrix
weighted by J dT^{-T}. Boundary edge DoFs are eliminated: their rows and
columns are replaced by an identity block with zero right-hand side.
"""
import logging

import numpy as np
import scipy.sparse as sp

from core.errors import ArgumentError, ConfigurationError
from core.fem import EDGE_HCURL, assemble_matrix, assemble_vector, barycentric, line_quadrature, tet_quadrature
from core.problem_interface import ParametricProblem
from core.transform import jacobian, map_point
from data.cache import cube_mesh

logger = logging.getLogger(__name__)

THETA_SCAN_POINTS = 1024


def gaussian_current(x):
    """Default current density (0, 0, 1) exp(-|x|^2)."""
    J = np.zeros(x.shape, dtype=complex)
    J[..., 2] = np.exp(-np.sum(x ** 2, axis=-1))
    return J


def uniform_current(x):
    J = np.zeros(x.shape, dtype=complex)
    J[..., 2] = 1.0
    return J


MAXWELL_SOURCES = {
    "gaussian": gaussian_current,
    "uniform": uniform_current,
}


def coercivity_constants(mu, Lambda, samples=THETA_SCAN_POINTS):
    """
    Scan theta in [0, 2 pi) for the best pair
    mu_b = Re(e^{i theta} / mu), Lambda_b = Re(-e^{i theta} Lambda).

    Returns (theta, mu_b, Lambda_b) maximizing min(mu_b, Lambda_b).
    """
    mu, Lambda = complex(mu), complex(Lambda)
    if not (np.isfinite(mu) and np.isfinite(Lambda)):
        raise ConfigurationError(f"Maxwell constants must be finite, got mu={mu}, Lambda={Lambda}")
    if mu == 0:
        raise ConfigurationError("Permeability mu must be invertible, got mu=0")
    theta = 2.0 * np.pi * np.arange(samples) / samples
    rotation = np.exp(1j * theta)
    mu_b = np.real(rotation / mu)
    lambda_b = np.real(-rotation * Lambda)
    if not (np.all(np.isfinite(mu_b)) and np.all(np.isfinite(lambda_b))):
        raise ConfigurationError(f"Coercivity scan for mu={mu}, Lambda={Lambda} produced non-finite values")
    best = int(np.argmax(np.minimum(mu_b, lambda_b)))
    return float(theta[best]), float(mu_b[best]), float(lambda_b[best])


def _curl_by_differences(field, points, step=1e-6):
    jac = np.empty(points.shape + (3,), dtype=complex)
    for k in range(3):
        shift = np.zeros(3)
        shift[k] = step
        jac[..., :, k] = (field(points + shift) - field(points - shift)) / (2.0 * step)
    return np.stack([
        jac[..., 2, 1] - jac[..., 1, 2],
        jac[..., 0, 2] - jac[..., 2, 0],
        jac[..., 1, 0] - jac[..., 0, 1],
    ], axis=-1)


class _EdgeBasis:
    """Nedelec basis values N (T, Q, 6, 3) and curls (T, 6, 3) at a tet quadrature rule."""

    def __init__(self, mesh, order):
        xi, w = tet_quadrature(order)
        lam = barycentric(xi)
        geometry = mesh.geometry
        low = mesh.edge_local_vertices[..., 0]
        high = mesh.edge_local_vertices[..., 1]

        grad_low = np.take_along_axis(geometry.grads, low[..., None], axis=1)
        grad_high = np.take_along_axis(geometry.grads, high[..., None], axis=1)
        lam_low = np.moveaxis(lam[:, low], 0, 1)
        lam_high = np.moveaxis(lam[:, high], 0, 1)

        self.points = geometry.map_points(xi)
        self.weights = w[None, :] * np.abs(geometry.det)[:, None]
        self.values = lam_low[..., None] * grad_high[:, None] - lam_high[..., None] * grad_low[:, None]
        self.curls = 2.0 * np.cross(grad_low, grad_high)


class MaxwellProblem(ParametricProblem):
    """
    Maxwell lossy cavity problem, Lambda = omega^2 epsilon - i omega sigma.

    Jsrc(x) is the current density evaluated at physical points x = T(xhat; y).
    """

    dof_kind = EDGE_HCURL

    def __init__(self, omega, mu, Lambda, spec, n, Jsrc=None, order=2, mesh=None):
        if not omega > 0:
            raise ArgumentError(f"Angular frequency omega must be positive, got {omega}")
        super().__init__("maxwell", "Maxwell lossy cavity, lowest-order Nedelec elements, PEC walls", spec, mesh or cube_mesh(n))
        self.omega = float(omega)
        self.mu = complex(mu)
        self.Lambda = complex(Lambda)
        self.Jsrc = Jsrc or gaussian_current
        self.order = order

        self.theta, self.mu_b, self.Lambda_b = coercivity_constants(self.mu, self.Lambda)
        if min(self.mu_b, self.Lambda_b) <= 0.0:
            raise ConfigurationError(
                f"Maxwell constants mu={self.mu}, Lambda={self.Lambda} admit no theta with "
                f"Re(e^(i theta)/mu) > 0 and Re(-e^(i theta) Lambda) > 0"
            )
        logger.debug(f"Coercivity scan: theta={self.theta:.4f}, mu_b={self.mu_b:.4f}, Lambda_b={self.Lambda_b:.4f}")

        self._basis = _EdgeBasis(self.mesh, order)
        free = (~self.mesh.boundary_edges).astype(float)
        self._keep = sp.diags(free)
        self._pin = sp.diags(1.0 - free)

    @property
    def dof_count(self):
        return self.mesh.num_edges

    @property
    def coercivity_bound(self):
        return min(self.mu_b, self.Lambda_b)

    def assemble_parts(self, y):
        """Return the pulled-back curl-curl and mass matrices before PEC elimination."""
        y = self.check_parameter(y)
        basis = self._basis
        jac = jacobian(basis.points, y, self.spec)

        curls = np.einsum("tqij,taj->tqai", jac.dT, basis.curls)
        curl_local = np.einsum("tq,tqai,tqbi->tab", basis.weights / jac.det, curls, curls)

        values = np.einsum("tqij,tqaj->tqai", jac.inv_transpose, basis.values)
        mass_local = np.einsum("tq,tqai,tqbi->tab", basis.weights * jac.det, values, values)

        shape = (self.dof_count, self.dof_count)
        return (
            assemble_matrix(self.mesh.tet_edges, curl_local, shape),
            assemble_matrix(self.mesh.tet_edges, mass_local, shape),
        )

    def hcurl_norm_matrix(self, y):
        """Gram matrix of the H(curl; D(y)) inner product in the edge basis."""
        curl, mass = self.assemble_parts(y)
        return (curl + mass).tocsr()

    def eliminate(self, A, b):
        """Replace boundary rows and columns by an identity block."""
        A = (self._keep @ A @ self._keep + self._pin).tocsr()
        b = np.where(self.mesh.boundary_edges, 0.0, b)
        return A, b

    def assemble_load(self, y):
        y = self.check_parameter(y)
        basis = self._basis
        jac = jacobian(basis.points, y, self.spec)
        current = self.Jsrc(map_point(basis.points, y, self.spec))
        values = np.einsum("tqij,tqaj->tqai", jac.inv_transpose, basis.values)
        local = -1j * self.omega * np.einsum("tq,tqi,tqai->ta", basis.weights * jac.det, current, values)
        return assemble_vector(self.mesh.tet_edges, local, self.dof_count)

    def assemble_nedelec(self, y):
        """Full-order system with PEC boundary DoFs eliminated."""
        curl, mass = self.assemble_parts(y)
        A = curl / self.mu - self.Lambda * mass
        return self.eliminate(A, self.assemble_load(y))

    def assemble(self, y):
        return self.assemble_nedelec(y)

    def interpolate(self, E):
        """Edge-moment interpolant: DoF_e = integral over edge e of E . (x_high - x_low)."""
        s, w = line_quadrature(6)
        start = self.mesh.vertices[self.mesh.edges[:, 0]]
        tangent = self.mesh.vertices[self.mesh.edges[:, 1]] - start
        points = start[:, None, :] + s[None, :, None] * tangent[:, None, :]
        values = np.asarray(E(points))
        return np.einsum("q,eqi,ei->e", w, values, tangent).astype(complex)

    def evaluate(self, E_h, order=None):
        """Field values (T, Q, 3) and curls (T, 3) of an edge vector at a tet quadrature rule."""
        E_h = np.asarray(E_h)
        if E_h.shape != (self.dof_count,):
            raise ArgumentError(f"Edge vector has shape {E_h.shape}, expected ({self.dof_count},)")
        basis = self._basis if order is None else _EdgeBasis(self.mesh, order)
        local = E_h[self.mesh.tet_edges]
        values = np.einsum("ta,tqai->tqi", local, basis.values)
        curls = np.einsum("ta,tai->ti", local, basis.curls)
        return basis, values, curls

    def hcurl_error(self, E_h, E_exact, curl_exact=None, order=4):
        """L2 and H(curl) errors of an edge field against an exact field on D_0."""
        basis, values, curls = self.evaluate(E_h, order)
        diff = values - E_exact(basis.points)
        exact_curl = curl_exact(basis.points) if curl_exact else _curl_by_differences(E_exact, basis.points)
        curl_diff = curls[:, None, :] - exact_curl

        l2_sq = np.sum(basis.weights * np.sum(np.abs(diff) ** 2, axis=-1))
        curl_sq = np.sum(basis.weights * np.sum(np.abs(curl_diff) ** 2, axis=-1))
        return float(np.sqrt(l2_sq)), float(np.sqrt(l2_sq + curl_sq))
