# core/transform.py
"""
Affine-parametric deformation of the reference cube (-1, 1)^3.

The deformed domain is D(y) = T(D_0; y) with

    T(x; y) = x + sum_j y_j mu_j sin(pi j x_1) e_3,

so only the third coordinate moves and the Jacobian is unit lower
triangular. Every pointwise function accepts batches of points with a
trailing axis of length 3.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from core.errors import ArgumentError, NumericDomainError

logger = logging.getLogger(__name__)

ALGEBRAIC = "algebraic"
MATERN = "matern"
FAMILIES = (ALGEBRAIC, MATERN)


@dataclass(frozen=True)
class DecaySpec:
    """Coefficient-decay family scaling the deformation modes."""

    family: str
    J: int
    theta: float
    r: float = None
    nu: float = None
    l: float = None
    _coefficients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError(f"Unknown decay family '{self.family}', expected one of {FAMILIES}")
        if not isinstance(self.J, (int, np.integer)) or self.J < 1:
            raise ArgumentError(f"Truncation dimension J must be a positive integer, got {self.J}")
        if not self.theta > 0:
            raise ArgumentError(f"theta must be positive, got {self.theta}")
        if self.family == ALGEBRAIC:
            if self.r is None or not self.r > 1:
                raise ArgumentError(f"Algebraic decay requires r > 1, got {self.r}")
        else:
            if self.nu is None or not self.nu > 0:
                raise ArgumentError(f"Matern decay requires nu > 0, got {self.nu}")
            if self.l is None or not self.l > 0:
                raise ArgumentError(f"Matern decay requires l > 0, got {self.l}")

        mu = np.array([_evaluate_coefficient(j, self) for j in range(1, self.J + 1)])
        mu.setflags(write=False)
        object.__setattr__(self, "_coefficients", mu)

    def coefficients(self):
        """Return mu_1..mu_J as a read-only array."""
        return self._coefficients

    def to_dict(self):
        data = {"family": self.family, "J": int(self.J), "theta": float(self.theta)}
        if self.family == ALGEBRAIC:
            data["r"] = float(self.r)
        else:
            data["nu"] = float(self.nu)
            data["l"] = float(self.l)
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        family = data.pop("family", None)
        allowed = {"J", "theta", "r"} if family == ALGEBRAIC else {"J", "theta", "nu", "l"}
        unknown = set(data) - allowed
        if unknown:
            raise ArgumentError(f"Unknown keys for {family} decay: {sorted(unknown)}")
        return cls(family=family, **data)


def _evaluate_coefficient(j, spec):
    if spec.family == ALGEBRAIC:
        value = spec.theta * float(j) ** (-(spec.r + 1.0))
    else:
        a = 2.0 * spec.nu / spec.l ** 2
        # Evaluated in log space so the Gamma ratio cannot overflow on its own
        log_value = (
            math.log(spec.theta)
            + spec.nu * math.log(a)
            - (spec.nu + 0.5) * math.log(a + math.pi ** 2 * j ** 2)
            + gammaln(spec.nu + 0.5)
            - gammaln(spec.nu)
        )
        value = math.exp(log_value) if np.isfinite(log_value) else math.nan
    if not np.isfinite(value) or value <= 0.0:
        raise NumericDomainError(f"Decay coefficient mu_{j} is not a positive finite number ({value})")
    return value


def coefficient(j, spec):
    """Return mu_j for 1 <= j <= spec.J."""
    if not isinstance(j, (int, np.integer)) or not 1 <= j <= spec.J:
        raise ArgumentError(f"Coefficient index j={j} outside 1..{spec.J}")
    return float(spec.coefficients()[j - 1])


def check_admissibility(spec):
    """Warn when the deformation amplitude could fold the cube faces."""
    amplitude = float(np.sum(spec.coefficients()))
    if amplitude > 1.0:
        logger.warning(
            f"Deformation amplitude sum(mu_j)={amplitude:.4g} exceeds 1; "
            f"faces of the deformed cube may self-intersect"
        )
        return False
    return True


def validate_param_point(y, J, tol=1e-12):
    """Return y as a float array after checking length J and the [-1, 1] bounds."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != J:
        raise ArgumentError(f"Parameter point must have {J} components, got shape {y.shape}")
    if not np.all(np.isfinite(y)) or np.any(np.abs(y) > 1.0 + tol):
        raise ArgumentError("Parameter point components must lie in [-1, 1]")
    return y


def _modes(y, spec):
    y = validate_param_point(y, spec.J)
    j = np.arange(1, spec.J + 1, dtype=float)
    return y * spec.coefficients(), j


def _points(xhat):
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape[-1] != 3:
        raise ArgumentError(f"Points must have a trailing axis of length 3, got shape {xhat.shape}")
    return xhat


def displacement(x1, y, spec):
    """Third-coordinate shift s(x1) = sum_j y_j mu_j sin(pi j x1)."""
    amp, j = _modes(y, spec)
    x1 = np.asarray(x1, dtype=float)
    return np.sin(np.pi * x1[..., None] * j) @ amp


def deformation_slope(x1, y, spec):
    """Slope c(x1) = sum_j y_j mu_j pi j cos(pi j x1), the only non-trivial Jacobian entry."""
    amp, j = _modes(y, spec)
    x1 = np.asarray(x1, dtype=float)
    return np.cos(np.pi * x1[..., None] * j) @ (amp * np.pi * j)


def map_point(xhat, y, spec):
    """Evaluate T(xhat; y)."""
    xhat = _points(xhat)
    x = np.array(xhat, dtype=float, copy=True)
    x[..., 2] += displacement(xhat[..., 0], y, spec)
    return x


@dataclass
class JacobianData:
    """Jacobian dT, its determinant and dT^{-T} at one or many points."""

    dT: np.ndarray
    det: np.ndarray
    inv_transpose: np.ndarray


def jacobian(xhat, y, spec):
    """Return JacobianData of T at xhat."""
    xhat = _points(xhat)
    c = deformation_slope(xhat[..., 0], y, spec)
    shape = xhat.shape[:-1] + (3, 3)
    dT = np.broadcast_to(np.eye(3), shape).copy()
    dT[..., 2, 0] = c
    inv_transpose = np.broadcast_to(np.eye(3), shape).copy()
    inv_transpose[..., 0, 2] = -c
    # Unit lower-triangular, so the determinant is exactly one
    det = np.ones(xhat.shape[:-1])
    return JacobianData(dT=dT, det=det, inv_transpose=inv_transpose)


def surface_jacobian(xhat, nu_hat, y, spec):
    """J_S = J ||dT^{-T} nu_hat|| for reference face normals nu_hat."""
    data = jacobian(xhat, y, spec)
    nu_hat = np.broadcast_to(np.asarray(nu_hat, dtype=float), np.shape(xhat))
    mapped = np.einsum("...ij,...j->...i", data.inv_transpose, nu_hat)
    return data.det * np.linalg.norm(mapped, axis=-1)


def physical_normal(xhat, nu_hat, y, spec):
    """Outward unit normal of D(y) at T(xhat) for a reference normal nu_hat."""
    data = jacobian(xhat, y, spec)
    nu_hat = np.broadcast_to(np.asarray(nu_hat, dtype=float), np.shape(xhat))
    mapped = np.einsum("...ij,...j->...i", data.inv_transpose, nu_hat)
    return mapped / np.linalg.norm(mapped, axis=-1, keepdims=True)


def covariant_pullback(u, xhat, y, spec):
    """Evaluate dT^T (u o T) at xhat for a physical vector field u."""
    data = jacobian(xhat, y, spec)
    values = np.asarray(u(map_point(xhat, y, spec)))
    return np.einsum("...ji,...j->...i", data.dT, values)


def pullback_curl(curl_u, xhat, y, spec):
    """Evaluate det(dT) dT^{-1} ((curl u) o T) at xhat."""
    data = jacobian(xhat, y, spec)
    values = np.asarray(curl_u(map_point(xhat, y, spec)))
    dT_inv = np.swapaxes(data.inv_transpose, -1, -2)
    return data.det[..., None] * np.einsum("...ij,...j->...i", dT_inv, values)
