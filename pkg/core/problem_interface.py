# core/problem_interface.py
from abc import ABC, abstractmethod
import logging

from core.fem import solve_linear
from core.transform import validate_param_point

logger = logging.getLogger(__name__)


class ParametricProblem(ABC):
    """Base abstract class for the pulled-back parametric problems."""

    dof_kind = None

    def __init__(self, name, description, spec, mesh):
        self.name = name
        self.description = description
        self.spec = spec
        self.mesh = mesh

    @property
    @abstractmethod
    def dof_count(self):
        """Number of degrees of freedom N_h."""

    @abstractmethod
    def assemble(self, y):
        """Return the full-order system (A(y), b(y)) for the parameter y."""

    def check_parameter(self, y):
        return validate_param_point(y, self.spec.J)

    def solve_hf(self, y):
        """High-fidelity solve at y."""
        A, b = self.assemble(y)
        return solve_linear(A, b)

    def describe(self):
        """Summarize the problem as a JSON-serializable dictionary."""
        return {
            "problem": self.name,
            "description": self.description,
            "dof_kind": self.dof_kind,
            "dofs": int(self.dof_count),
            "mesh_n": int(self.mesh.n),
            "mesh_h": float(self.mesh.h),
            "decay": self.spec.to_dict(),
        }
