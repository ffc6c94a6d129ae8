"""Variational lower bounds on Heisenberg-chain ground states.

Built on a symbolic algebra of SU(2)-invariant Pauli monomials and the
squaring parametrization ``rho = tau^2 / tr tau^2``.
"""

__version__ = "0.1.0"

from .algebra import (
    Monomial,
    OperatorPoly,
    StructureTensor,
    build_structure_tensor,
    canonicalize,
    check_dependencies,
    enumerate_basis,
    k_count,
    multiply,
    trace_inner,
)
from .bounds import (
    BoundReport,
    ClusterModel,
    OptimizerConfig,
    anderson_bound,
    objective,
    sandwich_check,
    variational_bound,
)
from .oracle import min_eigenvalue, represent, spectrum_positivity
from .symmetry import (
    ConstraintSet,
    build_constraints,
    mirror_identification,
    residual_constraints,
    translation_constraints,
)

__all__ = [
    "BoundReport",
    "ClusterModel",
    "ConstraintSet",
    "Monomial",
    "OperatorPoly",
    "OptimizerConfig",
    "StructureTensor",
    "anderson_bound",
    "build_constraints",
    "build_structure_tensor",
    "canonicalize",
    "check_dependencies",
    "enumerate_basis",
    "k_count",
    "min_eigenvalue",
    "mirror_identification",
    "multiply",
    "objective",
    "represent",
    "residual_constraints",
    "sandwich_check",
    "spectrum_positivity",
    "trace_inner",
    "translation_constraints",
    "variational_bound",
]
