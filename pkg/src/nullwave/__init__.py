"""Constructive solutions of 1D semilinear hyperbolic systems with null coupling.

The systems are ``d_t u_i + c_i d_x u_i + sum_jk A_ijk u_j u_k = 0`` with
compactly supported data.  The package provides the characteristic
geometry, exact transport solves, a monitored Picard iteration with its
analytic smallness budget, numerical checks of the L1 interaction
estimates, and the reduction of the 2x2 case to a semilinear wave equation.
"""

__version__ = "0.1.0"

from .exceptions import (BlowUpError, ConfigError, CoverageError, DomainError, GluingError,
                         NullwaveError, PreconditionError, StructuralError)
from .fields import (Grid, GridField, InitialDatum, TripleNorm, characteristic_l1, datum_l1,
                     eval_datum, l1_over_triangle, l1_time_slice, product_l1_over_triangle,
                     triple_norm)
from .geometry import (CharacteristicWindow, TriangleDomain, cone_slice, contains, k_window,
                       triangle)
from .system import (ContractionBudget, SystemSpec, ValidationReport, budget_sequence,
                     contraction_budget, gamma, validate)
from .solver import *  # noqa: F401,F403
from .solver import __all__ as _solver_all
from .wave_bridge import WaveReduction, check_compatibility, reconstruct_w_gradient, wave_residual
from .estimator import TartarSolver

__all__ = [
    "BlowUpError", "ConfigError", "CoverageError", "DomainError", "GluingError", "NullwaveError",
    "PreconditionError", "StructuralError",
    "Grid", "GridField", "InitialDatum", "TripleNorm", "characteristic_l1", "datum_l1",
    "eval_datum", "l1_over_triangle", "l1_time_slice", "product_l1_over_triangle", "triple_norm",
    "CharacteristicWindow", "TriangleDomain", "cone_slice", "contains", "k_window", "triangle",
    "ContractionBudget", "SystemSpec", "ValidationReport", "budget_sequence",
    "contraction_budget", "gamma", "validate",
    "WaveReduction", "check_compatibility", "reconstruct_w_gradient", "wave_residual",
    "TartarSolver",
] + list(_solver_all)
