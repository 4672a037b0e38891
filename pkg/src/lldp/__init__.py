"""Locally linearized Dormand-Prince 5(4) integrator for stiff and non-stiff ODEs.

Typical use::

    from lldp import AdaptiveConfig, integrate, make_problem

    sol = integrate(make_problem("bruss").problem, AdaptiveConfig(rtol=1e-6, atol=1e-9))
    sol(3.7)   # dense output
"""
from .adaptive import (AdaptiveConfig, SolutionPath, SolverStats, error_norm, initial_step,
                       integrate, integrate_on_mesh, next_step)
from .errors import (ComputationError, IntegrationFailure, LLDPError, PadeFailure,
                     ReferenceFailure, StepComputationError, UsageError)
from .matexp import DEFAULT_ORDER, ExpChain, PadeOrder, exp_chain, expm, inf_norm, mat_mul, pade_expm_core
from .problem import AugmentedSystem, OdeProblem, build_augmented, eval_f, eval_jacobian, extract_u
from .rk import DP45, LLDP45, METHODS, DenseInterpolant, dp45_tableau, dp_step, eval_dense, lldp_step
from .testset import PROBLEM_NAMES, analytic_reference, make_problem

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig", "SolutionPath", "SolverStats", "error_norm", "initial_step", "integrate",
    "integrate_on_mesh", "next_step",
    "ComputationError", "IntegrationFailure", "LLDPError", "PadeFailure", "ReferenceFailure",
    "StepComputationError", "UsageError",
    "DEFAULT_ORDER", "ExpChain", "PadeOrder", "exp_chain", "expm", "inf_norm", "mat_mul",
    "pade_expm_core",
    "AugmentedSystem", "OdeProblem", "build_augmented", "eval_f", "eval_jacobian", "extract_u",
    "DP45", "LLDP45", "METHODS", "DenseInterpolant", "dp45_tableau", "dp_step", "eval_dense",
    "lldp_step",
    "PROBLEM_NAMES", "analytic_reference", "make_problem",
]
