"""Exact algebra of the rational H4 model: invariant coordinates, the
Hamiltonian and its integral in algebraic form, spectra and the boundary."""
from .artifacts import Artifacts
from .cache import CacheStore
from .config import RunConfig
from .coxeter import CoxeterGroup, LinearForm, RootSystemH4, generate_group, reflection, roots_from_delta_factors
from .field import ExactScalar
from .invariants import (
    FLAG_FULL,
    FLAG_MIN,
    TauMap,
    boundary_surface,
    invariantize,
    tau_explicit,
    tau_from_orbit,
    wpt_substitution,
)
from .operators import DiffOperator, ModelSpec, commutator, pushforward
from .poly import TAU, X, Polynomial
from .spectral import eigenfunctions, flag_basis, joint_eigenfunctions, spectrum
from .verification import CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "Artifacts",
    "CacheStore",
    "CheckResult",
    "CoxeterGroup",
    "DiffOperator",
    "ExactScalar",
    "FLAG_FULL",
    "FLAG_MIN",
    "LinearForm",
    "ModelSpec",
    "Polynomial",
    "RootSystemH4",
    "RunConfig",
    "TAU",
    "TauMap",
    "X",
    "boundary_surface",
    "commutator",
    "eigenfunctions",
    "flag_basis",
    "generate_group",
    "invariantize",
    "joint_eigenfunctions",
    "pushforward",
    "reflection",
    "roots_from_delta_factors",
    "run_checks",
    "spectrum",
    "tau_explicit",
    "tau_from_orbit",
    "wpt_substitution",
]
