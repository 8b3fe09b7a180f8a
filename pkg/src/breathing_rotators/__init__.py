"""Breathing relativistic rotators: models, Casimirs, Hessian determinants and dynamics."""

from .dynamics import IllPosed, IntegratorConfig, conservation_report, eom_accelerations, integrate
from .errors import (
    ConstraintViolation,
    DegenerateCase,
    DomainError,
    IllPosedError,
    RotatorError,
    SingularKinematics,
)
from .fundamental import Grid, default_grid, pde_residuals, verify_fundamental
from .hessian import (
    GaugeCoords,
    extract_kappa,
    gauge_coords,
    hessian_det_closed,
    hessian_det_fd,
    hessian_det_schur,
    jacobian_casimir,
    verify_eq3,
)
from .kernels import BACKEND
from .models import (
    Constant,
    Custom,
    Deformed,
    FundamentalNu,
    FundamentalSqrt,
    Polynomial,
    Separable,
    classify,
    fundamental_starlike,
    model_from_dict,
)
from .observables import RotatorState, angular_momentum, casimirs_closed, casimirs_kinematic, momenta

__version__ = "0.1.0"

__all__ = [
    "angular_momentum",
    "BACKEND",
    "casimirs_closed",
    "casimirs_kinematic",
    "classify",
    "conservation_report",
    "Constant",
    "ConstraintViolation",
    "Custom",
    "default_grid",
    "Deformed",
    "DegenerateCase",
    "DomainError",
    "eom_accelerations",
    "extract_kappa",
    "fundamental_starlike",
    "FundamentalNu",
    "FundamentalSqrt",
    "gauge_coords",
    "GaugeCoords",
    "Grid",
    "hessian_det_closed",
    "hessian_det_fd",
    "hessian_det_schur",
    "IllPosed",
    "IllPosedError",
    "integrate",
    "IntegratorConfig",
    "jacobian_casimir",
    "model_from_dict",
    "momenta",
    "pde_residuals",
    "Polynomial",
    "RotatorError",
    "RotatorState",
    "Separable",
    "SingularKinematics",
    "verify_eq3",
    "verify_fundamental",
]
