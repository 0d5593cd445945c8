"""Numerical infrastructure: integrators, kernels and boundary-value drivers."""

from .kernels import NoSignChangeError, brent_root, simpson
from .ode import NumericalFailure, OdeSystem, Trajectory, rk4_integrate, rkf45_integrate
from .drivers import ShootResult, dirichlet_conformal, estimate_R4, harmonic_rhs, shoot_harmonic_R4

__all__ = [
    "NoSignChangeError",
    "NumericalFailure",
    "OdeSystem",
    "ShootResult",
    "Trajectory",
    "brent_root",
    "dirichlet_conformal",
    "estimate_R4",
    "harmonic_rhs",
    "rk4_integrate",
    "rkf45_integrate",
    "shoot_harmonic_R4",
    "simpson",
]
