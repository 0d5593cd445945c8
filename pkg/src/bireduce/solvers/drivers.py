"""Boundary-value drivers for rotationally symmetric maps into the 4-sphere."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import rotsym
from .ode import NumericalFailure, OdeSystem, Trajectory, rkf45_integrate

R0 = 1e-4


def harmonic_rhs(r: float, alpha: float, alpha_dot: float) -> float:
    """``alpha''`` from ``alpha'' + 3 alpha'/r - (3/2) sin(2 alpha)/r^2 = 0``."""
    return -3.0 * alpha_dot / r + 1.5 * math.sin(2.0 * alpha) / (r * r)


def _harmonic_system() -> OdeSystem:
    def rhs(r, y):
        return np.array([y[1], harmonic_rhs(r, y[0], y[1])])

    return OdeSystem(2, rhs)


@dataclass
class ShootResult:
    trajectory: Trajectory
    sup_alpha: float
    crossings: int

    def profile(self) -> "rotsym.SampledProfile":
        tr = self.trajectory
        return rotsym.SampledProfile(tr.t, tr.y[:, 0], tr.y[:, 1], harmonic_rhs)

    def __iter__(self):
        return iter((self.trajectory, self.sup_alpha, self.crossings))


def shoot_harmonic_R4(a: float, r_max: float = 100.0, rel_tol: float = 1e-10, abs_tol: float = 1e-12) -> ShootResult:
    """Harmonic rotationally symmetric maps R^4 -> S^4 with ``alpha'(0) = a``.

    Starts at ``r0 = 1e-4`` from the odd regular expansion
    ``alpha = a r - a^3 r^3 / 6 + O(r^5)``.
    """
    if not a > 0:
        raise ValueError("initial slope must be positive")
    if not r_max > R0:
        raise ValueError(f"r_max must exceed {R0}")
    y0 = [a * R0 - a**3 * R0**3 / 6.0, a - a**3 * R0**2 / 2.0]
    tr = rkf45_integrate(_harmonic_system(), y0, (R0, r_max), rel_tol, abs_tol, h0=R0 / 10)
    alpha = tr.y[:, 0]
    if tr.reason != "range end" or np.max(np.abs(alpha)) > 1e6:
        raise NumericalFailure(f"harmonic shooting blew up ({tr.reason})")
    side = np.sign(alpha - math.pi / 2)
    side = side[side != 0]
    crossings = int(np.count_nonzero(side[1:] != side[:-1]))
    return ShootResult(tr, float(np.max(alpha)), crossings)


def estimate_R4(slopes=None, r_max: float = 100.0) -> float:
    """Largest ``sup alpha`` over a scan of initial slopes."""
    if slopes is None:
        slopes = np.logspace(-1, 1, 9)
    return max(shoot_harmonic_R4(float(a), r_max).sup_alpha for a in slopes)


DIRICHLET_GRID = (0.02, 1.0, 50)


def dirichlet_conformal(R_star: float) -> tuple[float, float]:
    """Member ``2 atan(c^2 r)`` of the conformal biharmonic family with ``alpha(1) = R_star``.

    Returns ``(c, max |bitension residual|)`` over a 50-point grid on [0.02, 1].
    """
    if not 0 < R_star < math.pi:
        raise ValueError(f"R_star must lie in (0, pi), got {R_star}")
    c = math.sqrt(math.tan(R_star / 2))
    pair = rotsym.lookup(1, "B").pair(c)
    lo, hi, n = DIRICHLET_GRID
    res = max(abs(rotsym.bitension_residual_F(pair, float(r))) for r in np.linspace(lo, hi, n))
    return c, res


__all__ = ["ShootResult", "dirichlet_conformal", "estimate_R4", "harmonic_rhs", "shoot_harmonic_R4"]
