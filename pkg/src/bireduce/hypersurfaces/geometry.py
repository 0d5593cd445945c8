"""Curvatures, volume and bitension residuals of invariant hypersurfaces.

A profile curve lives in the orbit cone ``Q``; it is parametrized by arc
length and stored through its tangent angle, so ``x' = cos(theta)`` and
``y' = sin(theta)`` hold identically and all s-derivatives are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import jets
from ..jets import Jet, scalar
from ..solvers.kernels import brent_root
from ..variational import Lagrangian2, el_system
from .actions import OrbitAction, so_p_so_q

BOUNDARY_TOL = 1e-10
ARC_TOL = 1e-10


class BoundaryProximityError(ArithmeticError):
    """A w-form (hence an orbit) degenerates at the evaluation point."""


def _angles(d: int, i: int) -> tuple[float, float]:
    if not 0 <= i <= d - 1:
        raise IndexError(f"w-form index {i} outside 0..{d - 1}")
    a = i * math.pi / d
    return math.sin(a), math.cos(a)


def w_form(d: int, i: int, x, y):
    """``x sin(i pi/d) - y cos(i pi/d)``; works on floats and jets."""
    s, c = _angles(d, i)
    return x * s - y * c


def in_cone(d: int, x: float, y: float) -> bool:
    """Strict interior of the orbit cone of angle ``pi/d``."""
    if d == 1:
        return y > 0
    return y > 0 and w_form(d, 1, x, y) > 0


def volume_sq(action: OrbitAction, x: float, y: float) -> tuple[float, bool]:
    """``V^2 = prod w_i^(2 m_i)`` and a flag that is True on the cone boundary."""
    v = 1.0
    for i, m in enumerate(action.mults):
        v *= w_form(action.d, i, x, y) ** (2 * m)
    boundary = v == 0.0 or not in_cone(action.d, x, y)
    return v, boundary


# profile curves ---------------------------------------------------------------


@dataclass(frozen=True)
class ProfileCurve:
    """Point ``(x, y)`` of an arc-length curve plus the tower of its tangent angle."""

    x: float
    y: float
    theta: Jet

    def __post_init__(self):
        if not isinstance(self.theta, Jet):
            object.__setattr__(self, "theta", Jet((float(self.theta),)))

    @classmethod
    def from_values(cls, x: float, y: float, thetas: Sequence[float]) -> "ProfileCurve":
        return cls(float(x), float(y), Jet(tuple(float(t) for t in thetas)))

    @property
    def order(self) -> int:
        return self.theta.order

    def xy_jets(self) -> tuple[Jet, Jet]:
        """Towers of ``x(s), y(s)``, one order higher than ``theta``."""
        return jets.cos(self.theta).integrate(self.x), jets.sin(self.theta).integrate(self.y)

    def require(self, order: int) -> None:
        if self.theta.order < order:
            raise ValueError(f"theta jet of order >= {order} required, got {self.theta.order}")


def _check_interior(action: OrbitAction, x: float, y: float) -> None:
    for i in range(action.d):
        if abs(w_form(action.d, i, x, y)) < BOUNDARY_TOL:
            raise BoundaryProximityError(f"|w_{i}({x}, {y})| < {BOUNDARY_TOL}")


def orbital_curvature_jets(action: OrbitAction, curve: ProfileCurve) -> list[Jet]:
    """Towers of ``k_i = w_i(y', -x') / w_i(x, y)``, order equal to the theta order."""
    _check_interior(action, curve.x, curve.y)
    X, Y = curve.xy_jets()
    dX, dY = X.derivative(), Y.derivative()
    X, Y = X.truncate(dX.order), Y.truncate(dY.order)
    return [w_form(action.d, i, dY, -dX) / w_form(action.d, i, X, Y) for i in range(action.d)]


def log_volume_rate_jet(action: OrbitAction, curve: ProfileCurve) -> Jet:
    """Tower of ``d/ds ln V^2 = 2 sum m_i w_i(x', y') / w_i(x, y)``."""
    X, Y = curve.xy_jets()
    dX, dY = X.derivative(), Y.derivative()
    X, Y = X.truncate(dX.order), Y.truncate(dY.order)
    return 2 * sum(m * w_form(action.d, i, dX, dY) / w_form(action.d, i, X, Y) for i, m in enumerate(action.mults))


def mean_f_jet(action: OrbitAction, curve: ProfileCurve) -> Jet:
    """Tower of ``f = k_d + sum m_i k_i`` (order: theta order minus one)."""
    curve.require(1)
    ks = orbital_curvature_jets(action, curve)
    kd = curve.theta.derivative()
    return kd + sum(m * k.truncate(kd.order) for m, k in zip(action.mults, ks))


def A2_jet(action: OrbitAction, curve: ProfileCurve) -> Jet:
    curve.require(1)
    ks = orbital_curvature_jets(action, curve)
    kd = curve.theta.derivative()
    return kd * kd + sum(m * (k * k).truncate(kd.order) for m, k in zip(action.mults, ks))


@dataclass(frozen=True)
class CurvatureReport:
    ks: tuple[float, ...]
    kd: float
    mean_f: float
    A2: float
    logV2_rate: float

    def as_dict(self) -> dict:
        return {"ks": list(self.ks), "kd": self.kd, "mean_f": self.mean_f, "A2": self.A2, "logV2_rate": self.logV2_rate}


def curvatures(action: OrbitAction, curve: ProfileCurve) -> CurvatureReport:
    curve.require(1)
    ks = tuple(k[0] for k in orbital_curvature_jets(action, curve))
    kd = curve.theta[1]
    mean_f = kd + sum(m * k for m, k in zip(action.mults, ks))
    A2 = kd * kd + sum(m * k * k for m, k in zip(action.mults, ks))
    return CurvatureReport(ks, kd, mean_f, A2, log_volume_rate_jet(action, curve)[0])


def biharmonic_residuals(action: OrbitAction, curve: ProfileCurve) -> tuple[float, float]:
    """``(normal, tangential)`` bitension residuals of the invariant hypersurface.

    normal     = f'' + (1/2)(ln V^2)' f' - |A|^2 f
    tangential = f' (f + 2 k_d)
    """
    curve.require(3)
    F = mean_f_jet(action, curve)
    rate = log_volume_rate_jet(action, curve)[0]
    A2 = A2_jet(action, curve)[0]
    kd = curve.theta[1]
    normal = F[2] + 0.5 * rate * F[1] - A2 * F[0]
    tangential = F[1] * (F[0] + 2 * kd)
    return normal, tangential


# straight profiles through the vertex -----------------------------------------


def cone_mean_f(action: OrbitAction, sigma: float, s: float) -> float:
    """``f = -(1/s) sum m_i cot(sigma - i pi/d)`` on the ray of angle ``sigma``."""
    d = action.d
    if not 0 < sigma < math.pi / d:
        raise ValueError(f"sigma must lie in (0, pi/{d})")
    if s <= 0:
        raise ValueError("s must be positive")
    total = 0.0
    for i, m in enumerate(action.mults):
        t = math.tan(sigma - i * math.pi / d)
        if abs(t) < 1e-300:
            raise ZeroDivisionError(f"sigma = {sigma} is singular")
        total += m / t
    return -total / s


def ray_curve(sigma: float, s: float, order: int = 3) -> ProfileCurve:
    return ProfileCurve(s * math.cos(sigma), s * math.sin(sigma), Jet.constant(sigma, order))


def minimal_cone_angles(action: OrbitAction, samples: int = 2000) -> list[float]:
    """Angles of rays whose cones are minimal: sign-change scan plus Brent."""
    width = math.pi / action.d
    g = lambda sigma: cone_mean_f(action, sigma, 1.0)
    grid = np.linspace(0, width, samples + 1)[1:-1]
    vals = [g(s) for s in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brent_root(g, (a, b), tol=1e-16))
    return roots


# explicit d = 2 displays ------------------------------------------------------


def _d2_state(p: int, q: int, curve: ProfileCurve, order: int):
    so_p_so_q(p, q)  # validates p, q
    curve.require(order)
    if not (curve.x > BOUNDARY_TOL and curve.y > BOUNDARY_TOL):
        raise BoundaryProximityError(f"({curve.x}, {curve.y}) is not interior to the quadrant")
    return curve.xy_jets()


def tension_d2(p: int, q: int, curve: ProfileCurve) -> tuple[float, float]:
    """``(tangential, normal)`` tension of the isometric immersion for ``SO(p) x SO(q)``."""
    X, Y = _d2_state(p, q, curve, 1)
    x, x1, x2 = X[0], X[1], X[2]
    y, y1, y2 = Y[0], Y[1], Y[2]
    tx = x2 - (p - 1) * y1**2 / x + (q - 1) * x1 * y1 / y
    ty = y2 - (q - 1) * x1**2 / y + (p - 1) * x1 * y1 / x
    tangential = tx * x1 + ty * y1
    normal = y2 * x1 - x2 * y1 + (p - 1) * y1 / x - (q - 1) * x1 / y
    return tangential, normal


def bitension_explicit_d2(p: int, q: int, curve: ProfileCurve) -> tuple[float, float]:
    """``(tangential, normal)`` bitension of the isometric immersion, explicit form."""
    X, Y = _d2_state(p, q, curve, 3)
    x, x1, x2, x3, x4 = X.coeffs[:5]
    y, y1, y2, y3, y4 = Y.coeffs[:5]
    P, Qm = p - 1, q - 1
    c = p + q - p * q - 1
    tangential = (
        P * x3 / x
        + Qm * y3 / y
        + 2 * P * x1**2 * x3 / x
        + 2 * Qm * y1**2 * y3 / y
        + 2 * Qm * x1 * y1 * x3 / y
        + 2 * P * x1 * y1 * y3 / x
        - 3 * x2 * x3
        - 3 * y2 * y3
        - c / (x * y) * (x1 * y2 + x2 * y1)
        - (p * p - 5 * p + 4) * y1 * y2 / x**2
        + (q * q - 5 * q + 4) * y1 * y2 / y**2
        + c * x1 * y1 / (x * y) * (x1 / x + y1 / y)
        + P**2 * x1 * y1**2 / x**3
        + Qm**2 * x1**2 * y1 / y**3
    )
    normal = (
        x1 * y4
        - y1 * x4
        + 2 * P * y3 / x
        - 2 * Qm * x3 / y
        + 2 * (p * q - p - q + 1) * y1 * y2 / (x * y)
        + (p * p - 4 * p + 3) * x1 * y2 / x**2
        - (q * q - 4 * q + 3) * y1 * x2 / y**2
        + Qm**2 * x1 / y**3
        - P**2 * y1 / x**3
        - 2 * Qm * x1 * y1**2 / y**3
        + 2 * P * y1 * x1**2 / x**3
    )
    return tangential, normal


def tangential_identity_d2(p: int, q: int, curve: ProfileCurve) -> float:
    """``-(d/ds F)(3 k_d + (p-1) y'/x - (q-1) x'/y)`` with ``F`` the d=2 mean curvature."""
    X, Y = _d2_state(p, q, curve, 3)
    dX, dY = X.derivative(), Y.derivative()
    ddX, ddY = dX.derivative(), dY.derivative()
    n = ddX.order
    X, Y, dX, dY = X.truncate(n), Y.truncate(n), dX.truncate(n), dY.truncate(n)
    F = ddY * dX - ddX * dY + (p - 1) * dY / X - (q - 1) * dX / Y
    kd = ddY[0] * dX[0] - ddX[0] * dY[0]
    return -F[1] * (3 * kd + (p - 1) * dY[0] / X[0] - (q - 1) * dX[0] / Y[0])


# variational route with frozen background ---------------------------------------


def _taylor_poly(jet: Jet, s0: float):
    """Polynomial ``t -> sum jet[k] (t - s0)^k / k!`` evaluated on floats or jets."""
    coeffs = [c / math.factorial(k) for k, c in enumerate(jet.coeffs)]

    def poly(t):
        u = t - s0
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * u + c
        return acc

    return poly


def frozen_tension(action: OrbitAction, q, qd, qdd, bg, bgd):
    """Tension components of the invariant map with background curve ``bg``.

    ``q, qd, qdd`` are the curve slots; ``bg, bgd`` the background point and
    velocity.  The volume rate is ``sum m_i w_i(bg') / w_i(bg)``.
    """
    d = action.d
    rate = sum(m * w_form(d, i, *bgd) / w_form(d, i, *bg) for i, m in enumerate(action.mults))
    tx = qdd[0] + qd[0] * rate
    ty = qdd[1] + qd[1] * rate
    for i, m in enumerate(action.mults):
        s, c = _angles(d, i)
        coef = m * w_form(d, i, *q) / w_form(d, i, *bg) ** 2
        tx = tx - coef * s
        ty = ty + coef * c
    return tx, ty


def frozen_volume(action: OrbitAction, bg):
    v2 = 1.0
    for i, m in enumerate(action.mults):
        v2 = v2 * w_form(action.d, i, *bg) ** (2 * m)
    return jets.sqrt(v2)


def frozen_energy_lagrangian(action: OrbitAction, X: Jet, Y: Jet, s0: float):
    """First-order Lagrangian ``e * V`` with the background frozen to ``(X, Y)``."""
    from ..variational import Lagrangian1

    x0, y0 = _taylor_poly(X, s0), _taylor_poly(Y, s0)

    def L(t, q, qd):
        bg = (x0(t), y0(t))
        e = qd[0] ** 2 + qd[1] ** 2
        for i, m in enumerate(action.mults):
            e = e + m * w_form(action.d, i, *q) ** 2 / w_form(action.d, i, *bg) ** 2
        return 0.5 * e * frozen_volume(action, bg)

    return Lagrangian1(L, ncomp=2)


def frozen_bienergy_lagrangian(action: OrbitAction, X: Jet, Y: Jet, s0: float) -> Lagrangian2:
    """``L2 = (1/2)|tau|^2 V`` with the background frozen to the Taylor polynomials of ``(X, Y)``."""
    x0, y0 = _taylor_poly(X, s0), _taylor_poly(Y, s0)
    dx0, dy0 = _taylor_poly(X.derivative(), s0), _taylor_poly(Y.derivative(), s0)

    def L(t, q, qd, qdd):
        bg = (x0(t), y0(t))
        tx, ty = frozen_tension(action, q, qd, qdd, bg, (dx0(t), dy0(t)))
        return 0.5 * (tx * tx + ty * ty) * frozen_volume(action, bg)

    return Lagrangian2(L, ncomp=2)


def bitension_variational(
    action: OrbitAction, X: Jet, Y: Jet, s0: float = 0.0
) -> tuple[float, float]:
    """``(tangential, normal)`` bitension via Euler–Lagrange of the frozen bienergy.

    ``X, Y`` are towers (order >= 4) of an arc-length curve at ``s0``.  The
    background is identified with the curve only after slot differentiation.
    """
    if X.order < 4 or Y.order < 4:
        raise ValueError("curve towers of order >= 4 are required")
    x1, y1 = X[1], Y[1]
    if abs(x1 * x1 + y1 * y1 - 1.0) > ARC_TOL:
        raise ValueError(f"arc-length violated: x'^2 + y'^2 = {x1 * x1 + y1 * y1!r}")
    _check_interior(action, X[0], Y[0])
    L2 = frozen_bienergy_lagrangian(action, X, Y, s0)
    Bx, By = el_system(L2, [X, Y], s0)
    V = scalar(frozen_volume(action, (X[0], Y[0])))
    t2x, t2y = Bx / V, By / V
    return t2x * x1 + t2y * y1, -t2x * y1 + t2y * x1


__all__ = [
    "BoundaryProximityError",
    "CurvatureReport",
    "ProfileCurve",
    "biharmonic_residuals",
    "bitension_explicit_d2",
    "bitension_variational",
    "cone_mean_f",
    "curvatures",
    "frozen_bienergy_lagrangian",
    "frozen_energy_lagrangian",
    "frozen_tension",
    "in_cone",
    "mean_f_jet",
    "minimal_cone_angles",
    "ray_curve",
    "tangential_identity_d2",
    "tension_d2",
    "volume_sq",
    "w_form",
]
