"""Rotationally symmetric maps ``(theta, r) -> (theta, alpha(r))`` between models.

Every residual takes a :class:`MapPair` (domain model with warp ``f``,
codomain model with warp ``h``, radial profile ``alpha``) and evaluates the
reduced ODE exactly through derivative towers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .expr import Expr, bind_constants, jet_eval, parse_expr
from .jets import Jet, JetDomainError
from .models import Model, PoleProximityError, WarpingFunction, make_model
from .solvers.kernels import simpson
from .variational import Lagrangian1, Lagrangian2

POLE_GUARD = 1e-4
NEAR_ZERO = 1e-12

# Factor linking the expanded fourth-order display to the F-system:
# expanded = EXPANDED_FACTOR * f**expanded_exponent(m) * bitension_residual_F.
EXPANDED_FACTOR = 1.0


def expanded_exponent(m: int) -> int:
    return m - 1


class RadialProfile:
    """The function ``alpha(r)``: closed form, or samples of an ODE trajectory."""

    boundary: bool = False

    def jet(self, r: float, order: int) -> Jet:
        raise NotImplementedError

    def __call__(self, r: float) -> float:
        return self.jet(r, 0)[0]

    def check_boundary(self, eps: float = 1e-6, tol: float = 1e-4) -> bool:
        """``|alpha(eps)|`` small, as the continuity condition across the pole needs."""
        return abs(self(eps)) <= tol


@dataclass
class ExprProfile(RadialProfile):
    expr: Expr
    var: str = "r"
    boundary: bool = True
    source: str = ""

    @classmethod
    def parse(cls, src: str, params: Mapping[str, float] | None = None, var: str = "r", boundary: bool = True):
        params = dict(params or {})
        e = bind_constants(parse_expr(src, [var, *params]), params)
        return cls(e, var, boundary, src)

    def jet(self, r: float, order: int) -> Jet:
        return jet_eval(self.expr, {self.var: Jet.variable(float(r), order)}, order)

    def __str__(self) -> str:
        return self.source or str(self.expr)


@dataclass
class SampledProfile(RadialProfile):
    """Profile known through ODE samples ``(alpha, alpha')`` on a grid.

    ``second`` returns ``alpha''`` from the state, so jets up to order 2 are
    available anywhere in the sampled range via cubic Hermite interpolation.
    """

    r: np.ndarray
    alpha: np.ndarray
    alpha_dot: np.ndarray
    second: Callable[[float, float, float], float]
    boundary: bool = True
    _spline: object = field(default=None, repr=False)

    def _interp(self, r: float) -> tuple[float, float]:
        if self._spline is None:
            from scipy.interpolate import CubicHermiteSpline

            self._spline = CubicHermiteSpline(self.r, self.alpha, self.alpha_dot)
        i = int(np.searchsorted(self.r, r))
        if i < len(self.r) and self.r[i] == r:
            return float(self.alpha[i]), float(self.alpha_dot[i])
        if not self.r[0] <= r <= self.r[-1]:
            raise ValueError(f"r={r} outside sampled range [{self.r[0]}, {self.r[-1]}]")
        return float(self._spline(r)), float(self._spline(r, 1))

    def jet(self, r: float, order: int) -> Jet:
        if order > 2:
            raise ValueError("sampled profiles provide jets up to order 2")
        a, ad = self._interp(r)
        coeffs = [a, ad, self.second(r, a, ad)]
        return Jet(coeffs[: order + 1])


@dataclass(frozen=True)
class MapPair:
    dom: Model
    cod: Model
    profile: RadialProfile

    def __post_init__(self):
        if self.dom.m != self.cod.m:
            raise ValueError(f"dimension mismatch: domain m={self.dom.m}, codomain m={self.cod.m}")

    @property
    def m(self) -> int:
        return self.dom.m


def _guard(r: float, fval: float) -> None:
    if r < POLE_GUARD:
        raise PoleProximityError(f"r={r} is inside the pole guard {POLE_GUARD}")
    if abs(fval) < NEAR_ZERO:
        raise PoleProximityError(f"|f({r})| < {NEAR_ZERO}")


def _h_tower(cod: Model, alpha: float, order: int) -> Jet:
    return cod.warp.jet(alpha, order)


def tension_F(pair: MapPair, r: float, depth: int = 0) -> Jet:
    """Tower ``(F, F', ...)`` of the reduced tension at ``r``, to order ``depth``."""
    if depth > 2:
        raise ValueError("depth must be <= 2")
    m1 = pair.m - 1
    A = pair.profile.jet(r, depth + 2)
    fj = pair.dom.warp.jet(r, depth + 1)
    _guard(r, fj[0])
    a = A.truncate(depth)
    ad = A.derivative().truncate(depth)
    add = A.derivative().derivative()
    f = fj.truncate(depth)
    fp = fj.derivative()
    h = pair.cod.warp(a)
    hp = pair.cod.warp.deriv(1, a)
    return add + m1 * fp * ad / f - m1 * h * hp / (f * f)


def bitension_residual_F(pair: MapPair, r: float) -> float:
    """Left side of the F-system: zero iff the map is biharmonic at ``r``."""
    m1 = pair.m - 1
    F = tension_F(pair, r, 2)
    fj = pair.dom.warp.jet(r, 1)
    f, fp = fj[0], fj[1]
    hj = _h_tower(pair.cod, pair.profile(r), 2)
    h, hp, hpp = hj[0], hj[1], hj[2]
    return F[2] + m1 * (f * fp * F[1] - hp * hp * F[0]) / f**2 - m1 * h * hpp * F[0] / f**2


def bitension_residual_expanded(pair: MapPair, r: float) -> float:
    """Literal evaluation of the expanded fourth-order biharmonicity equation."""
    m = pair.m
    A = pair.profile.jet(r, 4)
    a1, a2, a3, a4 = A[1], A[2], A[3], A[4]
    fj = pair.dom.warp.jet(r, 3)
    _guard(r, fj[0])
    f, f1, f2, f3 = fj.coeffs
    hj = _h_tower(pair.cod, A[0], 3)
    h, h1, h2, h3 = hj.coeffs
    inner = (
        (m - 1)
        * h
        * (
            2 * f * f2 * h1
            - 2 * (m - 3) * f * f1 * a1 * h2
            + 2 * (m - 4) * f1**2 * h1
            - f**2 * (h3 * a1**2 + 2 * a2 * h2)
            + (m - 1) * h1**3
        )
        + f
        * (
            (m - 3) * (m - 1) * f * f1**2 * a2
            - (m - 3) * (m - 1) * f1**3 * a1
            + (m - 1) * f * (f * (f3 * a1 + 2 * f2 * a2) - 2 * a2 * h1**2 - 3 * a1**2 * h1 * h2)
            + (m - 1) * f1 * (a1 * ((m - 4) * f * f2 - 2 * (m - 3) * h1**2) + 2 * f**2 * a3)
            + f**3 * a4
        )
        + (m - 1) ** 2 * h**2 * h1 * h2
    )
    return f ** (m - 5) * inner


def conformality_residual(pair: MapPair, r: float) -> float:
    """``alpha' - h(alpha)/f``; zero iff the map is conformal at ``r``."""
    A = pair.profile.jet(r, 1)
    f = pair.dom.warp.jet(r, 0)[0]
    _guard(r, f)
    return A[1] - pair.cod.warp.jet(A[0], 0)[0] / f


def conformal_biharmonic_residual_general(dom: Model, cod: Model, r: float, alpha: float) -> float:
    """Biharmonicity of a conformal map, general-``m`` form (no alpha derivatives)."""
    m = dom.m
    fj = dom.warp.jet(r, 3)
    _guard(r, fj[0])
    f, f1, f2, f3 = fj.coeffs
    h, h1, h2, h3 = _h_tower(cod, alpha, 3).coeffs
    bracket = (
        f**2 * f3
        + h1 * (4 * f * f2 + (m - 5) * h * h2)
        + (3 * m - 14) * f1**2 * h1
        - 2 * (m - 4) * f1**3
        + f1 * ((m - 7) * f * f2 - 2 * (m - 4) * h * h2 - 2 * (m - 4) * h1**2)
        - h**2 * h3
        + (m - 2) * h1**3
    )
    return (m - 2) * f ** (m - 5) * h * bracket


def conformal_biharmonic_residual_m4(dom: Model, cod: Model, r: float, alpha: float) -> float:
    fj = dom.warp.jet(r, 3)
    _guard(r, fj[0])
    f, f1, f2, f3 = fj.coeffs
    h, h1, h2, h3 = _h_tower(cod, alpha, 3).coeffs
    bracket = f**2 * f3 + h1 * (4 * f * f2 - h * h2) - 2 * f1**2 * h1 - 3 * f * f1 * f2 - h**2 * h3 + 2 * h1**3
    return 2 * h / f * bracket


def conformal_biharmonic_residual(dom: Model, cod: Model, r: float, alpha: float) -> float:
    if dom.m != cod.m:
        raise ValueError("domain and codomain dimensions differ")
    if dom.m == 4:
        return conformal_biharmonic_residual_m4(dom, cod, r, alpha)
    return conformal_biharmonic_residual_general(dom, cod, r, alpha)


def h_condition_residual(cod: Model, alpha: float) -> float:
    """``h^2 h''' + h'(2 + h h'') - 2 h'^3``."""
    h, h1, h2, h3 = _h_tower(cod, alpha, 3).coeffs
    return h * h * h3 + h1 * (2 + h * h2) - 2 * h1**3


def prime_integral(cod: Model, alpha: float) -> float:
    """``h^2 (1 - h'^2 + h h'')``, conserved along solutions of the h-condition."""
    h, h1, h2 = _h_tower(cod, alpha, 2).coeffs
    return h * h * (1 - h1 * h1 + h * h2)


# variational formulation ------------------------------------------------------


def energy_lagrangian(dom: Model, cod: Model) -> Lagrangian1:
    """``L = 1/2 [alpha'^2 + (m-1) h(alpha)^2 / f^2] f^(m-1)``."""
    m = dom.m

    def L(t, a, ad):
        f = dom.warp(t)
        h = cod.warp(a)
        return 0.5 * (ad * ad + (m - 1) * h * h / (f * f)) * f ** (m - 1)

    return Lagrangian1(L)


def bienergy_lagrangian(dom: Model, cod: Model) -> Lagrangian2:
    """``L2 = 1/2 F^2 f^(m-1)`` with ``F`` the reduced tension."""
    m = dom.m

    def L(t, a, ad, add):
        f = dom.warp(t)
        fp = dom.warp.deriv(1, t)
        F = add + (m - 1) * fp / f * ad - (m - 1) * cod.warp(a) * cod.warp.deriv(1, a) / (f * f)
        return 0.5 * F * F * f ** (m - 1)

    return Lagrangian2(L)


def reduced_bienergy(pair: MapPair, interval: Sequence[float], panels: int = 1000) -> float:
    """Composite-Simpson value of ``1/2 int F^2 f^(m-1) dr`` over ``[a, b]``."""
    a, b = interval
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    if panels < 2 or panels % 2:
        raise ValueError("panels must be a positive even integer")
    m = pair.m

    def integrand(r):
        F = tension_F(pair, r, 0)[0]
        return 0.5 * F * F * pair.dom.warp.jet(r, 0)[0] ** (m - 1)

    return simpson(integrand, (a, b), panels)


# classification catalog -------------------------------------------------------

_WARPS = {
    "r": ("euclidean", "a"),
    "sin": ("sphere", "sin(a)"),
    "sinh": ("hyperbolic", "sinh(a)"),
}


@dataclass(frozen=True)
class CatalogEntry:
    case: str
    dom_warp: str
    cod_warp: str
    profile: str | None
    classification: str
    domain_bound: str | None = None

    def models(self, m: int = 4) -> tuple[Model, Model]:
        dom_kind = {"r": "euclidean", "sin(r)": "sphere", "sinh(r)": "hyperbolic"}[self.dom_warp]
        cod_kind = {"a": "euclidean", "sin(a)": "sphere", "sinh(a)": "hyperbolic"}[self.cod_warp]
        ctor = {
            "euclidean": WarpingFunction.euclidean,
            "sphere": WarpingFunction.sphere,
            "hyperbolic": WarpingFunction.hyperbolic,
        }
        return make_model(m, ctor[dom_kind](var="r")), make_model(m, ctor[cod_kind](var="a"))

    def pair(self, c: float = 1.0) -> MapPair:
        if self.profile is None:
            raise ValueError(f"case {self.case} has no solution")
        dom, cod = self.models()
        params = {"c": c} if "c" in self.profile else {}
        return MapPair(dom, cod, ExprProfile.parse(self.profile, params))

    def r_upper(self, c: float = 1.0) -> float:
        """Right end of the profile's domain (exclusive)."""
        if self.domain_bound == "1/c^2":
            return 1.0 / c**2
        if self.dom_warp == "sin(r)":
            return math.pi
        return math.inf


def classification_catalog() -> list[CatalogEntry]:
    """Conformal biharmonic rotationally symmetric maps between 4-dim space forms."""
    return [
        CatalogEntry("1A", "r", "a", "c*r", "harmonic"),
        CatalogEntry("1B", "r", "sin(a)", "2*atan(c^2*r)", "proper-biharmonic"),
        CatalogEntry("1C", "r", "sinh(a)", "2*atanh(c^2*r)", "proper-biharmonic", "1/c^2"),
        CatalogEntry("2A", "sin(r)", "a", None, "none"),
        CatalogEntry("2B", "sin(r)", "sin(a)", "r", "harmonic"),
        CatalogEntry("2C", "sin(r)", "sinh(a)", None, "none"),
        CatalogEntry("3A", "sinh(r)", "a", None, "none"),
        CatalogEntry("3B", "sinh(r)", "sin(a)", None, "none"),
        CatalogEntry("3C", "sinh(r)", "sinh(a)", "r", "harmonic"),
    ]


def lookup(case: int | str, letter: str | None = None) -> CatalogEntry:
    key = f"{case}{letter or ''}".upper()
    for entry in classification_catalog():
        if entry.case == key:
            return entry
    raise KeyError(f"no catalog case {key!r}")


# pole smoothness --------------------------------------------------------------


@dataclass
class PoleReport:
    derivatives: dict[int, float]
    passed: bool
    failures: list[str]


def pole_smoothness_check(profile: RadialProfile, k_max: int = 2, eps: float = 1e-5, tol: float = 1e-5) -> PoleReport:
    """Estimate ``alpha^(j)(0)`` for ``j <= 2 k_max + 1`` from jets near the pole.

    Jets at ``eps, eps/2, eps/4`` are combined by Richardson extrapolation
    (removing the O(eps) and O(eps^2) terms).  Even derivatives must vanish
    within ``tol``; odd ones must be finite.  The leftover error is of order
    ``alpha^(2k+3)(0) eps^3``, which grows quickly for steep profiles such as
    ``2 atan(c^2 r)``; the jets themselves carry no truncation error, so a
    small ``eps`` costs nothing in rounding.
    """
    if not 1 <= k_max <= 2:
        raise ValueError("k_max must be 1 or 2")
    order = 2 * k_max + 1
    try:
        j1, j2, j4 = (profile.jet(eps / s, order) for s in (1, 2, 4))
    except (JetDomainError, ZeroDivisionError, ValueError) as exc:
        raise ValueError(f"profile undefined near the pole: {exc}") from None
    est = {}
    for k in range(order + 1):
        a, b, c = j1[k], j2[k], j4[k]
        est[k] = (8 * c - 6 * b + a) / 3
    failures = []
    for k in range(2, order + 1, 2):
        if not abs(est[k]) <= tol:
            failures.append(f"alpha^({k})(0) = {est[k]:.6g} != 0")
    for k in range(1, order + 1, 2):
        if not math.isfinite(est[k]):
            failures.append(f"alpha^({k})(0) not finite")
    if not abs(est[0]) <= 1e-4:
        failures.append(f"alpha(0) = {est[0]:.6g} != 0")
    return PoleReport(est, not failures, failures)


__all__ = [
    "CatalogEntry",
    "ExprProfile",
    "MapPair",
    "PoleReport",
    "RadialProfile",
    "SampledProfile",
    "bienergy_lagrangian",
    "bitension_residual_F",
    "bitension_residual_expanded",
    "classification_catalog",
    "conformal_biharmonic_residual",
    "conformality_residual",
    "energy_lagrangian",
    "h_condition_residual",
    "lookup",
    "pole_smoothness_check",
    "prime_integral",
    "reduced_bienergy",
    "tension_F",
]
