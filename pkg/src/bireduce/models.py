"""Warped-product models ``(S^{m-1} x [0, r_max), f(r)^2 g_S + dr^2)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .expr import Expr, bind_constants, diff, evaluate, parse_expr
from .jets import Jet, scalar

POLE_TOL = 1e-6
POLE_EPS = 1e-6
NEAR_ZERO = 1e-12


class ModelValidationError(ValueError):
    """A warping function violates the pole conditions."""

    def __init__(self, condition: str, value: float):
        super().__init__(f"pole condition {condition} violated: value {value:.6g}")
        self.condition = condition
        self.value = value


class PoleProximityError(ArithmeticError):
    """A formula with 1/f factors was evaluated where f is numerically zero."""


@dataclass(frozen=True)
class WarpingFunction:
    """Radial warping function ``f`` of a model, as an expression in one variable.

    The same object serves as codomain warp ``h``; ``var`` is then usually ``"a"``.
    """

    expr: Expr
    var: str = "r"
    r_max: float = math.inf
    tag: str = "expr"
    _derivs: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def euclidean(cls, var: str = "r") -> "WarpingFunction":
        return cls(parse_expr(var, [var]), var, math.inf, "euclidean")

    @classmethod
    def sphere(cls, d: float = 1.0, var: str = "r") -> "WarpingFunction":
        if d <= 0:
            raise ValueError("sphere curvature parameter must be positive")
        e = bind_constants(parse_expr(f"sin(d*{var})/d", [var, "d"]), {"d": d})
        return cls(e, var, math.pi / d, f"sphere({d:g})")

    @classmethod
    def hyperbolic(cls, c: float = 1.0, var: str = "r") -> "WarpingFunction":
        if c <= 0:
            raise ValueError("hyperbolic parameter must be positive")
        e = bind_constants(parse_expr(f"sinh(c*{var})/c", [var, "c"]), {"c": c})
        return cls(e, var, math.inf, f"hyperbolic({c:g})")

    @classmethod
    def from_source(
        cls,
        src: str,
        var: str = "r",
        r_max: float = math.inf,
        params: Mapping[str, float] | None = None,
    ) -> "WarpingFunction":
        params = dict(params or {})
        e = bind_constants(parse_expr(src, [var, *params]), params)
        return cls(e, var, r_max, "expr")

    def derivative_expr(self, k: int) -> Expr:
        """Symbolic ``k``-th derivative (cached)."""
        if k == 0:
            return self.expr
        if k not in self._derivs:
            self._derivs[k] = diff(self.derivative_expr(k - 1), self.var)
        return self._derivs[k]

    def __call__(self, x):
        """Evaluate at a float, jet or slot jet (composition through ``x``)."""
        return evaluate(self.expr, {self.var: x})

    def deriv(self, k: int, x):
        """``f^(k)`` evaluated at (or composed with) ``x``."""
        return evaluate(self.derivative_expr(k), {self.var: x})

    def jet(self, x: float, order: int) -> Jet:
        """Tower ``(f(x), f'(x), ..., f^(order)(x))``."""
        out = self(Jet.variable(float(x), order))
        return out if isinstance(out, Jet) else Jet.constant(float(out), order)

    @property
    def closing(self) -> bool:
        """Whether the domain ends at a second pole ``f(b) = 0``."""
        if not math.isfinite(self.r_max):
            return False
        try:
            return abs(scalar(self(self.r_max))) < POLE_TOL
        except ValueError:
            return False

    def describe(self):
        if self.tag == "euclidean":
            return self.var
        if self.tag.startswith("sphere"):
            return {"sphere": float(self.tag[7:-1])}
        if self.tag.startswith("hyperbolic"):
            return {"hyperbolic": float(self.tag[11:-1])}
        out = {"expr": str(self.expr)}
        if math.isfinite(self.r_max):
            out["r_max"] = self.r_max
        return out


@dataclass(frozen=True)
class Model:
    m: int
    warp: WarpingFunction

    def f(self, r):
        return self.warp(r)

    def describe(self) -> dict:
        return {"m": self.m, "warp": self.warp.describe()}


def _richardson_at(warp: WarpingFunction, r0: float, direction: float, order: int) -> list[float]:
    """Estimate ``(f(r0), ..., f^(order)(r0))`` from jets at ``r0 + direction*eps``.

    Two-level Richardson extrapolation removes the O(eps) term.
    """
    j1 = warp.jet(r0 + direction * POLE_EPS, order)
    j2 = warp.jet(r0 + direction * POLE_EPS / 2, order)
    return [2.0 * b - a for a, b in zip(j1.coeffs, j2.coeffs)]


def validate_warp(warp: WarpingFunction) -> None:
    """Check the pole conditions at 0 (and at a closing pole if present)."""
    vals = _richardson_at(warp, 0.0, 1.0, 4)
    checks = [
        ("f(0)=0", vals[0], 0.0),
        ("f'(0)=1", vals[1], 1.0),
        ("f''(0)=0", vals[2], 0.0),
        ("f''''(0)=0", vals[4], 0.0),
    ]
    if warp.closing:
        b = warp.r_max
        end = _richardson_at(warp, b, -1.0, 4)
        checks += [
            ("f(b)=0", end[0], 0.0),
            ("f'(b)=-1", end[1], -1.0),
            ("f''(b)=0", end[2], 0.0),
            ("f''''(b)=0", end[4], 0.0),
        ]
    for name, got, want in checks:
        if not math.isfinite(got) or abs(got - want) > POLE_TOL:
            raise ModelValidationError(name, got)
    hi = warp.r_max if math.isfinite(warp.r_max) else 10.0
    for k in range(1, 50):
        r = hi * k / 50
        if scalar(warp(r)) <= 0.0:
            raise ModelValidationError("f(r)>0 on the interior", scalar(warp(r)))


def make_model(m: int, warp: WarpingFunction) -> Model:
    if m < 2:
        raise ValueError(f"model dimension must be >= 2, got {m}")
    validate_warp(warp)
    return Model(int(m), warp)


def radial_curvature(model: Model, r: float) -> float:
    """``K(r) = -f''(r)/f(r)`` from the Jacobi equation."""
    j = model.warp.jet(r, 2)
    if abs(j[0]) < NEAR_ZERO:
        raise PoleProximityError(f"|f({r})| < {NEAR_ZERO}")
    return -j[2] / j[0]


def warp_from_descriptor(desc, var: str = "r") -> WarpingFunction:
    """Build a warp from the JSON descriptor forms ``"r"``, ``{"sphere": d}``, ..."""
    if isinstance(desc, str):
        compact = "".join(desc.split())
        if compact == var:
            return WarpingFunction.euclidean(var)
        if compact == f"sin({var})":
            return WarpingFunction.sphere(1.0, var)
        if compact == f"sinh({var})":
            return WarpingFunction.hyperbolic(1.0, var)
        return WarpingFunction.from_source(desc, var)
    if not isinstance(desc, dict) or len(desc) == 0:
        raise ValueError(f"bad warp descriptor {desc!r}")
    if "sphere" in desc:
        return WarpingFunction.sphere(float(desc["sphere"]), var)
    if "hyperbolic" in desc:
        return WarpingFunction.hyperbolic(float(desc["hyperbolic"]), var)
    if "expr" in desc:
        r_max = float(desc.get("r_max", math.inf))
        return WarpingFunction.from_source(desc["expr"], var, r_max, desc.get("params"))
    raise ValueError(f"bad warp descriptor {desc!r}")


def model_from_descriptor(desc: dict, var: str = "r") -> Model:
    """Parse ``{"m": int, "warp": ...}``."""
    if "m" not in desc or "warp" not in desc:
        raise ValueError("model descriptor needs fields 'm' and 'warp'")
    return make_model(int(desc["m"]), warp_from_descriptor(desc["warp"], var))


@lru_cache(maxsize=None)
def builtin(name: str, m: int = 4, var: str = "r") -> Model:
    """``"euclidean"``, ``"sphere"`` or ``"hyperbolic"`` with unit parameter."""
    ctor = {
        "euclidean": WarpingFunction.euclidean,
        "sphere": WarpingFunction.sphere,
        "hyperbolic": WarpingFunction.hyperbolic,
    }[name]
    return make_model(m, ctor(var=var))


__all__ = [
    "Model",
    "ModelValidationError",
    "PoleProximityError",
    "WarpingFunction",
    "builtin",
    "make_model",
    "model_from_descriptor",
    "radial_curvature",
    "validate_warp",
    "warp_from_descriptor",
]
