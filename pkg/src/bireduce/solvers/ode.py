"""Explicit Runge–Kutta integrators: fixed-step RK4 and adaptive Fehlberg 4(5)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

MIN_STEP = 1e-12


class NumericalFailure(ArithmeticError):
    """Integration produced non-finite values or could not proceed."""


@dataclass(frozen=True)
class OdeSystem:
    """``y' = rhs(t, y)``; optional ``inside(t, y)`` stops at a domain exit."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    inside: Optional[Callable[[float, np.ndarray], bool]] = None

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.rhs(t, y), dtype=float)


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    steps: np.ndarray
    reason: str = "range end"  # | "domain exit" | "step underflow"

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]

    def __len__(self) -> int:
        return len(self.t)


def _check_state(t: float, y: np.ndarray) -> None:
    if not np.all(np.isfinite(y)):
        raise NumericalFailure(f"non-finite state at t={t}")


def _finish(ts, ys, hs, reason) -> Trajectory:
    return Trajectory(np.array(ts), np.array(ys), np.array(hs), reason)


def rk4_integrate(sys: OdeSystem, state0: Sequence[float], t_range: Sequence[float], step: float) -> Trajectory:
    """Classical fixed-step fourth-order Runge–Kutta."""
    if step <= 0:
        raise ValueError("step must be positive")
    t0, t1 = map(float, t_range)
    y = np.array(state0, dtype=float)
    if y.shape != (sys.dimension,):
        raise ValueError(f"state has shape {y.shape}, expected ({sys.dimension},)")
    n = max(1, int(round((t1 - t0) / step)))
    h = (t1 - t0) / n
    ts, ys, hs = [t0], [y.copy()], []
    for i in range(n):
        t = t0 + i * h
        k1 = sys(t, y)
        k2 = sys(t + h / 2, y + h / 2 * k1)
        k3 = sys(t + h / 2, y + h / 2 * k2)
        k4 = sys(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
        _check_state(t, y)
        if sys.inside is not None and not sys.inside(t, y):
            return _finish(ts, ys, hs, "domain exit")
        ts.append(t)
        ys.append(y.copy())
        hs.append(h)
    return _finish(ts, ys, hs, "range end")


# Fehlberg 4(5) tableau
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
_E = _B5 - _B4


def rkf45_integrate(
    sys: OdeSystem,
    state0: Sequence[float],
    t_range: Sequence[float],
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    h0: float | None = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Adaptive Runge–Kutta–Fehlberg 4(5); the fifth-order solution is propagated."""
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    t0, t1 = map(float, t_range)
    span = t1 - t0
    y = np.array(state0, dtype=float)
    if y.shape != (sys.dimension,):
        raise ValueError(f"state has shape {y.shape}, expected ({sys.dimension},)")
    h = h0 if h0 is not None else min(abs(span), 1e-3 * max(1.0, abs(span)))
    t = t0
    ts, ys, hs = [t], [y.copy()], []
    k = np.empty((6, sys.dimension))
    for _ in range(max_steps):
        if t >= t1:
            break
        h = min(h, t1 - t)
        for i in range(6):
            yi = y + h * (np.asarray(_A[i]) @ k[:i]) if i else y
            k[i] = sys(t + _C[i] * h, yi)
        y5 = y + h * (_B5 @ k)
        err = h * (_E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y5))
        ratio = float(np.max(np.abs(err) / scale)) if np.all(np.isfinite(y5)) else np.inf
        if ratio <= 1.0:
            t = t + h if t1 - t > h else t1
            y = y5
            if sys.inside is not None and not sys.inside(t, y):
                return _finish(ts, ys, hs, "domain exit")
            ts.append(t)
            ys.append(y.copy())
            hs.append(h)
            fac = 5.0 if ratio == 0 else min(5.0, 0.9 * ratio ** -0.2)
        else:
            fac = max(0.1, 0.9 * ratio ** -0.25) if np.isfinite(ratio) else 0.1
        h *= fac
        if h < MIN_STEP and t < t1:
            return _finish(ts, ys, hs, "step underflow")
    else:
        raise NumericalFailure(f"exceeded {max_steps} steps")
    _check_state(t, y)
    return _finish(ts, ys, hs, "range end")
