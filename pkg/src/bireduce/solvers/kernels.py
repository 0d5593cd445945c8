"""Root finding and quadrature kernels (thin wrappers over scipy)."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize


class NoSignChangeError(ValueError):
    """The bracket does not straddle a root."""


def brent_root(fn: Callable[[float], float], bracket: Sequence[float], tol: float = 1e-14) -> float:
    """Root of ``fn`` in ``[lo, hi]`` by Brent's method, to absolute ``tol``."""
    lo, hi = map(float, bracket)
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    return float(optimize.brentq(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))


def simpson(fn: Callable[[float], float], interval: Sequence[float], panels: int) -> float:
    """Composite Simpson rule with ``panels`` (even) subintervals."""
    if panels < 2 or panels % 2:
        raise ValueError(f"panels must be an even integer >= 2, got {panels}")
    a, b = map(float, interval)
    xs = np.linspace(a, b, panels + 1)
    ys = np.array([fn(x) for x in xs], dtype=float)
    return float(integrate.simpson(ys, x=xs))
