"""Euler–Lagrange operators for reduced (bi)energy functionals.

Slot partials ``dL/dq``, ``dL/dq'``, ``dL/dq''`` are obtained by evaluating the
Lagrangian with a one-hot :class:`~bireduce.jets.SlotJet` in the slot of
interest; the coefficients of that slot jet are ordinary jets in the curve
parameter, so total derivatives ``d/dt`` come for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from .jets import Jet, SlotJet, scalar
from .solvers.kernels import simpson


class Curve(Protocol):
    def jet(self, t: float, order: int) -> Jet: ...


@dataclass(frozen=True)
class Lagrangian:
    """``L(t, q, q'[, q''])`` for ``ncomp`` components.

    For ``ncomp == 1`` the evaluator receives scalars ``(t, a, ad[, add])``;
    otherwise tuples ``(t, qs, qds[, qdds])``.  The evaluator must be written
    with ordinary arithmetic and :mod:`bireduce.jets` functions so that it
    accepts floats, jets and slot jets alike.
    """

    func: Callable
    order: int = 1
    ncomp: int = 1

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("Lagrangian order must be 1 or 2")
        if self.ncomp < 1:
            raise ValueError("ncomp must be positive")

    def __call__(self, t, *slots):
        return self.func(t, *slots)

    def evaluate(self, t, comps: Sequence[Sequence]):
        """``comps[j][l]`` is the ``l``-th derivative of component ``j``."""
        if self.ncomp == 1:
            return self.func(t, *comps[0][: self.order + 1])
        slots = [tuple(c[l] for c in comps) for l in range(self.order + 1)]
        return self.func(t, *slots)


class Lagrangian1(Lagrangian):
    def __init__(self, func: Callable, ncomp: int = 1):
        super().__init__(func, 1, ncomp)


class Lagrangian2(Lagrangian):
    def __init__(self, func: Callable, ncomp: int = 1):
        super().__init__(func, 2, ncomp)


def slot_partials(L: Lagrangian, curve: Sequence[Jet], t: float) -> list[list[Jet]]:
    """``P[j][l]``: jet in ``t`` (order ``L.order``) of ``dL/d(q_j^(l))``."""
    if len(curve) != L.ncomp:
        raise ValueError(f"arity mismatch: Lagrangian has {L.ncomp} components, curve has {len(curve)}")
    k = L.order
    need = 2 * k
    for j, c in enumerate(curve):
        if c.order < need:
            raise ValueError(f"component {j} jet has order {c.order} < {need}")
    base = []
    for c in curve:
        d = [c]
        for _ in range(k):
            d.append(d[-1].derivative())
        base.append([x.truncate(k) for x in d])
    tj = Jet.variable(float(t), k)
    out = []
    for j in range(L.ncomp):
        row = []
        for l in range(k + 1):
            comps = [list(b) for b in base]
            comps[j][l] = SlotJet((base[j][l], 1.0))
            val = L.evaluate(tj, comps)
            if isinstance(val, SlotJet):
                p = val.coeffs[1]
            else:
                p = 0.0
            if not isinstance(p, Jet):
                p = Jet.constant(scalar(p), k)
            row.append(p)
        out.append(row)
    return out


def _el_component(P: list[Jet]) -> float:
    return sum((-1) ** l * P[l][l] for l in range(len(P)))


def el_first_order(L: Lagrangian, alpha: Jet, t: float) -> float:
    """``dL/da - d/dt dL/da'`` at ``t``."""
    if L.order != 1:
        raise ValueError("first-order Euler–Lagrange needs a first-order Lagrangian")
    return _el_component(slot_partials(L, [alpha], t)[0])


def el_second_order(L: Lagrangian, alpha: Jet, t: float) -> float:
    """``dL/da - d/dt dL/da' + d^2/dt^2 dL/da''`` at ``t``."""
    if L.order != 2:
        raise ValueError("second-order Euler–Lagrange needs a second-order Lagrangian")
    return _el_component(slot_partials(L, [alpha], t)[0])


def el_system(L: Lagrangian, curve: Sequence[Jet], t: float) -> list[float]:
    """Componentwise Euler–Lagrange values for a vector Lagrangian."""
    return [_el_component(P) for P in slot_partials(L, curve, t)]


# functionals ------------------------------------------------------------------


def _slot_values(alpha: Curve, t: float, order: int) -> list[float]:
    return list(alpha.jet(t, order).coeffs)


def functional_value(L: Lagrangian, alpha: Curve, interval: Sequence[float], panels: int = 1000) -> float:
    """Composite-Simpson value of ``int_a^b L dt`` along ``alpha``."""
    if L.ncomp != 1:
        raise ValueError("functional_value handles scalar Lagrangians")

    def integrand(t):
        return scalar(L.evaluate(t, [_slot_values(alpha, t, L.order)]))

    return simpson(integrand, interval, panels)


@dataclass(frozen=True)
class CurveFamily:
    """``alpha + h * beta`` as a curve."""

    base: Curve
    perturbation: Curve
    h: float = 0.0

    def jet(self, t: float, order: int) -> Jet:
        return self.base.jet(t, order) + self.h * self.perturbation.jet(t, order)

    def check_support(self, interval: Sequence[float], tol: float = 1e-12) -> None:
        a, b = interval
        for end in (a, b):
            v = self.perturbation.jet(end, 0)[0]
            if abs(v) > tol:
                raise ValueError(f"perturbation does not vanish at t={end}: {v:.3g}")


def first_variation_fd(
    L: Lagrangian,
    alpha: Curve,
    beta: Curve,
    interval: Sequence[float],
    h_step: float = 1e-5,
    panels: int = 1000,
) -> float:
    """Central difference ``[E(alpha + h beta) - E(alpha - h beta)] / (2h)``."""
    CurveFamily(alpha, beta).check_support(interval)
    plus = functional_value(L, CurveFamily(alpha, beta, h_step), interval, panels)
    minus = functional_value(L, CurveFamily(alpha, beta, -h_step), interval, panels)
    return (plus - minus) / (2 * h_step)


def weak_el_integral(L: Lagrangian, alpha: Curve, beta: Curve, interval: Sequence[float], panels: int = 1000) -> float:
    """``int EL(alpha) * beta dt``, the right side of the first-variation identity."""
    el = el_first_order if L.order == 1 else el_second_order
    need = 2 * L.order

    def integrand(t):
        return el(L, alpha.jet(t, need), t) * beta.jet(t, 0)[0]

    return simpson(integrand, interval, panels)


__all__ = [
    "CurveFamily",
    "Lagrangian",
    "Lagrangian1",
    "Lagrangian2",
    "el_first_order",
    "el_second_order",
    "el_system",
    "first_variation_fd",
    "functional_value",
    "slot_partials",
    "weak_el_integral",
]
