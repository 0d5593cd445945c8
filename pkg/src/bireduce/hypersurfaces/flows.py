"""Profile-curve flows: constant mean curvature, biconservative, normal-biharmonic.

Each flow is a first-order system in arc length.  Integration uses the
fixed-step RK4 of :mod:`bireduce.solvers`; sampled points are then lifted to
exact s-jets by Picard iteration of the same vector field, so residuals along
the polyline are evaluated without differencing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import jets
from ..jets import Jet
from ..solvers.ode import OdeSystem, Trajectory, rk4_integrate
from .actions import OrbitAction
from .geometry import BOUNDARY_TOL, ProfileCurve, biharmonic_residuals, curvatures, in_cone, w_form

CSV_COLUMNS = ("s", "x", "y", "theta", "k_d", "mean_f", "A2", "res_normal", "res_tangential")


# vector-field pieces, generic over floats and jets ----------------------------


def orbital_sum(action: OrbitAction, x, y, th):
    """``sum m_i k_i`` with ``k_i = w_i(sin th, -cos th) / w_i(x, y)``."""
    s, c = jets.sin(th), jets.cos(th)
    return sum(m * w_form(action.d, i, s, -c) / w_form(action.d, i, x, y) for i, m in enumerate(action.mults))


def orbital_sum_sq(action: OrbitAction, x, y, th):
    s, c = jets.sin(th), jets.cos(th)
    total = 0.0
    for i, m in enumerate(action.mults):
        k = w_form(action.d, i, s, -c) / w_form(action.d, i, x, y)
        total = total + m * k * k
    return total


def half_log_volume_rate(action: OrbitAction, x, y, th):
    s, c = jets.sin(th), jets.cos(th)
    return sum(m * w_form(action.d, i, c, s) / w_form(action.d, i, x, y) for i, m in enumerate(action.mults))


def orbital_sum_rate(action: OrbitAction, x, y, th, kd):
    """``d/ds sum m_i k_i`` along an arc-length curve with ``theta' = kd``."""
    s, c = jets.sin(th), jets.cos(th)
    total = 0.0
    for i, m in enumerate(action.mults):
        w = w_form(action.d, i, x, y)
        total = total + m * (w_form(action.d, i, c, s) * kd / w - w_form(action.d, i, s, -c) * w_form(action.d, i, c, s) / (w * w))
    return total


def cmc_field(action: OrbitAction, f0: float):
    def G(s, u):
        x, y, th = u
        return [jets.cos(th), jets.sin(th), f0 - orbital_sum(action, x, y, th)]

    return G


def biconservative_field(action: OrbitAction):
    def G(s, u):
        x, y, th = u
        return [jets.cos(th), jets.sin(th), -orbital_sum(action, x, y, th) / 3.0]

    return G


def biharmonic_field(action: OrbitAction):
    def G(s, u):
        x, y, th, kd, f1 = u
        S = orbital_sum(action, x, y, th)
        f = kd + S
        A2 = kd * kd + orbital_sum_sq(action, x, y, th)
        return [
            jets.cos(th),
            jets.sin(th),
            kd,
            f1 - orbital_sum_rate(action, x, y, th, kd),
            -half_log_volume_rate(action, x, y, th) * f1 + A2 * f,
        ]

    return G


def lift(G: Callable, s0: float, state: Sequence[float], order: int) -> list[Jet]:
    """Exact s-jets of the solution through ``state`` by Picard iteration."""
    U = [Jet((float(v),)) for v in state]
    for k in range(order):
        sj = Jet.variable(s0, k) if k else Jet((s0,))
        rates = G(sj, U)
        U = [
            (r if isinstance(r, Jet) else Jet.constant(float(r), k)).integrate(float(v))
            for r, v in zip(rates, state)
        ]
    return U


# flows ------------------------------------------------------------------------


@dataclass
class FlowResult:
    trajectory: Trajectory
    rows: np.ndarray  # columns as CSV_COLUMNS
    report: dict = field(default_factory=dict)

    @property
    def reason(self) -> str:
        return self.trajectory.reason

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, CSV_COLUMNS.index(name)]

    def to_csv(self) -> str:
        return polyline_csv(self.rows)


def polyline_csv(rows: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(["%.17g" % v for v in row])
    return buf.getvalue()


def _inside(action: OrbitAction):
    def inside(s, u):
        x, y = u[0], u[1]
        if not in_cone(action.d, x, y):
            return False
        return all(abs(w_form(action.d, i, x, y)) > BOUNDARY_TOL for i in range(action.d))

    return inside


def _run(action, G, init, s_range, step, samples):
    init = [float(v) for v in init]
    if not _inside(action)(0.0, init):
        raise ValueError(f"initial point ({init[0]}, {init[1]}) is not interior to the orbit cone")

    def rhs(s, u):
        return np.array(G(s, list(u)), dtype=float)

    sys = OdeSystem(len(init), rhs, _inside(action))
    tr = rk4_integrate(sys, init, s_range, step)
    idx = np.unique(np.linspace(0, len(tr.t) - 1, min(samples, len(tr.t))).round().astype(int))
    rows = []
    for i in idx:
        s, u = float(tr.t[i]), tr.y[i]
        U = lift(G, s, u, 3)
        curve = ProfileCurve(float(u[0]), float(u[1]), U[2])
        rep = curvatures(action, curve)
        normal, tangential = biharmonic_residuals(action, curve)
        rows.append((s, u[0], u[1], u[2], rep.kd, rep.mean_f, rep.A2, normal, tangential))
    return tr, np.array(rows, dtype=float)


def cmc_flow(
    action: OrbitAction,
    f0: float,
    init: Sequence[float],
    s_range: Sequence[float] = (0.0, 1.0),
    step: float = 1e-3,
    samples: int = 101,
) -> FlowResult:
    """Profile curves with constant mean curvature ``f0`` (the branch ``f' = 0``)."""
    tr, rows = _run(action, cmc_field(action, f0), init, s_range, step, samples)
    mean_f = rows[:, 5]
    report = {
        "flow": "cmc",
        "f0": f0,
        "reason": tr.reason,
        "max_mean_f_drift": float(np.max(np.abs(mean_f - f0))),
        "min_A2": float(np.min(rows[:, 6])),
        "max_abs_normal": float(np.max(np.abs(rows[:, 7]))),
        "min_abs_normal": float(np.min(np.abs(rows[:, 7]))),
        "max_abs_tangential": float(np.max(np.abs(rows[:, 8]))),
    }
    return FlowResult(tr, rows, report)


def biconservative_flow(
    action: OrbitAction,
    init: Sequence[float],
    s_range: Sequence[float] = (0.0, 1.0),
    step: float = 1e-3,
    samples: int = 101,
) -> FlowResult:
    """The non-CMC biconservative branch ``f + 2 k_d = 0``."""
    tr, rows = _run(action, biconservative_field(action), init, s_range, step, samples)
    report = {
        "flow": "biconservative",
        "reason": tr.reason,
        "max_abs_tangential": float(np.max(np.abs(rows[:, 8]))),
        "max_abs_normal": float(np.max(np.abs(rows[:, 7]))),
        "max_abs_mean_f": float(np.max(np.abs(rows[:, 5]))),
        "max_branch_defect": float(np.max(np.abs(rows[:, 5] + 2 * rows[:, 4]))),
    }
    return FlowResult(tr, rows, report)


def biharmonic_flow(
    action: OrbitAction,
    init: Sequence[float],
    s_range: Sequence[float] = (0.0, 1.0),
    step: float = 1e-3,
    samples: int = 101,
) -> FlowResult:
    """Integrate the normal bitension equation; monitor the tangential one.

    ``init = (x, y, theta, k_d, f1)`` with ``f1 = f'``.
    """
    if len(init) != 5:
        raise ValueError("biharmonic flow needs init = (x, y, theta, k_d, f1)")
    G = biharmonic_field(action)
    tr, rows = _run(action, G, init, s_range, step, samples)
    x, y, th, kd, f1 = tr.y.T
    f = kd + np.array([orbital_sum(action, *p) for p in zip(x, y, th)])
    monitor = f1 * (f + 2 * kd)
    report = {
        "flow": "biharmonic",
        "reason": tr.reason,
        "max_abs_tangential_monitor": float(np.max(np.abs(monitor))),
        "max_abs_normal": float(np.max(np.abs(rows[:, 7]))),
        "max_abs_mean_f": float(np.max(np.abs(f))),
        "max_abs_f1": float(np.max(np.abs(f1))),
        "final_f1": float(f1[-1]),
    }
    return FlowResult(tr, rows, report)


__all__ = [
    "CSV_COLUMNS",
    "FlowResult",
    "biconservative_flow",
    "biharmonic_flow",
    "cmc_flow",
    "lift",
    "polyline_csv",
]
