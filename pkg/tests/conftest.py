"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import strategies as st

from bireduce.expr import Call, Const, Name, Neg
from bireduce.models import WarpingFunction, make_model

mpmath.mp.dps = 40

MP_FUNCS = {
    "sin": mpmath.sin,
    "cos": mpmath.cos,
    "tan": mpmath.tan,
    "asin": mpmath.asin,
    "acos": mpmath.acos,
    "atan": mpmath.atan,
    "sinh": mpmath.sinh,
    "cosh": mpmath.cosh,
    "tanh": mpmath.tanh,
    "atanh": mpmath.atanh,
    "exp": mpmath.exp,
    "ln": mpmath.log,
    "sqrt": mpmath.sqrt,
}


def mp_eval(e, bindings):
    """Evaluate an expression tree in mpmath arithmetic (independent of the jet code)."""
    if isinstance(e, Const):
        return mpmath.mpf(e.value)
    if isinstance(e, Name):
        return bindings[e.name]
    if isinstance(e, Call):
        return MP_FUNCS[e.func](mp_eval(e.arg, bindings))
    if isinstance(e, Neg):
        return -mp_eval(e.arg, bindings)
    a, b = mp_eval(e.left, bindings), mp_eval(e.right, bindings)
    return {"+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b, "/": lambda: a / b, "^": lambda: a**b}[e.op]()


def mp_central_diffs(fn, x, h=1e-5, kmax=3):
    """Central finite differences of orders 1..kmax at step h, in 40-digit arithmetic."""
    x = mpmath.mpf(x)
    h = mpmath.mpf(h)
    return [mpmath.diff(fn, x, k, h=h, method="step", direction=0) for k in range(1, kmax + 1)]


# random expression sources over functions that are smooth on the whole line
SAFE_UNARY = ["sin", "cos", "atan", "tanh", "exp"]


@st.composite
def smooth_sources(draw, depth=3, var="r"):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        if draw(st.booleans()):
            return var
        return repr(draw(st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 3))))
    kind = draw(st.sampled_from(["call", "add", "mul", "div", "pow", "neg"]))
    a = draw(smooth_sources(depth=depth - 1, var=var))
    if kind == "call":
        fn = draw(st.sampled_from(SAFE_UNARY))
        inner = f"atan({a})" if fn == "exp" else a  # keep exp arguments bounded
        return f"{fn}({inner})"
    if kind == "neg":
        return f"-({a})"
    b = draw(smooth_sources(depth=depth - 1, var=var))
    if kind == "add":
        return f"({a}) {draw(st.sampled_from(['+', '-']))} ({b})"
    if kind == "mul":
        return f"({a})*({b})"
    if kind == "div":
        return f"({a})/(1.5 + sin({b}))"
    return f"({a})^{draw(st.integers(0, 3))}"


@pytest.fixture(scope="session")
def euclid4():
    return make_model(4, WarpingFunction.euclidean())


@pytest.fixture(scope="session")
def sphere_cod4():
    return make_model(4, WarpingFunction.sphere(var="a"))


def rel_close(a, b, rel, abs_floor=0.0):
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_floor)


def m_models(m):
    """(f = r, h = a), (f = r, h = sin a), (f = r, h = sinh a) for dimension m."""
    return {
        "flat": (make_model(m, WarpingFunction.euclidean()), make_model(m, WarpingFunction.euclidean("a"))),
        "sphere": (make_model(m, WarpingFunction.euclidean()), make_model(m, WarpingFunction.sphere(var="a"))),
        "hyperbolic": (make_model(m, WarpingFunction.euclidean()), make_model(m, WarpingFunction.hyperbolic(var="a"))),
    }




class ConformalODEProfile:
    """Numerical solution of ``alpha' = h(alpha)/f(r)`` with exact jets.

    The value comes from a tight scipy integration; higher derivatives are
    obtained by Picard-lifting the same ODE, so no differencing is involved.
    """

    boundary = False

    def __init__(self, dom, cod, r0, a0, r1):
        from scipy.integrate import solve_ivp

        self.dom, self.cod = dom, cod
        self.sol = solve_ivp(
            lambda r, y: [cod.warp(y[0]) / dom.warp(r)],
            (r0, r1),
            [a0],
            method="DOP853",
            rtol=1e-13,
            atol=1e-14,
            dense_output=True,
        )

    def __call__(self, r):
        return float(self.sol.sol(r)[0])

    def jet(self, r, order):
        from bireduce.jets import Jet

        a0 = self(r)
        A = Jet((a0,))
        for k in range(order):
            if k == 0:
                A = Jet((a0, self.cod.warp(a0) / self.dom.warp(r)))
            else:
                A = (self.cod.warp(A) / self.dom.warp(Jet.variable(r, k))).integrate(a0)
        return A


def poly_profile_source(coeffs, r0):
    """Taylor polynomial with derivative values ``coeffs`` at ``r0``."""
    terms = [f"({float(c)!r})*(r - {float(r0)!r})^{k}/{math.factorial(k)}" for k, c in enumerate(coeffs)]
    return " + ".join(terms)


# acceptance summary -------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
