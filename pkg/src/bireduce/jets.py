"""Truncated derivative towers (Taylor-mode automatic differentiation).

A :class:`Jet` holds the values ``(g(t), g'(t), ..., g^(n)(t))`` of a scalar
function at one point.  Arithmetic and the elementary functions propagate
these towers exactly, so every residual in the package is evaluated from
exact derivatives rather than finite differences.

Coefficients may themselves be jets.  :class:`SlotJet` is a second tower
type that sits *outside* ordinary jets: a ``SlotJet`` whose coefficients are
``Jet`` objects differentiates with respect to a Lagrangian slot while the
inner jets carry the dependence on the curve parameter.  Mixed expressions
resolve by rank, so an inner ``Jet`` is always a constant to a ``SlotJet``.
"""

from __future__ import annotations

import math
from numbers import Real
from typing import Callable, Sequence

MAX_ORDER = 6


class JetDomainError(ValueError):
    """An elementary function was evaluated outside its real domain."""


class JetOrderError(ValueError):
    """Requested derivative order exceeds :data:`MAX_ORDER`."""


def scalar(x) -> float:
    """Innermost constant value of a (possibly nested) tower."""
    while isinstance(x, _Tower):
        x = x.coeffs[0]
    return float(x)


def _factorials(n: int) -> list[float]:
    return [float(math.factorial(k)) for k in range(n + 1)]


class _Tower:
    """Shared arithmetic for derivative towers.

    Internally products and function recurrences work on Taylor
    coefficients ``g^(k)/k!``; the stored ``coeffs`` are derivative values.
    """

    _rank = 0
    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        if len(coeffs) - 1 > MAX_ORDER:
            raise JetOrderError(f"jet order {len(coeffs) - 1} exceeds cap {MAX_ORDER}")
        self.coeffs = coeffs

    # construction helpers -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order: int):
        return cls((value,) + (0.0,) * order)

    @classmethod
    def variable(cls, value, order: int):
        """Identity tower ``t -> t`` at ``value``."""
        if order == 0:
            return cls((value,))
        return cls((value, 1.0) + (0.0,) * (order - 1))

    @classmethod
    def _from_taylor(cls, t: Sequence):
        fac = _factorials(len(t) - 1)
        return cls(tuple(c * fac[k] for k, c in enumerate(t)))

    def _taylor(self) -> list:
        fac = _factorials(self.order)
        return [c / fac[k] for k, c in enumerate(self.coeffs)]

    @property
    def value(self):
        return self.coeffs[0]

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int):
        if order > self.order:
            raise JetOrderError(f"cannot raise jet order {self.order} to {order}")
        return type(self)(self.coeffs[: order + 1])

    def derivative(self):
        """Tower of the derivative, one order lower."""
        if self.order == 0:
            raise JetOrderError("derivative of an order-0 jet is unknown")
        return type(self)(self.coeffs[1:])

    def integrate(self, value):
        """Tower of the antiderivative taking ``value`` at the point."""
        return type(self)((value,) + self.coeffs)

    def __repr__(self) -> str:
        body = ", ".join(repr(c) for c in self.coeffs)
        return f"{type(self).__name__}({body})"

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    # operand coercion -----------------------------------------------------

    def _coerce(self, other):
        """Return ``other`` as a tower of this type and the common order.

        Returns ``None`` when ``other`` outranks this tower, so the
        reflected operator of the outer tower takes over.
        """
        if isinstance(other, _Tower):
            if other._rank > self._rank:
                return None
            if other._rank == self._rank:
                n = min(self.order, other.order)
                return self.truncate(n), other.truncate(n)
            return self, type(self).constant(other, self.order)
        if isinstance(other, Real):
            return self, type(self).constant(float(other), self.order)
        return None

    # arithmetic -------------------------------------------------------------

    def __neg__(self):
        return type(self)(tuple(-c for c in self.coeffs))

    def __pos__(self):
        return self

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return type(self)(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return type(self)(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return type(self)(tuple(y - x for x, y in zip(a.coeffs, b.coeffs)))

    def __mul__(self, other):
        if isinstance(other, Real) or (isinstance(other, _Tower) and other._rank < self._rank):
            return type(self)(tuple(c * other for c in self.coeffs))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        ta, tb = a._taylor(), b._taylor()
        out = [sum(ta[j] * tb[k - j] for j in range(k + 1)) for k in range(a.order + 1)]
        return type(self)._from_taylor(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Real) or (isinstance(other, _Tower) and other._rank < self._rank):
            return type(self)(tuple(c / other for c in self.coeffs))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b * a.reciprocal()

    def reciprocal(self):
        if scalar(self.coeffs[0]) == 0.0:
            raise JetDomainError("division by a jet with zero value")
        t = self._taylor()
        q = [1.0 / t[0]]
        for k in range(1, self.order + 1):
            acc = sum(t[j] * q[k - j] for j in range(1, k + 1))
            q.append(-acc / t[0])
        return type(self)._from_taylor(q)

    def __pow__(self, exponent):
        if isinstance(exponent, _Tower):
            # constant exponents only; a tower with vanishing derivatives is fine
            if any(scalar(c) != 0.0 for c in exponent.coeffs[1:]):
                raise JetDomainError("exponent must not depend on the variable")
            exponent = scalar(exponent)
        exponent = float(exponent)
        if exponent.is_integer():
            return self._ipow(int(exponent))
        return self._rpow(exponent)

    def _ipow(self, n: int):
        if n < 0:
            return self._ipow(-n).reciprocal()
        result = type(self).constant(1.0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _rpow(self, r: float):
        t = self._taylor()
        a0 = t[0]
        if scalar(a0) <= 0.0:
            raise JetDomainError(f"non-integer power {r} of nonpositive base {scalar(a0)}")
        y = [pow_(a0, r)]
        for k in range(1, self.order + 1):
            acc = sum(((r + 1.0) * j - k) * t[j] * y[k - j] for j in range(1, k + 1))
            y.append(acc / (k * a0))
        return type(self)._from_taylor(y)

    # elementary functions ---------------------------------------------------

    def _integrate_rate(self, value, rate):
        """Tower of ``g(u)`` given ``g(u0)`` and the tower of ``g'(u)``."""
        du = self.derivative()
        return (du * rate.truncate(du.order)).integrate(value)

    def _rate(self, fn: Callable):
        """``fn`` applied to this tower truncated one order, for rate terms."""
        if self.order == 0:
            return None
        return fn(self.truncate(self.order - 1))

    def exp(self):
        t = self._taylor()
        y = [exp(t[0])]
        for k in range(1, self.order + 1):
            y.append(sum(j * t[j] * y[k - j] for j in range(1, k + 1)) / k)
        return type(self)._from_taylor(y)

    def _sincos(self, hyperbolic: bool):
        t = self._taylor()
        if hyperbolic:
            s, c = [sinh(t[0])], [cosh(t[0])]
        else:
            s, c = [sin(t[0])], [cos(t[0])]
        sign = 1.0 if hyperbolic else -1.0
        for k in range(1, self.order + 1):
            s_k = sum(j * t[j] * c[k - j] for j in range(1, k + 1)) / k
            c_k = sign * sum(j * t[j] * s[k - j] for j in range(1, k + 1)) / k
            s.append(s_k)
            c.append(c_k)
        cls = type(self)
        return cls._from_taylor(s), cls._from_taylor(c)

    def sin(self):
        return self._sincos(False)[0]

    def cos(self):
        return self._sincos(False)[1]

    def tan(self):
        s, c = self._sincos(False)
        if abs(scalar(c.coeffs[0])) < 1e-300:
            raise JetDomainError("tan evaluated at a pole")
        return s / c

    def sinh(self):
        return self._sincos(True)[0]

    def cosh(self):
        return self._sincos(True)[1]

    def tanh(self):
        s, c = self._sincos(True)
        return s / c

    def log(self):
        u0 = scalar(self.coeffs[0])
        if u0 <= 0.0:
            raise JetDomainError(f"ln of nonpositive value {u0}")
        value = log(self.coeffs[0])
        if self.order == 0:
            return type(self)((value,))
        return self._integrate_rate(value, self._rate(lambda u: 1.0 / u))

    def sqrt(self):
        u0 = scalar(self.coeffs[0])
        if u0 < 0.0 or (u0 == 0.0 and self.order > 0):
            raise JetDomainError(f"sqrt of value {u0} outside the smooth domain")
        if self.order == 0:
            return type(self)((sqrt(self.coeffs[0]),))
        return self._rpow(0.5)

    def atan(self):
        value = atan(self.coeffs[0])
        if self.order == 0:
            return type(self)((value,))
        return self._integrate_rate(value, self._rate(lambda u: 1.0 / (1.0 + u * u)))

    def asin(self):
        u0 = scalar(self.coeffs[0])
        if abs(u0) > 1.0 or (abs(u0) == 1.0 and self.order > 0):
            raise JetDomainError(f"asin of {u0} outside the smooth domain")
        value = asin(self.coeffs[0])
        if self.order == 0:
            return type(self)((value,))
        return self._integrate_rate(value, self._rate(lambda u: (1.0 - u * u) ** -0.5))

    def acos(self):
        return math.pi / 2 - self.asin()

    def atanh(self):
        u0 = scalar(self.coeffs[0])
        if abs(u0) >= 1.0:
            raise JetDomainError(f"atanh of {u0}: |x| must be < 1")
        value = atanh(self.coeffs[0])
        if self.order == 0:
            return type(self)((value,))
        return self._integrate_rate(value, self._rate(lambda u: 1.0 / (1.0 - u * u)))


class Jet(_Tower):
    """Derivative tower of a scalar function of one variable.

    ``Jet((8, 12, 12, 6, 0))`` is the order-4 tower of ``r**3`` at ``r=2``.
    """

    _rank = 0
    __slots__ = ()


class SlotJet(_Tower):
    """Tower in a Lagrangian slot variable, with jets as coefficients."""

    _rank = 1
    __slots__ = ()


# scalar dispatch --------------------------------------------------------------


def _checked(fn, name):
    def wrapped(x):
        try:
            return fn(x)
        except (ValueError, OverflowError) as exc:
            raise JetDomainError(f"{name}({x!r}): {exc}") from None

    return wrapped


_math_log = _checked(math.log, "ln")
_math_sqrt = _checked(math.sqrt, "sqrt")
_math_asin = _checked(math.asin, "asin")
_math_acos = _checked(math.acos, "acos")
_math_atanh = _checked(math.atanh, "atanh")
_math_exp = _checked(math.exp, "exp")


def _dispatch(method: str, scalar_fn: Callable):
    def fn(x):
        if isinstance(x, _Tower):
            return getattr(x, method)()
        return scalar_fn(float(x))

    fn.__name__ = method
    return fn


sin = _dispatch("sin", math.sin)
cos = _dispatch("cos", math.cos)
tan = _dispatch("tan", math.tan)
asin = _dispatch("asin", _math_asin)
acos = _dispatch("acos", _math_acos)
atan = _dispatch("atan", math.atan)
sinh = _dispatch("sinh", math.sinh)
cosh = _dispatch("cosh", math.cosh)
tanh = _dispatch("tanh", math.tanh)
atanh = _dispatch("atanh", _math_atanh)
exp = _dispatch("exp", _math_exp)
log = _dispatch("log", _math_log)
sqrt = _dispatch("sqrt", _math_sqrt)


def pow_(x, r):
    if isinstance(x, _Tower):
        return x ** r
    x = float(x)
    if float(r).is_integer():
        return x ** int(r)
    if x <= 0.0:
        raise JetDomainError(f"non-integer power {r} of nonpositive base {x}")
    return x ** r


FUNCTIONS: dict[str, Callable] = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "asin": asin,
    "acos": acos,
    "atan": atan,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "atanh": atanh,
    "exp": exp,
    "ln": log,
    "sqrt": sqrt,
}
