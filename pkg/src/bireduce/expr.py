"""Small expression language for closed-form profiles and warping functions.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" base)?
    base   := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")" | "-" base

``pi`` and ``e`` are reserved constants.  Unary minus binds tighter than
``^`` (so ``-r^2`` is ``(-r)^2``), exactly as the grammar reads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from . import jets
from .jets import MAX_ORDER, Jet, JetDomainError, JetOrderError, _Tower

RESERVED = {"pi": math.pi, "e": math.e}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownNameError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown name {name!r}")
        self.name = name


# nodes ------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self) -> str:
        return repr(self.value) if self.value >= 0 else f"({self.value!r})"


@dataclass(frozen=True)
class Name:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __str__(self) -> str:
        return f"{self.func}({self.arg})"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self) -> str:
        return f"(-{self.arg})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left}{self.op}{self.right})"


Expr = Union[Const, Name, Call, Neg, BinOp]


# parsing ----------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, symbols: set[str]):
        self.tokens = _tokenize(src)
        self.i = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            raise ExprSyntaxError(f"expected {value!r}", pos)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            node = BinOp("^", node, self.base())
        return node

    def base(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if text not in jets.FUNCTIONS:
                    raise UnknownNameError(text)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in RESERVED:
                return Const(RESERVED[text])
            if text not in self.symbols:
                raise UnknownNameError(text)
            return Name(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            return Neg(self.base())
        raise ExprSyntaxError("unexpected end of input" if kind == "end" else f"unexpected {text!r}", pos)


def parse_expr(src: str, symbols: Iterable[str]) -> Expr:
    """Parse ``src`` into an expression tree over the allowed ``symbols``."""
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    symbols = set(symbols)
    clash = symbols & RESERVED.keys()
    if clash:
        raise ValueError(f"reserved names cannot be symbols: {sorted(clash)}")
    parser = _Parser(src, symbols)
    node = parser.expr()
    kind, text, pos = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {text!r}", pos)
    return node


def free_names(e: Expr) -> set[str]:
    if isinstance(e, Name):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Call, Neg)):
        return free_names(e.arg)
    return free_names(e.left) | free_names(e.right)


# evaluation -------------------------------------------------------------------


def evaluate(e: Expr, bindings: Mapping[str, object]):
    """Evaluate with bindings that may be floats, jets or slot jets."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Name):
        try:
            return bindings[e.name]
        except KeyError:
            raise UnknownNameError(e.name) from None
    if isinstance(e, Call):
        return jets.FUNCTIONS[e.func](evaluate(e.arg, bindings))
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    left = evaluate(e.left, bindings)
    right = evaluate(e.right, bindings)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        if not isinstance(right, _Tower) and right == 0.0:
            raise JetDomainError("division by zero")
        return left / right
    return jets.pow_(left, right)


def jet_eval(e: Expr, bindings: Mapping[str, object], order: int) -> Jet:
    """Derivative tower of ``e`` along whichever bindings are jets."""
    if order > MAX_ORDER:
        raise JetOrderError(f"order {order} exceeds cap {MAX_ORDER}")
    missing = free_names(e) - set(bindings)
    if missing:
        raise UnknownNameError(sorted(missing)[0])
    bound = {}
    for name, value in bindings.items():
        if isinstance(value, Jet):
            if value.order < order:
                raise JetOrderError(f"binding {name!r} has order {value.order} < {order}")
            value = value.truncate(order)
        bound[name] = value
    out = evaluate(e, bound)
    if isinstance(out, Jet):
        return out
    return Jet.constant(float(out), order)


def jet_compose(outer: Expr, inner: Jet) -> Jet:
    """Tower of ``outer(inner(t))``; ``outer`` has exactly one free name."""
    names = free_names(outer)
    if len(names) > 1:
        raise ValueError(f"outer expression must have one free name, got {sorted(names)}")
    binding = {names.pop(): inner} if names else {}
    return jet_eval(outer, binding, inner.order)


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    if isinstance(e, Name):
        return replacement if e.name == name else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, name, replacement))
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, name, replacement))
    return BinOp(e.op, substitute(e.left, name, replacement), substitute(e.right, name, replacement))


def bind_constants(e: Expr, params: Mapping[str, float]) -> Expr:
    """Replace parameter names by their numeric values."""
    for name, value in params.items():
        e = substitute(e, name, Const(float(value)))
    return e


# symbolic differentiation -----------------------------------------------------

_ZERO, _ONE, _TWO = Const(0.0), Const(1.0), Const(2.0)


def _add(a: Expr, b: Expr) -> Expr:
    if a == _ZERO:
        return b
    if b == _ZERO:
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if b == _ZERO:
        return a
    if a == _ZERO:
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if a == _ZERO or b == _ZERO:
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if a == _ZERO:
        return _ZERO
    if b == _ONE:
        return a
    return BinOp("/", a, b)


def _call_rate(func: str, u: Expr) -> Expr:
    """d/du func(u) as an expression in u."""
    if func == "sin":
        return Call("cos", u)
    if func == "cos":
        return Neg(Call("sin", u))
    if func == "tan":
        return BinOp("+", _ONE, BinOp("^", Call("tan", u), _TWO))
    if func == "asin":
        return BinOp("/", _ONE, Call("sqrt", BinOp("-", _ONE, BinOp("^", u, _TWO))))
    if func == "acos":
        return Neg(BinOp("/", _ONE, Call("sqrt", BinOp("-", _ONE, BinOp("^", u, _TWO)))))
    if func == "atan":
        return BinOp("/", _ONE, BinOp("+", _ONE, BinOp("^", u, _TWO)))
    if func == "sinh":
        return Call("cosh", u)
    if func == "cosh":
        return Call("sinh", u)
    if func == "tanh":
        return BinOp("-", _ONE, BinOp("^", Call("tanh", u), _TWO))
    if func == "atanh":
        return BinOp("/", _ONE, BinOp("-", _ONE, BinOp("^", u, _TWO)))
    if func == "exp":
        return Call("exp", u)
    if func == "ln":
        return BinOp("/", _ONE, u)
    if func == "sqrt":
        return BinOp("/", _ONE, BinOp("*", _TWO, Call("sqrt", u)))
    raise UnknownNameError(func)


def diff(e: Expr, name: str) -> Expr:
    """Symbolic derivative of ``e`` with respect to ``name``."""
    if isinstance(e, Const):
        return _ZERO
    if isinstance(e, Name):
        return _ONE if e.name == name else _ZERO
    if isinstance(e, Neg):
        d = diff(e.arg, name)
        return _ZERO if d == _ZERO else Neg(d)
    if isinstance(e, Call):
        du = diff(e.arg, name)
        return _mul(_call_rate(e.func, e.arg), du)
    a, b = e.left, e.right
    da, db = diff(a, name), diff(b, name)
    if e.op == "+":
        return _add(da, db)
    if e.op == "-":
        return _sub(da, db)
    if e.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if e.op == "/":
        return _sub(_div(da, b), _div(_mul(a, db), BinOp("^", b, _TWO)))
    if name in free_names(b):
        raise ValueError("exponent must not depend on the differentiation variable")
    # a^c -> c * a^(c-1) * a'
    return _mul(_mul(b, BinOp("^", a, BinOp("-", b, _ONE))), da)
