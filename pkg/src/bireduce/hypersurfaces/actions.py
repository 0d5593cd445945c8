"""Cohomogeneity-two isometric actions on Euclidean space (orbit type data)."""

from __future__ import annotations

import re
from dataclasses import dataclass

ALLOWED_D = (1, 2, 3, 4, 6)


@dataclass(frozen=True)
class OrbitAction:
    """Type ``d``, orbital multiplicities ``m_0..m_{d-1}`` and ambient dimension ``n``."""

    d: int
    mults: tuple[int, ...]
    n: int
    label: str

    def __post_init__(self):
        if self.d not in ALLOWED_D:
            raise ValueError(f"d must be one of {ALLOWED_D}, got {self.d}")
        if len(self.mults) != self.d:
            raise ValueError(f"need {self.d} multiplicities, got {len(self.mults)}")
        if any(m < 1 for m in self.mults):
            raise ValueError("multiplicities must be positive")
        if 1 + sum(self.mults) != self.n - 1:
            raise ValueError(f"1 + sum(mults) = {1 + sum(self.mults)} != n - 1 = {self.n - 1}")

    @property
    def dim(self) -> int:
        """Dimension of the invariant hypersurfaces."""
        return self.n - 1

    def describe(self) -> dict:
        return {"label": self.label, "d": self.d, "mults": list(self.mults), "n": self.n}


def rotational(n: int) -> OrbitAction:
    """``SO(n-1)`` acting on ``R^n = R + R^(n-1)``; rotational hypersurfaces."""
    if n < 3:
        raise ValueError("rotational family needs n >= 3")
    return OrbitAction(1, (n - 2,), n, f"SO({n - 1})[1+rho]")


def so_p_so_q(p: int, q: int) -> OrbitAction:
    if p < 2 or q < 2:
        raise ValueError("SO(p)xSO(q) needs p, q >= 2")
    return OrbitAction(2, (q - 1, p - 1), p + q, f"SO({p})xSO({q})")


def so2_so_m(m: int) -> OrbitAction:
    """``SO(2) x SO(m)`` on ``R^2 (x) R^m`` (type 4)."""
    if m < 3:
        raise ValueError("SO(2)xSO(m) tensor family needs m >= 3")
    return OrbitAction(4, (m - 2, 1, m - 2, 1), 2 * m, f"SO(2)xSO({m})[tensor]")


def su2_um(m: int) -> OrbitAction:
    if m < 2:
        raise ValueError("S(U(2)xU(m)) needs m >= 2")
    return OrbitAction(4, (2 * m - 3, 2, 2 * m - 3, 2), 4 * m, f"S(U(2)xU({m}))")


def sp2_sp_m(m: int) -> OrbitAction:
    if m < 2:
        raise ValueError("Sp(2)xSp(m) needs m >= 2")
    return OrbitAction(4, (4 * m - 5, 4, 4 * m - 5, 4), 8 * m, f"Sp(2)xSp({m})")


_FIXED = [
    OrbitAction(3, (1, 1, 1), 5, "SO(3)"),
    OrbitAction(3, (2, 2, 2), 8, "SU(3)"),
    OrbitAction(3, (4, 4, 4), 14, "Sp(3)"),
    OrbitAction(3, (8, 8, 8), 26, "F4"),
    OrbitAction(4, (2, 2, 2, 2), 10, "SO(5)"),
    OrbitAction(4, (5, 4, 5, 4), 20, "U(5)"),
    OrbitAction(4, (9, 6, 9, 6), 32, "U(1)xSpin(10)"),
    OrbitAction(6, (2,) * 6, 14, "G2"),
    OrbitAction(6, (1,) * 6, 8, "SO(4)"),
]


def action_catalog() -> list[OrbitAction]:
    """All table rows; parametric families appear at their smallest member."""
    return [
        rotational(3),
        so_p_so_q(2, 2),
        *_FIXED[:5],
        so2_so_m(3),
        su2_um(2),
        sp2_sp_m(2),
        *_FIXED[5:],
    ]


_FAMILIES = [
    (re.compile(r"SO\((\d+)\)\[1\+rho\]"), lambda g: rotational(int(g[0]) + 1)),
    (re.compile(r"SO\(2\)xSO\((\d+)\)\[tensor\]"), lambda g: so2_so_m(int(g[0]))),
    (re.compile(r"SO\((\d+)\)xSO\((\d+)\)"), lambda g: so_p_so_q(int(g[0]), int(g[1]))),
    (re.compile(r"S\(U\(2\)xU\((\d+)\)\)"), lambda g: su2_um(int(g[0]))),
    (re.compile(r"Sp\(2\)xSp\((\d+)\)"), lambda g: sp2_sp_m(int(g[0]))),
]


def lookup_action(label: str) -> OrbitAction:
    """Find a fixed row by label or instantiate a family from its label.

    Labels are matched without whitespace; ``"×"`` is accepted for ``"x"``.
    """
    key = re.sub(r"\s+", "", label).replace("×", "x")
    for a in _FIXED:
        if a.label == key:
            return a
    for pattern, ctor in _FAMILIES:
        m = pattern.fullmatch(key)
        if m:
            return ctor(m.groups())
    raise KeyError(f"unknown action {label!r}")


def action_from_descriptor(desc) -> OrbitAction:
    """``"U(5)"`` or ``{"d": .., "mults": [..], "n": .., "label": ..}``."""
    if isinstance(desc, str):
        return lookup_action(desc)
    if isinstance(desc, dict):
        if "label" in desc and "d" not in desc:
            return lookup_action(desc["label"])
        try:
            return OrbitAction(int(desc["d"]), tuple(int(m) for m in desc["mults"]), int(desc["n"]), desc.get("label", "custom"))
        except KeyError as exc:
            raise ValueError(f"action descriptor missing field {exc}") from None
    raise ValueError(f"bad action descriptor {desc!r}")


__all__ = [
    "OrbitAction",
    "action_catalog",
    "action_from_descriptor",
    "lookup_action",
    "rotational",
    "so2_so_m",
    "so_p_so_q",
    "sp2_sp_m",
    "su2_um",
]
