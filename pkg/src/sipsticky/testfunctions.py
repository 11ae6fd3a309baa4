"""Smooth compactly supported test functions with closed-form derivatives.

Each instance carries phi, phi', the support interval, and exact values of
integral phi, integral phi^2 and integral phi'^2; construction verifies the
stored L^2 norm against quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class, despite the name

    name: str
    f: Callable
    fprime: Callable
    support: tuple          # (lo, hi)
    int_f: float            # integral of phi
    l2sq: float             # integral of phi^2
    grad_l2sq: float        # integral of phi'^2
    _checked: bool = field(default=False, repr=False)

    def __post_init__(self):
        lo, hi = self.support
        if not hi > lo:
            raise ValueError("empty support")
        x, w = np.polynomial.legendre.leggauss(256)
        x = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * w
        q = float(np.sum(w * self.f(x) ** 2))
        if abs(q - self.l2sq) > 1e-8 * max(1.0, abs(self.l2sq)):
            raise ValueError(
                f"stored L2 norm {self.l2sq} disagrees with quadrature {q}")

    def __call__(self, x):
        return self.f(x)


def raised_cosine(center: float = 0.0, halfwidth: float = 1.0) -> TestFunction:
    """phi(x) = (1 + cos(pi (x-c)/a)) / 2 on |x - c| <= a."""
    c, a = float(center), float(halfwidth)

    def f(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - c) < a
        return np.where(inside, 0.5 * (1.0 + np.cos(np.pi * (x - c) / a)), 0.0)

    def fp(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - c) < a
        return np.where(inside, -0.5 * np.pi / a * np.sin(np.pi * (x - c) / a), 0.0)

    return TestFunction(
        name=f"raised_cosine(c={c},a={a})",
        f=f, fprime=fp, support=(c - a, c + a),
        int_f=a, l2sq=0.75 * a, grad_l2sq=math.pi**2 / (4.0 * a),
    )


def poly_bump(center: float = 0.0, halfwidth: float = 1.0) -> TestFunction:
    """phi(x) = (1 - ((x-c)/a)^2)^3 on |x - c| <= a."""
    c, a = float(center), float(halfwidth)

    def f(x):
        x = np.asarray(x, dtype=float)
        u = (x - c) / a
        inside = np.abs(u) < 1.0
        return np.where(inside, (1.0 - u * u) ** 3, 0.0)

    def fp(x):
        x = np.asarray(x, dtype=float)
        u = (x - c) / a
        inside = np.abs(u) < 1.0
        return np.where(inside, -6.0 * u / a * (1.0 - u * u) ** 2, 0.0)

    return TestFunction(
        name=f"poly_bump(c={c},a={a})",
        f=f, fprime=fp, support=(c - a, c + a),
        int_f=32.0 * a / 35.0,
        l2sq=2048.0 * a / 3003.0,
        grad_l2sq=1024.0 / (385.0 * a),
    )


def gradient_of(phi: TestFunction) -> TestFunction:
    """phi' packaged as a test function (integral zero, L2 norm known)."""

    def _no_second_derivative(_x):
        raise NotImplementedError(f"second derivative of {phi.name} not stored")

    return TestFunction(
        name=f"gradient({phi.name})",
        f=phi.fprime, fprime=_no_second_derivative, support=phi.support,
        int_f=0.0, l2sq=phi.grad_l2sq, grad_l2sq=float("nan"),
    )


PRESETS = {
    "raised-cosine": raised_cosine,
    "poly-bump": poly_bump,
}


def from_spec(name: str, center: float = 0.0, halfwidth: float = 1.0) -> TestFunction:
    if name not in PRESETS:
        raise KeyError(f"unknown test function {name!r}; have {sorted(PRESETS)}")
    return PRESETS[name](center, halfwidth)
