"""Built-in smooth test functions vanishing on the boundary of a domain.

Each boundary-vanishing function is ``q * g`` with ``q`` the normalized
boundary conic and ``g`` a smooth factor, so it lies in H^m ∩ H^1_0 for every m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .conic import Conic
from .nodal import HermiteData

UNIT_CIRCLE = Conic((-0.5, 0.0, -0.5, 0.0, 0.0, 0.5))
ELLIPSE_2_1 = Conic((-0.125, 0.0, -0.5, 0.0, 0.0, 0.5))


@dataclass(frozen=True)
class Factor:
    value: Callable
    grad: Callable
    hess: Callable


def _sin_factor(a: float, b: float) -> Factor:
    def value(x, y):
        return np.sin(a * x + b * y)

    def grad(x, y):
        c = np.cos(a * x + b * y)
        return np.array([a * c, b * c])

    def hess(x, y):
        s = -np.sin(a * x + b * y)
        return np.array([[a * a * s, a * b * s], [a * b * s, b * b * s]])

    return Factor(value, grad, hess)


def _exp_factor(a: float, b: float) -> Factor:
    def value(x, y):
        return np.exp(a * x + b * y)

    def grad(x, y):
        e = np.exp(a * x + b * y)
        return np.array([a * e, b * e])

    def hess(x, y):
        e = np.exp(a * x + b * y)
        return np.array([[a * a * e, a * b * e], [a * b * e, b * b * e]])

    return Factor(value, grad, hess)


def _poly_factor() -> Factor:
    # g = 1 + x - 2 y + x y + 3 y^2
    def value(x, y):
        return 1 + x - 2 * y + x * y + 3 * y * y

    def grad(x, y):
        return np.array([1 + y + 0 * x, -2 + x + 6 * y])

    def hess(x, y):
        z = 0 * (x + y)
        return np.array([[z, z + 1], [z + 1, z + 6]])

    return Factor(value, grad, hess)


def _const_factor(c: float) -> Factor:
    def value(x, y):
        return c + 0 * (x + y)

    def grad(x, y):
        z = 0 * (x + y)
        return np.array([z, z])

    def hess(x, y):
        z = 0 * (x + y)
        return np.array([[z, z], [z, z]])

    return Factor(value, grad, hess)


def conic_times(q: Conic, g: Factor) -> HermiteData:
    a, b, c, d, e, _ = q.coeffs
    H = np.array([[2 * a, b], [b, 2 * c]])

    def value(x, y):
        return q(x, y) * g.value(x, y)

    def grad(x, y):
        qv = q(x, y)
        qg = np.array([2 * a * x + b * y + d, b * x + 2 * c * y + e])
        return g.value(x, y) * qg + qv * np.asarray(g.grad(x, y))

    def hess(x, y):
        qv = q(x, y)
        qg = np.array([2 * a * x + b * y + d, b * x + 2 * c * y + e])
        gg = np.asarray(g.grad(x, y))
        gv = g.value(x, y)
        cross = np.einsum("i...,j...->ij...", qg, gg)
        return np.einsum("ij,...->ij...", H, gv) + cross + np.swapaxes(cross, 0, 1) + qv * np.asarray(g.hess(x, y))

    return HermiteData(value, grad, hess)


@dataclass(frozen=True)
class TestFunction:
    id: str
    data: HermiteData
    conic: Conic | None  # boundary-vanishing certificate: u = conic * smooth factor
    description: str


def _plain(g: Factor) -> HermiteData:
    return HermiteData(g.value, g.grad, g.hess)


REGISTRY: dict[str, TestFunction] = {}


def _register(tf: TestFunction) -> None:
    REGISTRY[tf.id] = tf


_register(TestFunction("zero", _plain(_const_factor(0.0)), None, "u = 0"))
_register(TestFunction("one", _plain(_const_factor(1.0)), None, "u = 1 (does not vanish on the boundary)"))
_register(TestFunction("circle_sin", conic_times(UNIT_CIRCLE, _sin_factor(1.0, 2.0)), UNIT_CIRCLE, "(1 - x^2 - y^2)/2 * sin(x + 2y)"))
_register(TestFunction("circle_exp", conic_times(UNIT_CIRCLE, _exp_factor(1.0, -1.0)), UNIT_CIRCLE, "(1 - x^2 - y^2)/2 * exp(x - y)"))
_register(TestFunction("circle_poly", conic_times(UNIT_CIRCLE, _poly_factor()), UNIT_CIRCLE, "(1 - x^2 - y^2)/2 * (1 + x - 2y + xy + 3y^2)"))
_register(TestFunction("circle_q", conic_times(UNIT_CIRCLE, _const_factor(1.0)), UNIT_CIRCLE, "(1 - x^2 - y^2)/2"))
_register(TestFunction("ellipse_sin", conic_times(ELLIPSE_2_1, _sin_factor(1.0, 2.0)), ELLIPSE_2_1, "(1 - x^2/4 - y^2)/2 * sin(x + 2y)"))
_register(TestFunction("ellipse_exp", conic_times(ELLIPSE_2_1, _exp_factor(1.0, -1.0)), ELLIPSE_2_1, "(1 - x^2/4 - y^2)/2 * exp(x - y)"))


def get(fn_id: str) -> TestFunction:
    try:
        return REGISTRY[fn_id]
    except KeyError:
        raise KeyError(f"unknown test function {fn_id!r}; known: {', '.join(sorted(REGISTRY))}") from None


def finite_difference_check(u: HermiteData, points, step: float = 1e-5, rtol: float = 1e-6) -> float:
    """Largest relative mismatch between supplied derivatives and central differences."""
    worst = 0.0
    ex, ey = np.array([step, 0.0]), np.array([0.0, step])
    for z in np.asarray(points, dtype=float):
        g = np.asarray(u.grad(*z), dtype=float)
        H = np.asarray(u.hess(*z), dtype=float)
        fd_g = np.array([(u.value(*(z + e)) - u.value(*(z - e))) / (2 * step) for e in (ex, ey)])
        fd_H = np.array([(np.asarray(u.grad(*(z + e))) - np.asarray(u.grad(*(z - e)))) / (2 * step) for e in (ex, ey)])
        scale = max(1.0, np.max(np.abs(g)), np.max(np.abs(H)))
        worst = max(worst, np.max(np.abs(fd_g - g)) / scale, np.max(np.abs(fd_H - H)) / scale, abs(H[0, 1] - H[1, 0]) / scale)
    return float(worst)


def self_check(n_points: int = 100, rtol: float = 1e-6, seed: int = 0) -> dict[str, float]:
    """Finite-difference check of every registered function at random points of [-0.7, 0.7]^2."""
    pts = np.random.default_rng(seed).uniform(-0.7, 0.7, size=(n_points, 2))
    res = {k: finite_difference_check(tf.data, pts) for k, tf in REGISTRY.items()}
    bad = {k: v for k, v in res.items() if v > rtol}
    if bad:
        raise RuntimeError(f"test functions fail the finite-difference check: {bad}")
    return res
