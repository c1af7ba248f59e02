"""Quadrature on straight and pie-shaped triangles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import permutations
from math import factorial

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .tolerances import CURVED_QUAD_TOL


@dataclass(frozen=True)
class QuadratureRule:
    """Barycentric points (n, 3) and weights summing to 1."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def mapped(self, v1, v2, v3) -> np.ndarray:
        verts = np.array([v1, v2, v3], dtype=float)
        return self.points @ verts


# Fully symmetric 33-point rule, exact through degree 12 (Xiao-Gimbutas node
# layout, orbit parameters re-solved to full precision from the moment equations).
_S21 = [
    (0.024646363436335594767, 0.0079316425099736384593),
    (0.48820375094554155178, 0.024266838081452033151),
    (0.10925782765935429058, 0.028486052068877545),
    (0.44011164865859311101, 0.049918334928060942119),
    (0.27146250701492608488, 0.062541213195902760469),
]
_S111 = [
    (0.85133779251024004162, 0.12727971723358936879, 0.015083677576511438586),
    (0.68531016390639189998, 0.29165567973834096053, 0.021783585038607557933),
    (0.62824975168355606684, 0.25545422863851734653, 0.043227363659414210549),
]


def _symmetric_rule_12() -> QuadratureRule:
    pts, wts = [], []
    for a, w in _S21:
        c = 1.0 - 2.0 * a
        for b in ((a, a, c), (a, c, a), (c, a, a)):
            pts.append(b)
            wts.append(w)
    for a, b, w in _S111:
        c = 1.0 - a - b
        for p in sorted(set(permutations((a, b, c)))):
            pts.append(p)
            wts.append(w)
    return QuadratureRule(np.array(pts), np.array(wts), 12)


def monomial_moment(i: int, j: int) -> float:
    """Mean of x^i y^j over the reference triangle (0,0),(1,0),(0,1)."""
    return 2.0 * factorial(i) * factorial(j) / factorial(i + j + 2)


def check_rule(rule: QuadratureRule, tol: float = 1e-13) -> float:
    """Largest monomial error of ``rule``; raises if it exceeds ``tol``."""
    x, y = rule.points[:, 1], rule.points[:, 2]
    worst = abs(rule.weights.sum() - 1.0)
    for k in range(rule.degree + 1):
        for j in range(k + 1):
            i = k - j
            worst = max(worst, abs(rule.weights @ (x**i * y**j) - monomial_moment(i, j)))
    if worst > tol:
        raise RuntimeError(f"quadrature rule of degree {rule.degree} fails its moment check ({worst:.2e})")
    return worst


def conical_product_rule(n: int) -> QuadratureRule:
    """Collapsed Gauss-Jacobi x Gauss-Legendre rule, exact through degree 2n - 1."""
    s, ws = roots_jacobi(n, 1.0, 0.0)  # weight (1 - s)
    t, wt = roots_legendre(n)
    s, t = (s + 1) / 2, (t + 1) / 2
    ws, wt = ws / 4, wt / 2
    S, Tt = np.meshgrid(s, t, indexing="ij")
    x = S.ravel()
    y = ((1 - S) * Tt).ravel()
    w = np.outer(ws, wt).ravel() * 2.0
    pts = np.column_stack([1 - x - y, x, y])
    return QuadratureRule(pts, w, 2 * n - 1)


DEFAULT_RULE = _symmetric_rule_12()
check_rule(DEFAULT_RULE)


def triangle_area(v1, v2, v3) -> float:
    return 0.5 * abs((v2[0] - v1[0]) * (v3[1] - v1[1]) - (v3[0] - v1[0]) * (v2[1] - v1[1]))


def quad_straight(f, v1, v2, v3, rule: QuadratureRule = DEFAULT_RULE) -> float:
    pts = rule.mapped(v1, v2, v3)
    vals = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float)
    return triangle_area(v1, v2, v3) * float(rule.weights @ vals)


def pie_ray_lengths(q, v1, v2, v3, sigma) -> np.ndarray:
    """lambda(sigma) with v1 + lambda * d(sigma) on the conic, d(sigma) = v2 - v1 + sigma (v3 - v2).

    Uses the smallest positive root, i.e. the first crossing of the ray from v1.
    """
    v1 = np.asarray(v1, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d = (np.asarray(v2) - v1)[None, :] + sigma[:, None] * (np.asarray(v3) - np.asarray(v2))[None, :]
    a, b, c, dd, e, _ = q.coeffs
    A = a * d[:, 0] ** 2 + b * d[:, 0] * d[:, 1] + c * d[:, 1] ** 2
    g = np.array([2 * a * v1[0] + b * v1[1] + dd, b * v1[0] + 2 * c * v1[1] + e])
    B = d @ g
    C = q(v1[0], v1[1])
    disc = B * B - 4 * A * C
    if np.any(disc < 0) or C <= 0:
        raise ValueError("ray from the interior vertex misses the arc")
    lam = 2 * C / (-B + np.sqrt(disc))
    # Newton polish
    lam = lam - (A * lam**2 + B * lam + C) / (2 * A * lam + B)
    return lam


@dataclass(frozen=True)
class PieMap:
    """Star-shaped parametrisation of a pie triangle about its interior vertex.

    x(rho, sigma) = v1 + rho * lambda(sigma) * d(sigma), with Jacobian
    rho * lambda(sigma)^2 * 2|T*|.
    """

    q: object
    v1: tuple
    v2: tuple
    v3: tuple

    def nodes(self, n_sigma: int, n_rho: int = 8, panels: int = 1):
        s, ws = roots_legendre(n_sigma)
        r, wr = roots_legendre(n_rho)
        r, wr = (r + 1) / 2, wr / 2
        edges = np.linspace(0.0, 1.0, panels + 1)
        sig = np.concatenate([(lo + hi) / 2 + (hi - lo) / 2 * s for lo, hi in zip(edges[:-1], edges[1:])])
        wsig = np.concatenate([(hi - lo) / 2 * ws for lo, hi in zip(edges[:-1], edges[1:])])
        lam = pie_ray_lengths(self.q, self.v1, self.v2, self.v3, sig)
        v1 = np.asarray(self.v1, dtype=float)
        d = (np.asarray(self.v2) - v1)[None, :] + sig[:, None] * (np.asarray(self.v3) - np.asarray(self.v2))[None, :]
        ends = v1[None, :] + lam[:, None] * d  # (ns, 2)
        pts = v1[None, None, :] + r[None, :, None] * (ends - v1[None, :])[:, None, :]
        twice_area = 2.0 * triangle_area(self.v1, self.v2, self.v3)
        w = (wsig * lam**2)[:, None] * (wr * r)[None, :] * twice_area
        return pts.reshape(-1, 2), w.ravel()


def quad_curved(f, v1, v2, v3, q, tol: float = CURVED_QUAD_TOL, n_rho: int = 8, max_levels: int = 20, full_output: bool = False):
    """Integral of f over the pie triangle with interior vertex v1 and arc v2 -> v3 on {q = 0}.

    ``f`` may return shape (npts,) or (k, npts); the result then has shape (k,).
    The sigma direction is refined by panel doubling until two successive
    levels agree to ``tol * (1 + |value|)``.
    """
    pm = PieMap(q, tuple(v1), tuple(v2), tuple(v3))
    prev = None
    err = np.inf
    value = 0.0
    converged = False
    for level in range(max_levels):
        pts, w = pm.nodes(10, n_rho, 2**level)
        value = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float) @ w
        if prev is not None:
            err = float(np.max(np.abs(value - prev)))
            if err <= tol * (1.0 + float(np.max(np.abs(value)))):
                converged = True
                break
        prev = value
    if not converged:
        warnings.warn(f"curved quadrature did not converge; error estimate {err:.3e}")
    value = float(value) if np.ndim(value) == 0 else value
    if full_output:
        return value, err, converged
    return value
