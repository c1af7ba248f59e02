"""Dense bivariate polynomials of total degree <= 6.

Coefficients are stored in graded lexicographic order with x before y::

    1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3, ...

i.e. monomial ``x^i y^j`` of total degree ``k = i + j`` sits at index
``k (k + 1) / 2 + (k - i)``.

A polynomial may live in a local frame: with ``origin`` o and ``scale`` s
the monomials are in ``((x - o_x) / s, (y - o_y) / s)``. Every operation
accepts and returns points in global coordinates.
"""

from __future__ import annotations

from math import comb

import numpy as np
from numpy.polynomial import Polynomial

from .tolerances import UNIT_VECTOR_TOL

MAX_DEGREE = 6

Poly1 = Polynomial


def dim_P(d: int) -> int:
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return (d + 1) * (d + 2) // 2


def monomials(d: int) -> list[tuple[int, int]]:
    """Exponent pairs (i, j) of x^i y^j in storage order."""
    return [(k - m, m) for k in range(d + 1) for m in range(k + 1)]


def _index(i: int, j: int) -> int:
    k = i + j
    return k * (k + 1) // 2 + j


def _falling(n: int, k: int) -> int:
    out = 1
    for m in range(k):
        out *= n - m
    return out


class Poly2:
    __slots__ = ("degree", "coeffs", "origin", "scale")

    def __init__(self, coeffs, degree: int | None = None, origin=(0.0, 0.0), scale: float = 1.0):
        c = np.asarray(coeffs, dtype=float).ravel()
        if degree is None:
            degree = int(round((np.sqrt(8 * c.size + 1) - 3) / 2))
        if degree < 0 or degree > MAX_DEGREE:
            raise ValueError(f"degree {degree} outside 0..{MAX_DEGREE}")
        if c.size != dim_P(degree):
            raise ValueError(f"{c.size} coefficients do not match degree {degree}")
        if scale <= 0:
            raise ValueError("frame scale must be positive")
        self.degree = degree
        self.coeffs = c
        self.origin = (float(origin[0]), float(origin[1]))
        self.scale = float(scale)

    @classmethod
    def zero(cls, degree: int = 0, origin=(0.0, 0.0), scale: float = 1.0) -> "Poly2":
        return cls(np.zeros(dim_P(degree)), degree, origin, scale)

    @classmethod
    def from_dict(cls, terms: dict[tuple[int, int], float], degree: int | None = None) -> "Poly2":
        """``{(i, j): c}`` for c x^i y^j in the global frame."""
        d = max((i + j for i, j in terms), default=0) if degree is None else degree
        c = np.zeros(dim_P(d))
        for (i, j), v in terms.items():
            c[_index(i, j)] += v
        return cls(c, d)

    @classmethod
    def from_conic(cls, q) -> "Poly2":
        a, b, c, d, e, f = q.coeffs
        return cls([f, d, e, a, b, c], 2)

    # dense (degree+1)x(degree+1) matrix M[i, j] = coefficient of x^i y^j
    def _matrix(self) -> np.ndarray:
        m = np.zeros((self.degree + 1, self.degree + 1))
        for n, (i, j) in enumerate(monomials(self.degree)):
            m[i, j] = self.coeffs[n]
        return m

    def _from_matrix(self, m: np.ndarray, degree: int) -> "Poly2":
        c = np.array([m[i, j] if i < m.shape[0] and j < m.shape[1] else 0.0 for i, j in monomials(degree)])
        return Poly2(c, degree, self.origin, self.scale)

    def same_frame(self, other: "Poly2") -> bool:
        return self.origin == other.origin and self.scale == other.scale

    def local(self, x, y):
        return (np.asarray(x, dtype=float) - self.origin[0]) / self.scale, (
            np.asarray(y, dtype=float) - self.origin[1]
        ) / self.scale

    def __call__(self, x, y):
        xi, eta = self.local(x, y)
        m = self._matrix()
        # Horner in y for each power of x, then Horner in x
        out = 0.0
        for i in range(self.degree, -1, -1):
            row = 0.0
            for j in range(self.degree - i, -1, -1):
                row = row * eta + m[i, j]
            out = out * xi + row
        return out

    def eval(self, z) -> float:
        return self(z[0], z[1])

    def diff(self, alpha: tuple[int, int]) -> "Poly2":
        a, b = alpha
        if a < 0 or b < 0 or a + b > MAX_DEGREE:
            raise ValueError(f"bad multi-index {alpha}")
        d = max(self.degree - a - b, 0)
        m = self._matrix()
        out = np.zeros((d + 1, d + 1))
        for i in range(a, self.degree + 1):
            for j in range(b, self.degree + 1 - i):
                out[i - a, j - b] = m[i, j] * _falling(i, a) * _falling(j, b)
        return self._from_matrix(out / self.scale ** (a + b), d)

    def derivative(self, alpha: tuple[int, int], x, y):
        return self.diff(alpha)(x, y)

    def directional(self, tau) -> "Poly2":
        """D_tau p = tau_x p_x + tau_y p_y (tau need not be unit here)."""
        px, py = self.diff((1, 0)), self.diff((0, 1))
        return px * float(tau[0]) + py * float(tau[1])

    def __add__(self, other: "Poly2") -> "Poly2":
        if not self.same_frame(other):
            other = other.to_frame(self.origin, self.scale)
        d = max(self.degree, other.degree)
        return Poly2(self.elevated(d).coeffs + other.elevated(d).coeffs, d, self.origin, self.scale)

    def __neg__(self) -> "Poly2":
        return Poly2(-self.coeffs, self.degree, self.origin, self.scale)

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly2):
            return multiply(self, other)
        return Poly2(self.coeffs * float(other), self.degree, self.origin, self.scale)

    __rmul__ = __mul__

    def elevated(self, degree: int) -> "Poly2":
        if degree < self.degree:
            raise ValueError("cannot lower the declared degree")
        c = np.zeros(dim_P(degree))
        c[: self.coeffs.size] = self.coeffs
        return Poly2(c, degree, self.origin, self.scale)

    def to_frame(self, origin, scale: float) -> "Poly2":
        """Same polynomial re-expanded in another local frame (exact up to rounding)."""
        origin = (float(origin[0]), float(origin[1]))
        if origin == self.origin and float(scale) == self.scale:
            return self
        # xi_old = ax + bx * xi_new, eta_old = ay + by * eta_new
        bx = scale / self.scale
        ax = (origin[0] - self.origin[0]) / self.scale
        ay = (origin[1] - self.origin[1]) / self.scale
        d = self.degree
        m = self._matrix()
        sub = np.zeros((d + 1, d + 1))  # sub[i, r] = coeff of xi_new^r in (ax + bx xi_new)^i
        suby = np.zeros((d + 1, d + 1))
        for i in range(d + 1):
            for r in range(i + 1):
                sub[i, r] = comb(i, r) * ax ** (i - r) * bx**r
                suby[i, r] = comb(i, r) * ay ** (i - r) * bx**r
        out = sub.T @ m @ suby
        res = Poly2.zero(d, origin, scale)
        return res._from_matrix(out, d)

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self):
        return f"Poly2(degree={self.degree}, origin={self.origin}, scale={self.scale}, coeffs={self.coeffs.tolist()})"


def eval(p: Poly2, z) -> float:  # noqa: A001 - mirrors the operation name
    return p(z[0], z[1])


def diff(p: Poly2, alpha: tuple[int, int]) -> Poly2:
    return p.diff(alpha)


def multiply(p: Poly2, q: Poly2) -> Poly2:
    if p.degree + q.degree > MAX_DEGREE:
        raise ValueError(f"product degree {p.degree + q.degree} exceeds {MAX_DEGREE}")
    if not p.same_frame(q):
        q = q.to_frame(p.origin, p.scale)
    a, b = p._matrix(), q._matrix()
    d = p.degree + q.degree
    out = np.zeros((d + 1, d + 1))
    for i in range(p.degree + 1):
        for j in range(p.degree + 1 - i):
            if a[i, j] != 0.0:
                out[i : i + q.degree + 1, j : j + q.degree + 1] += a[i, j] * b
    return p._from_matrix(out, d)


def dir_deriv(p: Poly2, dirs, z) -> float:
    """Apply D_tau once per listed unit direction, then evaluate at z."""
    if len(dirs) > MAX_DEGREE:
        raise ValueError("total order exceeds 6")
    r = p
    for tau in dirs:
        if abs(np.hypot(tau[0], tau[1]) - 1.0) > UNIT_VECTOR_TOL:
            raise ValueError(f"direction {tuple(tau)} is not a unit vector")
        r = r.directional(tau)
    return float(r(z[0], z[1]))


def restrict_to_segment(p: Poly2, v1, v2) -> Poly1:
    """g(t) = p(v1 + t (v2 - v1)) as a univariate polynomial."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.array_equal(v1, v2):
        raise ValueError("segment endpoints coincide")
    xi = Polynomial([(v1[0] - p.origin[0]) / p.scale, (v2[0] - v1[0]) / p.scale])
    eta = Polynomial([(v1[1] - p.origin[1]) / p.scale, (v2[1] - v1[1]) / p.scale])
    out = Polynomial([0.0])
    for n, (i, j) in enumerate(monomials(p.degree)):
        c = p.coeffs[n]
        if c != 0.0:
            out = out + c * xi**i * eta**j
    coef = np.zeros(p.degree + 1)
    coef[: out.coef.size] = out.coef[: p.degree + 1]
    return Polynomial(coef)
