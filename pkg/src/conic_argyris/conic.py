"""Boundary conics, arcs and curvilinear domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tolerances import GRAD_EPS, ON_CURVE_TOL


class SingularCurvePoint(ValueError):
    """Raised when the gradient of a conic vanishes where a normal is needed."""


@dataclass(frozen=True)
class Conic:
    """q(x, y) = a x^2 + b xy + c y^2 + d x + e y + f."""

    coeffs: tuple[float, float, float, float, float, float]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) != 6:
            raise ValueError("a conic needs exactly 6 coefficients")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x, y):
        a, b, c, d, e, f = self.coeffs
        return a * x * x + b * x * y + c * y * y + d * x + e * y + f

    def scaled(self, s: float) -> "Conic":
        return Conic(tuple(s * v for v in self.coeffs))

    def matrix(self) -> np.ndarray:
        """Symmetric 3x3 matrix of the homogenised quadratic form."""
        a, b, c, d, e, f = self.coeffs
        return np.array([[a, b / 2, d / 2], [b / 2, c, e / 2], [d / 2, e / 2, f]])

    def is_irreducible(self, tol: float = 1e-14) -> bool:
        a, b, c = self.coeffs[:3]
        if a == 0.0 and b == 0.0 and c == 0.0:
            return False
        scale = max(abs(v) for v in self.coeffs)
        return abs(np.linalg.det(self.matrix())) > tol * scale**3

    def center(self) -> np.ndarray:
        """Critical point of q (center of a central conic)."""
        a, b, c, d, e, _ = self.coeffs
        return np.linalg.solve([[2 * a, b], [b, 2 * c]], [-d, -e])

    def is_bounded_oval(self) -> bool:
        a, b, c = self.coeffs[:3]
        if b * b - 4 * a * c >= 0:
            return False
        return self.is_irreducible() and self(*self.center()) * a < 0


def eval_conic(q: Conic, p) -> float:
    return q(p[0], p[1])


def grad_conic(q: Conic, p) -> np.ndarray:
    a, b, c, d, e, _ = q.coeffs
    x, y = p[0], p[1]
    return np.array([2 * a * x + b * y + d, b * x + 2 * c * y + e])


def hessian_conic(q: Conic) -> np.ndarray:
    a, b, c = q.coeffs[:3]
    return np.array([[2 * a, b], [b, 2 * c]])


def normalize_conic(q: Conic, region_samples, interior_witness) -> Conic:
    """Scale q by s > 0 so that q > 0 at the witness and the larger of
    max ||grad q|| over the samples and ||Hess q||_2 equals 1."""
    samples = np.atleast_2d(np.asarray(region_samples, dtype=float))
    if samples.size == 0:
        raise ValueError("region_samples must be non-empty")
    w = q(*interior_witness)
    if w == 0.0:
        raise ValueError("interior witness lies on the conic")
    sign = 1.0 if w > 0 else -1.0
    a, b, c, d, e, _ = q.coeffs
    gx = 2 * a * samples[:, 0] + b * samples[:, 1] + d
    gy = b * samples[:, 0] + 2 * c * samples[:, 1] + e
    gmax = float(np.max(np.hypot(gx, gy)))
    hnorm = float(np.max(np.abs(np.linalg.eigvalsh(hessian_conic(q)))))
    m = max(gmax, hnorm)
    if m == 0.0:
        raise ValueError("degenerate conic: gradient and Hessian vanish")
    if sign > 0 and m == 1.0:
        return q
    return q.scaled(sign / m)


def intersect_ray_conic(q: Conic, origin, direction) -> list[np.ndarray]:
    """Points origin + t*direction, t >= 0, on {q = 0}, ascending in t."""
    o = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    if not np.any(d):
        raise ValueError("direction must be nonzero")
    a, b, c = q.coeffs[:3]
    A = a * d[0] ** 2 + b * d[0] * d[1] + c * d[1] ** 2
    B = float(grad_conic(q, o) @ d)
    C = q(o[0], o[1])
    scale = max(abs(A), abs(B), abs(C))
    if abs(A) <= 1e-15 * scale:
        roots = [] if B == 0.0 else [-C / B]
    else:
        disc = B * B - 4 * A * C
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        if sq == 0.0:
            roots = [-B / (2 * A)]
        else:
            # cancellation-free pair of roots
            t1 = (-B - math.copysign(sq, B)) / (2 * A)
            roots = [t1, C / (A * t1)] if t1 != 0.0 else [0.0, -B / A]
    out = []
    for t in sorted(roots):
        g = A * t * t + B * t + C
        dg = 2 * A * t + B
        if dg != 0.0:
            t = t - g / dg
        if t >= 0.0:
            out.append(o + t * d)
    return out


def normal_tangent_at(q: Conic, p) -> tuple[np.ndarray, np.ndarray]:
    """Unit normal pointing to {q > 0} and the tangent obtained by a +90 degree turn."""
    g = grad_conic(q, p)
    nrm = math.hypot(g[0], g[1])
    if nrm <= GRAD_EPS:
        raise SingularCurvePoint(f"grad q vanishes at {tuple(p)}")
    n = g / nrm
    return n, np.array([-n[1], n[0]])


@dataclass(frozen=True)
class Arc:
    """Open arc of a conic from ``start`` to ``end`` traversed counter-clockwise.

    ``start == end`` denotes a closed oval cut at a single corner.
    """

    conic: Conic
    start: tuple[float, float]
    end: tuple[float, float]
    witness: tuple[float, float]
    ccw: bool = True

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(float(v) for v in self.start))
        object.__setattr__(self, "end", tuple(float(v) for v in self.end))
        object.__setattr__(self, "witness", tuple(float(v) for v in self.witness))

    @property
    def closed(self) -> bool:
        return self.start == self.end

    def _center(self) -> np.ndarray:
        # arcs are traced by rays from the witness, which must see the arc star-wise
        return np.asarray(self.witness)

    def _angles(self) -> tuple[float, float]:
        c = self._center()
        t0 = math.atan2(self.start[1] - c[1], self.start[0] - c[0])
        t1 = math.atan2(self.end[1] - c[1], self.end[0] - c[0])
        if self.closed:
            return t0, t0 + 2 * math.pi
        while t1 <= t0:
            t1 += 2 * math.pi
        return t0, t1

    def point_at_angle(self, theta: float) -> np.ndarray:
        c = self._center()
        hits = intersect_ray_conic(self.conic, c, (math.cos(theta), math.sin(theta)))
        if not hits:
            raise ValueError("ray from witness misses the conic")
        return hits[0]

    def samples(self, n: int = 50, include_ends: bool = True) -> np.ndarray:
        t0, t1 = self._angles()
        ts = np.linspace(t0, t1, n) if include_ends else np.linspace(t0, t1, n + 2)[1:-1]
        return np.array([self.point_at_angle(t) for t in ts])

    def check(self) -> list[str]:
        problems = []
        if not self.conic.is_irreducible():
            problems.append("conic is reducible")
        for name, z in (("start", self.start), ("end", self.end)):
            if abs(self.conic(*z)) > ON_CURVE_TOL:
                problems.append(f"{name} point {z} is not on the conic")
        if self.conic(*self.witness) <= 0:
            problems.append("q is not positive at the interior witness")
        try:
            for p in self.samples(50):
                if np.hypot(*grad_conic(self.conic, p)) <= GRAD_EPS:
                    problems.append(f"grad q vanishes at arc point {tuple(p)}")
                    break
        except ValueError as exc:
            problems.append(str(exc))
        return problems


@dataclass(frozen=True)
class Domain:
    arcs: tuple[Arc, ...]
    corner_angles: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "corner_angles", tuple(self._corner_angles()))

    def _corner_angles(self) -> list[float]:
        out = []
        m = len(self.arcs)
        for j, arc in enumerate(self.arcs):
            prev = self.arcs[j - 1]
            # tangents: incoming (along prev at its end), outgoing (along arc at its start)
            _, t_out = normal_tangent_at(arc.conic, arc.start)
            _, t_in = normal_tangent_at(prev.conic, prev.end)
            # with n pointing inward, the +90 turn of n runs clockwise; flip for CCW travel
            t_out, t_in = -t_out, -t_in
            turn = math.atan2(t_in[0] * t_out[1] - t_in[1] * t_out[0], t_in @ t_out)
            out.append(math.pi - turn)
            if m == 1:
                break
        return out

    @property
    def conics(self) -> list[Conic]:
        seen: list[Conic] = []
        for a in self.arcs:
            if a.conic not in seen:
                seen.append(a.conic)
        return seen

    def check(self) -> list[str]:
        problems = []
        for j, arc in enumerate(self.arcs):
            problems += [f"arc {j}: {p}" for p in arc.check()]
            nxt = self.arcs[(j + 1) % len(self.arcs)]
            if np.hypot(arc.end[0] - nxt.start[0], arc.end[1] - nxt.start[1]) > ON_CURVE_TOL:
                problems.append(f"arc {j} does not end where arc {(j + 1) % len(self.arcs)} starts")
        for j, w in enumerate(self.corner_angles):
            if not 0.0 < w < 2 * math.pi:
                problems.append(f"corner {j}: angle {w} outside (0, 2pi)")
        return problems


def oval_domain(q: Conic, corner_angle: float = 0.0) -> Domain:
    """Domain bounded by a single closed oval, cut at one designated corner."""
    c = q.center()
    z = intersect_ray_conic(q, c, (math.cos(corner_angle), math.sin(corner_angle)))[0]
    return Domain((Arc(q, tuple(z), tuple(z), tuple(c)),))

