"""Broken Sobolev error norms, C1 jumps and interpolation-condition residuals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .interpolator import Spline
from .mesh import BUFFER, ORDINARY, PIE, Mesh, edge_key, edge_points
from .nodal import HermiteData
from .poly2 import Poly2
from .quadrature import DEFAULT_RULE, QuadratureRule, quad_curved, triangle_area

SECOND = ((2, 0), (1, 1), (0, 2))


def _hess_entry(H, a, b):
    if a == 2:
        return H[0, 0]
    if b == 2:
        return H[1, 1]
    return H[0, 1]


def triangle_error_integrals(s: Spline, u: HermiteData, t: int, kmax: int = 2, rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    """[∫_T |u - s|^2, ∫_T |grad(u - s)|^2, sum_{|a|=2} ∫_T |D^a(u - s)|^2][: kmax + 1]."""
    mesh = s.mesh
    piece = s.pieces[t]

    def f(x, y):
        rows = [(u.value(x, y) - piece(x, y)) ** 2]
        if kmax >= 1:
            g = np.asarray(u.grad(x, y))
            rows.append((g[0] - piece.derivative((1, 0), x, y)) ** 2 + (g[1] - piece.derivative((0, 1), x, y)) ** 2)
        if kmax >= 2:
            H = np.asarray(u.hess(x, y))
            rows.append(sum((_hess_entry(H, a, b) - piece.derivative((a, b), x, y)) ** 2 for a, b in SECOND))
        return np.array(rows)

    v = mesh.coords(t)
    if mesh.triangles[t].cls == PIE:
        return np.asarray(quad_curved(f, v[0], v[1], v[2], mesh.conic_of(t)))
    pts = rule.mapped(*v)
    return triangle_area(*v) * (f(pts[:, 0], pts[:, 1]) @ rule.weights)


@dataclass
class ErrorReport:
    h: float
    n_boundary: int
    seminorms: list[float]
    by_class: dict[str, list[float]] = field(default_factory=dict)

    def norm(self, k: int) -> float:
        """Broken H^k norm: root-sum of seminorms 0..k."""
        return math.sqrt(sum(x * x for x in self.seminorms[: k + 1]))

    @property
    def e_L2(self) -> float:
        return self.seminorms[0]

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "n_boundary": self.n_boundary,
            "seminorms": self.seminorms,
            "norms": [self.norm(k) for k in range(len(self.seminorms))],
            "by_class": self.by_class,
        }


def error_report(s: Spline, u: HermiteData, kmax: int = 2, rule: QuadratureRule = DEFAULT_RULE) -> ErrorReport:
    if not 0 <= kmax <= 2:
        raise ValueError("only k = 0, 1, 2 are measurable from second-order Hermite data")
    mesh = s.mesh
    per = np.array([triangle_error_integrals(s, u, t, kmax, rule) for t in range(len(mesh.triangles))])
    by_class = {}
    for cls in (ORDINARY, PIE, BUFFER):
        ids = mesh.class_ids(cls)
        by_class[cls] = [float(math.sqrt(x)) for x in per[ids].sum(axis=0)] if ids else [0.0] * (kmax + 1)
    total = [float(math.sqrt(x)) for x in per.sum(axis=0)]
    return ErrorReport(mesh.h(), int(mesh.boundary.sum()), total, by_class)


def error_norm(s: Spline, u: HermiteData, mesh: Mesh, k: int, full: bool = False) -> float:
    """Broken H^k seminorm of u - s (or the full norm with ``full=True``)."""
    if mesh is not s.mesh:
        raise ValueError("spline was built on a different mesh")
    if not 0 <= k <= 2:
        raise ValueError("k must be 0, 1 or 2")
    rep = error_report(s, u, k)
    return rep.norm(k) if full else rep.seminorms[k]


# ---------------------------------------------------------------------------
# continuity


def piece_jump(p1: Poly2, p2: Poly2, a, b, normal, n_samples: int = 50) -> tuple[float, float]:
    """Max value and normal-derivative differences of two pieces along segment a-b, relative to coefficient scale."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ts = np.linspace(0.0, 1.0, n_samples)
    x = a[0] + ts * (b[0] - a[0])
    y = a[1] + ts * (b[1] - a[1])
    dv = np.max(np.abs(p1(x, y) - p2(x, y)))
    n1 = normal[0] * p1.derivative((1, 0), x, y) + normal[1] * p1.derivative((0, 1), x, y)
    n2 = normal[0] * p2.derivative((1, 0), x, y) + normal[1] * p2.derivative((0, 1), x, y)
    dn = np.max(np.abs(n1 - n2))
    scale = max(p1.max_abs_coeff(), p2.max_abs_coeff())
    if scale == 0.0:
        return float(dv), float(dn)
    hs = max(p1.scale, p2.scale)
    return float(dv / scale), float(dn * hs / scale)


def c1_jump(s: Spline, e: tuple[int, int], n_samples: int = 50) -> tuple[float, float]:
    mesh = s.mesh
    ts = mesh.edges.get(edge_key(*e), [])
    if len(ts) != 2:
        raise ValueError(f"edge {e} is not an interior edge")
    a, b = e
    return piece_jump(s.pieces[ts[0]], s.pieces[ts[1]], mesh.vertices[a], mesh.vertices[b], mesh.edge_normal(a, b), n_samples)


def max_c1_jump(s: Spline, n_samples: int = 50):
    """(max value jump, max normal jump, worst edge) over all interior edges."""
    worst_v = worst_n = 0.0
    where = None
    for e in s.mesh.interior_edges():
        dv, dn = c1_jump(s, e, n_samples)
        if max(dv, dn) > max(worst_v, worst_n):
            where = e
        worst_v, worst_n = max(worst_v, dv), max(worst_n, dn)
    return worst_v, worst_n, where


ALL_ORDER2 = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def vertex_mismatch(s: Spline, orders=ALL_ORDER2):
    """Largest relative disagreement of D^alpha among pieces meeting at a vertex."""
    mesh = s.mesh
    worst, where = 0.0, None
    for v, ts in enumerate(mesh.vertex_triangles):
        z = mesh.vertices[v]
        for al in orders:
            vals = np.array([s.pieces[t].derivative(al, z[0], z[1]) for t in ts])
            rel = (vals.max() - vals.min()) / max(1.0, np.max(np.abs(vals)))
            if rel > worst:
                worst, where = float(rel), (v, al)
    return worst, where


def sup_estimate(s: Spline) -> float:
    """max |s| over vertices and quadrature points of every piece."""
    mesh = s.mesh
    best = 0.0
    for t, p in enumerate(s.pieces):
        v = mesh.coords(t)
        pts = np.vstack([v, DEFAULT_RULE.mapped(*v)]) if mesh.triangles[t].cls != PIE else np.vstack([v, mesh.pie_map(t).nodes(6, 4, 1)[0]])
        best = max(best, float(np.max(np.abs(p(pts[:, 0], pts[:, 1])))))
    return best


def boundary_trace(s: Spline, n_samples: int = 100) -> float:
    """max |s| over ``n_samples`` points of every curved edge."""
    mesh = s.mesh
    best = 0.0
    for t in mesh.class_ids(PIE):
        pts = mesh.arc_points(t, n_samples)
        best = max(best, float(np.max(np.abs(s.pieces[t](pts[:, 0], pts[:, 1])))))
    return best


def interpolation_residuals(s: Spline, u: HermiteData) -> dict[str, tuple[float, object]]:
    """Relative residuals of the four families of global interpolation conditions."""
    mesh = s.mesh
    out: dict[str, tuple[float, object]] = {}

    def rel(a, b):
        return abs(a - b) / max(1.0, abs(b))

    def upd(key, r, where):
        if key not in out or r > out[key][0]:
            out[key] = (float(r), where)

    out["vertex_order2"] = (0.0, None)
    for v, ts in enumerate(mesh.vertex_triangles):
        z = mesh.vertices[v]
        val, g, H = u.derivatives(z)
        target = {(0, 0): val, (1, 0): g[0], (0, 1): g[1], (2, 0): H[0, 0], (1, 1): H[0, 1], (0, 2): H[1, 1]}
        for t in ts:
            for al, ref in target.items():
                upd("vertex_order2", rel(s.pieces[t].derivative(al, z[0], z[1]), ref), (v, t, al))

    out["ordinary_edge_normal"] = (0.0, None)
    for t in mesh.class_ids(ORDINARY):
        for a, b in mesh.triangles[t].local_edges():
            z = edge_points(mesh.vertices[a], mesh.vertices[b])[1]
            nrm = mesh.edge_normal(a, b)
            _, g, _ = u.derivatives(z)
            p = s.pieces[t]
            got = nrm[0] * p.derivative((1, 0), *z) + nrm[1] * p.derivative((0, 1), *z)
            upd("ordinary_edge_normal", rel(got, float(g @ nrm)), (t, (a, b)))

    out["pie_center_order1"] = (0.0, None)
    for t in mesh.class_ids(PIE):
        c = s.disks[t].center
        val, g, _ = u.derivatives(c)
        p = s.pieces[t]
        for al, ref in (((0, 0), val), ((1, 0), g[0]), ((0, 1), g[1])):
            upd("pie_center_order1", rel(p.derivative(al, *c), ref), (t, al))

    out["buffer_barycenter"] = (0.0, None)
    for t in mesh.class_ids(BUFFER):
        c = mesh.coords(t).mean(axis=0)
        upd("buffer_barycenter", rel(s.pieces[t](*c), u.value(*c)), t)
    return out
