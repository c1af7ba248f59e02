"""Triangulations of curved domains: classification, validation and generation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .conic import Arc, Conic, Domain, intersect_ray_conic, normalize_conic
from .quadrature import DEFAULT_RULE, PieMap, pie_ray_lengths, triangle_area
from .tolerances import ON_CURVE_TOL

ORDINARY, PIE, BUFFER = "ordinary", "pie", "buffer"


@dataclass(frozen=True)
class Triangle:
    """Vertex ids in counter-clockwise order.

    ``curved`` is ``(arc_id, local_edge)`` where local edge k is opposite
    vertex k. After :func:`classify`, pie triangles have the curved edge
    opposite ``v1`` (so ``v1`` is the interior vertex) and buffer triangles
    have their boundary vertex first.
    """

    vertices: tuple[int, int, int]
    cls: str | None = None
    curved: tuple[int, int] | None = None

    @property
    def arc(self) -> int | None:
        return None if self.curved is None else self.curved[0]

    def rotated(self, k: int) -> "Triangle":
        v = self.vertices
        vs = (v[k % 3], v[(k + 1) % 3], v[(k + 2) % 3])
        cur = None if self.curved is None else (self.curved[0], (self.curved[1] - k) % 3)
        return replace(self, vertices=vs, curved=cur)

    def local_edges(self) -> list[tuple[int, int]]:
        """Edge k is opposite vertex k."""
        a, b, c = self.vertices
        return [(b, c), (c, a), (a, b)]

    def straight_edges(self) -> list[tuple[int, int]]:
        edges = self.local_edges()
        if self.curved is not None:
            edges = [e for k, e in enumerate(edges) if k != self.curved[1]]
        return edges


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    boundary: np.ndarray
    triangles: tuple[Triangle, ...]
    domain: Domain

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "boundary", np.asarray(self.boundary, dtype=bool))
        object.__setattr__(self, "triangles", tuple(self.triangles))

    @cached_property
    def edges(self) -> dict[tuple[int, int], list[int]]:
        """Straight edges -> incident triangle ids (ascending)."""
        out: dict[tuple[int, int], list[int]] = {}
        for t, tri in enumerate(self.triangles):
            for a, b in tri.straight_edges():
                out.setdefault(edge_key(a, b), []).append(t)
        return out

    @cached_property
    def vertex_triangles(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(len(self.vertices))]
        for t, tri in enumerate(self.triangles):
            for v in tri.vertices:
                out[v].append(t)
        return out

    def interior_edges(self) -> list[tuple[int, int]]:
        return [e for e, ts in sorted(self.edges.items()) if len(ts) == 2]

    def neighbor(self, t: int, edge: tuple[int, int]) -> int | None:
        ts = self.edges.get(edge_key(*edge), [])
        others = [s for s in ts if s != t]
        return others[0] if others else None

    def coords(self, t: int) -> np.ndarray:
        return self.vertices[list(self.triangles[t].vertices)]

    def conic_of(self, t: int) -> Conic:
        return self.domain.arcs[self.triangles[t].arc].conic

    def edge_normal(self, a: int, b: int) -> np.ndarray:
        """Global unit normal of edge {a, b}: lexicographically smaller endpoint to larger, turned +90 degrees."""
        pa, pb = self.vertices[a], self.vertices[b]
        lo, hi = (pa, pb) if tuple(pa) <= tuple(pb) else (pb, pa)
        tau = (hi - lo) / np.hypot(*(hi - lo))
        return np.array([-tau[1], tau[0]])

    def pie_map(self, t: int) -> PieMap:
        v = self.coords(t)
        return PieMap(self.conic_of(t), tuple(v[0]), tuple(v[1]), tuple(v[2]))

    def arc_points(self, t: int, n: int = 100, include_ends: bool = True) -> np.ndarray:
        """Points of a pie triangle's curved edge, traced by rays from v1."""
        v = self.coords(t)
        sig = np.linspace(0.0, 1.0, n) if include_ends else np.linspace(0.0, 1.0, n + 2)[1:-1]
        lam = pie_ray_lengths(self.conic_of(t), v[0], v[1], v[2], sig)
        d = (v[1] - v[0])[None, :] + sig[:, None] * (v[2] - v[1])[None, :]
        return v[0][None, :] + lam[:, None] * d

    def diameter(self, t: int) -> float:
        pts = self.coords(t)
        if self.triangles[t].cls == PIE:
            pts = np.vstack([pts, self.arc_points(t, 100)])
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.max(np.hypot(diff[..., 0], diff[..., 1])))

    def h(self) -> float:
        return max(self.diameter(t) for t in range(len(self.triangles)))

    def area(self, t: int) -> float:
        """Area of T (curved for pie triangles)."""
        v = self.coords(t)
        if self.triangles[t].cls == PIE:
            _, w = self.pie_map(t).nodes(10, 4, 4)
            return float(w.sum())
        return triangle_area(*v)

    def class_ids(self, cls: str) -> list[int]:
        return [t for t, tri in enumerate(self.triangles) if tri.cls == cls]


# ---------------------------------------------------------------------------
# classification


def classify(mesh: Mesh) -> Mesh:
    tris = list(mesh.triangles)
    for t, tri in enumerate(tris):
        if tri.curved is not None and not isinstance(tri.curved[0], (int, np.integer)):
            raise ValueError(f"triangle {t}: triangles with two or more curved edges are not supported")
        tri = replace(tri, cls=PIE if tri.curved is not None else None)
        if tri.cls == PIE:
            tri = tri.rotated(tri.curved[1])
        tris[t] = tri
    pie_edges = set()
    for tri in tris:
        if tri.cls == PIE:
            pie_edges.update(edge_key(a, b) for a, b in tri.straight_edges())
    for t, tri in enumerate(tris):
        if tri.cls == PIE:
            continue
        if any(edge_key(a, b) in pie_edges for a, b in tri.local_edges()):
            bnd = [k for k, v in enumerate(tri.vertices) if mesh.boundary[v]]
            tri = replace(tri, cls=BUFFER)
            if len(bnd) == 1:
                tri = tri.rotated(bnd[0])
        else:
            tri = replace(tri, cls=ORDINARY)
        tris[t] = tri
    return Mesh(mesh.vertices, mesh.boundary, tuple(tris), mesh.domain)


def make_triangle(vertices, curved_arc: int | None = None, curved_edge: int | None = None) -> Triangle:
    """Unclassified triangle; ``curved_edge`` is the local edge (opposite vertex k) lying on ``curved_arc``."""
    cur = None if curved_arc is None else (int(curved_arc), int(curved_edge))
    return Triangle(tuple(int(v) for v in vertices), None, cur)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    failures: dict[str, list] = field(default_factory=dict)

    CONDITIONS = {
        "A": "arc endpoints are boundary vertices",
        "B": "no interior edge has both endpoints on the boundary",
        "C": "no pair of pie-shaped triangles shares an edge",
        "D": "every pie-shaped triangle is star-shaped w.r.t. its interior vertex",
        "E": "q_j > 0 on T minus its curved edge",
        "F": "no pair of buffer triangles shares an edge",
        "buffer_vertex": "every buffer triangle has exactly one boundary vertex",
        "topology": "edges, orientation and curved-edge bookkeeping are consistent",
    }

    def add(self, cond: str, item) -> None:
        self.failures.setdefault(cond, []).append(item)

    def passed(self, cond: str) -> bool:
        return not self.failures.get(cond)

    @property
    def ok(self) -> bool:
        return all(self.passed(c) for c in self.CONDITIONS)

    def lines(self) -> list[str]:
        out = []
        for c, text in self.CONDITIONS.items():
            bad = self.failures.get(c, [])
            status = "PASS" if not bad else "FAIL"
            tail = "" if not bad else f"  offending: {bad[:10]}{' ...' if len(bad) > 10 else ''}"
            out.append(f"({c}) {status} {text}{tail}")
        return out

    def to_dict(self) -> dict:
        return {c: {"pass": self.passed(c), "offending": [repr(x) for x in self.failures.get(c, [])]} for c in self.CONDITIONS}


def validate(mesh: Mesh) -> ValidationReport:
    rep = ValidationReport()
    V = mesh.vertices
    tris = mesh.triangles

    for t, tri in enumerate(tris):
        if tri.cls is None:
            rep.add("topology", ("unclassified", t))
            continue
        a, b, c = V[list(tri.vertices)]
        if (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) <= 0:
            rep.add("topology", ("not counter-clockwise", t))
        if tri.cls == PIE:
            v1, v2, v3 = tri.vertices
            if tri.curved[1] != 0 or mesh.boundary[v1] or not (mesh.boundary[v2] and mesh.boundary[v3]):
                rep.add("topology", ("pie roles", t))
            elif not 0 <= tri.arc < len(mesh.domain.arcs):
                rep.add("topology", ("unknown arc", t))
        elif tri.curved is not None:
            rep.add("topology", ("curved edge on non-pie", t))
        if tri.cls == BUFFER:
            nb = int(sum(mesh.boundary[v] for v in tri.vertices))
            if nb != 1 or not mesh.boundary[tri.vertices[0]]:
                rep.add("buffer_vertex", t)

    for e, ts in mesh.edges.items():
        if len(ts) > 2:
            rep.add("topology", ("edge with >2 triangles", e))
        elif len(ts) == 1:
            rep.add("topology", ("straight boundary edge", e))
        elif mesh.boundary[e[0]] and mesh.boundary[e[1]]:
            rep.add("B", e)
        if len(ts) == 2:
            c0, c1 = (tris[s].cls for s in ts)
            if c0 == c1 == PIE:
                rep.add("C", e)
            if c0 == c1 == BUFFER:
                rep.add("F", e)

    # boundary vertices must sit on the boundary curves
    conics = mesh.domain.conics
    for v in np.flatnonzero(mesh.boundary):
        if min(abs(q(*V[v])) for q in conics) > ON_CURVE_TOL:
            rep.add("topology", ("boundary vertex off the curve", int(v)))

    bpts = V[mesh.boundary]
    for j, arc in enumerate(mesh.domain.arcs):
        for z in (arc.start, arc.end):
            if bpts.size == 0 or np.min(np.hypot(*(bpts - np.asarray(z)).T)) > ON_CURVE_TOL:
                rep.add("A", (j, z))

    if all(tri.cls is not None for tri in tris):
        stripped = Mesh(V, mesh.boundary, tuple(Triangle(tri.vertices, None, tri.curved) for tri in tris), mesh.domain)
        for t, (mine, ref) in enumerate(zip(tris, classify(stripped).triangles)):
            if mine.cls != ref.cls or mine.vertices != ref.vertices:
                rep.add("topology", ("class or vertex roles disagree with classification", t))

    for t in mesh.class_ids(PIE):
        if not rep.passed("topology") and any(x[1] == t for x in rep.failures["topology"] if isinstance(x, tuple)):
            continue
        _check_pie(mesh, t, rep)
    return rep


def _arc_points_by_witness(mesh: Mesh, t: int, n: int) -> np.ndarray:
    """Arc samples between the boundary vertices of pie t, traced independently of v1."""
    arc = mesh.domain.arcs[mesh.triangles[t].arc]
    w = np.asarray(arc.witness)
    _, v2, v3 = mesh.coords(t)
    a2 = math.atan2(v2[1] - w[1], v2[0] - w[0])
    a3 = math.atan2(v3[1] - w[1], v3[0] - w[0])
    while a3 <= a2:
        a3 += 2 * math.pi
    return np.array([arc.point_at_angle(a) for a in np.linspace(a2, a3, n)])


def _check_pie(mesh: Mesh, t: int, rep: ValidationReport) -> None:
    v = mesh.coords(t)
    q = mesh.conic_of(t)
    for p in (v[1], v[2]):
        if abs(q(*p)) > ON_CURVE_TOL:
            rep.add("topology", ("pie boundary vertex off its conic", t))
            return
    try:
        arc = _arc_points_by_witness(mesh, t, 64)
    except ValueError:
        rep.add("D", t)
        return
    rel = arc - v[0]
    cross = rel[:-1, 0] * rel[1:, 1] - rel[:-1, 1] * rel[1:, 0]
    if np.any(cross <= 0):
        rep.add("D", t)
        return
    try:
        pts, _ = mesh.pie_map(t).nodes(10, 8, 1)
    except ValueError:
        rep.add("E", t)
        return
    s = np.linspace(0.0, 1.0, 22)[1:-1, None]
    edge_pts = np.vstack([v[0] + s * (v[1] - v[0]), v[0] + s * (v[2] - v[0]), v[0][None, :]])
    allp = np.vstack([pts, edge_pts])
    if np.any(q(allp[:, 0], allp[:, 1]) <= 0):
        rep.add("E", t)


# ---------------------------------------------------------------------------
# geometry per triangle


@dataclass(frozen=True)
class InscribedDisk:
    center: tuple[float, float]
    radius: float


def incircle(v1, v2, v3) -> InscribedDisk:
    v1, v2, v3 = (np.asarray(v, dtype=float) for v in (v1, v2, v3))
    a = np.hypot(*(v3 - v2))
    b = np.hypot(*(v1 - v3))
    c = np.hypot(*(v2 - v1))
    s = a + b + c
    center = (a * v1 + b * v2 + c * v3) / s
    return InscribedDisk(tuple(center), 2.0 * triangle_area(v1, v2, v3) / s)


def _line_dist(p, a, b):
    """Signed distance from p (…, 2) to line a->b, positive on the left."""
    d = b - a
    n = np.array([-d[1], d[0]]) / np.hypot(*d)
    return (p - a) @ n


class _PieGeometry:
    def __init__(self, mesh: Mesh, t: int, n_arc: int = 257):
        self.v = mesh.coords(t)
        self.q = mesh.conic_of(t)
        self.sig = np.linspace(0.0, 1.0, n_arc)
        self.mesh, self.t = mesh, t
        self.arc = mesh.arc_points(t, n_arc)

    def _gamma(self, s: float) -> np.ndarray:
        v = self.v
        lam = pie_ray_lengths(self.q, v[0], v[1], v[2], np.array([s]))[0]
        return v[0] + lam * (v[1] - v[0] + s * (v[2] - v[1]))

    def arc_distance(self, p: np.ndarray) -> float:
        d = np.hypot(*(self.arc - p).T)
        k = int(np.argmin(d))
        lo, hi = self.sig[max(k - 1, 0)], self.sig[min(k + 1, len(self.sig) - 1)]
        res = minimize_scalar(lambda s: np.hypot(*(self._gamma(s) - p)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-15})
        return float(min(res.fun, d[k]))

    def objective(self, p: np.ndarray) -> float:
        """Radius of the largest disk about p inside T intersected with T* (negative when p is outside)."""
        v1, v2, v3 = self.v
        straight = min(_line_dist(p, v1, v2), _line_dist(p, v3, v1), _line_dist(p, v2, v3))
        da = self.arc_distance(p)
        sgn = 1.0 if self.q(*p) > 0 else -1.0
        return min(straight, sgn * da)


def inscribed_disk(mesh: Mesh, t: int) -> InscribedDisk:
    tri = mesh.triangles[t]
    v = mesh.coords(t)
    if tri.cls != PIE:
        return incircle(*v)
    disk = incircle(*v)
    geo = _PieGeometry(mesh, t)
    c = np.asarray(disk.center)
    if geo.q(*c) > 0 and geo.arc_distance(c) >= disk.radius:
        # the incircle of T* already avoids the arc, hence is maximal in T ∩ T*
        return disk
    h = mesh.diameter(t)
    best = c
    best_val = geo.objective(c)
    width = h / 2
    while width > 1e-10 * h:
        g = np.linspace(-width, width, 9)
        for dx in g:
            for dy in g:
                p = best + np.array([dx, dy])
                val = geo.objective(p)
                if val > best_val:
                    best, best_val = p, val
        width *= 0.35
    if best_val <= 0:
        raise ValueError(f"pie triangle {t}: T ∩ T* contains no disk")
    return InscribedDisk(tuple(best), float(best_val))


def edge_points(v1, v2) -> np.ndarray:
    """z^j = v1 + j/4 (v2 - v1), j = 1, 2, 3."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    return np.array([v1 + (j / 4) * (v2 - v1) for j in (1, 2, 3)])


def shape_regularity(mesh: Mesh, disks: list[InscribedDisk] | None = None) -> float:
    if disks is None:
        disks = [inscribed_disk(mesh, t) for t in range(len(mesh.triangles))]
    return max(mesh.diameter(t) / disks[t].radius for t in range(len(mesh.triangles)))


# ---------------------------------------------------------------------------
# generation


def _ring_strip(inner: list[int], inner_ang: np.ndarray, outer: list[int], outer_ang: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate the band between two closed vertex rings sorted by angle."""
    m, n = len(inner), len(outer)
    a = np.append(inner_ang, inner_ang[0] + 2 * math.pi)
    # start the outer ring at the vertex closest in angle to inner[0]
    diff = (outer_ang - a[0] + math.pi) % (2 * math.pi) - math.pi
    j0 = int(np.argmin(np.abs(diff)))
    b = np.array([a[0] + diff[j0] + ((outer_ang[(j0 + k) % n] - outer_ang[j0]) % (2 * math.pi)) for k in range(n)])
    b = np.append(b, b[0] + 2 * math.pi)
    tris = []
    i = j = 0
    while i < m or j < n:
        if j == n or (i < m and a[i + 1] <= b[j + 1]):
            tris.append((inner[i], inner[(i + 1) % m], outer[(j0 + j) % n]))
            i += 1
        else:
            tris.append((inner[i % m], outer[(j0 + j + 1) % n], outer[(j0 + j) % n]))
            j += 1
    return tris


MIN_BOUNDARY_VERTICES = 8


def generate_disk_mesh(q: Conic, n: int, corner_angle: float = 0.0) -> Mesh:
    """Ring mesh of the oval {q > 0} with ``n`` boundary vertices.

    Layout from the outside in: ``n`` pie triangles on the boundary, a ring
    of ``n`` buffer triangles whose only boundary vertex is shared by two
    pies (so buffers meet each other only at vertices), then concentric
    rings of ordinary triangles down to a center vertex.
    """
    if not q.is_bounded_oval():
        raise ValueError("generate_disk_mesh needs an ellipse (a bounded oval)")
    if n < MIN_BOUNDARY_VERTICES:
        raise ValueError(
            f"n={n} is too small: with fewer than {MIN_BOUNDARY_VERTICES} boundary vertices the pie/buffer "
            "layer is deeper than the domain, so buffer triangles cannot be kept edge-disjoint (F) "
            "with star-shaped pie triangles (D); use n >= 8"
        )
    center = q.center()
    if q(*center) < 0:
        q = q.scaled(-1.0)

    def ray_point(theta: float, s: float) -> np.ndarray:
        hit = intersect_ray_conic(q, center, (math.cos(theta), math.sin(theta)))[0]
        if s == 1.0:
            return hit
        return center + s * (hit - center)

    h_ang = 2 * math.pi / n
    depth = math.sqrt(3) / 2 * h_ang
    s_in = 1.0 - depth
    # radial spacing ~ sqrt(3)/2 of the tangential spacing on the innermost-boundary ring
    n_rings = max(1, round(n / (math.sqrt(3) * math.pi)))

    verts: list[np.ndarray] = [center]
    bflag = [False]
    rings: list[tuple[list[int], np.ndarray]] = []
    for k in range(1, n_rings + 1):
        m = n if k == n_rings else max(3, round(n * k / n_rings))
        phase = corner_angle + h_ang / 2 + (0.0 if k == n_rings else (k % 2) * math.pi / m)
        ang = phase + 2 * math.pi * np.arange(m) / m
        ids = []
        for th in ang:
            ids.append(len(verts))
            verts.append(ray_point(th, s_in * k / n_rings))
            bflag.append(False)
        rings.append((ids, ang % (2 * math.pi)))
    b_ang = corner_angle + h_ang * np.arange(n)
    b_ids = []
    for th in b_ang:
        b_ids.append(len(verts))
        verts.append(ray_point(th, 1.0))
        bflag.append(True)

    tris: list[Triangle] = []
    ids1, _ = rings[0]
    for i in range(len(ids1)):
        tris.append(make_triangle((0, ids1[i], ids1[(i + 1) % len(ids1)])))
    for (ia, aa), (ib, ab) in zip(rings[:-1], rings[1:]):
        tris.extend(make_triangle(t) for t in _ring_strip(ia, aa, ib, ab))
    ring, _ = rings[-1]
    for i in range(n):
        # pie: interior vertex first, curved edge opposite it
        tris.append(make_triangle((ring[i], b_ids[i], b_ids[(i + 1) % n]), 0, 0))
        tris.append(make_triangle((b_ids[i], ring[i - 1], ring[i])))

    V = np.array(verts)
    # orient every triangle counter-clockwise
    fixed = []
    for tri in tris:
        a, b, c = V[list(tri.vertices)]
        if (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) < 0:
            vs = (tri.vertices[0], tri.vertices[2], tri.vertices[1])
            cur = None if tri.curved is None else (tri.curved[0], {0: 0, 1: 2, 2: 1}[tri.curved[1]])
            tri = Triangle(vs, None, cur)
        fixed.append(tri)

    z = V[b_ids[0]]
    raw_domain = Domain((Arc(q, tuple(z), tuple(z), tuple(center)),))
    mesh = classify(Mesh(V, np.array(bflag), tuple(fixed), raw_domain))

    qn = normalize_conic(q, _normalization_samples(mesh), tuple(center))
    domain = Domain((Arc(qn, tuple(z), tuple(z), tuple(center)),))
    return Mesh(mesh.vertices, mesh.boundary, mesh.triangles, domain)


def _normalization_samples(mesh: Mesh) -> np.ndarray:
    pts = [mesh.domain.arcs[0].samples(400)]
    for t in mesh.class_ids(PIE):
        v = mesh.coords(t)
        pts.append(v)
        for a, b in ((0, 1), (0, 2)):
            pts.append(edge_points(v[a], v[b]))
        pts.append(DEFAULT_RULE.mapped(*v))
        pts.append(mesh.pie_map(t).nodes(10, 8, 1)[0])
    return np.vstack(pts)
