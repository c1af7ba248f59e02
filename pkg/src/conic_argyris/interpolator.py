"""Local Hermite interpolants and their assembly into a C1 spline."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mesh import BUFFER, ORDINARY, PIE, InscribedDisk, Mesh, inscribed_disk
from .nodal import (
    HermiteData,
    NodalFunctional,
    apply,
    apply_jet,
    nodal_set_buffer,
    nodal_set_ordinary,
    nodal_set_pie,
    quotient_jet_boundary,
    quotient_jet_interior,
)
from .poly2 import Poly2, dim_P, monomials, multiply
from .quadrature import pie_ray_lengths
from .tolerances import ARC_VANISH_TOL

DEGREE = {ORDINARY: 5, PIE: 6, BUFFER: 6}


class SingularLocalSystem(ValueError):
    pass


def local_frame(mesh: Mesh, t: int) -> tuple[tuple[float, float], float]:
    """Centroid of the vertices and vertex diameter: maps T to a set of diameter ~1."""
    v = mesh.coords(t)
    c = v.mean(axis=0)
    d = max(np.hypot(*(v[i] - v[j])) for i in range(3) for j in range(i + 1, 3))
    return (float(c[0]), float(c[1])), float(d)


def monomial_jet(degree: int, xi: float, eta: float):
    """Value, gradient and Hessian of every monomial xi^i eta^j (storage order)."""
    mons = monomials(degree)
    val = np.empty(len(mons))
    grad = np.zeros((2, len(mons)))
    hess = np.zeros((2, 2, len(mons)))

    def pw(base, k):
        return base**k if k >= 0 else 0.0

    for m, (i, j) in enumerate(mons):
        val[m] = pw(xi, i) * pw(eta, j)
        grad[0, m] = i * pw(xi, i - 1) * pw(eta, j)
        grad[1, m] = j * pw(xi, i) * pw(eta, j - 1)
        hess[0, 0, m] = i * (i - 1) * pw(xi, i - 2) * pw(eta, j)
        hess[0, 1, m] = hess[1, 0, m] = i * j * pw(xi, i - 1) * pw(eta, j - 1)
        hess[1, 1, m] = j * (j - 1) * pw(xi, i) * pw(eta, j - 2)
    return val, grad, hess


def collocation_matrix(functionals: list[NodalFunctional], degree: int, origin, scale: float) -> np.ndarray:
    """Rows eta(m) * scale^d(eta) for the monomials m of the local frame."""
    A = np.empty((len(functionals), dim_P(degree)))
    for r, eta in enumerate(functionals):
        xi = (eta.site[0] - origin[0]) / scale
        et = (eta.site[1] - origin[1]) / scale
        val, grad, hess = monomial_jet(degree, xi, et)
        if eta.degree == 0:
            A[r] = val
        elif eta.degree == 1:
            A[r] = np.asarray(eta.dirs[0]) @ grad
        else:
            A[r] = np.einsum("i,ijm,j->m", eta.dirs[0], hess, eta.dirs[1])
    return A


def solve_local(functionals, values, degree: int, origin, scale: float) -> Poly2:
    if len(functionals) != dim_P(degree):
        raise ValueError(f"{len(functionals)} conditions for a space of dimension {dim_P(degree)}")
    A = collocation_matrix(functionals, degree, origin, scale)
    b = np.array([v * scale**eta.degree for eta, v in zip(functionals, values)])
    try:
        c = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularLocalSystem(f"singular local interpolation system: {exc}") from exc
    return Poly2(c, degree, origin, scale)


def min_singular_value(functionals, degree: int, origin, scale: float) -> float:
    A = collocation_matrix(functionals, degree, origin, scale)
    return float(np.linalg.svd(A, compute_uv=False)[-1])


# ---------------------------------------------------------------------------
# local operators


def interp_ordinary(mesh: Mesh, t: int, u: HermiteData) -> Poly2:
    origin, scale = local_frame(mesh, t)
    eta = nodal_set_ordinary(mesh, t)
    return solve_local(eta, [apply(e, u) for e in eta], 5, origin, scale)


def check_vanishes_on_arc(mesh: Mesh, t: int, u: HermiteData, n: int = 10) -> None:
    pts = mesh.arc_points(t, n)
    vals = np.array([u.value(x, y) for x, y in pts])
    if np.max(np.abs(vals)) > ARC_VANISH_TOL:
        raise ValueError(f"u does not vanish on the curved edge of triangle {t} (max |u| = {np.max(np.abs(vals)):.3e})")


def pie_quotient_factor(mesh: Mesh, t: int, u: HermiteData, disk: InscribedDisk) -> Poly2:
    """p in P4 with eta p = eta(u/q) for the pie nodal set."""
    q = mesh.conic_of(t)
    origin, scale = local_frame(mesh, t)
    v1, v2, v3 = mesh.coords(t)
    eta = nodal_set_pie(mesh, t, disk)
    jets = {
        "v1": quotient_jet_interior(u, q, v1),
        "v2": quotient_jet_boundary(u, q, v2) + (None,),
        "v3": quotient_jet_boundary(u, q, v3) + (None,),
        "c": quotient_jet_interior(u, q, disk.center),
    }
    values = [apply_jet(e, *jets[e.label.split(":")[0]]) for e in eta]
    return solve_local(eta, values, 4, origin, scale)


def interp_pie(mesh: Mesh, t: int, u: HermiteData, disk: InscribedDisk | None = None) -> Poly2:
    if disk is None:
        disk = inscribed_disk(mesh, t)
    check_vanishes_on_arc(mesh, t, u)
    p = pie_quotient_factor(mesh, t, u, disk)
    return multiply(p, Poly2.from_conic(mesh.conic_of(t)).to_frame(p.origin, p.scale))


def interp_buffer(mesh: Mesh, t: int, u: HermiteData, neighbor_pieces) -> Poly2:
    """``neighbor_pieces[i]`` is the phase-1 piece across e_{i+1} (e1 = <v2,v3>, e2 = <v1,v2>, e3 = <v1,v3>)."""
    ns = nodal_set_buffer(mesh, t)
    if len(neighbor_pieces) != 3 or any(p is None for p in neighbor_pieces):
        raise ValueError(f"buffer triangle {t}: missing neighbor piece")
    functionals = list(ns.barycenter)
    values = [apply(e, u) for e in ns.barycenter]
    for group, piece in zip(ns.groups, neighbor_pieces):
        functionals += group
        values += [apply(e, piece) for e in group]
    origin, scale = local_frame(mesh, t)
    return solve_local(functionals, values, 6, origin, scale)


# ---------------------------------------------------------------------------
# global operator


@dataclass
class Spline:
    mesh: Mesh
    pieces: list[Poly2]
    disks: dict[int, InscribedDisk] = field(default_factory=dict)

    def __post_init__(self):
        for t, (tri, p) in enumerate(zip(self.mesh.triangles, self.pieces)):
            if p.degree != DEGREE[tri.cls]:
                raise ValueError(f"triangle {t} ({tri.cls}) carries a degree-{p.degree} piece")

    def __call__(self, x, y, alpha=(0, 0)):
        return eval_spline(self, (x, y), alpha)


def _phase(tasks, fn, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def check_vanishes_on_boundary(mesh: Mesh, u: HermiteData, n: int = 10) -> None:
    for j, arc in enumerate(mesh.domain.arcs):
        vals = np.array([u.value(x, y) for x, y in arc.samples(n)])
        if np.max(np.abs(vals)) > ARC_VANISH_TOL:
            raise ValueError(f"u does not vanish on boundary arc {j} (max |u| = {np.max(np.abs(vals)):.3e})")


def interpolate(mesh: Mesh, u: HermiteData, threads: int = 1) -> Spline:
    check_vanishes_on_boundary(mesh, u)
    tris = mesh.triangles
    disks = {t: inscribed_disk(mesh, t) for t in mesh.class_ids(PIE)}
    pieces: list[Poly2 | None] = [None] * len(tris)

    def phase1(t):
        if tris[t].cls == PIE:
            return interp_pie(mesh, t, u, disks[t])
        return interp_ordinary(mesh, t, u)

    first = [t for t, tri in enumerate(tris) if tri.cls != BUFFER]
    for t, p in zip(first, _phase(first, phase1, threads)):
        pieces[t] = p

    def phase2(t):
        ns = nodal_set_buffer(mesh, t)
        nbrs = []
        for e in ns.edges:
            s = mesh.neighbor(t, e)
            if s is None or tris[s].cls == BUFFER:
                raise ValueError(f"buffer triangle {t}: no ordinary or pie neighbor across edge {e}")
            nbrs.append(pieces[s])
        return interp_buffer(mesh, t, u, nbrs)

    second = mesh.class_ids(BUFFER)
    for t, p in zip(second, _phase(second, phase2, threads)):
        pieces[t] = p
    return Spline(mesh, pieces, disks)


# ---------------------------------------------------------------------------
# point location and evaluation


def barycentric(v: np.ndarray, z) -> np.ndarray:
    T = np.array([[v[0, 0] - v[2, 0], v[1, 0] - v[2, 0]], [v[0, 1] - v[2, 1], v[1, 1] - v[2, 1]]])
    l12 = np.linalg.solve(T, np.asarray(z, dtype=float) - v[2])
    return np.array([l12[0], l12[1], 1.0 - l12[0] - l12[1]])


def contains(mesh: Mesh, t: int, z, eps: float = 1e-12) -> bool:
    v = mesh.coords(t)
    lam = barycentric(v, z)
    if mesh.triangles[t].cls != PIE:
        return bool(np.all(lam >= -eps))
    # pie: inside the wedge at v1 and not beyond the arc along the ray from v1
    if lam[1] < -eps or lam[2] < -eps:
        return False
    r = lam[1] + lam[2]
    if r <= eps:
        return True
    sigma = min(max(lam[2] / r, 0.0), 1.0)
    reach = pie_ray_lengths(mesh.conic_of(t), v[0], v[1], v[2], np.array([sigma]))[0]
    return bool(r <= reach * (1.0 + eps) + eps)


def locate(mesh: Mesh, z, start: int = 0, eps: float = 1e-12) -> int:
    """Containing triangle found by an adjacency walk; ties go to the lowest id."""
    t = start
    found = None
    for _ in range(len(mesh.triangles)):
        if contains(mesh, t, z, eps):
            found = t
            break
        lam = barycentric(mesh.coords(t), z)
        tri = mesh.triangles[t]
        moved = False
        for k in np.argsort(lam):
            if lam[k] >= 0:
                break
            a, b = tri.local_edges()[k]
            s = mesh.neighbor(t, (a, b))
            if s is not None and (tri.curved is None or tri.curved[1] != k):
                t, moved = s, True
                break
        if not moved:
            break
    if found is None:
        hits = [s for s in range(len(mesh.triangles)) if contains(mesh, s, z, eps)]
        if not hits:
            raise ValueError(f"point {tuple(z)} lies outside the domain")
        return hits[0]
    near = {s for v in mesh.triangles[found].vertices for s in mesh.vertex_triangles[v]}
    return min(s for s in near if s == found or contains(mesh, s, z, eps))


def eval_spline(s: Spline, z, alpha=(0, 0)) -> float:
    if sum(alpha) > 2:
        raise ValueError("derivatives of order > 2 are not supported")
    t = locate(s.mesh, z)
    return float(s.pieces[t].derivative(tuple(alpha), z[0], z[1]))
