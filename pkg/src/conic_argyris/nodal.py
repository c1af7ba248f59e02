"""Nodal functionals for ordinary, pie-shaped and buffer triangles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .conic import Conic, grad_conic, hessian_conic, normal_tangent_at
from .mesh import InscribedDisk, Mesh, edge_points
from .poly2 import Poly2, dir_deriv
from .tolerances import QUOTIENT_Q_EPS, UNIT_VECTOR_TOL

EX = (1.0, 0.0)
EY = (0.0, 1.0)


@dataclass(frozen=True)
class NodalFunctional:
    """f -> D_{dirs[0]} ... D_{dirs[-1]} f(site).

    Partial derivatives D_x^a D_y^b are encoded as ``a`` copies of e_x
    followed by ``b`` copies of e_y.
    """

    site: tuple[float, float]
    dirs: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "site", (float(self.site[0]), float(self.site[1])))
        object.__setattr__(self, "dirs", tuple((float(d[0]), float(d[1])) for d in self.dirs))
        for d in self.dirs:
            if abs(np.hypot(*d) - 1.0) > UNIT_VECTOR_TOL:
                raise ValueError(f"direction {d} is not a unit vector")
        if len(self.dirs) > 2:
            raise ValueError("nodal functionals of degree > 2 are not supported")

    @property
    def degree(self) -> int:
        return len(self.dirs)


def partial(site, a: int, b: int, label: str = "") -> NodalFunctional:
    return NodalFunctional(site, (EX,) * a + (EY,) * b, label or f"D{a}{b}")


def vertex_partials(site, order: int, label: str) -> list[NodalFunctional]:
    """D_x^a D_y^b f(site), 0 <= a + b <= order, in graded order."""
    return [partial(site, k - m, m, f"{label}:D{k - m}{m}") for k in range(order + 1) for m in range(k + 1)]


def normal_at(site, normal, label: str) -> NodalFunctional:
    return NodalFunctional(site, (tuple(normal),), label)


@dataclass(frozen=True)
class HermiteData:
    """Value, gradient and Hessian of a function (callables of x, y)."""

    value: Callable
    grad: Callable
    hess: Callable

    def derivatives(self, z) -> tuple[float, np.ndarray, np.ndarray]:
        return float(self.value(z[0], z[1])), np.asarray(self.grad(z[0], z[1]), dtype=float), np.asarray(
            self.hess(z[0], z[1]), dtype=float
        )


def apply(eta: NodalFunctional, f) -> float:
    """Nodal value of a :class:`Poly2` or :class:`HermiteData`."""
    if isinstance(f, Poly2):
        return dir_deriv(f, eta.dirs, eta.site)
    if isinstance(f, HermiteData):
        z = eta.site
        if eta.degree == 0:
            return float(f.value(*z))
        if eta.degree == 1:
            return float(np.asarray(f.grad(*z)) @ eta.dirs[0])
        return float(np.asarray(eta.dirs[0]) @ np.asarray(f.hess(*z)) @ np.asarray(eta.dirs[1]))
    raise TypeError(f"cannot apply a nodal functional to {type(f).__name__}")


def apply_jet(eta: NodalFunctional, value: float, grad, hess=None) -> float:
    """Nodal value from an explicit 2-jet at the functional's site."""
    if eta.degree == 0:
        return float(value)
    if eta.degree == 1:
        return float(np.asarray(grad) @ eta.dirs[0])
    if hess is None:
        raise ValueError("second-order data not available for this functional")
    return float(np.asarray(eta.dirs[0]) @ np.asarray(hess) @ np.asarray(eta.dirs[1]))


# ---------------------------------------------------------------------------
# nodal sets


def nodal_set_ordinary(mesh: Mesh, t: int) -> list[NodalFunctional]:
    tri = mesh.triangles[t]
    out = []
    for k, v in enumerate(tri.vertices):
        out += vertex_partials(mesh.vertices[v], 2, f"v{k + 1}")
    for k, (a, b) in enumerate(tri.local_edges()):
        z = edge_points(mesh.vertices[a], mesh.vertices[b])[1]
        out.append(normal_at(z, mesh.edge_normal(a, b), f"e{k + 1}:N@z2"))
    return out


def nodal_set_pie(mesh: Mesh, t: int, disk: InscribedDisk) -> list[NodalFunctional]:
    v1, v2, v3 = mesh.coords(t)
    return (
        vertex_partials(v1, 2, "v1")
        + vertex_partials(v2, 1, "v2")
        + vertex_partials(v3, 1, "v3")
        + vertex_partials(disk.center, 1, "c")
    )


@dataclass(frozen=True)
class BufferNodalSet:
    barycenter: list[NodalFunctional]
    n1: list[NodalFunctional]
    n2: list[NodalFunctional]
    n3: list[NodalFunctional]
    edges: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]

    @property
    def all(self) -> list[NodalFunctional]:
        return self.barycenter + self.n1 + self.n2 + self.n3

    @property
    def groups(self) -> list[list[NodalFunctional]]:
        return [self.n1, self.n2, self.n3]


def _edge_group(mesh: Mesh, a: int, b: int, name: str) -> list[NodalFunctional]:
    z = edge_points(mesh.vertices[a], mesh.vertices[b])
    nrm = mesh.edge_normal(a, b)
    return [
        NodalFunctional(z[1], (), f"{name}:f@z2"),
        normal_at(z[0], nrm, f"{name}:N@z1"),
        normal_at(z[2], nrm, f"{name}:N@z3"),
    ]


def nodal_set_buffer(mesh: Mesh, t: int) -> BufferNodalSet:
    """v1 is the boundary vertex; e1 = <v2, v3>, e2 = <v1, v2>, e3 = <v1, v3>."""
    i1, i2, i3 = mesh.triangles[t].vertices
    P = mesh.vertices
    c = (P[i1] + P[i2] + P[i3]) / 3.0
    n1 = _edge_group(mesh, i2, i3, "e1") + vertex_partials(P[i2], 2, "v2") + vertex_partials(P[i3], 2, "v3")
    n2 = _edge_group(mesh, i1, i2, "e2") + vertex_partials(P[i1], 2, "v1")
    n3 = _edge_group(mesh, i1, i3, "e3")
    return BufferNodalSet([NodalFunctional(c, (), "c:f")], n1, n2, n3, ((i2, i3), (i1, i2), (i1, i3)))


# ---------------------------------------------------------------------------
# quotient data u / q


def quotient_jet_interior(u: HermiteData, q: Conic, z) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of u/q by the quotient rule."""
    qv = q(z[0], z[1])
    if abs(qv) <= QUOTIENT_Q_EPS:
        raise ValueError(f"q vanishes at {tuple(z)}; site is not interior to the pie triangle")
    uv, ug, uh = u.derivatives(z)
    qg = grad_conic(q, z)
    qh = hessian_conic(q)
    f = uv / qv
    fg = (ug - f * qg) / qv
    fh = (uh - np.outer(fg, qg) - np.outer(qg, fg) - f * qh) / qv
    return f, fg, fh


def quotient_jet_boundary(u: HermiteData, q: Conic, z) -> tuple[float, np.ndarray]:
    """Value and gradient of u/q at a point of {q = 0} from the 2-jet of u.

    With n, tau the unit normal/tangent and p = u/q:
        p      = u_n / q_n
        p_n    = (u_nn - p q_nn) / (2 q_n)
        p_tau  = (u_ntau - p q_ntau) / q_n
    """
    _, ug, uh = u.derivatives(z)
    n, tau = normal_tangent_at(q, z)
    qn = float(grad_conic(q, z) @ n)
    qh = hessian_conic(q)
    p = float(ug @ n) / qn
    pn = (float(n @ uh @ n) - p * float(n @ qh @ n)) / (2.0 * qn)
    pt = (float(n @ uh @ tau) - p * float(n @ qh @ tau)) / qn
    return p, pn * n + pt * tau


def quotient_values(u: HermiteData, q: Conic, eta: NodalFunctional, site_kind: str) -> float:
    if site_kind == "interior":
        return apply_jet(eta, *quotient_jet_interior(u, q, eta.site))
    if site_kind == "boundary_vertex":
        if abs(u.value(*eta.site)) > 1e-10:
            raise ValueError(f"u does not vanish at boundary vertex {eta.site}")
        if eta.degree > 1:
            raise ValueError("boundary-vertex quotient data is available up to first order")
        return apply_jet(eta, *quotient_jet_boundary(u, q, eta.site))
    raise ValueError(f"unknown site kind {site_kind!r}")
