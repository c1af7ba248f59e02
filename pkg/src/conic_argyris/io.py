"""JSON formats for domains, meshes and splines.

Floats are written with Python's shortest round-trip repr, so dump/load
cycles are bit-exact.

Domain::

    {"conics": [{"coeffs": [a, b, c, d, e, f]}, ...],
     "arcs": [{"conic": 0, "start": [x, y], "end": [x, y], "witness": [x, y]}, ...]}

Mesh::

    {"format": "conic-argyris-mesh", "version": 1, "domain": <domain>,
     "vertices": [{"x": .., "y": .., "boundary": bool}, ...],
     "triangles": [{"vertices": [i, j, k], "class": "pie", "arc": 0}, ...]}

  Pie triangles list their interior vertex first; the curved edge joins the
  other two. Buffer triangles list their boundary vertex first.

Spline::

    {"format": "conic-argyris-spline", "version": 1, "n_triangles": N,
     "pieces": [{"triangle": t, "degree": d, "origin": [x, y], "scale": s,
                 "coeffs": [...]}, ...],
     "disks": [{"triangle": t, "center": [x, y], "radius": r}, ...]}

  Coefficients are in graded lexicographic order of the monomials in
  ((x - origin_x) / scale, (y - origin_y) / scale).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .conic import Arc, Conic, Domain
from .interpolator import Spline
from .mesh import InscribedDisk, Mesh, Triangle
from .poly2 import Poly2

MESH_FORMAT = "conic-argyris-mesh"
SPLINE_FORMAT = "conic-argyris-spline"


class FormatError(ValueError):
    pass


def _pt(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def domain_to_dict(domain: Domain) -> dict:
    conics = domain.conics
    return {
        "conics": [{"coeffs": list(q.coeffs)} for q in conics],
        "arcs": [
            {"conic": conics.index(a.conic), "start": _pt(a.start), "end": _pt(a.end), "witness": _pt(a.witness)}
            for a in domain.arcs
        ],
    }


def domain_from_dict(d: dict) -> Domain:
    try:
        conics = [Conic(tuple(c["coeffs"])) for c in d["conics"]]
        arcs = []
        for a in d["arcs"]:
            witness = a.get("witness", d.get("witness"))
            if witness is None:
                raise FormatError("each arc needs an interior witness point")
            arcs.append(Arc(conics[a["conic"]], tuple(a["start"]), tuple(a["end"]), tuple(witness)))
    except (KeyError, IndexError, TypeError) as exc:
        raise FormatError(f"malformed domain description: {exc!r}") from exc
    return Domain(tuple(arcs))


def mesh_to_dict(mesh: Mesh) -> dict:
    tris = []
    for tri in mesh.triangles:
        if tri.curved is not None and tri.curved[1] != 0:
            raise ValueError("serialize classified meshes only")
        tris.append({"vertices": [int(v) for v in tri.vertices], "class": tri.cls, "arc": tri.arc})
    return {
        "format": MESH_FORMAT,
        "version": 1,
        "domain": domain_to_dict(mesh.domain),
        "vertices": [{"x": float(p[0]), "y": float(p[1]), "boundary": bool(b)} for p, b in zip(mesh.vertices, mesh.boundary)],
        "triangles": tris,
    }


def mesh_from_dict(d: dict) -> Mesh:
    if d.get("format") != MESH_FORMAT:
        raise FormatError(f"not a mesh file (format={d.get('format')!r})")
    try:
        V = np.array([[v["x"], v["y"]] for v in d["vertices"]], dtype=float)
        B = np.array([bool(v["boundary"]) for v in d["vertices"]])
        tris = tuple(
            Triangle(tuple(int(i) for i in t["vertices"]), t["class"], None if t.get("arc") is None else (int(t["arc"]), 0))
            for t in d["triangles"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed mesh file: {exc!r}") from exc
    return Mesh(V.reshape(-1, 2), B, tris, domain_from_dict(d["domain"]))


def spline_to_dict(s: Spline) -> dict:
    return {
        "format": SPLINE_FORMAT,
        "version": 1,
        "n_triangles": len(s.pieces),
        "pieces": [
            {"triangle": t, "degree": p.degree, "origin": list(p.origin), "scale": p.scale, "coeffs": p.coeffs.tolist()}
            for t, p in enumerate(s.pieces)
        ],
        "disks": [{"triangle": t, "center": _pt(d.center), "radius": d.radius} for t, d in sorted(s.disks.items())],
    }


def spline_from_dict(d: dict, mesh: Mesh) -> Spline:
    if d.get("format") != SPLINE_FORMAT:
        raise FormatError(f"not a spline file (format={d.get('format')!r})")
    if d["n_triangles"] != len(mesh.triangles) or len(d["pieces"]) != len(mesh.triangles):
        raise FormatError(f"spline has {d['n_triangles']} pieces but the mesh has {len(mesh.triangles)} triangles")
    pieces = [None] * len(mesh.triangles)
    for p in d["pieces"]:
        pieces[p["triangle"]] = Poly2(p["coeffs"], p["degree"], tuple(p["origin"]), p["scale"])
    disks = {x["triangle"]: InscribedDisk(tuple(x["center"]), x["radius"]) for x in d.get("disks", [])}
    return Spline(mesh, pieces, disks)


def read_json(path) -> dict:
    """Load JSON; syntax errors are re-raised as FormatError with file:line:column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_domain(path) -> Domain:
    return domain_from_dict(read_json(path))


def load_mesh(path) -> Mesh:
    return mesh_from_dict(read_json(path))


def save_mesh(path, mesh: Mesh) -> None:
    write_json(path, mesh_to_dict(mesh))


def load_spline(path, mesh: Mesh) -> Spline:
    return spline_from_dict(read_json(path), mesh)


def save_spline(path, s: Spline) -> None:
    write_json(path, spline_to_dict(s))
