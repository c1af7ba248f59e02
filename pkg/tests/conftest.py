from functools import lru_cache

import numpy as np
import pytest

from conic_argyris.interpolator import interpolate
from conic_argyris.mesh import generate_disk_mesh
from conic_argyris.nodal import HermiteData
from conic_argyris.poly2 import Poly2
from conic_argyris.testfunctions import UNIT_CIRCLE, get


@lru_cache(maxsize=None)
def circle_mesh(n: int):
    return generate_disk_mesh(UNIT_CIRCLE, n)


@lru_cache(maxsize=None)
def circle_spline(n: int, fn: str = "circle_sin"):
    return interpolate(circle_mesh(n), get(fn).data)


def poly_data(p: Poly2) -> HermiteData:
    """HermiteData of a polynomial, derivatives taken exactly."""
    dx, dy = p.diff((1, 0)), p.diff((0, 1))
    dxx, dxy, dyy = p.diff((2, 0)), p.diff((1, 1)), p.diff((0, 2))

    def grad(x, y):
        return np.array([dx(x, y), dy(x, y)])

    def hess(x, y):
        return np.array([[dxx(x, y), dxy(x, y)], [dxy(x, y), dyy(x, y)]])

    return HermiteData(p, grad, hess)


def random_poly(rng, degree, origin=(0.0, 0.0), scale=1.0) -> Poly2:
    from conic_argyris.poly2 import dim_P

    return Poly2(rng.uniform(-1, 1, dim_P(degree)), degree, origin, scale)


@pytest.fixture(scope="session")
def mesh16():
    return circle_mesh(16)


@pytest.fixture(scope="session")
def mesh32():
    return circle_mesh(32)


@pytest.fixture(scope="session")
def spline32():
    return circle_spline(32)


def reproduction_error(mesh, t, rng) -> float:
    """Max coefficient error when interpolating a random member of the local space on triangle t."""
    from conic_argyris.interpolator import interp_buffer, interp_ordinary, interp_pie, local_frame
    from conic_argyris.mesh import BUFFER, ORDINARY
    from conic_argyris.poly2 import multiply

    origin, scale = local_frame(mesh, t)
    cls = mesh.triangles[t].cls
    if cls == ORDINARY:
        g = random_poly(rng, 5, origin, scale)
        got = interp_ordinary(mesh, t, poly_data(g))
    elif cls == BUFFER:
        g = random_poly(rng, 6, origin, scale)
        got = interp_buffer(mesh, t, poly_data(g), [g, g, g])
    else:
        p = random_poly(rng, 4, origin, scale)
        g = multiply(p, Poly2.from_conic(mesh.conic_of(t)))
        got = interp_pie(mesh, t, poly_data(g))
    got = got.to_frame(g.origin, g.scale)
    return float(np.max(np.abs(got.coeffs - g.coeffs)))


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
