import numpy as np
import pytest

from conic_argyris.interpolator import (
    SingularLocalSystem,
    Spline,
    collocation_matrix,
    eval_spline,
    interpolate,
    local_frame,
    locate,
    min_singular_value,
    solve_local,
)
from conic_argyris.mesh import BUFFER, ORDINARY, PIE
from conic_argyris.nodal import NodalFunctional, nodal_set_ordinary, vertex_partials
from conic_argyris.norms import boundary_trace, interpolation_residuals, max_c1_jump, sup_estimate, vertex_mismatch
from conic_argyris.poly2 import Poly2, multiply
from conic_argyris.testfunctions import get

from conftest import circle_mesh, circle_spline, poly_data, reproduction_error


@pytest.mark.parametrize("cls", [ORDINARY, PIE, BUFFER])
def test_local_reproduction(cls):
    mesh = circle_mesh(16)
    rng = np.random.default_rng(11)
    ids = mesh.class_ids(cls)
    errs = [reproduction_error(mesh, int(rng.choice(ids)), rng) for _ in range(10)]
    assert max(errs) <= 1e-8


def test_global_reproduction_of_conic_multiples():
    # u = q and u = x q lie in every local space, so the spline reproduces them exactly
    mesh = circle_mesh(16)
    q = Poly2.from_conic(mesh.domain.arcs[0].conic)
    for g in (q, multiply(Poly2.from_dict({(1, 0): 1.0}), q)):
        s = interpolate(mesh, poly_data(g))
        for z in [(0.1, 0.2), (-0.5, 0.3), (0.0, -0.9), (0.7, 0.69)]:
            assert eval_spline(s, z) == pytest.approx(g(*z), abs=1e-12)
            assert eval_spline(s, z, (1, 1)) == pytest.approx(g.derivative((1, 1), *z), abs=1e-10)


def test_zero_function_gives_zero_spline():
    s = interpolate(circle_mesh(16), get("zero").data)
    assert all(p.max_abs_coeff() == 0.0 for p in s.pieces)


def test_non_vanishing_function_rejected():
    with pytest.raises(ValueError, match="does not vanish"):
        interpolate(circle_mesh(16), get("one").data)


def test_spline_degrees():
    s = circle_spline(16)
    for tri, p in zip(s.mesh.triangles, s.pieces):
        assert p.degree == {ORDINARY: 5, PIE: 6, BUFFER: 6}[tri.cls]
    with pytest.raises(ValueError):
        Spline(s.mesh, [Poly2.zero(5)] * len(s.pieces))


def test_pie_piece_has_conic_factor():
    s = circle_spline(16)
    mesh = s.mesh
    for t in mesh.class_ids(PIE)[:4]:
        pts = mesh.arc_points(t, 30)
        assert np.max(np.abs(s.pieces[t](pts[:, 0], pts[:, 1]))) < 1e-14


def test_interpolation_conditions_and_continuity():
    s = circle_spline(16)
    u = get("circle_sin").data
    res = interpolation_residuals(s, u)
    assert set(res) == {"vertex_order2", "ordinary_edge_normal", "pie_center_order1", "buffer_barycenter"}
    assert max(r for r, _ in res.values()) <= 1e-10
    dv, dn, _ = max_c1_jump(s)
    assert max(dv, dn) <= 1e-10
    assert vertex_mismatch(s)[0] <= 1e-10
    assert boundary_trace(s) <= 1e-9 * sup_estimate(s)


def test_threads_do_not_change_result():
    mesh = circle_mesh(16)
    u = get("circle_exp").data
    a = interpolate(mesh, u, threads=1)
    b = interpolate(mesh, u, threads=4)
    assert all(np.array_equal(p.coeffs, r.coeffs) for p, r in zip(a.pieces, b.pieces))


def test_interpolation_is_deterministic():
    mesh = circle_mesh(16)
    u = get("circle_poly").data
    a, b = interpolate(mesh, u), interpolate(mesh, u)
    assert all(np.array_equal(p.coeffs, r.coeffs) for p, r in zip(a.pieces, b.pieces))


def test_collocation_is_well_conditioned_and_local_frame():
    mesh = circle_mesh(32)
    t = mesh.class_ids(ORDINARY)[0]
    origin, scale = local_frame(mesh, t)
    eta = nodal_set_ordinary(mesh, t)
    A = collocation_matrix(eta, 5, origin, scale)
    assert A.shape == (21, 21)
    assert min_singular_value(eta, 5, origin, scale) > 1e-3


def test_singular_system_reported():
    # order-2 data at a single point cannot determine a quintic
    eta = vertex_partials((0.0, 0.0), 2, "v") * 3 + [NodalFunctional((1.0, 0.0))] * 3
    with pytest.raises(SingularLocalSystem):
        solve_local(eta, np.zeros(21), 5, (0.0, 0.0), 1.0)


def test_eval_spline_on_shared_edges_and_vertices():
    s = circle_spline(16)
    mesh = s.mesh
    u = get("circle_sin").data
    for a, b in mesh.interior_edges()[::7]:
        z = 0.5 * (mesh.vertices[a] + mesh.vertices[b])
        assert eval_spline(s, z) == pytest.approx(u.value(*z), abs=1e-4)
        t = locate(mesh, z)
        assert t == min(mesh.edges[(min(a, b), max(a, b))])
    v = mesh.vertices[0]
    assert eval_spline(s, v, (2, 0)) == pytest.approx(u.hess(*v)[0, 0], abs=1e-12)
    with pytest.raises(ValueError):
        eval_spline(s, (1.5, 0.0))
    with pytest.raises(ValueError):
        eval_spline(s, (0.0, 0.0), (3, 0))


def test_eval_spline_close_to_function():
    s = circle_spline(32)
    u = get("circle_sin").data
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 1, 50)) * 0.999
    th = rng.uniform(0, 2 * np.pi, 50)
    for x, y in zip(r * np.cos(th), r * np.sin(th)):
        assert eval_spline(s, (x, y)) == pytest.approx(u.value(x, y), abs=1e-6)
