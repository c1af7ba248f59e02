import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_argyris.conic import intersect_ray_conic, normal_tangent_at
from conic_argyris.mesh import BUFFER, ORDINARY, PIE, inscribed_disk
from conic_argyris.nodal import (
    NodalFunctional,
    apply,
    nodal_set_buffer,
    nodal_set_ordinary,
    nodal_set_pie,
    quotient_jet_boundary,
    quotient_jet_interior,
    quotient_values,
)
from conic_argyris.poly2 import Poly2, multiply
from conic_argyris.testfunctions import ELLIPSE_2_1, UNIT_CIRCLE

from conftest import circle_mesh, poly_data, random_poly


def test_cardinalities():
    mesh = circle_mesh(16)
    t0, tp, tb = (mesh.class_ids(c)[0] for c in (ORDINARY, PIE, BUFFER))
    assert len(nodal_set_ordinary(mesh, t0)) == 21
    assert len(nodal_set_pie(mesh, tp, inscribed_disk(mesh, tp))) == 15
    ns = nodal_set_buffer(mesh, tb)
    assert [len(ns.barycenter), len(ns.n1), len(ns.n2), len(ns.n3)] == [1, 15, 9, 3]
    assert len(ns.all) == 28


def test_buffer_edges_and_roles():
    mesh = circle_mesh(16)
    for t in mesh.class_ids(BUFFER):
        i1, i2, i3 = mesh.triangles[t].vertices
        ns = nodal_set_buffer(mesh, t)
        assert mesh.boundary[i1] and not mesh.boundary[i2] and not mesh.boundary[i3]
        assert ns.edges == ((i2, i3), (i1, i2), (i1, i3))
        # the two edges through the boundary vertex are shared with pies, the third is not
        assert mesh.triangles[mesh.neighbor(t, ns.edges[1])].cls == PIE
        assert mesh.triangles[mesh.neighbor(t, ns.edges[2])].cls == PIE
        assert mesh.triangles[mesh.neighbor(t, ns.edges[0])].cls == ORDINARY


def test_non_unit_direction_rejected():
    with pytest.raises(ValueError):
        NodalFunctional((0.0, 0.0), ((1.0, 1.0),))
    with pytest.raises(ValueError):
        NodalFunctional((0.0, 0.0), ((1.0, 0.0),) * 3)


def test_apply_agrees_on_poly_and_hermite_data():
    rng = np.random.default_rng(3)
    p = random_poly(rng, 5)
    u = poly_data(p)
    d = (0.6, -0.8)
    for eta in [NodalFunctional((0.2, 0.1)), NodalFunctional((0.2, 0.1), (d,)), NodalFunctional((0.2, 0.1), (d, (1.0, 0.0)))]:
        assert apply(eta, p) == pytest.approx(apply(eta, u), rel=1e-12, abs=1e-12)


def test_apply_is_linear():
    rng = np.random.default_rng(4)
    p, q = random_poly(rng, 4), random_poly(rng, 4)
    eta = NodalFunctional((0.3, -0.4), ((0.0, 1.0), (1.0, 0.0)))
    assert apply(eta, p * 2.0 + q) == pytest.approx(2 * apply(eta, p) + apply(eta, q))


conics = st.sampled_from([UNIT_CIRCLE, ELLIPSE_2_1])


@given(conics, st.integers(0, 10_000), st.floats(0.0, 2 * math.pi))
@settings(max_examples=50, deadline=None)
def test_boundary_quotient_recovers_factor(q, seed, theta):
    p = random_poly(np.random.default_rng(seed), 4)
    u = poly_data(multiply(p, Poly2.from_conic(q)))
    z = intersect_ray_conic(q, (0.0, 0.0), (math.cos(theta), math.sin(theta)))[0]
    val, grad = quotient_jet_boundary(u, q, z)
    assert val == pytest.approx(p(*z), abs=1e-10)
    assert grad == pytest.approx([p.derivative((1, 0), *z), p.derivative((0, 1), *z)], abs=1e-9)


@given(conics, st.integers(0, 10_000), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
@settings(max_examples=50, deadline=None)
def test_interior_quotient_recovers_factor(q, seed, x, y):
    p = random_poly(np.random.default_rng(seed), 4)
    u = poly_data(multiply(p, Poly2.from_conic(q)))
    val, grad, hess = quotient_jet_interior(u, q, (x, y))
    assert val == pytest.approx(p(x, y), abs=1e-10)
    assert grad == pytest.approx([p.derivative((1, 0), x, y), p.derivative((0, 1), x, y)], abs=1e-9)
    ref = [[p.derivative((2, 0), x, y), p.derivative((1, 1), x, y)], [p.derivative((1, 1), x, y), p.derivative((0, 2), x, y)]]
    assert np.allclose(hess, ref, atol=1e-8)


def test_curvature_terms_matter_on_boundary():
    # dropping the p * q_nn term gives the wrong normal derivative of u/q on a curved boundary
    q = UNIT_CIRCLE
    p = Poly2.from_dict({(0, 0): 1.0})
    u = poly_data(multiply(p, Poly2.from_conic(q)))
    z = np.array([1.0, 0.0])
    n, _ = normal_tangent_at(q, z)
    _, _, H = u.derivatives(z)
    g = np.array([-1.0, 0.0])  # grad q at z
    naive = float(n @ H @ n) / (2 * float(g @ n))
    _, grad = quotient_jet_boundary(u, q, z)
    assert abs(grad @ n) < 1e-14
    assert abs(naive) > 0.1


def test_quotient_values_dispatch():
    q = UNIT_CIRCLE
    u = poly_data(Poly2.from_conic(q))
    assert quotient_values(u, q, NodalFunctional((0.1, 0.2)), "interior") == pytest.approx(1.0)
    assert quotient_values(u, q, NodalFunctional((0.0, 1.0)), "boundary_vertex") == pytest.approx(1.0)
    with pytest.raises(ValueError):
        quotient_values(u, q, NodalFunctional((1.0, 0.0), ((1.0, 0.0), (1.0, 0.0))), "boundary_vertex")
    with pytest.raises(ValueError):
        quotient_values(u, q, NodalFunctional((1.0, 0.0)), "interior")
    with pytest.raises(ValueError):
        quotient_values(u, q, NodalFunctional((0.5, 0.0)), "boundary_vertex")


def test_x_times_conic_quotient_at_boundary():
    u = poly_data(multiply(Poly2.from_dict({(1, 0): 1.0}), Poly2.from_conic(UNIT_CIRCLE)))
    assert quotient_values(u, UNIT_CIRCLE, NodalFunctional((1.0, 0.0)), "boundary_vertex") == pytest.approx(1.0)
    # the tangential derivative of u/q = x at (1, 0) is zero, the normal one is -1
    g = quotient_jet_boundary(u, UNIT_CIRCLE, (1.0, 0.0))[1]
    assert g == pytest.approx([1.0, 0.0])
