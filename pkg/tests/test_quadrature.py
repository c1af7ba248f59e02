import math
from fractions import Fraction

import numpy as np
import pytest

from conic_argyris.quadrature import (
    DEFAULT_RULE,
    PieMap,
    check_rule,
    conical_product_rule,
    quad_curved,
    quad_straight,
    triangle_area,
)
from conic_argyris.testfunctions import ELLIPSE_2_1, UNIT_CIRCLE


def exact_moment(i, j):
    """Integral of x^i y^j over the reference triangle, as an exact rational."""
    return Fraction(math.factorial(i) * math.factorial(j), math.factorial(i + j + 2))


def test_default_rule_is_symmetric_degree_12():
    assert DEFAULT_RULE.points.shape == (33, 3)
    assert np.all(DEFAULT_RULE.weights > 0)
    assert np.all(DEFAULT_RULE.points > 0)
    assert check_rule(DEFAULT_RULE) < 1e-14
    # permuting barycentric coordinates maps the rule onto itself
    key = lambda P: sorted(map(tuple, np.round(P, 14)))
    assert key(DEFAULT_RULE.points) == key(DEFAULT_RULE.points[:, [1, 2, 0]])


def test_degree_12_monomial_exact_rational():
    v = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    got = quad_straight(lambda x, y: x**6 * y**6, *v)
    assert got == pytest.approx(float(exact_moment(6, 6)), rel=1e-12)


def test_degree_13_not_exact():
    v = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    errs = [abs(quad_straight(lambda x, y, i=i: x**i * y ** (13 - i), *v) - float(exact_moment(i, 13 - i))) for i in range(14)]
    assert max(errs) > 1e-14


@pytest.mark.parametrize("n", [3, 6, 10])
def test_conical_product_rule_exactness(n):
    rule = conical_product_rule(n)
    assert check_rule(rule, 1e-13) < 1e-13


def test_affine_mapping():
    v = ((1.0, 2.0), (4.0, 2.5), (0.5, 5.0))
    area = triangle_area(*v)
    assert quad_straight(lambda x, y: np.ones_like(x), *v) == pytest.approx(area)
    cx = sum(p[0] for p in v) / 3
    assert quad_straight(lambda x, y: x, *v) == pytest.approx(area * cx)


def test_quarter_disk_area():
    got = quad_curved(lambda x, y: np.ones_like(x), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), UNIT_CIRCLE)
    assert got == pytest.approx(math.pi / 4, abs=1e-12)


def test_curved_moment_against_polar_integral():
    # integral of x^2 over the quarter disk = pi/16
    got = quad_curved(lambda x, y: x**2, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), UNIT_CIRCLE)
    assert got == pytest.approx(math.pi / 16, abs=1e-12)


def test_off_center_pie_area_by_segment_formula():
    # v1 off the center: area = |triangle| + circular segment
    a, b = 0.3, 1.4
    v2, v3 = (math.cos(a), math.sin(a)), (math.cos(b), math.sin(b))
    v1 = (0.1, 0.2)
    seg = 0.5 * ((b - a) - math.sin(b - a))
    expected = triangle_area(v1, v2, v3) + seg
    got = quad_curved(lambda x, y: np.ones_like(x), v1, v2, v3, UNIT_CIRCLE)
    assert got == pytest.approx(expected, abs=1e-12)


def test_ellipse_quadrant_area():
    got = quad_curved(lambda x, y: np.ones_like(x), (0.0, 0.0), (2.0, 0.0), (0.0, 1.0), ELLIPSE_2_1)
    assert got == pytest.approx(math.pi / 2, abs=1e-12)


def test_vector_valued_integrand_and_diagnostics():
    val, err, ok = quad_curved(lambda x, y: np.vstack([np.ones_like(x), x]), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), UNIT_CIRCLE, full_output=True)
    assert ok and err < 1e-10
    assert val == pytest.approx([math.pi / 4, 1.0 / 3.0], abs=1e-12)


def test_pie_map_nodes_lie_inside():
    pm = PieMap(UNIT_CIRCLE, (0.1, 0.0), (0.8, -0.6), (0.8, 0.6))
    pts, w = pm.nodes(8, 6, 2)
    assert np.all(w > 0)
    assert np.all(UNIT_CIRCLE(pts[:, 0], pts[:, 1]) > 0)
