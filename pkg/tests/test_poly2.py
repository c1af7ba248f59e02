import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_argyris.poly2 import Poly2, dim_P, dir_deriv, monomials, multiply, restrict_to_segment
from conic_argyris.testfunctions import UNIT_CIRCLE

X, Y = sp.symbols("x y")


def to_sympy(p: Poly2):
    xi = (X - p.origin[0]) / p.scale
    eta = (Y - p.origin[1]) / p.scale
    return sum(c * xi**i * eta**j for c, (i, j) in zip(p.coeffs, monomials(p.degree)))


def polys(max_degree=6):
    @st.composite
    def build(draw):
        d = draw(st.integers(0, max_degree))
        c = draw(st.lists(st.floats(-2, 2, allow_nan=False), min_size=dim_P(d), max_size=dim_P(d)))
        o = draw(st.tuples(st.floats(-1, 1), st.floats(-1, 1)))
        s = draw(st.floats(0.05, 3.0))
        return Poly2(c, d, o, s)

    return build()


pts = st.tuples(st.floats(-1, 1), st.floats(-1, 1))


def test_dimensions():
    assert [dim_P(d) for d in range(7)] == [1, 3, 6, 10, 15, 21, 28]
    assert monomials(2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_examples():
    p = Poly2.from_dict({(2, 0): 1.0, (0, 2): 1.0})
    assert p(3.0, 4.0) == 25.0
    assert p.diff((1, 0))(3.0, 4.0) == 6.0
    assert dir_deriv(p, [(0.6, 0.8)], (3.0, 4.0)) == pytest.approx(10.0)
    assert dir_deriv(p, [(1.0, 0.0), (1.0, 0.0)], (0.0, 0.0)) == 2.0
    with pytest.raises(ValueError):
        dir_deriv(p, [(1.0, 1.0)], (0.0, 0.0))
    with pytest.raises(ValueError):
        Poly2.zero(5) * Poly2.zero(2)


def test_conic_as_polynomial():
    p = Poly2.from_conic(UNIT_CIRCLE)
    for z in [(0.2, 0.3), (1.0, 0.0), (-0.4, 0.9)]:
        assert p(*z) == pytest.approx(UNIT_CIRCLE(*z), abs=1e-16)


@given(polys(), pts, st.sampled_from([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 1)]))
@settings(max_examples=60, deadline=None)
def test_diff_matches_symbolic(p, z, alpha):
    ref = sp.diff(to_sympy(p), X, alpha[0], Y, alpha[1]).subs({X: z[0], Y: z[1]})
    assert p.derivative(alpha, *z) == pytest.approx(float(ref), rel=1e-9, abs=1e-9 * max(1.0, p.max_abs_coeff()) / p.scale ** sum(alpha))


@given(polys(), pts)
@settings(max_examples=40, deadline=None)
def test_mixed_derivatives_commute(p, z):
    a = p.diff((1, 0)).diff((0, 1))(*z)
    b = p.diff((0, 1)).diff((1, 0))(*z)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@given(polys(3), polys(3), pts)
@settings(max_examples=40, deadline=None)
def test_product_and_leibniz(p, q, z):
    pq = multiply(p, q)
    assert pq(*z) == pytest.approx(p(*z) * q(*z), rel=1e-9, abs=1e-9)
    lhs = pq.derivative((1, 0), *z)
    rhs = p.derivative((1, 0), *z) * q(*z) + p(*z) * q.derivative((1, 0), *z)
    assert lhs == pytest.approx(rhs, rel=1e-7, abs=1e-7 * (1 + abs(rhs)))


@given(polys(), st.tuples(st.floats(-1, 1), st.floats(-1, 1)), st.floats(0.1, 2.0), pts)
@settings(max_examples=40, deadline=None)
def test_frame_change_preserves_function(p, origin, scale, z):
    r = p.to_frame(origin, scale)
    assert r(*z) == pytest.approx(p(*z), rel=1e-8, abs=1e-8 * max(1.0, p.max_abs_coeff()))


@given(polys(3), polys(3), pts, pts)
@settings(max_examples=40, deadline=None)
def test_restriction_commutes_with_product(p, q, a, b):
    if a == b:
        return
    lhs = restrict_to_segment(multiply(p, q), a, b)
    rhs = restrict_to_segment(p, a, b) * restrict_to_segment(q, a, b)
    for t in (0.0, 0.3, 1.0):
        assert lhs(t) == pytest.approx(rhs(t), rel=1e-8, abs=1e-8)


def test_restriction_rejects_degenerate_segment():
    with pytest.raises(ValueError):
        restrict_to_segment(Poly2.zero(1), (0.5, 0.5), (0.5, 0.5))


def test_vectorized_evaluation():
    p = Poly2(np.arange(21.0), 5, (0.1, -0.2), 0.7)
    x = np.linspace(-1, 1, 7)
    y = np.linspace(0, 1, 7)
    assert np.allclose(p(x, y), [p(a, b) for a, b in zip(x, y)])
