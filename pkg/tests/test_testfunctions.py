import numpy as np
import pytest

from conic_argyris.conic import intersect_ray_conic
from conic_argyris.testfunctions import REGISTRY, UNIT_CIRCLE, finite_difference_check, get, self_check


def test_self_check_passes():
    res = self_check()
    assert set(res) == set(REGISTRY)
    assert max(res.values()) < 1e-6


def test_boundary_vanishing_certificate():
    th = np.linspace(0, 2 * np.pi, 50)
    for tf in REGISTRY.values():
        if tf.conic is None:
            continue
        pts = [intersect_ray_conic(tf.conic, (0.0, 0.0), (np.cos(t), np.sin(t)))[0] for t in th]
        assert max(abs(tf.data.value(*z)) for z in pts) < 1e-14


def test_circle_sin_values():
    u = get("circle_sin").data
    assert u.value(0.0, 0.0) == 0.0
    assert u.value(0.5, 0.0) == pytest.approx(0.375 * np.sin(0.5))


def test_finite_difference_check_catches_wrong_gradient():
    from conic_argyris.nodal import HermiteData

    good = get("circle_exp").data
    bad = HermiteData(good.value, lambda x, y: 1.01 * np.asarray(good.grad(x, y)), good.hess)
    pts = np.array([[0.1, 0.2], [0.3, -0.4]])
    assert finite_difference_check(bad, pts) > 1e-4


def test_unknown_function():
    with pytest.raises(KeyError, match="known"):
        get("nope")
    assert UNIT_CIRCLE(0.0, 0.0) == 0.5
