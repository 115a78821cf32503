import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mogpdr.geometry.sets import Box, Polytope, minkowski_sum_box, pontryagin_diff


def test_minkowski_sum_box_intervals():
    s = minkowski_sum_box(Box([-1.0], [1.0]), Box([-2.0], [2.0]))
    assert s.lower.tolist() == [-3.0] and s.upper.tolist() == [3.0]
    s = minkowski_sum_box(Box([0.0], [1.0]), Box([3.0], [5.0]))
    assert s.lower.tolist() == [3.0] and s.upper.tolist() == [6.0]


def test_minkowski_sum_with_origin_is_identity():
    x = Box([-7.0, -3.0], [3.0, 3.0])
    s = minkowski_sum_box(x, Box.point([0.0, 0.0]))
    assert np.array_equal(s.lower, x.lower) and np.array_equal(s.upper, x.upper)


def test_minkowski_sum_dimension_mismatch():
    with pytest.raises(ValueError):
        minkowski_sum_box(Box([0.0], [1.0]), Box([0.0, 0.0], [1.0, 1.0]))


def test_crossed_bounds_rejected():
    with pytest.raises(ValueError):
        Box([1.0], [0.0])
    assert Box([1.0], [0.0], empty=True).empty


def test_pontryagin_diff_box():
    x = Box([-7.0, -3.0], [3.0, 3.0])
    z = Box.symmetric(0.5, 2)
    d = pontryagin_diff(x, z)
    assert not d.empty
    bb = d.bounding_box()
    assert np.allclose(bb.lower, [-6.5, -2.5]) and np.allclose(bb.upper, [2.5, 2.5])


def test_pontryagin_diff_empty_is_flagged():
    d = pontryagin_diff(Box([-1.0], [1.0]), Box([-2.0], [2.0]))
    assert d.empty


def test_pontryagin_diff_of_origin_is_identity():
    x = Box([-1.0, -2.0], [1.0, 2.0])
    d = pontryagin_diff(x, Box.point([0.0, 0.0]))
    assert np.allclose(d.offsets, x.to_polytope().offsets)


def test_pontryagin_diff_with_linear_map():
    u = Box([-5.0], [5.0])
    k = np.array([[-0.5, -1.0]])
    d = pontryagin_diff(u, Box.symmetric(1.0, 2), transform=k)
    # K z ranges over [-1.5, 1.5]
    assert np.allclose(d.offsets, [3.5, 3.5])


def test_polytope_support_and_contains():
    p = Box([-1.0, -2.0], [1.0, 2.0]).to_polytope()
    assert p.support(np.array([1.0, 1.0])) == pytest.approx(3.0)
    assert p.contains(np.array([0.5, -1.5]))
    assert not p.contains(np.array([1.5, 0.0]))


def test_remove_redundant_drops_implied_facet():
    p = Box([-1.0, -1.0], [1.0, 1.0]).to_polytope()
    extra = p.intersect(Polytope(np.array([[1.0, 1.0]]), np.array([5.0])))
    assert extra.n_facets == 5
    assert extra.remove_redundant().n_facets == 4


def test_chebyshev_radius_and_emptiness():
    p = Box([-1.0, -2.0], [1.0, 2.0]).to_polytope()
    assert p.chebyshev_radius() == pytest.approx(1.0)
    q = Polytope(np.array([[1.0], [-1.0]]), np.array([-1.0, 0.0]))
    assert q.is_empty()


def test_subset_check():
    small = Box([-0.5, -0.5], [0.5, 0.5]).to_polytope()
    big = Box([-1.0, -1.0], [1.0, 1.0])
    assert small.is_subset_of(big)
    assert not big.to_polytope().is_subset_of(small)


_radius = st.floats(min_value=0.0, max_value=2.0, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(r1=_radius, r2=_radius)
def test_pontryagin_diff_shrinks_monotonically(r1, r2):
    x = Box([-5.0, -5.0], [5.0, 5.0])
    small, large = sorted([r1, r2])
    d_small = pontryagin_diff(x, Box.symmetric(small, 2))
    d_large = pontryagin_diff(x, Box.symmetric(large, 2))
    assert d_large.is_subset_of(d_small)
    assert d_small.is_subset_of(x)


@settings(max_examples=40, deadline=None)
@given(
    r=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    s=st.lists(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=2, max_size=2),
    e=st.lists(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False), min_size=2, max_size=2),
)
def test_pontryagin_diff_members_absorb_every_error(r, s, e):
    x = Box([-3.0, -3.0], [3.0, 3.0])
    z = Box.symmetric(r, 2)
    d = pontryagin_diff(x, z)
    point = 2.0 * np.asarray(s)
    if d.contains(point, tol=0.0):
        assert x.contains(point + r * np.asarray(e))
