import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sgdavg import domains as dom
from sgdavg.exceptions import UsageError

DOMAINS_3D = [
    dom.Unbounded(),
    dom.L2Ball.centered(3, 1.0),
    dom.L2Ball(np.array([2.0, -1.0, 0.5]), 0.3),
    dom.Box(np.zeros(3), np.ones(3)),
    dom.Box(np.array([-2.0, 0.0, -1.0]), np.array([-1.0, 5.0, 1.0])),
]

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
points3 = arrays(np.float64, 3, elements=finite)


def test_project_examples():
    np.testing.assert_array_equal(dom.project(dom.Unbounded(), [3.0, -4.0]), [3.0, -4.0])
    np.testing.assert_allclose(dom.project(dom.L2Ball.centered(2, 1.0), [3.0, 4.0]), [0.6, 0.8])
    box = dom.Box([0.0, 0.0], [1.0, 1.0])
    np.testing.assert_array_equal(dom.project(box, [-0.5, 2.0]), [0.0, 1.0])


def test_ball_projection_at_center_is_identity():
    ball = dom.L2Ball(np.array([1.0, 2.0]), 0.5)
    np.testing.assert_array_equal(dom.project(ball, [1.0, 2.0]), [1.0, 2.0])


def test_diameter_examples():
    assert dom.diameter(dom.L2Ball.centered(4, 2.5)) == 5.0
    assert dom.diameter(dom.Unbounded()) == math.inf


def test_box_diameter_matches_corner_enumeration():
    box = dom.Box(np.zeros(3), np.ones(3))
    corners = [np.array(c, dtype=float) for c in itertools.product((0, 1), repeat=3)]
    brute = max(np.linalg.norm(a - b) for a in corners for b in corners)
    assert dom.diameter(box) == pytest.approx(brute, rel=1e-15)
    assert dom.diameter(box) == pytest.approx(1.7320508075688772)


def test_dimension_mismatch_is_usage_error():
    with pytest.raises(UsageError):
        dom.project(dom.L2Ball.centered(3, 1.0), [1.0, 2.0])
    with pytest.raises(UsageError):
        dom.project(dom.Box([0.0], [1.0]), [1.0, 2.0])


def test_invalid_domains_rejected():
    with pytest.raises(UsageError):
        dom.L2Ball.centered(2, 0.0)
    with pytest.raises(UsageError):
        dom.Box([1.0, 0.0], [0.0, 1.0])


def test_batched_projection_matches_rowwise():
    rng = np.random.default_rng(0)
    P = rng.normal(scale=3, size=(50, 3))
    for d in DOMAINS_3D:
        batched = dom.project(d, P)
        rowwise = np.stack([dom.project(d, p) for p in P])
        np.testing.assert_array_equal(batched, rowwise)


@pytest.mark.parametrize("domain", DOMAINS_3D, ids=lambda d: type(d).__name__)
@settings(max_examples=200, deadline=None)
@given(p=points3)
def test_projection_idempotent_bitwise(domain, p):
    q = dom.project(domain, p)
    np.testing.assert_array_equal(dom.project(domain, q), q)


@pytest.mark.parametrize("domain", DOMAINS_3D, ids=lambda d: type(d).__name__)
@settings(max_examples=200, deadline=None)
@given(a=points3, b=points3)
def test_projection_nonexpansive(domain, a, b):
    pa, pb = dom.project(domain, a), dom.project(domain, b)
    assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-12


@pytest.mark.parametrize("domain", DOMAINS_3D, ids=lambda d: type(d).__name__)
@settings(max_examples=200, deadline=None)
@given(p=points3)
def test_projection_lands_in_domain(domain, p):
    assert dom.contains(domain, dom.project(domain, p), tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(p=points3)
def test_ball_projection_is_nearest_point(p):
    # compare with a dense sample of the ball boundary / interior
    ball = dom.L2Ball.centered(3, 1.0)
    q = dom.project(ball, p)
    sample = dom.sample(ball, np.random.default_rng(1), 2000)
    assert np.linalg.norm(p - q) <= np.min(np.linalg.norm(sample - p, axis=1)) + 1e-12


def test_max_distance_from():
    ball = dom.L2Ball.centered(2, 1.0)
    assert dom.max_distance_from(ball, [0.5, 0.0]) == pytest.approx(1.5)
    box = dom.Box([0.0, 0.0], [1.0, 1.0])
    assert dom.max_distance_from(box, [0.0, 0.0]) == pytest.approx(math.sqrt(2))
