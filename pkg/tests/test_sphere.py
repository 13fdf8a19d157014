import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchlab.sphere import (exp_map, fibonacci_sphere, great_circle_distance, inverse_sinc, log_map,
                             random_points, sinc, tangent_frame)

seeds = st.integers(0, 2 ** 31 - 1)


def test_distance_matches_arccos_in_the_bulk():
    rng = np.random.default_rng(0)
    a, b = random_points(rng, 200), random_points(rng, 200)
    ref = np.arccos(np.clip(np.sum(a * b, axis=1), -1, 1))
    assert np.allclose(great_circle_distance(a, b), ref, atol=1e-12)


def test_distance_keeps_relative_accuracy_for_tiny_and_near_antipodal_arcs():
    p = np.array([1.0, 0, 0, 0])
    for t in (1e-9, 1e-13):
        q = np.array([np.cos(t), np.sin(t), 0, 0])
        assert abs(great_circle_distance(p, q) - t) <= 1e-12 * t
        assert abs(great_circle_distance(p, -q) - (np.pi - t)) <= 1e-15


def test_sinc_series_branch_is_continuous():
    r = np.array([0.0, 5e-7, 1e-6, 2e-6, 0.1])
    assert sinc(r)[0] == 1.0 and inverse_sinc(r)[0] == 1.0
    assert np.allclose(sinc(r[1:]), np.sin(r[1:]) / r[1:], rtol=1e-15)
    assert np.allclose(inverse_sinc(r[1:]), r[1:] / np.sin(r[1:]), rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_exp_inverts_log(seed):
    rng = np.random.default_rng(seed)
    p, x = random_points(rng, 2)
    v, r = log_map(p, x)
    assert abs(np.linalg.norm(v) - r) < 1e-12
    assert abs(v @ p) < 1e-12
    assert np.allclose(exp_map(p, v), x, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_tangent_frame_is_orthonormal_and_odd(seed):
    p = random_points(np.random.default_rng(seed), 1)[0]
    f = tangent_frame(p)
    assert np.allclose(f.T @ f, np.eye(3), atol=1e-14)
    assert np.allclose(p @ f, 0, atol=1e-14)
    assert np.array_equal(tangent_frame(-p), -f)


def test_fibonacci_points_are_unit_and_spread():
    u = fibonacci_sphere(1000)
    assert np.allclose(np.linalg.norm(u, axis=1), 1)
    assert np.linalg.norm(u.mean(axis=0)) < 1e-2
