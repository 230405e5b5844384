"""Analytic 3D Morse function: values, derivatives, critical structure,
and flow-line tracing."""

import numpy as np
import pytest

from shellspec.morse3d import (
    SectionMismatchError,
    classify_critical_points,
    saddle_sphere_section,
    shell_gradient_floor,
    smoothstep,
    trace_flow,
    v_eval,
)


@pytest.fixture(scope="module")
def critical_set():
    return classify_critical_points()


def test_step_regimes_exact():
    t = np.array([0.0, 1.0, 2.0, 3.0, 3.5, 10.0])
    s, s1, _ = smoothstep(t)
    np.testing.assert_array_equal(s[:3], [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(s[3:], [1.0, 1.0, 1.0])
    # away from the edges, where the complementary bump is representable
    interior = np.linspace(2.05, 2.95, 50)
    s, s1, _ = smoothstep(interior)
    assert np.all(np.diff(s) > 0)
    assert np.all(s1 > 0)
    assert np.all((s > 0) & (s < 1))


def test_gradient_matches_cubic_in_core():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.uniform(-0.8, 0.8, 3)  # |x|^2 <= 1.92 < 2
        _, g, _ = v_eval(x)
        expected = np.array([2 * x[0], 2 * x[1], 4 * x[2] * (x[2] ** 2 - 1)])
        np.testing.assert_allclose(g, expected, atol=1e-14)


def test_gradient_is_radial_outside():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=3)
        x *= (np.sqrt(3) + 0.5) / np.linalg.norm(x)
        _, g, _ = v_eval(x)
        np.testing.assert_array_equal(g, 2 * x)


def test_finite_difference_consistency():
    rng = np.random.default_rng(2)
    eps = 1e-6
    for _ in range(100):
        x = rng.uniform(-2, 2, 3)
        _, g, H = v_eval(x)
        for i in range(3):
            e = np.zeros(3)
            e[i] = eps
            fd_g = (v_eval(x + e)[0] - v_eval(x - e)[0]) / (2 * eps)
            assert abs(fd_g - g[i]) < 1e-6
            fd_h = (v_eval(x + e)[1] - v_eval(x - e)[1]) / (2 * eps)
            np.testing.assert_allclose(fd_h, H[:, i], atol=1e-4)


def test_mirror_symmetries():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(-2.5, 2.5, 3)
        v0 = v_eval(x)[0]
        assert v_eval([-x[0], x[1], x[2]])[0] == pytest.approx(v0, abs=1e-14)
        assert v_eval([x[0], x[1], -x[2]])[0] == pytest.approx(v0, abs=1e-14)


def test_exactly_three_critical_points(critical_set):
    assert len(critical_set) == 3
    locs = np.array([c.location for c in critical_set])
    np.testing.assert_allclose(
        locs, [[0, 0, -1], [0, 0, 0], [0, 0, 1]], atol=1e-10)
    assert [c.index for c in critical_set] == [0, 1, 0]
    np.testing.assert_allclose(critical_set[0].hessian_eigenvalues,
                               [2, 2, 8], atol=1e-8)
    np.testing.assert_allclose(sorted(critical_set[1].hessian_eigenvalues),
                               [-4, 2, 2], atol=1e-8)


def test_scaling_preserves_critical_structure(critical_set):
    scaled = classify_critical_points(scale=5.0)
    assert [c.index for c in scaled] == [c.index for c in critical_set]
    for a, b in zip(scaled, critical_set):
        np.testing.assert_allclose(a.location, b.location, atol=1e-10)


def test_transition_shell_has_no_critical_point():
    assert shell_gradient_floor() > 1.0


def test_descent_limits():
    assert np.allclose(trace_flow((0, 0, 0.5)).limit, [0, 0, 1])
    assert np.allclose(trace_flow((0, 0, -0.5)).limit, [0, 0, -1])
    # the saddle's stable manifold contains the x3 = 0 plane
    assert np.allclose(trace_flow((0.5, 0, 0)).limit, [0, 0, 0])
    # just off the equator the trajectory leaves the stable manifold
    assert np.allclose(trace_flow((4, 0, 1e-3)).limit, [0, 0, 1])
    # the pole descends along the axis to the nearer minimum
    assert np.allclose(trace_flow((0, 0, 4)).limit, [0, 0, 1])


def test_descent_monotone_decrease():
    traj = trace_flow((1.3, -0.7, 0.4))
    values = np.array([v_eval(p)[0] for p in traj.points])
    assert np.all(np.diff(values) < 0)
    assert traj.limit is not None


def test_ascent_grows_outside():
    traj = trace_flow((0.1, 0.1, 0.1), direction="ascent", t_max=3.0)
    r = np.linalg.norm(traj.points, axis=1)
    outside = r ** 2 >= 3.0
    assert np.any(outside)
    assert np.all(np.diff(r[outside]) > 0)
    assert traj.limit is None


def test_saddle_section_is_equator():
    circle = saddle_sphere_section(4.0, n_samples=16)
    np.testing.assert_array_equal(circle[:, 2], np.zeros(16))
    np.testing.assert_allclose(np.linalg.norm(circle[:, :2], axis=1),
                               4.0, atol=1e-12)


def test_points_off_the_section_miss_the_saddle():
    # nearby sphere points off the equator do not descend to the saddle,
    # so the section really is only the equator
    for start in [(0.0, 0.0, 4.0), (4.0, 0.0, 0.05), (0.0, -3.9, -0.9)]:
        traj = trace_flow(start, "descent")
        assert traj.limit is not None
        assert np.linalg.norm(traj.limit) > 0.5


def test_trace_flow_validation():
    with pytest.raises(ValueError):
        trace_flow((1, 0, 0), t_max=-1.0)
    with pytest.raises(KeyError):
        trace_flow((1, 0, 0), direction="sideways")
