"""Trajectory stacks: graded nodes, heat flow, checkpoints, arithmetic."""
import numpy as np
import pytest

from ns2d import (Trajectory, graded_times, heat_flow, heat_propagate,
                  load_trajectory, random_divfree_field, save_trajectory)


def test_graded_times_shape_and_grading():
    t = graded_times(1.0, 10, gamma=2.0)
    assert t.shape == (11,)
    assert t[0] == 0.0 and t[-1] == 1.0
    assert np.all(np.diff(t) > 0.0)
    # gamma = 2 crowds nodes toward the start: first gap < last gap
    assert t[1] - t[0] < t[-1] - t[-2]
    np.testing.assert_allclose(t, (np.arange(11) / 10.0) ** 2, rtol=1e-15)


def test_graded_times_offset_start():
    t = graded_times(2.0, 5, gamma=1.0, t0=0.5)
    np.testing.assert_allclose(t, np.linspace(0.5, 2.0, 6), rtol=1e-15)


def test_graded_times_validation():
    with pytest.raises(ValueError):
        graded_times(0.0, 10)
    with pytest.raises(ValueError):
        graded_times(1.0, 1)
    with pytest.raises(ValueError):
        graded_times(0.5, 10, t0=0.5)


def test_heat_flow_matches_propagator(grid16):
    u = random_divfree_field(grid16, 0)
    times = graded_times(1.0, 8)
    traj = heat_flow(u, times)
    assert len(traj) == 9
    assert traj.divergence_free and traj.mean_zero
    for i, t in enumerate(times):
        want = heat_propagate(u, float(t)).coeffs
        assert np.array_equal(traj.coeffs[i], want)


def test_trajectory_validation(grid16):
    c = np.zeros((3, 2, 16, 16), np.complex128)
    Trajectory(grid16, [0.0, 0.5, 1.0], c)  # valid
    with pytest.raises(ValueError):
        Trajectory(grid16, [0.0, 0.5], c[:2])  # too few nodes
    with pytest.raises(ValueError):
        Trajectory(grid16, [0.0, 0.5, 0.5], c)  # not strictly increasing
    with pytest.raises(ValueError):
        Trajectory(grid16, [-0.1, 0.5, 1.0], c)  # negative start
    with pytest.raises(ValueError):
        Trajectory(grid16, [0.0, 0.5, 1.0], np.zeros((3, 4, 16, 16), np.complex128))


def test_trajectory_arithmetic(grid16):
    times = graded_times(1.0, 4)
    a = heat_flow(random_divfree_field(grid16, 1), times)
    b = heat_flow(random_divfree_field(grid16, 2), times)
    s = 2.0 * a - b
    np.testing.assert_allclose(s.coeffs, 2.0 * a.coeffs - b.coeffs, rtol=1e-15)
    assert s.divergence_free
    other = heat_flow(random_divfree_field(grid16, 1), graded_times(2.0, 4))
    with pytest.raises(ValueError):
        a + other  # node mismatch


def test_save_load_roundtrip_bit_exact(tmp_path, grid16):
    traj = heat_flow(random_divfree_field(grid16, 3), graded_times(1.0, 6))
    p = save_trajectory(traj, tmp_path / "w.nst")
    back = load_trajectory(p)
    assert back.grid == traj.grid
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.coeffs, traj.coeffs)
    assert back.divergence_free == traj.divergence_free
    assert back.mean_zero == traj.mean_zero


def test_load_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.nst"
    bad.write_bytes(b"JUNK" + b"\x00" * 32)
    with pytest.raises(ValueError):
        load_trajectory(bad)
