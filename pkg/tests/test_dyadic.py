"""Littlewood-Paley shells: bump support, partition of unity, exact rescale."""
import numpy as np
import pytest

from conftest import single_mode

from ns2d import (active_shells, besov_norm, dyadic_block, dyadic_rescale,
                  lebesgue_norm, random_divfree_field, shell_weight)
from ns2d.dyadic import bump, partition_sum
from ns2d.fields import FourierVectorField


def test_bump_support():
    r = np.array([0.0, 0.75, 0.7500001, 1.0, 2.0, 8.0 / 3.0 - 1e-7, 8.0 / 3.0, 3.0])
    b = bump(r)
    assert b[0] == 0.0 and b[1] == 0.0 and b[6] == 0.0 and b[7] == 0.0
    assert b[3] > 0.0 and b[4] > 0.0
    # vanishes smoothly: values near the edges are tiny but nonnegative
    assert 0.0 <= b[2] < 1e-6 and 0.0 <= b[5] < 1e-6


def test_partition_of_unity(grid32):
    s = partition_sum(grid32)
    assert s[0, 0] == 0.0  # mean mode belongs to no shell
    off_mean = s[grid32.kmag > 0]
    assert np.max(np.abs(off_mean - 1.0)) < 1e-12


def test_blocks_sum_to_field_minus_mean(grid32):
    u = random_divfree_field(grid32, 0)
    c = u.coeffs.copy()
    c[:, 0, 0] = 0.3  # inject a mean so the subtraction is visible
    u = FourierVectorField(grid32, c)
    total = np.zeros_like(c)
    for j in active_shells(grid32):
        total = total + dyadic_block(u, j).coeffs
    want = c.copy()
    want[:, 0, 0] = 0.0
    assert np.max(np.abs(total - want)) < 1e-12 * np.max(np.abs(c))


def test_block_outside_annulus_is_zero(grid32):
    u = single_mode(grid32, mode=(1, 0))
    # shell 3 covers 2^3 * (3/4, 8/3) = (6, 21.3); |k| = 1 is excluded
    assert np.all(dyadic_block(u, 3).coeffs == 0.0)
    assert np.all(dyadic_block(u, -9).coeffs == 0.0)  # far below the grid range


def test_mode_one_touches_at_most_two_shells(grid32):
    k = 1.0
    hits = [j for j in active_shells(grid32)
            if shell_weight(grid32, j)[1, 0] > 0.0]
    assert 1 <= len(hits) <= 2
    total = sum(shell_weight(grid32, j)[1, 0] for j in hits)
    assert abs(total - 1.0) < 1e-12
    for j in hits:  # the active shells are exactly those whose annulus holds k=1
        assert 2.0**j * 3.0 / 4.0 < k < 2.0**j * 8.0 / 3.0


def test_active_shells_cover_grid(grid32):
    shells = active_shells(grid32)
    assert shells == sorted(shells)
    kmax = float(np.max(grid32.kmag))
    # every nonzero mode magnitude must fall inside some active annulus
    assert 2.0 ** shells[0] * 3.0 / 4.0 < 1.0
    assert 2.0 ** shells[-1] * 8.0 / 3.0 > kmax


def test_rescale_bookkeeping(grid32):
    u = single_mode(grid32, amplitude=0.6, mode=(1, 0))
    up = dyadic_rescale(u, "up")
    assert up.grid.side == grid32.side / 2.0
    assert np.array_equal(up.coeffs, 2.0 * u.coeffs)
    # same integer mode slot now carries the doubled physical wavenumber
    assert up.grid.k1[1, 0] == 2.0 * grid32.k1[1, 0]


def test_rescale_roundtrip_exact(grid32):
    u = random_divfree_field(grid32, 1)
    back = dyadic_rescale(dyadic_rescale(u, "up"), "down")
    assert back.grid == u.grid
    assert np.array_equal(back.coeffs, u.coeffs)


def test_rescale_l2_invariant(grid32):
    # L2 is critical in 2D: ||2 u(2.)||_2 = ||u||_2
    u = random_divfree_field(grid32, 2)
    a = lebesgue_norm(u, 2.0)
    b = lebesgue_norm(dyadic_rescale(u, "up"), 2.0)
    assert abs(a - b) < 1e-14 * a


def test_rescale_critical_besov_invariant(grid32):
    u = random_divfree_field(grid32, 3)
    a = besov_norm(u, -1.0, np.inf, np.inf)
    b = besov_norm(dyadic_rescale(u, "up"), -1.0, np.inf, np.inf)
    assert abs(a - b) < 1e-12 * a


def test_rescale_zero(grid32):
    z = FourierVectorField.zero(grid32)
    assert np.all(dyadic_rescale(z, "up").coeffs == 0.0)


def test_rescale_direction_validated(grid32):
    with pytest.raises(ValueError):
        dyadic_rescale(random_divfree_field(grid32, 4), "sideways")
