"""Grid bookkeeping, field containers, Hermitian symmetry, serialization."""
import numpy as np
import pytest

from conftest import single_mode

from ns2d import (FourierVectorField, Grid, ScalarField, hermitian_symmetrize,
                  load_field, random_divfree_field, save_field)
from ns2d.fields import hermitian_defect


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(2.0 * np.pi, 15)
    with pytest.raises(ValueError):
        Grid(2.0 * np.pi, 4)
    with pytest.raises(ValueError):
        Grid(0.0, 16)
    with pytest.raises(ValueError):
        Grid(-1.0, 16)
    with pytest.raises(ValueError):
        Grid(np.inf, 16)


def test_grid_wavenumbers(grid16):
    g = grid16
    assert g.modes[0] == 0 and g.modes[1] == 1 and g.modes[-1] == -1
    assert g.modes[g.n // 2] == -(g.n // 2)
    # side 2*pi makes the physical wavenumber equal the integer mode
    assert g.k1[1, 0] == 1.0 and g.k1[g.n - 1, 0] == -1.0
    assert g.k2[0, 2] == 2.0
    np.testing.assert_allclose(g.ksq, g.k1**2 + g.k2**2, rtol=0, atol=0)
    np.testing.assert_allclose(g.kmag, np.sqrt(g.ksq), rtol=1e-15)
    assert g.dx == 2.0 * np.pi / 16
    assert g.cell_area == pytest.approx(g.dx**2)


def test_grid_masks(grid16):
    g = grid16
    ny = g.nyquist_mask
    assert ny[g.n // 2, :].all() and ny[:, g.n // 2].all()
    assert not ny[0, 0]
    da = g.dealias_mask
    m = np.abs(g.modes)
    keep = (m[:, None] <= g.n / 3.0) & (m[None, :] <= g.n / 3.0)
    assert (da == keep).all()


def test_grid_scaled_wavenumbers_exact():
    # halving the side exactly doubles every wavenumber (power-of-two scaling)
    a = Grid(2.0 * np.pi, 16)
    b = Grid(np.pi, 16)
    assert (b.k1 == 2.0 * a.k1).all()
    assert (b.ksq == 4.0 * a.ksq).all()


def test_hermitian_symmetrize_projects():
    rng = np.random.default_rng(0)
    c = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    assert hermitian_defect(c) > 0.1
    s = hermitian_symmetrize(c)
    assert hermitian_defect(s) < 1e-14
    # idempotent
    np.testing.assert_allclose(hermitian_symmetrize(s), s, atol=1e-15)


def test_from_physical_roundtrip(grid16):
    rng = np.random.default_rng(1)
    samples = rng.standard_normal((2, 16, 16))
    f = FourierVectorField.from_physical(grid16, samples)
    # Nyquist content is dropped by construction; compare after one roundtrip
    from ns2d import to_physical
    once = to_physical(f)
    again = to_physical(FourierVectorField.from_physical(grid16, once))
    np.testing.assert_allclose(again, once, atol=1e-13)


def test_single_mode_layout(grid16):
    u = single_mode(grid16, amplitude=0.5, mode=(1, 0))
    assert u.divergence_free and u.mean_zero
    c = u.coeffs
    # cos splits into half-amplitude conjugate pair on the polarization (0, 1)
    assert c[1, 1, 0] == pytest.approx(0.25)
    assert c[1, 15, 0] == pytest.approx(0.25)
    assert abs(c[0]).max() == 0.0


def test_nyquist_zeroed_on_construction(grid16):
    c = np.zeros((2, 16, 16), np.complex128)
    c[0, 8, 3] = 1.0  # Nyquist row entry
    f = FourierVectorField.from_coeffs(grid16, c)
    assert np.all(f.coeffs[:, grid16.nyquist_mask] == 0.0)


def test_field_arithmetic_and_flags(grid16):
    u = random_divfree_field(grid16, 3)
    v = random_divfree_field(grid16, 4)
    w = 2.0 * u + v - u
    np.testing.assert_allclose(w.coeffs, u.coeffs + v.coeffs, rtol=1e-15)
    assert w.divergence_free and w.mean_zero
    z = FourierVectorField.zero(grid16)
    assert z.divergence_free and z.mean_zero
    s = ScalarField.zero(grid16)
    assert s.mean_zero
    neg = -u
    np.testing.assert_allclose(neg.coeffs, -u.coeffs, rtol=0)


def test_grid_mismatch_rejected(grid16, grid32):
    u = random_divfree_field(grid16, 5)
    v = random_divfree_field(grid32, 5)
    with pytest.raises(ValueError):
        u + v


def test_shape_validation(grid16):
    with pytest.raises(ValueError):
        FourierVectorField.from_coeffs(grid16, np.zeros((2, 8, 8), np.complex128))
    with pytest.raises(ValueError):
        ScalarField.from_physical(grid16, np.zeros((8, 8)))


def test_save_load_bit_exact(tmp_path, grid16):
    u = random_divfree_field(grid16, 6)
    p = save_field(u, tmp_path / "u.nsf")
    back = load_field(p)
    assert back.grid == u.grid
    assert back.divergence_free == u.divergence_free
    assert back.mean_zero == u.mean_zero
    assert np.array_equal(back.coeffs, u.coeffs)  # bit-exact round-trip

    s = ScalarField.from_coeffs(grid16, u.coeffs[0])
    p2 = save_field(s, tmp_path / "s.nsf")
    back2 = load_field(p2)
    assert back2.ncomp == 1
    assert np.array_equal(back2.coeffs, s.coeffs)


def test_load_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.nsf"
    bad.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        load_field(bad)
