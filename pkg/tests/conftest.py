"""Shared fixtures and small field builders used across the test modules."""
import numpy as np
import pytest

from ns2d import FourierVectorField, Grid, ScalarField, heat_propagate, leray_project


@pytest.fixture(autouse=True)
def _no_calibration_env(monkeypatch):
    # keep in-process runs hermetic; subprocess tests build their own env
    monkeypatch.delenv("NS_CALIBRATION", raising=False)


@pytest.fixture(scope="session")
def grid16():
    return Grid(2.0 * np.pi, 16)


@pytest.fixture(scope="session")
def grid32():
    return Grid(2.0 * np.pi, 32)


def single_mode(grid, amplitude=0.7, mode=(1, 0)):
    """Divergence-free cosine mode: amplitude * cos(k.x) * k_perp/|k|."""
    m1, m2 = mode
    mag = np.hypot(m1, m2)
    pol = np.array([-m2, m1]) / mag
    c = np.zeros((2, grid.n, grid.n), np.complex128)
    c[:, m1 % grid.n, m2 % grid.n] = amplitude * pol
    return FourierVectorField.from_coeffs(grid, c, symmetrize=True)


def single_scalar_mode(grid, amplitude=1.0, mode=(1, 0)):
    """Real cosine mode amplitude * cos(k.x) as a ScalarField."""
    m1, m2 = mode
    c = np.zeros((grid.n, grid.n), np.complex128)
    c[m1 % grid.n, m2 % grid.n] = amplitude
    return ScalarField.from_coeffs(grid, c, symmetrize=True)


def smooth_random_field(grid, amp, seed, t_smooth=0.05):
    """Divergence-free random field, heat-smoothed, rescaled to L2 norm amp."""
    r = np.random.default_rng(seed)
    c = r.standard_normal((2, grid.n, grid.n)) + 1j * r.standard_normal((2, grid.n, grid.n))
    f = FourierVectorField.from_coeffs(grid, c, symmetrize=True)
    f = leray_project(heat_propagate(f, t_smooth))
    l2 = float(grid.side * np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
    return (amp / l2) * f


@pytest.fixture
def cos_mode(grid32):
    # a = 0.7 at k = (1, 0): u = (0, 0.7 cos x), the reference single mode
    return single_mode(grid32)
