"""Seeded random fields with power-law spectra, plus stock exact data."""
from __future__ import annotations

import numpy as np

from .fields import FourierVectorField, ScalarField, hermitian_symmetrize
from .grid import Grid
from .operators import leray_project

__all__ = ["random_divfree_field", "random_scalar_field", "taylor_green"]


def _power_law_coeffs(grid: Grid, rng: np.random.Generator, slope: float,
                      kmin: float, kmax: float, ncomp: int) -> np.ndarray:
    n = grid.n
    c = rng.normal(size=(ncomp, n, n)) + 1j * rng.normal(size=(ncomp, n, n))
    kmag = grid.kmag
    amp = np.zeros_like(kmag)
    band = (kmag >= kmin) & (kmag <= kmax)
    amp[band] = kmag[band] ** (-slope)
    c *= amp
    c = hermitian_symmetrize(c)
    c[..., grid.nyquist_mask] = 0.0
    c[..., 0, 0] = 0.0
    return c


def random_divfree_field(grid: Grid, seed: int, *, slope: float = 2.0,
                         kmin: float | None = None, kmax: float | None = None,
                         amplitude: float = 1.0) -> FourierVectorField:
    """Divergence-free Gaussian field with |u^(k)| ~ |k|^-slope, unit L2 norm
    before the amplitude factor.  Deterministic in (grid, seed)."""
    rng = np.random.default_rng(seed)
    if kmin is None:
        kmin = float(np.min(grid.kmag[grid.kmag > 0]))
    if kmax is None:
        kmax = float(np.max(grid.kmag[~grid.nyquist_mask])) / 1.5
    c = _power_law_coeffs(grid, rng, slope, kmin, kmax, 2)
    f = leray_project(FourierVectorField(grid, c))
    l2 = grid.side * float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
    if l2 == 0.0:
        raise ValueError("degenerate random field (empty band?)")
    return f * (amplitude / l2)


def random_scalar_field(grid: Grid, seed: int, *, slope: float = 2.0,
                        kmin: float | None = None, kmax: float | None = None,
                        amplitude: float = 1.0) -> ScalarField:
    """Mean-zero Gaussian scalar with a power-law spectrum, unit L2 norm."""
    rng = np.random.default_rng(seed)
    if kmin is None:
        kmin = float(np.min(grid.kmag[grid.kmag > 0]))
    if kmax is None:
        kmax = float(np.max(grid.kmag[~grid.nyquist_mask])) / 1.5
    c = _power_law_coeffs(grid, rng, slope, kmin, kmax, 1)[0]
    f = ScalarField(grid, c, mean_zero=True)
    l2 = grid.side * float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
    if l2 == 0.0:
        raise ValueError("degenerate random field (empty band?)")
    return f * (amplitude / l2)


def taylor_green(grid: Grid, amplitude: float = 1.0) -> FourierVectorField:
    """The steady-shape decaying vortex (sin x cos y, -cos x sin y) * a.

    Its projected nonlinearity vanishes identically, so the exact solution is
    the heat decay e^{-2t} of the data (on the 2 pi torus).
    """
    x = grid.points
    X, Y = np.meshgrid(x, x, indexing="ij")
    samples = np.stack([np.sin(X) * np.cos(Y), -np.cos(X) * np.sin(Y)]) * amplitude
    return FourierVectorField.from_physical(grid, samples)
