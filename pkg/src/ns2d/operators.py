"""Diagonal Fourier-multiplier operators and the pseudo-spectral product."""
from __future__ import annotations

import numpy as np

from .fields import FourierVectorField, ScalarField, _check_same_grid
from .grid import Grid

__all__ = [
    "to_physical",
    "to_spectral",
    "gradient",
    "divergence",
    "leray_project",
    "heat_propagate",
    "nonlinear_term",
]


def to_physical(f: ScalarField | FourierVectorField) -> np.ndarray:
    """Real samples on the lattice; (n, n) for scalars, (2, n, n) for vectors."""
    n2 = f.grid.n ** 2
    if f.ncomp == 1:
        return np.fft.ifft2(f.coeffs).real * n2
    return np.fft.ifft2(f.coeffs, axes=(-2, -1)).real * n2


def to_spectral(grid: Grid, samples: np.ndarray) -> ScalarField | FourierVectorField:
    """Inverse of to_physical; dispatches on the sample array rank."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 2:
        return ScalarField.from_physical(grid, samples)
    if samples.ndim == 3 and samples.shape[0] == 2:
        return FourierVectorField.from_physical(grid, samples)
    raise ValueError(f"cannot infer field kind from shape {samples.shape}")


def gradient(f: ScalarField) -> FourierVectorField:
    """Spectral gradient of a scalar, multiplier i k_j."""
    g = f.grid
    c = np.stack([1j * g.k1 * f.coeffs, 1j * g.k2 * f.coeffs])
    return FourierVectorField(g, c, divergence_free=False, mean_zero=True)


def divergence(u: FourierVectorField) -> ScalarField:
    """Spectral divergence, multiplier i k_j summed over components."""
    g = u.grid
    c = 1j * (g.k1 * u.coeffs[0] + g.k2 * u.coeffs[1])
    return ScalarField(g, c, mean_zero=True)


def leray_project(u: FourierVectorField) -> FourierVectorField:
    """Project onto divergence-free fields: I - k k^T / |k|^2, zero mean mode."""
    g = u.grid
    ksq = g.ksq.copy()
    ksq[0, 0] = 1.0  # avoid 0/0; the mean mode is zeroed below anyway
    dot = (g.k1 * u.coeffs[0] + g.k2 * u.coeffs[1]) / ksq
    c = np.stack([u.coeffs[0] - g.k1 * dot, u.coeffs[1] - g.k2 * dot])
    c[:, 0, 0] = 0.0
    return FourierVectorField(g, c, divergence_free=True, mean_zero=True)


def heat_propagate(f, t: float):
    """Heat semigroup e^{t Laplacian}: damp each mode by exp(-|k|^2 t)."""
    if t < 0.0:
        raise ValueError(f"heat_propagate needs t >= 0, got {t}")
    decay = np.exp(-f.grid.ksq * t)
    if f.ncomp == 1:
        return ScalarField(f.grid, f.coeffs * decay, f.mean_zero)
    return FourierVectorField(f.grid, f.coeffs * decay, f.divergence_free, f.mean_zero)


def nonlinear_term(u: FourierVectorField, v: FourierVectorField, *,
                   dealias: bool = True) -> FourierVectorField:
    """Divergence of the tensor product, component j: sum_i ik_i (u_i v_j)^.

    The product is formed pointwise in physical space.  With dealias=True both
    inputs and the output are truncated by the 2/3 rule, which makes the
    retained modes equal to the exact (unaliased) convolution.  The result is
    NOT Leray-projected; compose with leray_project where needed.
    """
    _check_same_grid(u, v)
    g = u.grid
    cu, cv = u.coeffs, v.coeffs
    if dealias:
        mask = g.dealias_mask
        cu = cu * mask
        cv = cv * mask
    n2 = g.n ** 2
    us = np.fft.ifft2(cu, axes=(-2, -1)).real * n2
    vs = np.fft.ifft2(cv, axes=(-2, -1)).real * n2
    out = np.empty((2, g.n, g.n), np.complex128)
    for j in range(2):
        prod_hat = np.fft.fft2(us * vs[j], axes=(-2, -1)) / n2  # (u_i v_j)^, i = 0, 1
        out[j] = 1j * (g.k1 * prod_hat[0] + g.k2 * prod_hat[1])
    if dealias:
        out *= g.dealias_mask
    out[:, g.nyquist_mask] = 0.0
    return FourierVectorField(g, out, divergence_free=False, mean_zero=True)
