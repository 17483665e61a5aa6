"""Discrete norms: Lebesgue, Sobolev, Besov, Carleson-type and mixed-time.

Quadrature conventions, shared by every norm here:

* space integrals are rectangle sums over the lattice (exact for L2 by
  Parseval, spectrally accurate otherwise), sup norms are lattice maxima;
* Carleson-style ball averages use cached boolean disc masks applied by FFT
  convolution, radii on a dyadic grid, candidate centers on every
  ``center_stride``-th lattice point;
* time integrals are trapezoid sums on the trajectory nodes, with a linearly
  interpolated partial interval when an upper limit falls between nodes.

Every function is pure and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from .dyadic import active_shells, shell_weight
from .fields import FourierVectorField, ScalarField
from .grid import Grid
from .trajectory import Trajectory

__all__ = [
    "NormReport",
    "lebesgue_norm",
    "hdot1_norm",
    "besov_norm",
    "carleson_norm",
    "dbmo_norm",
    "bmo_grad_norm",
    "xt_norm",
    "yt_norm",
    "lpt_lqx_norm",
    "z_norm",
    "dyadic_radii",
]

R_LEVELS = 8        # dyadic radius grid has R_LEVELS + 1 entries
CENTER_STRIDE = 4   # ball centers sit on every 4th lattice point
TIME_NODES = 16     # per-radius time nodes for heat-extension integrals


@dataclass
class NormReport:
    """A named norm value plus the parameters that produced it."""

    name: str
    value: float
    params: dict[str, Any] = dc_field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "value": self.value, "params": self.params}


# -- pointwise helpers -----------------------------------------------------

def _magnitude(f: ScalarField | FourierVectorField) -> np.ndarray:
    """|f| on the lattice; Euclidean magnitude for vector fields."""
    n2 = f.grid.n ** 2
    if f.ncomp == 1:
        return np.abs(np.fft.ifft2(f.coeffs).real * n2)
    s = np.fft.ifft2(f.coeffs, axes=(-2, -1)).real * n2
    return np.sqrt(s[0] * s[0] + s[1] * s[1])


def _magnitude_sq(coeffs: np.ndarray, n: int) -> np.ndarray:
    """|f|^2 samples from a (ncomp, n, n) coefficient array."""
    s = np.fft.ifft2(coeffs, axes=(-2, -1)).real * n**2
    return np.sum(s * s, axis=0)


def _grad_frobenius(f: ScalarField | FourierVectorField) -> np.ndarray:
    """Pointwise Frobenius magnitude of the spectral gradient/Jacobian."""
    g = f.grid
    n2 = g.n ** 2
    c = f.coeffs.reshape(f.ncomp, g.n, g.n)
    acc = np.zeros((g.n, g.n))
    for j in range(f.ncomp):
        for k in (g.k1, g.k2):
            d = np.fft.ifft2(1j * k * c[j]).real * n2
            acc += d * d
    return np.sqrt(acc)


# -- plain space norms -----------------------------------------------------

def lebesgue_norm(f: ScalarField | FourierVectorField, p: float) -> float:
    """L^p lattice norm; p = inf gives the grid maximum of |f|."""
    mag = _magnitude(f)
    if np.isinf(p):
        return float(np.max(mag))
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return float(np.sum(mag**p) * f.grid.cell_area) ** (1.0 / p)


def hdot1_norm(f: ScalarField | FourierVectorField) -> float:
    """Homogeneous H^1 seminorm, equal to the L2 norm of the gradient."""
    g = f.grid
    c = f.coeffs.reshape(f.ncomp, g.n, g.n)
    return float(np.sqrt(g.side**2 * np.sum(g.ksq * (c.real**2 + c.imag**2))))


def besov_norm(f: ScalarField | FourierVectorField, s: float, p: float, q: float) -> float:
    """Homogeneous Besov norm via the normalized shell partition.

    Computes (sum_j (2^{js} ||block_j f||_p)^q)^(1/q) over the shells active
    on f's grid, with the usual sup for q = inf.
    """
    g = f.grid
    vals = []
    for j in active_shells(g):
        w = shell_weight(g, j)
        if f.ncomp == 1:
            block = ScalarField(g, f.coeffs * w, True)
        else:
            block = FourierVectorField(g, f.coeffs * w, f.divergence_free, True)
        vals.append(2.0 ** (j * s) * lebesgue_norm(block, p))
    arr = np.asarray(vals)
    if np.isinf(q):
        return float(np.max(arr)) if arr.size else 0.0
    return float(np.sum(arr**q) ** (1.0 / q))


# -- ball-average machinery ------------------------------------------------

_ball_cache: dict[tuple[float, int, float], np.ndarray] = {}


def ball_multiplier(grid: Grid, radius: float) -> np.ndarray:
    """FFT of the normalized boolean disc mask of the given torus radius.

    Convolving samples with this multiplier yields, at every lattice point x,
    the average of the samples over the discrete ball B(x, radius).
    """
    key = (grid.side, grid.n, float(radius))
    hit = _ball_cache.get(key)
    if hit is not None:
        return hit
    x = grid.points
    d = np.minimum(x, grid.side - x)
    dist_sq = d[:, None] ** 2 + d[None, :] ** 2
    mask = dist_sq <= radius * radius
    count = int(np.count_nonzero(mask))
    mult = np.fft.fft2(mask.astype(np.float64)) / count
    mult.flags.writeable = False
    _ball_cache[key] = mult
    return mult


def dyadic_radii(r_max: float, r_levels: int = R_LEVELS) -> list[float]:
    """Radius grid r_max * 2^{-m}, m = 0 .. r_levels."""
    return [r_max * 2.0**-m for m in range(r_levels + 1)]


def _sup_ball_time_integral(sample_hats: np.ndarray, times: np.ndarray, grid: Grid,
                            radii: list[float], center_stride: int) -> float:
    """sup over radii and centers of int_0^{R^2} avg_{B(x,R)} g(y,t) dy dt.

    sample_hats holds fft2 of the nonnegative integrand g at each node.
    """
    sup = 0.0
    s = center_stride
    for radius in radii:
        mult = ball_multiplier(grid, radius)
        t_hi = radius * radius
        i_hi = int(np.searchsorted(times, t_hi, side="right"))
        # averages at the candidate centers, one slab per node below t_hi
        slabs = [np.maximum(np.fft.ifft2(sample_hats[i] * mult).real[::s, ::s], 0.0)
                 for i in range(min(i_hi + 1, times.size))]
        g = np.stack(slabs)
        if i_hi >= times.size:
            integral = np.trapezoid(g, x=times, axis=0)
        else:
            integral = np.trapezoid(g[:i_hi], x=times[:i_hi], axis=0) if i_hi > 1 else 0.0
            t_lo = times[i_hi - 1]
            theta = (t_hi - t_lo) / (times[i_hi] - t_lo)
            g_end = g[i_hi - 1] + (g[i_hi] - g[i_hi - 1]) * theta
            integral = integral + (t_hi - t_lo) * 0.5 * (g[i_hi - 1] + g_end)
        sup = max(sup, float(np.max(integral)))
    return sup


def carleson_norm(traj: Trajectory, t_final: float | None = None, *,
                  r_levels: int = R_LEVELS, center_stride: int = CENTER_STRIDE) -> float:
    """Carleson norm of a trajectory started at time zero.

    sup over R = sqrt(T) 2^{-m} and centers x of
    (int_0^{R^2} avg_{B(x,R)} |u|^2)^(1/2).
    """
    if traj.times[0] != 0.0:
        raise ValueError("carleson_norm needs a trajectory starting at t = 0")
    T = float(traj.times[-1]) if t_final is None else float(t_final)
    if not 0.0 < T <= traj.times[-1] + 1e-12:
        raise ValueError(f"t_final {T} outside trajectory range")
    n = traj.grid.n
    hats = np.stack([np.fft.fft2(_magnitude_sq(traj.coeffs[i], n))
                     for i in range(len(traj))])
    sup = _sup_ball_time_integral(hats, traj.times, traj.grid,
                                  dyadic_radii(np.sqrt(T), r_levels), center_stride)
    return float(np.sqrt(sup))


def _heat_extension_sup(coeffs: np.ndarray, grid: Grid, integrand, *,
                        r_levels: int, center_stride: int, time_nodes: int) -> float:
    """Shared core of dbmo_norm / bmo_grad_norm.

    integrand(coeffs, decay) must return the nonnegative physical samples of
    the chosen square-integrand of the heat extension at one time.
    """
    sup = 0.0
    for radius in dyadic_radii(grid.side / 2.0, r_levels):
        times = radius * radius * (np.arange(time_nodes + 1) / time_nodes) ** 2
        hats = np.stack([np.fft.fft2(integrand(coeffs, np.exp(-grid.ksq * t)))
                         for t in times])
        sup = max(sup, _sup_ball_time_integral(hats, times, grid, [radius], center_stride))
    return float(np.sqrt(sup))


def dbmo_norm(f: ScalarField | FourierVectorField, *, r_levels: int = R_LEVELS,
              center_stride: int = CENTER_STRIDE, time_nodes: int = TIME_NODES) -> float:
    """Carleson measure norm of the squared heat extension of f.

    sup over R up to side/2 and centers x of
    (int_0^{R^2} avg_{B(x,R)} |e^{t Lap} f|^2)^(1/2), the parabolic-smoothing
    norm that gates the small-data solver.
    """
    g = f.grid
    c = f.coeffs.reshape(f.ncomp, g.n, g.n)

    def integrand(coeffs, decay):
        return _magnitude_sq(coeffs * decay, g.n)

    return _heat_extension_sup(c, g, integrand, r_levels=r_levels,
                               center_stride=center_stride, time_nodes=time_nodes)


def bmo_grad_norm(f: ScalarField, *, r_levels: int = R_LEVELS,
                  center_stride: int = CENTER_STRIDE, time_nodes: int = TIME_NODES) -> float:
    """Like dbmo_norm but with |grad e^{t Lap} f|^2 as the integrand."""
    g = f.grid
    c = f.coeffs.reshape(1, g.n, g.n)

    def integrand(coeffs, decay):
        grad = np.stack([1j * g.k1 * coeffs[0] * decay, 1j * g.k2 * coeffs[0] * decay])
        return _magnitude_sq(grad, g.n)

    return _heat_extension_sup(c, g, integrand, r_levels=r_levels,
                               center_stride=center_stride, time_nodes=time_nodes)


# -- mixed space-time norms ------------------------------------------------

def xt_norm(traj: Trajectory, t_final: float | None = None, *,
            r_levels: int = R_LEVELS, center_stride: int = CENTER_STRIDE) -> float:
    """Local smallness norm of the fixed-point scheme, a sum of three terms:

    sup sqrt(t) ||u||_inf  +  sup t ||grad u||_inf  +  Carleson norm,
    with discrete sups over the trajectory nodes.
    """
    t1 = 0.0
    t2 = 0.0
    for i, t in enumerate(traj.times):
        f = traj.field(i)
        t1 = max(t1, np.sqrt(t) * float(np.max(_magnitude(f))))
        t2 = max(t2, t * float(np.max(_grad_frobenius(f))))
    return t1 + t2 + carleson_norm(traj, t_final, r_levels=r_levels,
                                   center_stride=center_stride)


def yt_norm(traj: Trajectory) -> float:
    """Energy-class norm: sup ||u||_2 + sup sqrt(t) ||grad u||_2."""
    t1 = 0.0
    t2 = 0.0
    for i, t in enumerate(traj.times):
        f = traj.field(i)
        t1 = max(t1, _l2(f))
        t2 = max(t2, np.sqrt(t) * hdot1_norm(f))
    return t1 + t2


def _l2(f) -> float:
    c = f.coeffs
    return float(f.grid.side * np.sqrt(np.sum(c.real**2 + c.imag**2)))


def lpt_lqx_norm(traj: Trajectory, p: float, q: float) -> float:
    """Mixed L^p in time of L^q in space, trapezoid in time on the nodes."""
    vals = np.asarray([lebesgue_norm(traj.field(i), q) for i in range(len(traj))])
    if np.isinf(p):
        return float(np.max(vals))
    return float(np.trapezoid(vals**p, x=traj.times) ** (1.0 / p))


def z_norm(traj: Trajectory, t_final: float | None = None, *,
           r_levels: int = R_LEVELS, center_stride: int = CENTER_STRIDE) -> float:
    """Potential-force norm of a scalar trajectory, a sum of three terms:

    sup_{R,x} int_0^{R^2} avg_{B(x,R)} |V|  +  sup t ||V||_inf
    + sup t^{3/2} ||grad V||_inf.
    """
    if traj.ncomp != 1:
        raise ValueError("z_norm expects a scalar potential trajectory")
    if traj.times[0] != 0.0:
        raise ValueError("z_norm needs a trajectory starting at t = 0")
    T = float(traj.times[-1]) if t_final is None else float(t_final)
    n = traj.grid.n
    hats = np.stack([np.fft.fft2(np.abs(np.fft.ifft2(traj.coeffs[i, 0]).real * n**2))
                     for i in range(len(traj))])
    term1 = _sup_ball_time_integral(hats, traj.times, traj.grid,
                                    dyadic_radii(np.sqrt(T), r_levels), center_stride)
    term2 = 0.0
    term3 = 0.0
    for i, t in enumerate(traj.times):
        f = traj.field(i)
        term2 = max(term2, t * float(np.max(_magnitude(f))))
        term3 = max(term3, t**1.5 * float(np.max(_grad_frobenius(f))))
    return term1 + term2 + term3
