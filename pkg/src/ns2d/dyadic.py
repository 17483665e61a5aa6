"""Littlewood-Paley shells and the exact dyadic rescaling of fields."""
from __future__ import annotations

import math

import numpy as np

from .fields import FourierVectorField, ScalarField
from .grid import Grid

__all__ = [
    "bump",
    "active_shells",
    "shell_weight",
    "partition_sum",
    "dyadic_block",
    "dyadic_rescale",
]

_SUPP_LO = 3.0 / 4.0
_SUPP_HI = 8.0 / 3.0


def bump(r: np.ndarray | float) -> np.ndarray:
    """Smooth radial bump supported exactly on (3/4, 8/3)."""
    r = np.asarray(r, dtype=np.float64)
    inside = (r > _SUPP_LO) & (r < _SUPP_HI)
    out = np.zeros_like(r)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        g = (r - _SUPP_LO) * (_SUPP_HI - r)
        vals = np.exp(-1.0 / np.where(inside, g, 1.0))
    out[inside] = vals[inside]
    return out


_weight_cache: dict[tuple[float, int], dict[int, np.ndarray]] = {}


def _weights(grid: Grid) -> dict[int, np.ndarray]:
    """Normalized shell multipliers per shell index j, cached per grid.

    Division by the pointwise sum over shells turns the raw bumps into an
    exact partition of unity on every nonzero grid mode.
    """
    key = (grid.side, grid.n)
    if key in _weight_cache:
        return _weight_cache[key]
    kmag = grid.kmag
    kmin = float(np.min(kmag[kmag > 0]))
    kmax = float(np.max(kmag))
    j_lo = math.floor(math.log2(kmin * 3.0 / 8.0))
    j_hi = math.ceil(math.log2(kmax * 4.0 / 3.0))
    raw: dict[int, np.ndarray] = {}
    total = np.zeros_like(kmag)
    for j in range(j_lo, j_hi + 1):
        w = bump(math.ldexp(1.0, -j) * kmag)
        if np.any(w > 0.0):
            raw[j] = w
            total = total + w
    total[kmag == 0.0] = 1.0  # mean mode belongs to no shell
    weights = {}
    for j, w in sorted(raw.items()):
        wn = w / total
        wn.flags.writeable = False
        weights[j] = wn
    _weight_cache[key] = weights
    return weights


def active_shells(grid: Grid) -> list[int]:
    """Shell indices with nonzero multiplier somewhere on the grid, ascending."""
    return sorted(_weights(grid))


def shell_weight(grid: Grid, j: int) -> np.ndarray:
    """Multiplier array of shell j; zeros when j is inactive on this grid."""
    return _weights(grid).get(j, np.zeros((grid.n, grid.n)))


def partition_sum(grid: Grid) -> np.ndarray:
    """Pointwise sum of all shell multipliers (1 away from the mean mode)."""
    out = np.zeros((grid.n, grid.n))
    for w in _weights(grid).values():
        out = out + w
    return out


def dyadic_block(f: ScalarField | FourierVectorField, j: int):
    """Frequency-localize f to shell j."""
    w = shell_weight(f.grid, j)
    if f.ncomp == 1:
        return ScalarField(f.grid, f.coeffs * w, mean_zero=True)
    return FourierVectorField(f.grid, f.coeffs * w, f.divergence_free, True)


def dyadic_rescale(f: ScalarField | FourierVectorField, direction: str = "up"):
    """Exact scaling symmetry f(x) -> 2 f(2x) ("up") or its inverse ("down").

    "up" halves the torus side and doubles every amplitude; integer mode
    indices are unchanged, so each physical wavenumber doubles and the sample
    set maps onto itself.  Every discrete norm therefore transforms by its
    exact scaling factor, with no re-quadrature error.
    """
    if direction == "up":
        grid = Grid(f.grid.side / 2.0, f.grid.n)
        c = f.coeffs * 2.0
    elif direction == "down":
        grid = Grid(f.grid.side * 2.0, f.grid.n)
        c = f.coeffs * 0.5
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    if f.ncomp == 1:
        return ScalarField(grid, c, f.mean_zero)
    return FourierVectorField(grid, c, f.divergence_free, f.mean_zero)
