"""Periodic grid bookkeeping: wavenumbers, masks, coordinates."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["Grid"]


@dataclass(frozen=True)
class Grid:
    """Square torus [0, side)^2 sampled on an n x n lattice.

    Spectral layout follows numpy's fft ordering: integer mode m along each
    axis runs 0, 1, ..., n/2 - 1, -n/2, ..., -1 and the physical wavenumber
    is 2*pi*m/side.  n must be even so the Nyquist row sits at index n//2;
    that row is kept identically zero everywhere in this package.
    """

    side: float
    n: int

    def __post_init__(self) -> None:
        if not (self.side > 0.0 and np.isfinite(self.side)):
            raise ValueError(f"side must be positive and finite, got {self.side}")
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 8, got {self.n}")

    # -- spectral arrays ---------------------------------------------------

    @property
    def modes(self) -> np.ndarray:
        """Integer mode indices in fft order, shape (n,)."""
        return _modes(self.n)

    @property
    def k1(self) -> np.ndarray:
        """Physical wavenumber along axis 0, broadcast to (n, n)."""
        return _wavenumbers(self.side, self.n)[0]

    @property
    def k2(self) -> np.ndarray:
        """Physical wavenumber along axis 1, broadcast to (n, n)."""
        return _wavenumbers(self.side, self.n)[1]

    @property
    def ksq(self) -> np.ndarray:
        return _wavenumbers(self.side, self.n)[2]

    @property
    def kmag(self) -> np.ndarray:
        return _wavenumbers(self.side, self.n)[3]

    @property
    def nyquist_mask(self) -> np.ndarray:
        """Boolean (n, n), True on the Nyquist row/column."""
        return _nyquist_mask(self.n)

    @property
    def dealias_mask(self) -> np.ndarray:
        """Two-thirds rule mask: True where |m_i| <= n/3 on both axes."""
        return _dealias_mask(self.n)

    # -- physical arrays ---------------------------------------------------

    @property
    def points(self) -> np.ndarray:
        """1D coordinates of the lattice, shape (n,)."""
        return _points(self.side, self.n)

    @property
    def dx(self) -> float:
        return self.side / self.n

    @property
    def cell_area(self) -> float:
        return (self.side / self.n) ** 2

    def __repr__(self) -> str:  # keep reprs short in reports
        return f"Grid(side={self.side!r}, n={self.n})"


@lru_cache(maxsize=64)
def _modes(n: int) -> np.ndarray:
    m = np.fft.fftfreq(n, d=1.0 / n)
    m.flags.writeable = False
    return m


@lru_cache(maxsize=64)
def _wavenumbers(side: float, n: int):
    # unit * integer keeps the doubling of wavenumbers under side -> side/2
    # exact in floating point (scaling by powers of two commutes with rounding)
    unit = (2.0 * np.pi) / side
    m = _modes(n)
    kx = (unit * m)[:, None]
    ky = (unit * m)[None, :]
    k1 = np.broadcast_to(kx, (n, n)).copy()
    k2 = np.broadcast_to(ky, (n, n)).copy()
    ksq = k1 * k1 + k2 * k2
    kmag = np.sqrt(ksq)
    for a in (k1, k2, ksq, kmag):
        a.flags.writeable = False
    return k1, k2, ksq, kmag


@lru_cache(maxsize=64)
def _nyquist_mask(n: int) -> np.ndarray:
    m = _modes(n)
    hit = m == -(n // 2)
    mask = hit[:, None] | hit[None, :]
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=64)
def _dealias_mask(n: int) -> np.ndarray:
    m = np.abs(_modes(n))
    keep = m <= n / 3.0
    mask = keep[:, None] & keep[None, :]
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=64)
def _points(side: float, n: int) -> np.ndarray:
    x = np.arange(n) * (side / n)
    x.flags.writeable = False
    return x
