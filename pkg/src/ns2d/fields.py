"""Spectral field containers and their binary serialization."""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import Grid

__all__ = [
    "FourierVectorField",
    "ScalarField",
    "hermitian_symmetrize",
    "hermitian_defect",
    "save_field",
    "load_field",
]

_MAGIC = b"NSF1"
_DIV_TOL = 1e-12  # relative tolerance used when measuring flags


def hermitian_symmetrize(coeffs: np.ndarray) -> np.ndarray:
    """Project coefficient arrays onto the real-field (Hermitian) sector.

    Works on the trailing two axes; c[m] and conj(c[-m]) are averaged.
    """
    flipped = coeffs[..., ::-1, ::-1]
    mirrored = np.roll(flipped, shift=1, axis=(-2, -1))
    return 0.5 * (coeffs + np.conj(mirrored))


def hermitian_defect(coeffs: np.ndarray) -> float:
    """Max abs deviation from Hermitian symmetry."""
    flipped = coeffs[..., ::-1, ::-1]
    mirrored = np.roll(flipped, shift=1, axis=(-2, -1))
    return float(np.max(np.abs(coeffs - np.conj(mirrored))))


def _prepare(grid: Grid, coeffs: np.ndarray, ncomp: int, symmetrize: bool) -> np.ndarray:
    want = (ncomp, grid.n, grid.n) if ncomp > 1 else (grid.n, grid.n)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != want:
        raise ValueError(f"coefficient shape {coeffs.shape}, expected {want}")
    if symmetrize:
        coeffs = hermitian_symmetrize(coeffs)
    else:
        coeffs = coeffs.copy()
    coeffs[..., grid.nyquist_mask] = 0.0
    return coeffs


@dataclass
class ScalarField:
    """Scalar function on the torus stored as Fourier series coefficients.

    The convention is f(x) = sum_m c[m] exp(i k_m . x), so c = fft2(samples)/n^2.
    """

    grid: Grid
    coeffs: np.ndarray
    mean_zero: bool = field(default=False)

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs: np.ndarray, *, symmetrize: bool = True) -> "ScalarField":
        c = _prepare(grid, coeffs, 1, symmetrize)
        scale = float(np.max(np.abs(c))) or 1.0
        return cls(grid, c, mean_zero=bool(abs(c[0, 0]) <= _DIV_TOL * scale))

    @classmethod
    def from_physical(cls, grid: Grid, samples: np.ndarray) -> "ScalarField":
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != (grid.n, grid.n):
            raise ValueError(f"sample shape {samples.shape}, expected {(grid.n, grid.n)}")
        return cls.from_coeffs(grid, np.fft.fft2(samples) / grid.n**2, symmetrize=False)

    @classmethod
    def zero(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros((grid.n, grid.n), np.complex128), mean_zero=True)

    @property
    def ncomp(self) -> int:
        return 1

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.coeffs.copy(), self.mean_zero)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.coeffs + other.coeffs,
                           self.mean_zero and other.mean_zero)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _check_same_grid(self, other)
        return ScalarField(self.grid, self.coeffs - other.coeffs,
                           self.mean_zero and other.mean_zero)

    def __mul__(self, a: float) -> "ScalarField":
        return ScalarField(self.grid, self.coeffs * float(a), self.mean_zero)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self * -1.0


@dataclass
class FourierVectorField:
    """Velocity-like field with two spectral components, shape (2, n, n)."""

    grid: Grid
    coeffs: np.ndarray
    divergence_free: bool = field(default=False)
    mean_zero: bool = field(default=False)

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs: np.ndarray, *, symmetrize: bool = True) -> "FourierVectorField":
        c = _prepare(grid, coeffs, 2, symmetrize)
        scale = float(np.max(np.abs(c))) or 1.0
        div = grid.k1 * c[0] + grid.k2 * c[1]
        return cls(
            grid, c,
            divergence_free=float(np.max(np.abs(div))) <= _DIV_TOL * scale * max(1.0, float(np.max(grid.kmag))),
            mean_zero=float(np.max(np.abs(c[:, 0, 0]))) <= _DIV_TOL * scale,
        )

    @classmethod
    def from_physical(cls, grid: Grid, samples: np.ndarray) -> "FourierVectorField":
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != (2, grid.n, grid.n):
            raise ValueError(f"sample shape {samples.shape}, expected {(2, grid.n, grid.n)}")
        return cls.from_coeffs(grid, np.fft.fft2(samples, axes=(-2, -1)) / grid.n**2,
                               symmetrize=False)

    @classmethod
    def zero(cls, grid: Grid) -> "FourierVectorField":
        return cls(grid, np.zeros((2, grid.n, grid.n), np.complex128), True, True)

    @property
    def ncomp(self) -> int:
        return 2

    def copy(self) -> "FourierVectorField":
        return FourierVectorField(self.grid, self.coeffs.copy(),
                                  self.divergence_free, self.mean_zero)

    def __add__(self, other: "FourierVectorField") -> "FourierVectorField":
        _check_same_grid(self, other)
        return FourierVectorField(self.grid, self.coeffs + other.coeffs,
                                  self.divergence_free and other.divergence_free,
                                  self.mean_zero and other.mean_zero)

    def __sub__(self, other: "FourierVectorField") -> "FourierVectorField":
        _check_same_grid(self, other)
        return FourierVectorField(self.grid, self.coeffs - other.coeffs,
                                  self.divergence_free and other.divergence_free,
                                  self.mean_zero and other.mean_zero)

    def __mul__(self, a: float) -> "FourierVectorField":
        return FourierVectorField(self.grid, self.coeffs * float(a),
                                  self.divergence_free, self.mean_zero)

    __rmul__ = __mul__

    def __neg__(self) -> "FourierVectorField":
        return self * -1.0


def _check_same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


# -- serialization ---------------------------------------------------------
#
# Flat little-endian container: magic, version u32, side f64, n u32, ncomp u32,
# then the complex128 coefficients row-major in fft mode order (component
# slowest).  Flags travel in a JSON sidecar <path>.json.  Round-trips are
# bit-exact because the raw IEEE bytes are written unchanged.

def save_field(f: ScalarField | FourierVectorField, path: str | Path) -> Path:
    """Write a field container plus its JSON sidecar; returns the data path."""
    path = Path(path)
    c = np.ascontiguousarray(f.coeffs.reshape(f.ncomp, f.grid.n, f.grid.n), dtype="<c16")
    header = _MAGIC + struct.pack("<Id2I", 1, f.grid.side, f.grid.n, f.ncomp)
    path.write_bytes(header + c.tobytes())
    meta = {"kind": "vector" if f.ncomp == 2 else "scalar", "mean_zero": bool(f.mean_zero)}
    if f.ncomp == 2:
        meta["divergence_free"] = bool(f.divergence_free)
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return path


def load_field(path: str | Path) -> ScalarField | FourierVectorField:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: not a field container")
    version, side, n, ncomp = struct.unpack_from("<Id2I", raw, 4)
    if version != 1:
        raise ValueError(f"{path}: unsupported container version {version}")
    off = 4 + struct.calcsize("<Id2I")
    coeffs = np.frombuffer(raw[off:], dtype="<c16").reshape(ncomp, n, n).astype(np.complex128)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    grid = Grid(side, int(n))
    if ncomp == 2:
        return FourierVectorField(grid, coeffs, bool(meta.get("divergence_free", False)),
                                  bool(meta.get("mean_zero", False)))
    if ncomp == 1:
        return ScalarField(grid, coeffs[0], bool(meta.get("mean_zero", False)))
    raise ValueError(f"{path}: unsupported component count {ncomp}")
