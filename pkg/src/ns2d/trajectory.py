"""Time-indexed stacks of spectral fields."""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import FourierVectorField, ScalarField
from .grid import Grid
from .operators import heat_propagate

__all__ = ["Trajectory", "graded_times", "heat_flow", "save_trajectory", "load_trajectory"]

_MAGIC = b"NST1"


def graded_times(t_final: float, m: int, *, gamma: float = 2.0, t0: float = 0.0) -> np.ndarray:
    """m+1 nodes t0 + (t_final-t0)*(i/m)^gamma; gamma=2 crowds them toward t0."""
    if not t_final > t0:
        raise ValueError(f"need t_final > t0, got {t_final} <= {t0}")
    if m < 2:
        raise ValueError(f"need at least 2 intervals, got {m}")
    return t0 + (t_final - t0) * (np.arange(m + 1) / m) ** gamma


@dataclass
class Trajectory:
    """Fields sampled at strictly increasing times on one shared grid.

    coeffs has shape (len(times), ncomp, n, n) with ncomp in {1, 2}.  The
    flags describe every slice at once (solvers only produce homogeneous
    stacks).  Supports pointwise linear arithmetic, which is what the fixed
    point iteration needs.
    """

    grid: Grid
    times: np.ndarray
    coeffs: np.ndarray
    divergence_free: bool = False
    mean_zero: bool = False

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        if self.times.ndim != 1 or self.times.size < 3:
            raise ValueError("need at least 3 time nodes")
        if not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")
        if self.times[0] < 0.0:
            raise ValueError("times must be nonnegative")
        n = self.grid.n
        if self.coeffs.shape[0] != self.times.size or self.coeffs.shape[-2:] != (n, n) \
                or self.coeffs.ndim != 4 or self.coeffs.shape[1] not in (1, 2):
            raise ValueError(f"coefficient stack shape {self.coeffs.shape} does not match")

    @property
    def ncomp(self) -> int:
        return int(self.coeffs.shape[1])

    def __len__(self) -> int:
        return int(self.times.size)

    def field(self, i: int) -> ScalarField | FourierVectorField:
        c = self.coeffs[i]
        if self.ncomp == 1:
            return ScalarField(self.grid, c[0], self.mean_zero)
        return FourierVectorField(self.grid, c, self.divergence_free, self.mean_zero)

    def fields(self):
        return [self.field(i) for i in range(len(self))]

    @classmethod
    def from_fields(cls, times, fields) -> "Trajectory":
        if len(fields) != len(times):
            raise ValueError("times and fields length mismatch")
        grid = fields[0].grid
        ncomp = fields[0].ncomp
        coeffs = np.stack([f.coeffs.reshape(ncomp, grid.n, grid.n) for f in fields])
        return cls(grid, np.asarray(times, float), coeffs,
                   divergence_free=all(getattr(f, "divergence_free", False) for f in fields),
                   mean_zero=all(f.mean_zero for f in fields))

    # -- arithmetic (slicewise linear) ------------------------------------

    def _like(self, coeffs, div_free, mean_zero) -> "Trajectory":
        return Trajectory(self.grid, self.times, coeffs, div_free, mean_zero)

    def __add__(self, other: "Trajectory") -> "Trajectory":
        self._check_compatible(other)
        return self._like(self.coeffs + other.coeffs,
                          self.divergence_free and other.divergence_free,
                          self.mean_zero and other.mean_zero)

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        self._check_compatible(other)
        return self._like(self.coeffs - other.coeffs,
                          self.divergence_free and other.divergence_free,
                          self.mean_zero and other.mean_zero)

    def __mul__(self, a: float) -> "Trajectory":
        return self._like(self.coeffs * float(a), self.divergence_free, self.mean_zero)

    __rmul__ = __mul__

    def __neg__(self) -> "Trajectory":
        return self * -1.0

    def _check_compatible(self, other: "Trajectory") -> None:
        if self.grid != other.grid:
            raise ValueError("trajectory grids differ")
        if self.times.size != other.times.size or not np.allclose(self.times, other.times, rtol=0, atol=0):
            raise ValueError("trajectory time nodes differ")


def heat_flow(f: ScalarField | FourierVectorField, times) -> Trajectory:
    """Trajectory t -> e^{t Laplacian} f on the given nodes."""
    return Trajectory.from_fields(times, [heat_propagate(f, float(t)) for t in times])


def save_trajectory(traj: Trajectory, path: str | Path) -> Path:
    """Binary checkpoint: header, times, then the coefficient stack."""
    path = Path(path)
    m = len(traj)
    header = _MAGIC + struct.pack("<Id3I", 1, traj.grid.side, traj.grid.n, traj.ncomp, m)
    times = np.ascontiguousarray(traj.times, dtype="<f8")
    coeffs = np.ascontiguousarray(traj.coeffs, dtype="<c16")
    path.write_bytes(header + times.tobytes() + coeffs.tobytes())
    meta = {"divergence_free": bool(traj.divergence_free), "mean_zero": bool(traj.mean_zero)}
    path.with_name(path.name + ".json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return path


def load_trajectory(path: str | Path) -> Trajectory:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: not a trajectory container")
    version, side, n, ncomp, m = struct.unpack_from("<Id3I", raw, 4)
    if version != 1:
        raise ValueError(f"{path}: unsupported container version {version}")
    off = 4 + struct.calcsize("<Id3I")
    times = np.frombuffer(raw[off:off + 8 * m], dtype="<f8").astype(np.float64)
    coeffs = np.frombuffer(raw[off + 8 * m:], dtype="<c16").reshape(m, ncomp, n, n).astype(np.complex128)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    return Trajectory(Grid(side, int(n)), times, coeffs,
                      bool(meta.get("divergence_free", False)), bool(meta.get("mean_zero", False)))
