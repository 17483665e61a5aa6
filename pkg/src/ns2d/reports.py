"""Report writers: JSON documents, plot-ready CSV tables, run manifests.

CSV layout is fixed: one observable per column, and for time series the
first column is always the time in seconds.  Manifests carry the full
provenance of a run; their ``timings`` section is the only part excluded
from the byte-identity determinism contract.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import __version__
from .norms import NormReport

__all__ = [
    "RunManifest",
    "write_json",
    "write_norm_reports",
    "write_series_csv",
    "write_table_csv",
]


def _jsonable(obj: Any):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


def write_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_norm_reports(out_dir: str | Path, reports: Sequence[NormReport],
                       stem: str = "norms") -> tuple[Path, Path]:
    """JSON + CSV table of named norm values; CSV columns: name, value."""
    out = Path(out_dir)
    jpath = write_json(out / f"{stem}.json", [r.to_dict() for r in reports])
    cpath = out / f"{stem}.csv"
    with open(cpath, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value"])
        for r in reports:
            w.writerow([r.name, repr(float(r.value))])
    return jpath, cpath


def write_series_csv(path: str | Path, times: np.ndarray,
                     columns: Mapping[str, np.ndarray]) -> Path:
    """Time series table; first column is time in seconds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=np.float64) for k in names]
    times = np.asarray(times, dtype=np.float64)
    for k, a in zip(names, arrays):
        if a.shape != times.shape:
            raise ValueError(f"column {k!r} length {a.size} != times length {times.size}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time"] + names)
        for i in range(times.size):
            w.writerow([repr(float(times[i]))] + [repr(float(a[i])) for a in arrays])
    return path


def write_table_csv(path: str | Path, header: Sequence[str],
                    rows: Sequence[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(header))
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating))
                        else v for v in row])
    return path


@dataclass
class RunManifest:
    """Provenance record of one CLI run; exactly one per run.

    Everything except ``timings`` is deterministic for a given config, seed
    and thread count, and the data files a run writes are bit-identical
    across thread counts.
    """

    command: str
    config_path: str
    out_dir: str
    seed: int | None = None
    threads: int = 1
    version: str = __version__
    config: dict = dc_field(default_factory=dict)
    inputs: list[str] = dc_field(default_factory=list)
    outputs: list[str] = dc_field(default_factory=list)
    diagnostics: dict = dc_field(default_factory=dict)
    timings: dict = dc_field(default_factory=dict)

    def _relative_outputs(self) -> list[str]:
        # outputs live under out_dir; record them relative so manifests from
        # runs into different directories stay comparable
        out = Path(self.out_dir).resolve()
        rel = []
        for o in self.outputs:
            p = Path(o).resolve()
            try:
                rel.append(str(p.relative_to(out)))
            except ValueError:
                rel.append(str(o))
        return rel

    def to_dict(self) -> dict:
        return {"command": self.command, "config_path": self.config_path,
                "out_dir": self.out_dir, "seed": self.seed,
                "threads": self.threads, "version": self.version,
                "config": _jsonable(self.config), "inputs": list(self.inputs),
                "outputs": sorted(set(self._relative_outputs())),
                "diagnostics": _jsonable(self.diagnostics),
                "timings": _jsonable(self.timings)}

    def write(self, path: str | Path) -> Path:
        return write_json(path, self.to_dict())
