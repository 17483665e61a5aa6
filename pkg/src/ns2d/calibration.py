"""Measured bilinear-estimate constants feeding the solver smallness gates.

The verification harness measures ratio suprema of the Duhamel operator and
writes them to a JSON calibration file; the solvers consume that file.  The
search order for the file is: explicit config path, then the NS_CALIBRATION
environment variable, then the built-in constants below (measured during
development on 2 pi tori at n = 32 and n = 64, horizon 1, slope-2 spectra,
rounded up)."""
from __future__ import annotations

import json
import os
from pathlib import Path

__all__ = ["DEFAULT_CONSTANTS", "load_constant", "write_calibration", "calibration_entries"]

DEFAULT_CONSTANTS = {
    "xt,xt": 0.16,    # ||B(u,v)||_X / (||u||_X ||v||_X)
    "xt,yt": 0.10,    # ||B(u,v)||_Y / (||u||_X ||v||_Y)
    "l44,l44": 0.11,
    "xt,l44": 0.10,
}


def _entry_key(entry: dict) -> tuple:
    return (entry.get("pair"), entry.get("n"), round(float(entry.get("side", 0.0)), 12),
            round(float(entry.get("t_final", 0.0)), 12))


def calibration_entries(path: str | Path) -> list[dict]:
    data = json.loads(Path(path).read_text())
    entries = data.get("entries", [])
    if not isinstance(entries, list):
        raise ValueError(f"{path}: malformed calibration file")
    return entries


def load_constant(pair: str, *, side: float | None = None, n: int | None = None,
                  t_final: float | None = None,
                  path: str | Path | None = None) -> tuple[float, str]:
    """Best available constant for a norm pair and its provenance string.

    Exact (pair, n, side, T) matches win, then same-pair entries (largest
    value, conservative), then the built-in defaults.
    """
    candidates: list[Path] = []
    if path is not None:
        candidates.append(Path(path))
    env = os.environ.get("NS_CALIBRATION")
    if env:
        candidates.append(Path(env))
    for p in candidates:
        if not p.exists():
            continue
        entries = [e for e in calibration_entries(p) if e.get("pair") == pair]
        if not entries:
            continue
        exact = [e for e in entries
                 if (n is None or e.get("n") == n)
                 and (side is None or abs(float(e.get("side", -1)) - side) < 1e-9)
                 and (t_final is None or abs(float(e.get("t_final", -1)) - t_final) < 1e-9)]
        pool = exact or entries
        best = max(float(e["max_ratio"]) for e in pool)
        kind = "exact" if exact else "pair"
        return best, f"{p}:{kind}"
    if pair in DEFAULT_CONSTANTS:
        return DEFAULT_CONSTANTS[pair], "builtin"
    raise KeyError(f"no calibration available for norm pair {pair!r}")


def write_calibration(path: str | Path, entries: list[dict]) -> Path:
    """Write (or extend) a calibration file; entries replace equal keys."""
    path = Path(path)
    existing: list[dict] = []
    if path.exists():
        existing = calibration_entries(path)
    merged = {_entry_key(e): e for e in existing}
    for e in entries:
        merged[_entry_key(e)] = e
    out = {"entries": [merged[k] for k in sorted(merged, key=repr)]}
    path.write_text(json.dumps(out, sort_keys=True, indent=2) + "\n")
    return path
