"""Matplotlib renderers for the report path.

Every function writes one PNG next to the delimited output and returns the
path.  The Agg backend is forced so figures render identically headless.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .fields import FourierVectorField, ScalarField
from .norms import NormReport
from .operators import to_physical
from .solver import EnergyLedger

__all__ = [
    "figure_norm_bars",
    "figure_series",
    "figure_energy_ledger",
    "figure_field",
    "figure_spectrum",
    "figure_profile",
    "figure_growth",
]

_DPI = 120


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def figure_norm_bars(reports: list[NormReport], path: str | Path) -> Path:
    names = [r.name for r in reports]
    values = [r.value for r in reports]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(names)), 3.2))
    ax.bar(range(len(names)), values, color="#3b6ea5")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("norm value")
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, path)


def figure_series(times: np.ndarray, columns: Mapping[str, np.ndarray],
                  path: str | Path, *, logy: bool = False,
                  ylabel: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    for name, vals in columns.items():
        ax.plot(times, vals, label=name, lw=1.2)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("time")
    if ylabel:
        ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def figure_energy_ledger(ledger: EnergyLedger, path: str | Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(5.4, 5.2), sharex=True)
    ax1.plot(ledger.times, ledger.energy, label="energy", lw=1.3)
    ax1.plot(ledger.times, ledger.dissipation, label="dissipation", lw=1.1)
    if np.any(ledger.cross != 0.0):
        ax1.plot(ledger.times, ledger.cross, label="coupling exchange", lw=1.1)
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax1.set_ylabel("balance terms")
    ax2.semilogy(ledger.times[1:], np.maximum(np.abs(ledger.residual[1:]), 1e-18),
                 color="#a53b3b", lw=1.1)
    ax2.set_ylabel("|residual|")
    ax2.set_xlabel("time")
    ax2.grid(alpha=0.3)
    return _save(fig, path)


def figure_field(f: FourierVectorField | ScalarField, path: str | Path, *,
                 title: str = "") -> Path:
    phys = to_physical(f)
    mag = np.sqrt(np.sum(phys**2, axis=0)) if phys.ndim == 3 else phys
    fig, ax = plt.subplots(figsize=(4.4, 4.0))
    im = ax.imshow(mag.T, origin="lower", cmap="viridis",
                   extent=(0.0, f.grid.side, 0.0, f.grid.side))
    fig.colorbar(im, ax=ax, shrink=0.85)
    if title:
        ax.set_title(title, fontsize=9)
    return _save(fig, path)


def figure_spectrum(f: FourierVectorField | ScalarField, path: str | Path) -> Path:
    g = f.grid
    c = f.coeffs if f.coeffs.ndim == 3 else f.coeffs[None]
    power = np.sum(np.abs(c) ** 2, axis=0) * g.side**2
    kflat = g.kmag.ravel()
    pflat = power.ravel()
    live = kflat > 0
    edges = np.geomspace(max(kflat[live].min(), 1e-12), kflat.max() + 1e-12, 24)
    idx = np.digitize(kflat[live], edges)
    ks, es = [], []
    for b in range(1, edges.size):
        sel = idx == b
        if np.any(sel):
            ks.append(np.mean(kflat[live][sel]))
            es.append(np.sum(pflat[live][sel]))
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    ax.loglog(ks, np.maximum(es, 1e-300), marker="o", ms=3, lw=1.0)
    ax.set_xlabel("|k|")
    ax.set_ylabel("shell energy")
    ax.grid(alpha=0.3, which="both")
    return _save(fig, path)


def figure_profile(radii: np.ndarray, oscillation: np.ndarray,
                   path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.loglog(radii, np.maximum(oscillation, 1e-300), marker="s", ms=4, lw=1.1)
    ax.set_xlabel("radius")
    ax.set_ylabel("mean oscillation")
    ax.grid(alpha=0.3, which="both")
    return _save(fig, path)


def figure_growth(series: Mapping[float, tuple[np.ndarray, np.ndarray]],
                  exponents: Mapping[float, float], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for eps, (t, s) in sorted(series.items()):
        ax.loglog(t, s, lw=1.2, label=f"eps={eps:g} (fit {exponents[eps]:+.3f})")
    ax.set_xlabel("time")
    ax.set_ylabel("running sup of L2 norm")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    return _save(fig, path)
