"""Batch front end: ``ns norms|solve|verify --config <path> --out <dir>``.

Exit codes: 0 all good, 1 check failure, 2 usage error, 3 solver structured
failure.  Each run writes exactly one ``manifest.json``; the environment
variable NS_CALIBRATION overrides the calibration file consulted by the
solver gates.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from .fields import FourierVectorField, ScalarField, load_field, save_field
from .grid import Grid
from .harness import (ExperimentSpec, embedding_chain_report,
                      bilinear_constant_table, small_data_family,
                      taylor_green_benchmark, verify_energy_identity,
                      verify_growth_exponent, verify_scaling_invariance,
                      vmo_oscillation_profile)
from .norms import (NormReport, besov_norm, bmo_grad_norm, carleson_norm,
                    dbmo_norm, hdot1_norm, lebesgue_norm, lpt_lqx_norm,
                    xt_norm, yt_norm, z_norm)
from .randfields import random_divfree_field, random_scalar_field, taylor_green
from .reports import RunManifest, write_json, write_norm_reports, write_series_csv, write_table_csv
from .solver import SolverConfig, energy_continuation, solve_global, solve_small_data, solve_v_local
from .trajectory import Trajectory, heat_flow, load_trajectory, save_trajectory

__all__ = ["main", "cmd_norms", "cmd_solve", "cmd_verify", "UsageError"]

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_SOLVER_FAILURE = 3


class UsageError(Exception):
    """Bad config or arguments; maps to exit code 2."""


def _parse_float(x: Any) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return np.inf
    return float(x)


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        with open(p) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config root must be an object, got {type(cfg).__name__}")
    return cfg


def _make_grid(section: dict) -> Grid:
    return Grid(_parse_float(section.get("side", 2.0 * np.pi)),
                int(section.get("n", 64)))


def _generate_field(gen: dict, seed_override: int | None):
    kind = gen.get("kind")
    grid = _make_grid(gen)
    seed = seed_override if seed_override is not None else int(gen.get("seed", 0))
    amp = _parse_float(gen.get("amplitude", 1.0))
    if kind == "random_divfree":
        return random_divfree_field(grid, seed, slope=_parse_float(gen.get("slope", 2.0)),
                                    kmin=gen.get("kmin"), kmax=gen.get("kmax"),
                                    amplitude=amp)
    if kind == "random_scalar":
        return random_scalar_field(grid, seed, slope=_parse_float(gen.get("slope", 2.0)),
                                   kmin=gen.get("kmin"), kmax=gen.get("kmax"),
                                   amplitude=amp)
    if kind == "taylor_green":
        return taylor_green(grid, amp)
    if kind == "zero":
        return FourierVectorField.zero(grid)
    if kind == "single_mode":
        m = gen.get("mode", [1, 0])
        a, b = int(m[0]) % grid.n, int(m[1]) % grid.n
        k = np.asarray([grid.modes[a], grid.modes[b]], dtype=np.float64)
        norm = np.hypot(k[0], k[1])
        if norm == 0.0:
            raise UsageError("single_mode generator needs a nonzero mode")
        pol = np.asarray([-k[1], k[0]]) / norm
        c = np.zeros((2, grid.n, grid.n), dtype=np.complex128)
        # symmetrization splits the weight over the +-k pair: amp cos(k.x) pol
        c[:, a, b] = amp * pol
        return FourierVectorField.from_coeffs(grid, c, symmetrize=True)
    raise UsageError(f"unknown generator kind: {kind!r}")


def _resolve_field(cfg: dict, base: Path, seed_override: int | None):
    if "field" in cfg:
        p = Path(cfg["field"])
        if not p.is_absolute():
            p = base / p
        if not p.is_file():
            raise UsageError(f"input field file not found: {p}")
        return load_field(p)
    if "generator" in cfg:
        return _generate_field(dict(cfg["generator"]), seed_override)
    raise UsageError("config needs either a 'field' path or a 'generator' section")


# -- norm registries -------------------------------------------------------

def _field_norm(f, name: str) -> NormReport:
    if name == "l1":
        return NormReport("l1", lebesgue_norm(f, 1.0))
    if name == "l2":
        return NormReport("l2", lebesgue_norm(f, 2.0))
    if name == "l4":
        return NormReport("l4", lebesgue_norm(f, 4.0))
    if name == "linf":
        return NormReport("linf", lebesgue_norm(f, np.inf))
    if name == "hdot1":
        return NormReport("hdot1", hdot1_norm(f))
    if name == "dbmo":
        return NormReport("dbmo", dbmo_norm(f))
    if name == "bmo_grad":
        if not isinstance(f, ScalarField):
            raise UsageError("bmo_grad applies to scalar fields only")
        return NormReport("bmo_grad", bmo_grad_norm(f))
    if name.startswith("besov:"):
        try:
            s, p, q = (_parse_float(v) for v in name.split(":", 1)[1].split(","))
        except ValueError:
            raise UsageError(f"bad besov norm spec {name!r}; use besov:s,p,q") from None
        return NormReport(name, besov_norm(f, s, p, q),
                          {"s": s, "p": p, "q": q})
    raise UsageError(f"unknown norm name: {name!r}")


def _trajectory_norm(traj: Trajectory, name: str, t_final: float | None) -> NormReport:
    if name == "xt":
        return NormReport("xt", xt_norm(traj, t_final))
    if name == "yt":
        return NormReport("yt", yt_norm(traj))
    if name == "carleson":
        return NormReport("carleson", carleson_norm(traj, t_final))
    if name == "l44":
        return NormReport("l44", lpt_lqx_norm(traj, 4.0, 4.0))
    if name.startswith("lp_lq:"):
        try:
            p, q = (_parse_float(v) for v in name.split(":", 1)[1].split(","))
        except ValueError:
            raise UsageError(f"bad space-time norm spec {name!r}; use lp_lq:p,q") from None
        return NormReport(name, lpt_lqx_norm(traj, p, q), {"p": p, "q": q})
    if name == "z":
        return NormReport("z", z_norm(traj, t_final))
    raise UsageError(f"unknown trajectory norm name: {name!r}")


# -- commands --------------------------------------------------------------

def cmd_norms(cfg: dict, out: Path, base: Path, args, manifest: RunManifest) -> int:
    f = _resolve_field(cfg, base, args.seed)
    names = cfg.get("norms", ["l2", "linf", "hdot1", "dbmo"])
    if not names:
        raise UsageError("empty norm list")
    reports = [_field_norm(f, name) for name in names]
    traj = None
    if "trajectory" in cfg:
        p = Path(cfg["trajectory"])
        if not p.is_absolute():
            p = base / p
        if not p.is_file():
            raise UsageError(f"trajectory file not found: {p}")
        traj = load_trajectory(p)
        manifest.inputs.append(str(p))
        t_final = cfg.get("t_final")
        t_final = None if t_final is None else _parse_float(t_final)
        for name in cfg.get("trajectory_norms", ["xt", "yt"]):
            reports.append(_trajectory_norm(traj, name, t_final))
    jpath, cpath = write_norm_reports(out, reports)
    manifest.outputs += [str(jpath), str(cpath)]
    if not args.no_figures:
        from .figures import figure_field, figure_norm_bars, figure_spectrum
        manifest.outputs.append(str(figure_norm_bars(reports, out / "norms.png")))
        manifest.outputs.append(str(figure_field(f, out / "field.png")))
        if np.any(f.coeffs != 0):
            manifest.outputs.append(str(figure_spectrum(f, out / "spectrum.png")))
    manifest.diagnostics["norms"] = {r.name: r.value for r in reports}
    return EXIT_OK


def _solver_config(section: dict) -> SolverConfig:
    known = {f.name for f in SolverConfig.__dataclass_fields__.values()}
    bad = set(section) - known
    if bad:
        raise UsageError(f"unknown solver config keys: {sorted(bad)}")
    return SolverConfig(**section)


def cmd_solve(cfg: dict, out: Path, base: Path, args, manifest: RunManifest) -> int:
    mode = cfg.get("mode", "global")
    if mode not in ("small_data", "local", "global"):
        raise UsageError(f"unknown solve mode: {mode!r}")
    scfg = _solver_config(dict(cfg.get("config", {})))
    u0 = _resolve_field(cfg, base, args.seed)
    if not isinstance(u0, FourierVectorField):
        raise UsageError("solve needs a vector field input")
    if u0.grid != scfg.grid():
        raise UsageError(f"input grid {u0.grid} does not match solver config {scfg.grid()}")
    save_field(u0, out / "initial.nsf")
    manifest.outputs += [str(out / "initial.nsf"), str(out / "initial.nsf.json")]

    t0 = time.perf_counter()
    if mode == "small_data":
        res = solve_small_data(u0, scfg)
        traj, ledger = res.w, None
        diagnostics = {"status": res.status, "dbmo_w0": res.dbmo_w0,
                       "eta": res.eta, "eta_source": res.eta_source,
                       "xt_w": res.xt_w, "ratio": res.ratio,
                       "residual": res.residual, "message": res.message,
                       "iterations": None if res.picard is None else res.picard.iterations}
    elif mode == "local":
        res = solve_v_local(u0, None, scfg)
        traj, ledger = res.v, None
        diagnostics = {"status": res.status, "xt_y": res.xt_y,
                       "yt_v": res.yt_v, "residual": res.residual,
                       "message": res.message,
                       "iterations": None if res.picard is None else res.picard.iterations}
    else:
        forcing = None
        if "forcing" in cfg:
            p = Path(cfg["forcing"])
            if not p.is_absolute():
                p = base / p
            if not p.is_file():
                raise UsageError(f"forcing trajectory not found: {p}")
            forcing = load_trajectory(p)
            manifest.inputs.append(str(p))
        t_end = cfg.get("t_end")
        res = solve_global(u0, scfg, forcing,
                           t_end=None if t_end is None else _parse_float(t_end))
        traj = res.u
        ledger = None if res.continuation is None else res.continuation.ledger
        diagnostics = {"stage": res.stage, "message": res.message,
                       "overlap_max_rel": res.overlap_max_rel,
                       "growth_exponent": res.growth_exponent,
                       "growth_prefactor": res.growth_prefactor}
        if res.split is not None:
            diagnostics["split"] = {"cutoff_j": res.split.cutoff_j,
                                    "dbmo_w0": res.split.dbmo_w0,
                                    "scanned": res.split.scanned}
        if res.small is not None and res.small.picard is not None:
            diagnostics["small_data_iterations"] = res.small.picard.iterations
            diagnostics["small_data_ratio"] = res.small.ratio
        if res.local is not None and res.local.picard is not None:
            diagnostics["local_iterations"] = res.local.picard.iterations
            diagnostics["local_residual"] = res.local.residual
    manifest.timings["solve"] = time.perf_counter() - t0
    manifest.diagnostics["solve"] = diagnostics

    if not res.ok:
        write_json(out / "report.json", diagnostics)
        manifest.outputs.append(str(out / "report.json"))
        stage = diagnostics.get("stage", diagnostics.get("status", "solver"))
        print(f"error: solver failure at stage '{stage}': {diagnostics['message']}",
              file=sys.stderr)
        return EXIT_SOLVER_FAILURE

    if traj is not None:
        save_trajectory(traj, out / "solution.nst")
        manifest.outputs += [str(out / "solution.nst"), str(out / "solution.nst.json")]
        l2 = traj.grid.side * np.sqrt(np.sum(np.abs(traj.coeffs) ** 2, axis=(1, 2, 3)))
        series = {"l2": l2,
                  "dbmo": np.asarray([dbmo_norm(traj.field(i)) for i in range(len(traj))])}
        spath = write_series_csv(out / "series.csv", traj.times, series)
        manifest.outputs.append(str(spath))
        if not args.no_figures:
            from .figures import figure_field, figure_series
            manifest.outputs.append(str(figure_series(
                traj.times, series, out / "series.png", ylabel="norm")))
            manifest.outputs.append(str(figure_field(
                traj.field(len(traj) - 1), out / "final.png")))
    if ledger is not None:
        lpath = write_series_csv(out / "ledger.csv", ledger.times,
                                 {"energy": ledger.energy,
                                  "dissipation": ledger.dissipation,
                                  "cross": ledger.cross,
                                  "residual": ledger.residual})
        manifest.outputs.append(str(lpath))
        if not args.no_figures:
            from .figures import figure_energy_ledger
            manifest.outputs.append(str(figure_energy_ledger(ledger, out / "ledger.png")))
    write_json(out / "report.json", diagnostics)
    manifest.outputs.append(str(out / "report.json"))
    return EXIT_OK


_KNOWN_CHECKS = ("bilinear", "energy", "growth", "scaling", "chain", "vmo",
                 "taylor_green", "small_family")


def _check_bilinear(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    pairs = section.get("pairs", ["xt,xt"])
    table = bilinear_constant_table(
        int(section.get("samples", 30)), _parse_float(section.get("t_final", 1.0)),
        pairs, side=_parse_float(section.get("side", 2.0 * np.pi)),
        n=int(section.get("n", 32)), nodes=int(section.get("nodes", 16)),
        seed=args.seed if args.seed is not None else int(section.get("seed", 0)),
        refine=bool(section.get("refine", False)), threads=args.threads,
        calibration_out=section.get("write_calibration"))
    results = {}
    ok = True
    for pair in pairs:
        est = table[pair]
        row = est.__dict__.copy()
        finite = np.isfinite(est.max_ratio) and est.max_ratio > 0
        drift_ok = est.drift is None or max(est.drift, 1.0 / est.drift) < 2.0
        row["passed"] = bool(finite and drift_ok)
        ok = ok and row["passed"]
        results[pair] = row
        cpath = write_table_csv(out / f"bilinear_{pair.replace(',', '_')}.csv",
                                ["sample", "ratio"],
                                list(enumerate(est.ratios)))
        manifest.outputs.append(str(cpath))
    return ok, results


def _check_energy(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    side = _parse_float(section.get("side", 2.0 * np.pi))
    n = int(section.get("n", 32))
    steps = int(section.get("steps", 100))
    tol = _parse_float(section.get("tolerance", 1e-6))
    grid = Grid(side, n)
    cfg = SolverConfig(side=side, n=n)
    seed = args.seed if args.seed is not None else int(section.get("seed", 7))
    u = random_divfree_field(grid, seed, amplitude=_parse_float(section.get("amplitude", 0.8)))
    w0 = random_divfree_field(grid, seed + 1, amplitude=0.05, kmin=4.0 * 2 * np.pi / side)
    t_final = _parse_float(section.get("t_final", 1.0))
    w = heat_flow(w0, np.linspace(0.0, t_final, 2 * steps + 1))
    coarse = energy_continuation(u, w, 0.0, t_final, cfg,
                                 times=np.linspace(0.0, t_final, steps + 1))
    fine = energy_continuation(u, w, 0.0, t_final, cfg,
                               times=np.linspace(0.0, t_final, 2 * steps + 1))
    chk = verify_energy_identity(coarse, tolerance=tol, refined=fine)
    manifest.outputs.append(str(write_series_csv(
        out / "energy_residual.csv", chk.times, {"residual": chk.residuals})))
    if not args.no_figures:
        from .figures import figure_energy_ledger
        manifest.outputs.append(str(figure_energy_ledger(
            coarse.ledger, out / "energy_ledger.png")))
    return chk.passed, chk.to_dict()


def _check_growth(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    spec = ExperimentSpec(
        name=section.get("name", "growth"),
        seed=args.seed if args.seed is not None else int(section.get("seed", 12)),
        side=_parse_float(section.get("side", 16.0 * np.pi)),
        n=int(section.get("n", 32)),
        t_start=_parse_float(section.get("t_start", 0.1)),
        t_final=_parse_float(section.get("t_final", 10.0)),
        steps=int(section.get("steps", 600)),
        amplitude=_parse_float(section.get("amplitude", 0.35)),
        epsilons=tuple(_parse_float(e) for e in section.get("epsilons", (0.0, 0.01, 0.05, 0.1))),
        tolerances={k: _parse_float(v) for k, v in section.get("tolerances", {}).items()})
    rep = verify_growth_exponent(spec)
    for eps, (t, s) in rep.series.items():
        manifest.outputs.append(str(write_series_csv(
            out / f"growth_eps{eps:g}.csv", t, {"sup_l2": s})))
    if not args.no_figures:
        from .figures import figure_growth
        manifest.outputs.append(str(figure_growth(
            rep.series, dict(zip(rep.epsilons, rep.exponents)), out / "growth.png")))
    return rep.passed, rep.to_dict()


def _check_scaling(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    grid = Grid(_parse_float(section.get("side", 2.0 * np.pi)),
                int(section.get("n", 32)))
    seed = args.seed if args.seed is not None else int(section.get("seed", 42))
    f = random_divfree_field(grid, seed, slope=_parse_float(section.get("slope", 1.5)))
    rep = verify_scaling_invariance(f, section.get("norms"))
    manifest.outputs.append(str(write_table_csv(
        out / "scaling.csv",
        ["norm", "value", "rescaled", "ratio", "translation_delta"],
        [[r.norm, r.value, r.rescaled, r.ratio, r.translation_delta]
         for r in rep.rows])))
    return rep.passed, rep.to_dict()


def _check_chain(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    rep = embedding_chain_report(
        int(section.get("count", 50)),
        side=_parse_float(section.get("side", 2.0 * np.pi)),
        n=int(section.get("n", 32)),
        seed=args.seed if args.seed is not None else int(section.get("seed", 0)))
    manifest.outputs.append(str(write_table_csv(
        out / "chain.csv",
        ["upstream", "downstream", "max_ratio", "median_ratio", "drift"],
        [[p.upstream, p.downstream, p.max_ratio, p.median_ratio, p.drift]
         for p in rep.pairs])))
    return rep.passed, rep.to_dict()


def _check_vmo(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    grid = Grid(_parse_float(section.get("side", 2.0 * np.pi)),
                int(section.get("n", 32)))
    seed = args.seed if args.seed is not None else int(section.get("seed", 5))
    f = random_divfree_field(grid, seed, slope=2.5, kmax=4.0 * 2 * np.pi / grid.side)
    prof = vmo_oscillation_profile(f)
    manifest.outputs.append(str(write_table_csv(
        out / "vmo_profile.csv", ["radius", "oscillation"],
        list(zip(prof.radii.tolist(), prof.oscillation.tolist())))))
    if not args.no_figures:
        from .figures import figure_profile
        manifest.outputs.append(str(figure_profile(
            prof.radii, prof.oscillation, out / "vmo_profile.png")))
    # smooth band-limited input: profile must decrease toward small radii
    decreasing = bool(prof.oscillation[0] >= prof.oscillation[-1])
    return decreasing, {"profile": prof.to_dict(), "decreasing": decreasing}


def _check_taylor_green(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    cfg = SolverConfig(side=_parse_float(section.get("side", 2.0 * np.pi)),
                       n=int(section.get("n", 64)),
                       nodes=int(section.get("nodes", 48)))
    rep = taylor_green_benchmark(cfg)
    return rep.ok, rep.to_dict()


def _check_small_family(section: dict, out: Path, args, manifest) -> tuple[bool, dict]:
    cfg = SolverConfig(side=_parse_float(section.get("side", 2.0 * np.pi)),
                       n=int(section.get("n", 32)),
                       nodes=int(section.get("nodes", 24)),
                       t_max=_parse_float(section.get("t_max", 2.0)))
    rep = small_data_family(int(section.get("count", 6)), cfg,
                            seed=args.seed if args.seed is not None else int(section.get("seed", 4)))
    manifest.outputs.append(str(write_table_csv(
        out / "small_family.csv", ["sample", "ratio", "iterations"],
        [[i, r, k] for i, (r, k) in enumerate(zip(rep.ratios, rep.iterations))])))
    return rep.passed, rep.to_dict()


_CHECK_RUNNERS = {
    "bilinear": _check_bilinear,
    "energy": _check_energy,
    "growth": _check_growth,
    "scaling": _check_scaling,
    "chain": _check_chain,
    "vmo": _check_vmo,
    "taylor_green": _check_taylor_green,
    "small_family": _check_small_family,
}


def cmd_verify(cfg: dict, out: Path, base: Path, args, manifest: RunManifest) -> int:
    checks = cfg.get("checks")
    if not checks:
        raise UsageError("verify config needs a non-empty 'checks' list")
    unknown = [c for c in checks if c not in _CHECK_RUNNERS]
    if unknown:
        raise UsageError(f"unknown checks: {unknown}; known: {list(_CHECK_RUNNERS)}")
    bundle = {}
    all_ok = True
    for name in checks:
        t0 = time.perf_counter()
        passed, payload = _CHECK_RUNNERS[name](dict(cfg.get(name, {})), out, args, manifest)
        manifest.timings[name] = time.perf_counter() - t0
        bundle[name] = {"passed": bool(passed), "result": payload}
        all_ok = all_ok and passed
        print(f"check {name}: {'pass' if passed else 'FAIL'}")
    bundle["all_passed"] = all_ok
    write_json(out / "verify.json", bundle)
    manifest.outputs.append(str(out / "verify.json"))
    manifest.diagnostics["verify"] = {k: v["passed"] for k, v in bundle.items()
                                      if isinstance(v, dict)}
    return EXIT_OK if all_ok else EXIT_CHECK_FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ns", description="2D incompressible flow toolkit: norms, solves, verification")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (("norms", "compute norm tables for a field or trajectory"),
                            ("solve", "run a solver pipeline and write checkpoints"),
                            ("verify", "run harness checks and aggregate pass/fail")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sample sweeps (default 1)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the seeds in the config")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        base = Path(args.config).resolve().parent
        manifest = RunManifest(command=args.command, config_path=str(args.config),
                               out_dir=str(out), seed=args.seed,
                               threads=args.threads, config=cfg)
        if "field" in cfg:
            manifest.inputs.append(str(cfg["field"]))
        t0 = time.perf_counter()
        runner = {"norms": cmd_norms, "solve": cmd_solve, "verify": cmd_verify}[args.command]
        code = runner(cfg, out, base, args, manifest)
        manifest.timings["total"] = time.perf_counter() - t0
        manifest.write(out / "manifest.json")
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
