"""Solvers: small-data fixed point, data splitting, local solve, energy
continuation, and the composed global pipeline.

All solvers report outcomes through result dataclasses with an ``ok`` flag
(scipy-optimizer style); exceptions are reserved for misuse of the API.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Callable

import numpy as np

from .calibration import load_constant
from .duhamel import duhamel_bilinear, mild_residual, _projected_products, _trapezoid_weights
from .fields import FourierVectorField, ScalarField
from .grid import Grid
from .norms import dbmo_norm, xt_norm, yt_norm
from .operators import gradient, heat_propagate, leray_project, nonlinear_term
from .picard import PicardProblem, picard_solve, PicardResult
from .trajectory import Trajectory, graded_times, heat_flow

__all__ = [
    "SolverConfig",
    "SplitResult",
    "SmallDataResult",
    "LocalResult",
    "EnergyLedger",
    "ContinuationResult",
    "GlobalResult",
    "split_initial_data",
    "solve_small_data",
    "solve_v_local",
    "energy_continuation",
    "solve_global",
    "MildEvaluator",
]


@dataclass
class SolverConfig:
    """Shared knobs of the solver stack (JSON-mappable, all defaulted)."""

    side: float = 2.0 * np.pi
    n: int = 64
    t_final: float = 1.0           # local horizon
    nodes: int = 48                # graded time intervals for mild solves
    grading: float = 2.0
    dealias: bool = True
    picard_tol: float = 1e-9       # relative to ||y|| in the iteration norm
    picard_max_iter: int = 40
    epsilon: float = 0.1           # rough-part smallness target for splitting
    t_max: float = 10.0            # truncation horizon standing in for infinity
    gate_margin: float = 1.0       # extra factor on calibrated constants
    calibration: str | None = None
    handoff: float = 0.5           # continuation start, fraction of t_final
    cont_substeps: int = 6         # continuation substeps per overlap interval
    cont_dt: float = 5e-3          # continuation step beyond the overlap
    snapshots: int = 31
    j_max: int | None = None       # optional cutoff ceiling for the split scan

    def grid(self) -> Grid:
        return Grid(self.side, self.n)

    def times(self, t_final: float | None = None) -> np.ndarray:
        t = self.t_final if t_final is None else t_final
        return graded_times(min(t, self.t_max), self.nodes, gamma=self.grading)

    def eta(self, pair: str = "xt,xt", t_final: float | None = None) -> tuple[float, str]:
        value, source = load_constant(pair, side=self.side, n=self.n,
                                      t_final=t_final if t_final is not None else self.t_final,
                                      path=self.calibration)
        return value * self.gate_margin, source


# -- initial data splitting ------------------------------------------------

@dataclass
class SplitResult:
    ok: bool
    v0: FourierVectorField | None = None
    w0: FourierVectorField | None = None
    cutoff_j: int | None = None
    dbmo_w0: float = np.inf
    epsilon: float = 0.0
    scanned: list[tuple[int, float]] = dc_field(default_factory=list)
    best_epsilon: float = np.inf
    message: str = ""


def split_initial_data(u0: FourierVectorField, epsilon: float, *,
                       j_max: int | None = None) -> SplitResult:
    """Split u0 = v0 + w0 with v0 a sharp low-pass below 2^J.

    Scans dyadic cutoffs from below and returns the minimal J whose
    high-frequency remainder w0 satisfies dbmo_norm(w0) <= epsilon.  The two
    parts use complementary boolean masks on the same coefficients, so
    v0 + w0 reproduces u0 bit for bit.
    """
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    g = u0.grid
    kmag = g.kmag
    active = kmag[(np.abs(u0.coeffs).sum(axis=0) > 0.0) & (kmag > 0.0)]
    if active.size == 0:
        return SplitResult(True, u0.copy(), FourierVectorField.zero(g), 0, 0.0,
                           epsilon, [(0, 0.0)], 0.0, "zero field, trivial split")
    j_lo = int(np.floor(np.log2(float(np.min(active)))))
    j_hi = int(np.ceil(np.log2(float(np.max(active))))) + 1
    scanned: list[tuple[int, float]] = []
    res = SplitResult(False, epsilon=epsilon)
    for j in range(j_lo, j_hi + 1):
        if j_max is not None and j > j_max:
            break
        low = kmag < 2.0**j
        w0 = FourierVectorField(g, u0.coeffs * ~low, u0.divergence_free, True)
        val = dbmo_norm(w0)
        scanned.append((j, val))
        if val <= epsilon:
            v0 = FourierVectorField(g, u0.coeffs * low, u0.divergence_free, u0.mean_zero)
            return SplitResult(True, v0, w0, j, val, epsilon, scanned,
                               min(v for _, v in scanned), f"cutoff 2^{j}")
    res.scanned = scanned
    res.best_epsilon = min(v for _, v in scanned) if scanned else np.inf
    res.message = (f"no cutoff up to j_max={j_max} reaches epsilon={epsilon:.3g}; "
                   f"best achievable {res.best_epsilon:.3g}")
    return res


# -- small-data fixed point ------------------------------------------------

@dataclass
class SmallDataResult:
    ok: bool
    status: str
    w: Trajectory | None = None
    picard: PicardResult | None = None
    eta: float = 0.0
    eta_source: str = ""
    dbmo_w0: float = 0.0
    xt_y: float = 0.0
    xt_w: float = 0.0
    ratio: float = 0.0             # ||w||_X / dbmo(w0)
    residual: float = np.inf
    message: str = ""


def solve_small_data(w0: FourierVectorField, cfg: SolverConfig, *,
                     t_final: float | None = None,
                     check_dbmo_gate: bool = True) -> SmallDataResult:
    """Global-in-horizon fixed point w = e^{t Lap} w0 - B(w, w).

    Refuses (status "refused") when the measured smallness gate fails; other
    non-convergence outcomes are passed through from the iteration.
    """
    grid = cfg.grid()
    if w0.grid != grid:
        raise ValueError(f"initial data grid {w0.grid} does not match config {grid}")
    T = min(t_final if t_final is not None else cfg.t_final, cfg.t_max)
    times = cfg.times(T)
    eta, eta_source = cfg.eta("xt,xt", T)
    d0 = dbmo_norm(w0)
    res = SmallDataResult(False, "refused", eta=eta, eta_source=eta_source, dbmo_w0=d0)
    if check_dbmo_gate and d0 > cfg.epsilon:
        res.message = f"dbmo(w0) = {d0:.4g} exceeds the smallness gate {cfg.epsilon:.4g}"
        return res
    y = heat_flow(w0, times)

    def bilinear(a: Trajectory, b: Trajectory) -> Trajectory:
        return -1.0 * duhamel_bilinear(a, b, dealias=cfg.dealias)

    norm = lambda tr: xt_norm(tr, T)
    xt_y = norm(y)
    res.xt_y = xt_y
    problem = PicardProblem(y=y, bilinear=bilinear, norm=norm, gamma=eta,
                            secondary_norm=yt_norm)
    pic = picard_solve(problem, tol=cfg.picard_tol * max(xt_y, 1e-300),
                       max_iter=cfg.picard_max_iter)
    res.picard = pic
    res.status = pic.status
    if not pic.converged:
        res.message = pic.message
        return res
    res.ok = True
    res.w = pic.x
    res.xt_w = pic.norm_x
    res.ratio = pic.norm_x / d0 if d0 > 0.0 else np.inf
    res.residual = mild_residual(pic.x, w0, dealias=cfg.dealias)
    res.message = f"converged in {pic.iterations} iterations"
    return res


# -- local solve for the smooth part ---------------------------------------

@dataclass
class LocalResult:
    ok: bool
    status: str
    v: Trajectory | None = None
    picard: PicardResult | None = None
    eta: float = 0.0
    lam: float = 0.0
    xt_y: float = 0.0
    xt_w: float = 0.0
    yt_v: float = 0.0
    ratio_y: float = 0.0           # ||v||_Y / ||heat v0||_Y
    residual: float = np.inf
    message: str = ""


def solve_v_local(v0: FourierVectorField, w: Trajectory | None, cfg: SolverConfig, *,
                  t_final: float | None = None) -> LocalResult:
    """Mild solve of the perturbed equation for the smooth part v.

    v = e^{t Lap} v0 - B(v, w) - B(w, v) - B(v, v), with w a trajectory on
    the same nodes (or None for the plain equation).  The linear coupling
    enters the contraction gate through lam = 2 eta ||w||_X.
    """
    grid = cfg.grid()
    if v0.grid != grid:
        raise ValueError(f"initial data grid {v0.grid} does not match config {grid}")
    T = min(t_final if t_final is not None else cfg.t_final, cfg.t_max)
    times = cfg.times(T)
    eta, eta_source = cfg.eta("xt,xt", T)
    kappa, _ = cfg.eta("xt,yt", T)
    norm = lambda tr: xt_norm(tr, T)

    res = LocalResult(False, "refused", eta=eta)
    linear = None
    xt_w = 0.0
    if w is not None:
        if w.times.size != times.size or not np.allclose(w.times, times, rtol=0, atol=1e-12):
            raise ValueError("coupling trajectory must live on the config time nodes")
        xt_w = norm(w)
        res.xt_w = xt_w
        lam = 2.0 * eta * xt_w
        res.lam = lam
        if lam >= 1.0:
            res.message = f"coupling too large: 2*eta*||w||_X = {lam:.4g} >= 1"
            return res

        def linear(x: Trajectory) -> Trajectory:
            return -1.0 * (duhamel_bilinear(x, w, dealias=cfg.dealias)
                           + duhamel_bilinear(w, x, dealias=cfg.dealias))

    y = heat_flow(v0, times)
    xt_y = norm(y)
    res.xt_y = xt_y
    mu = 2.0 * kappa * xt_w
    problem = PicardProblem(y=y, bilinear=lambda a, b: -1.0 * duhamel_bilinear(a, b, dealias=cfg.dealias),
                            norm=norm, linear=linear, lam=res.lam, gamma=eta,
                            secondary_norm=yt_norm, mu=min(mu, 0.999), kappa=kappa)
    pic = picard_solve(problem, tol=cfg.picard_tol * max(xt_y, 1e-300),
                       max_iter=cfg.picard_max_iter)
    res.picard = pic
    res.status = pic.status
    if not pic.converged:
        res.message = pic.message
        return res
    res.ok = True
    res.v = pic.x
    res.yt_v = pic.secondary_norm_x if pic.secondary_norm_x is not None else yt_norm(pic.x)
    if pic.secondary_ratio is not None:
        res.ratio_y = pic.secondary_ratio
    res.residual = mild_residual(pic.x, v0, coupling=w, dealias=cfg.dealias)
    res.message = f"converged in {pic.iterations} iterations"
    return res


# -- energy continuation ---------------------------------------------------

@dataclass
class EnergyLedger:
    """Per-step energy bookkeeping of the continuation integrator.

    residual tracks | E(t) + 2 int |grad v|^2 + cross - E(t0) | / E(t0); the
    dissipation integral uses the exact per-mode value for the linear flow of
    each step plus an endpoint correction, so it is exact for pure heat decay
    and second-order accurate in general.
    """

    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray       # cumulative 2 * int ||grad v||_2^2
    cross: np.ndarray             # coupling exchange, cumulative -2 int <(v.grad)v, w>
    residual: np.ndarray

    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual)))


@dataclass
class ContinuationResult:
    ok: bool
    status: str
    trajectory: Trajectory | None = None
    ledger: EnergyLedger | None = None
    final: FourierVectorField | None = None
    steps: int = 0
    message: str = ""


def _l2sq(grid: Grid, coeffs: np.ndarray) -> float:
    return float(grid.side**2 * np.sum(coeffs.real**2 + coeffs.imag**2))


def _hdot1sq(grid: Grid, coeffs: np.ndarray) -> float:
    return float(grid.side**2 * np.sum(grid.ksq * (coeffs.real**2 + coeffs.imag**2)))


def _as_evaluator(w: Any, kind: str) -> Callable[[float], Any] | None:
    """Accept None, a callable of time, or a Trajectory (linear in between nodes)."""
    if w is None or callable(w):
        return w
    if isinstance(w, Trajectory):
        traj = w

        def evaluate(t: float):
            ts = traj.times
            if t <= ts[0]:
                return traj.field(0)
            if t >= ts[-1]:
                return traj.field(len(traj) - 1)
            i = int(np.searchsorted(ts, t, side="right")) - 1
            if abs(t - ts[i]) <= 1e-12 * max(1.0, abs(t)):
                return traj.field(i)
            theta = (t - ts[i]) / (ts[i + 1] - ts[i])
            c = (1.0 - theta) * traj.coeffs[i] + theta * traj.coeffs[i + 1]
            if kind == "scalar":
                return ScalarField(traj.grid, c, traj.mean_zero)
            return FourierVectorField(traj.grid, c, traj.divergence_free, traj.mean_zero)

        return evaluate
    raise TypeError(f"expected None, callable, or Trajectory, got {type(w).__name__}")


def energy_continuation(v_tau: FourierVectorField, w: Any, tau: float, t_end: float,
                        cfg: SolverConfig, *,
                        times: np.ndarray | None = None,
                        forcing: Any = None,
                        snapshot_times: np.ndarray | None = None) -> ContinuationResult:
    """March the smooth part from tau to t_end with an exponential integrator.

    Each step applies the exact heat factor and a Heun (two-stage, second
    order) correction for the explicit dealiased nonlinearity, including the
    coupling with the rough part w (None, a Trajectory, or a callable of
    time) and an optional potential forcing (same conventions, scalar).
    Snapshots of the state are stored at the requested times (default: all
    nodes if there are at most 200, else about 60 evenly spread).
    """
    grid = cfg.grid()
    if v_tau.grid != grid:
        raise ValueError("starting state grid does not match config")
    if not t_end > tau:
        raise ValueError(f"need t_end > tau, got tau={tau}, t_end={t_end}")
    w_at = _as_evaluator(w, "vector")
    forcing_at = _as_evaluator(forcing, "scalar")
    if times is None:
        times = np.linspace(tau, t_end, int(np.ceil((t_end - tau) / cfg.cont_dt)) + 1)
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size < 2 or not np.all(np.diff(times) > 0.0):
        raise ValueError("continuation needs strictly increasing time nodes")
    if abs(times[0] - tau) > 1e-12 or abs(times[-1] - t_end) > 1e-9:
        raise ValueError("explicit time nodes must span [tau, t_end]")

    def rhs(coeffs: np.ndarray, t: float) -> np.ndarray:
        v = FourierVectorField(grid, coeffs, True, True)
        q = nonlinear_term(v, v, dealias=cfg.dealias)
        if w_at is not None:
            wf = w_at(t)
            q = q + nonlinear_term(wf, v, dealias=cfg.dealias) \
                  + nonlinear_term(v, wf, dealias=cfg.dealias)
        out = -leray_project(q).coeffs
        if forcing_at is not None:
            out = out + leray_project(gradient(forcing_at(t))).coeffs
        return out

    def cross_rate(coeffs: np.ndarray, t: float) -> float:
        # energy exchange rate of the coupling: both advection terms reduce,
        # by parts, to -2 <(v.grad)v, w>, computed spectrally via Parseval
        if w_at is None:
            return 0.0
        v = FourierVectorField(grid, coeffs, True, True)
        q = nonlinear_term(v, v, dealias=cfg.dealias).coeffs
        wc = w_at(t).coeffs
        return float(-2.0 * grid.side**2 * np.sum(q.real * wc.real + q.imag * wc.imag))

    m = times.size - 1
    if snapshot_times is None:
        if times.size <= 200:
            snapshot_times = times
        else:
            snapshot_times = times[np.unique(np.linspace(0, m, 61).astype(int))]
    snap_idx = set(int(i) for i in np.searchsorted(times, snapshot_times))

    v = v_tau.coeffs.copy()
    e0 = _l2sq(grid, v)
    ksq = grid.ksq
    energy = [e0]
    diss = [0.0]
    cross = [0.0]
    resid = [0.0]
    snaps = []
    snap_t = []
    if 0 in snap_idx:
        snaps.append(v.copy())
        snap_t.append(times[0])
    d_cum = 0.0
    c_cum = 0.0
    rate_lo = cross_rate(v, times[0])
    for i in range(m):
        h = float(times[i + 1] - times[i])
        decay = np.exp(-ksq * h)
        k1 = rhs(v, float(times[i]))
        pred = decay * (v + h * k1)
        k2 = rhs(pred, float(times[i + 1]))
        v_next = decay * v + 0.5 * h * (decay * k1 + k2)
        if not np.all(np.isfinite(v_next.view(np.float64))):
            ledger = EnergyLedger(times[: i + 1], np.asarray(energy), np.asarray(diss),
                                  np.asarray(cross), np.asarray(resid))
            traj = _make_traj(grid, snap_t, snaps)
            return ContinuationResult(False, "failed", traj, ledger,
                                      FourierVectorField(grid, v, True, True), i,
                                      f"non-finite state at t = {times[i + 1]:.6g}")
        # dissipation: exact for the linear flow of v, endpoint-corrected
        vsq = v.real**2 + v.imag**2
        d_lin = float(grid.side**2 * np.sum(vsq * 0.5 * (1.0 - decay**2)))
        g_lin = float(grid.side**2 * np.sum(ksq * decay**2 * vsq))
        d_step = d_lin + 0.5 * h * (_hdot1sq(grid, v_next) - g_lin)
        d_cum += 2.0 * d_step
        rate_hi = cross_rate(v_next, float(times[i + 1]))
        c_cum += 0.5 * h * (rate_lo + rate_hi)
        rate_lo = rate_hi
        v = v_next
        e = _l2sq(grid, v)
        energy.append(e)
        diss.append(d_cum)
        cross.append(c_cum)
        resid.append((e + d_cum + c_cum - e0) / e0 if e0 > 0.0 else 0.0)
        if i + 1 in snap_idx:
            snaps.append(v.copy())
            snap_t.append(times[i + 1])
    ledger = EnergyLedger(times, np.asarray(energy), np.asarray(diss),
                          np.asarray(cross), np.asarray(resid))
    traj = _make_traj(grid, snap_t, snaps)
    return ContinuationResult(True, "ok", traj, ledger,
                              FourierVectorField(grid, v, True, True), m, "completed")


def _make_traj(grid: Grid, snap_t: list, snaps: list) -> Trajectory | None:
    if len(snaps) < 3:
        return None
    return Trajectory(grid, np.asarray(snap_t), np.stack(snaps), True, True)


# -- mild re-evaluation of a stored trajectory -----------------------------

class MildEvaluator:
    """Evaluate a mild solution at arbitrary times from its stored nodes.

    Recomputes w(t) = e^{t Lap} w0 - sum_j weight_j e^{-|k|^2 (t - t_j)} F_j
    with the solver's own trapezoid rule; a partial final interval uses a
    linearly interpolated integrand, so the evaluation reproduces the stored
    slices exactly at the stored nodes.
    """

    def __init__(self, w0: FourierVectorField, traj: Trajectory, *, dealias: bool = True):
        if w0.grid != traj.grid:
            raise ValueError("initial data and trajectory grids differ")
        self.grid = traj.grid
        self.w0 = w0
        self.times = traj.times
        self.sources = _projected_products(traj, traj, dealias)

    def __call__(self, t: float) -> FourierVectorField:
        t = float(t)
        if t < 0.0 or t > self.times[-1] + 1e-12:
            raise ValueError(f"time {t} outside stored range [0, {self.times[-1]}]")
        ksq = self.grid.ksq
        base = np.exp(-ksq * t) * self.w0.coeffs
        i_hi = int(np.searchsorted(self.times, t, side="right"))
        if i_hi >= self.times.size or abs(t - self.times[min(i_hi, self.times.size - 1)]) == 0.0:
            i_hi = min(i_hi, self.times.size - 1)
        if abs(t - self.times[i_hi - 1]) <= 1e-15 * max(1.0, t):
            nodes = self.times[:i_hi]
            srcs = self.sources[:i_hi]
        else:
            theta = (t - self.times[i_hi - 1]) / (self.times[i_hi] - self.times[i_hi - 1])
            s_end = (1.0 - theta) * self.sources[i_hi - 1] + theta * self.sources[i_hi]
            nodes = np.append(self.times[:i_hi], t)
            srcs = np.concatenate([self.sources[:i_hi], s_end[None]], axis=0)
        if nodes.size < 2:
            return FourierVectorField(self.grid, base, True, True)
        w = _trapezoid_weights(nodes, nodes.size - 1)
        acc = np.zeros_like(base)
        for j in range(nodes.size):
            acc += (w[j] * np.exp(-ksq * (t - nodes[j]))) * srcs[j]
        return FourierVectorField(self.grid, base - acc, True, True)


# -- global pipeline -------------------------------------------------------

@dataclass
class GlobalResult:
    ok: bool
    stage: str                     # split | small_data | local | continuation | ok
    split: SplitResult | None = None
    small: SmallDataResult | None = None
    local: LocalResult | None = None
    continuation: ContinuationResult | None = None
    u_times: np.ndarray | None = None
    u: Trajectory | None = None
    dbmo_series: np.ndarray | None = None
    growth_exponent: float = np.nan
    growth_prefactor: float = np.nan
    overlap_max_rel: float = np.nan
    message: str = ""


def _continuation_times(v_times: np.ndarray, tau_idx: int, t_end: float,
                        cfg: SolverConfig) -> np.ndarray:
    """Overlap nodes refine the mild grid; beyond it a uniform cont_dt grid."""
    pieces = []
    for a, b in zip(v_times[tau_idx:-1], v_times[tau_idx + 1:]):
        pieces.append(np.linspace(a, b, cfg.cont_substeps + 1)[:-1])
    t_loc = v_times[-1]
    pieces.append(np.asarray([t_loc]))
    if t_end > t_loc:
        extra = int(np.ceil((t_end - t_loc) / cfg.cont_dt))
        pieces.append(np.linspace(t_loc, t_end, extra + 1)[1:])
    return np.concatenate(pieces)


def solve_global(u0: FourierVectorField, cfg: SolverConfig,
                 forcing: Any = None, *,
                 t_end: float | None = None) -> GlobalResult:
    """Compose split, small-data solve, local solve and continuation.

    Produces the reassembled velocity u = v + w on the continuation snapshot
    times together with its dbmo series and a fitted power-law growth
    exponent.  Any stage failure is propagated with its stage tag.
    """
    t_end = cfg.t_max if t_end is None else min(t_end, cfg.t_max)
    res = GlobalResult(False, "split")
    split = split_initial_data(u0, cfg.epsilon, j_max=cfg.j_max)
    res.split = split
    if not split.ok:
        res.message = split.message
        return res

    small = solve_small_data(split.w0, cfg, t_final=t_end, check_dbmo_gate=False)
    res.small = small
    res.stage = "small_data"
    if not small.ok:
        res.message = small.message
        return res
    w_eval = MildEvaluator(split.w0, small.w, dealias=cfg.dealias)

    v_times = cfg.times(cfg.t_final)
    w_on_v = Trajectory.from_fields(v_times, [w_eval(t) for t in v_times])
    local = solve_v_local(split.v0, w_on_v, cfg)
    res.local = local
    res.stage = "local"
    if not local.ok:
        res.message = local.message
        return res

    tau_idx = int(np.argmin(np.abs(v_times - cfg.handoff * cfg.t_final)))
    tau_idx = max(1, min(tau_idx, v_times.size - 2))
    tau = float(v_times[tau_idx])
    cont_times = _continuation_times(v_times, tau_idx, t_end, cfg)
    overlap_mask = cont_times <= v_times[-1] + 1e-12
    snapshot_times = np.unique(np.concatenate([
        cont_times[overlap_mask][::max(1, cfg.cont_substeps)],
        np.linspace(v_times[-1], t_end, cfg.snapshots),
    ]))
    cont = energy_continuation(local.v.field(tau_idx), w_eval, tau,
                               float(cont_times[-1]), cfg, times=cont_times,
                               forcing=forcing, snapshot_times=snapshot_times)
    res.continuation = cont
    res.stage = "continuation"
    if not cont.ok:
        res.message = cont.message
        return res

    # overlap consistency: continuation snapshots vs the mild solution nodes
    overlap_rel = 0.0
    v_by_time = {round(float(t), 12): i for i, t in enumerate(v_times)}
    scale = max(cfg.side * float(np.sqrt(np.sum(np.abs(local.v.coeffs[i]) ** 2)))
                for i in range(len(local.v)))
    if scale == 0.0:
        scale = 1.0            # zero solution: report absolute differences
    for i, t in enumerate(cont.trajectory.times):
        j = v_by_time.get(round(float(t), 12))
        if j is None or t < tau:
            continue
        diff = cont.trajectory.coeffs[i] - local.v.coeffs[j]
        overlap_rel = max(overlap_rel, cfg.side * float(np.sqrt(np.sum(np.abs(diff) ** 2))) / scale)
    res.overlap_max_rel = overlap_rel

    # reassemble u = v + w on the merged output times
    out_t = []
    out_f = []
    for j in range(tau_idx + 1):
        out_t.append(float(v_times[j]))
        out_f.append(local.v.field(j) + w_on_v.field(j))
    for i, t in enumerate(cont.trajectory.times):
        if t <= tau:
            continue
        out_t.append(float(t))
        out_f.append(cont.trajectory.field(i) + w_eval(t))
    u_traj = Trajectory.from_fields(np.asarray(out_t), out_f)
    res.u = u_traj
    res.u_times = u_traj.times
    series = np.asarray([dbmo_norm(u_traj.field(i)) for i in range(len(u_traj))])
    res.dbmo_series = series

    # power-law growth fit of the running sup against 1 + t (final decade)
    run_sup = np.maximum.accumulate(series)
    tgrid = 1.0 + u_traj.times
    lo = tgrid[-1] / 10.0
    sel = tgrid >= lo
    slope, intercept = np.polyfit(np.log(tgrid[sel]), np.log(np.maximum(run_sup[sel], 1e-300)), 1)
    res.growth_exponent = float(slope)
    res.growth_prefactor = float(np.exp(intercept))
    res.ok = True
    res.stage = "ok"
    res.message = "pipeline completed"
    return res
