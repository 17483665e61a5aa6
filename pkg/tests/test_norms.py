"""Norm layer: closed forms, dense brute-force oracles, structural axioms.

Golden values are frozen per (side, n) for the reference single mode
u = (0, 0.7 cos x); the dense oracles re-evaluate the defining sup/integral
structure on much finer search grids, written independently of the library's
masked-FFT shortcut.
"""
import numpy as np
import pytest

from conftest import single_mode, single_scalar_mode

from ns2d import (FourierVectorField, Grid, ScalarField, Trajectory,
                  besov_norm, bmo_grad_norm, carleson_norm, dbmo_norm,
                  gradient, graded_times, heat_flow, heat_propagate,
                  hdot1_norm, lebesgue_norm, lpt_lqx_norm, random_divfree_field,
                  random_scalar_field, shell_weight, xt_norm, yt_norm, z_norm)
from ns2d.dyadic import active_shells

A = 0.7  # amplitude of the reference mode

# frozen regression values for the reference mode, keyed by n (side 2*pi)
DBMO_GOLDEN = {32: 0.3874720991076382, 64: 0.3872976571942284}


# -- Lebesgue / Sobolev ----------------------------------------------------

def test_lebesgue_zero(grid32):
    assert lebesgue_norm(FourierVectorField.zero(grid32), 2.0) == 0.0
    assert lebesgue_norm(FourierVectorField.zero(grid32), np.inf) == 0.0


def test_lebesgue_single_mode_closed_forms(cos_mode):
    # ||a cos x||_2 = a sqrt(L^2/2) = a sqrt(2 pi^2) on the 2-pi torus
    assert lebesgue_norm(cos_mode, 2.0) == pytest.approx(A * np.sqrt(2.0 * np.pi**2), rel=1e-13)
    # the grid hits x = 0 so the max is exact here
    assert lebesgue_norm(cos_mode, np.inf) == pytest.approx(A, rel=1e-12)
    # L4 of cos: (L^2 * 3/8)^(1/4) analytic factor
    want = A * (2.0 * np.pi) ** 0.5 * (3.0 / 8.0) ** 0.25
    assert lebesgue_norm(cos_mode, 4.0) == pytest.approx(want, rel=1e-12)


def test_lebesgue_rejects_bad_p(cos_mode):
    with pytest.raises(ValueError):
        lebesgue_norm(cos_mode, 0.0)
    with pytest.raises(ValueError):
        lebesgue_norm(cos_mode, -2.0)


def test_hdot1_single_mode(cos_mode):
    # multiplier |k| = 1 makes the seminorm equal the L2 norm
    assert hdot1_norm(cos_mode) == pytest.approx(lebesgue_norm(cos_mode, 2.0), rel=1e-13)


def test_hdot1_matches_gradient_l2(grid32):
    for seed in range(5):
        f = random_scalar_field(grid32, seed)
        assert hdot1_norm(f) == pytest.approx(lebesgue_norm(gradient(f), 2.0), rel=1e-12)


# -- Besov -----------------------------------------------------------------

def test_besov_zero(grid32):
    assert besov_norm(FourierVectorField.zero(grid32), 0.0, 2.0, 2.0) == 0.0


def test_besov_single_mode_block_recombination(grid32, cos_mode):
    # the |k| = 1 ring meets <= 2 shells with weights w_j summing to 1;
    # the s=0, p=q=2 norm recombines them in l2: ||f||_2 sqrt(sum w_j^2)
    w = [shell_weight(grid32, j)[1, 0] for j in active_shells(grid32)]
    want = lebesgue_norm(cos_mode, 2.0) * np.sqrt(sum(x * x for x in w))
    assert besov_norm(cos_mode, 0.0, 2.0, 2.0) == pytest.approx(want, rel=1e-12)


def test_besov_qinf_is_sup_over_shells(grid32, cos_mode):
    vals = [2.0 ** (-j) * lebesgue_norm(
            FourierVectorField(grid32, cos_mode.coeffs * shell_weight(grid32, j)), np.inf)
            for j in active_shells(grid32)]
    assert besov_norm(cos_mode, -1.0, np.inf, np.inf) == pytest.approx(max(vals), rel=1e-13)


def test_besov_homogeneity(grid32):
    u = random_divfree_field(grid32, 0)
    a = besov_norm(u, -0.5, 4.0, 4.0)
    b = besov_norm(3.0 * u, -0.5, 4.0, 4.0)
    assert b == pytest.approx(3.0 * a, rel=1e-12)


# -- Carleson / dbmo -------------------------------------------------------

def test_carleson_zero(grid32):
    c = np.zeros((4, 2, 32, 32), np.complex128)
    traj = Trajectory(grid32, np.linspace(0.0, 1.0, 4), c)
    assert carleson_norm(traj) == 0.0


def test_carleson_constant_trajectory_closed_form(grid32):
    # spatially constant |u| = c for all t: value is c sqrt(T), hit at R = sqrt(T)
    cval, T = 0.45, 2.0
    c = np.zeros((5, 2, 32, 32), np.complex128)
    c[:, 0, 0, 0] = cval
    traj = Trajectory(grid32, np.linspace(0.0, T, 5), c)
    assert carleson_norm(traj) == pytest.approx(cval * np.sqrt(T), rel=1e-13)


def test_carleson_requires_zero_start(grid32):
    c = np.zeros((4, 2, 32, 32), np.complex128)
    with pytest.raises(ValueError):
        carleson_norm(Trajectory(grid32, [0.1, 0.5, 0.8, 1.0], c))


def test_carleson_t_final_validated(grid32):
    c = np.zeros((4, 2, 32, 32), np.complex128)
    traj = Trajectory(grid32, np.linspace(0.0, 1.0, 4), c)
    with pytest.raises(ValueError):
        carleson_norm(traj, 2.0)


def dense_carleson(traj, T, n_r=40, t_sub=12):
    """Dense independent evaluation: all centers, dense radii, refined time."""
    g = traj.grid
    n = g.n
    x = g.points
    d = np.minimum(x, g.side - x)
    dist = np.sqrt(d[:, None] ** 2 + d[None, :] ** 2)
    mags = []
    for i in range(len(traj)):
        s = np.fft.ifft2(traj.coeffs[i], axes=(-2, -1)).real * n * n
        mags.append(s[0] ** 2 + s[1] ** 2)
    mags = np.stack(mags)
    hats = np.stack([np.fft.fft2(m) for m in mags])
    sup = 0.0
    for R in np.linspace(np.sqrt(T) / n_r, np.sqrt(T), n_r):
        mask = (dist <= R).astype(float)
        mh = np.fft.fft2(mask / mask.sum())
        avg = np.stack([np.fft.ifft2(hats[i] * mh).real for i in range(len(traj))])
        tt = np.linspace(0.0, R * R, t_sub * len(traj))
        flat = avg.reshape(len(traj), -1)
        interp = np.stack([np.interp(tt, traj.times, flat[:, j])
                           for j in range(flat.shape[1])], axis=1)
        sup = max(sup, float(np.max(np.trapezoid(interp, x=tt, axis=0))))
    return float(np.sqrt(sup))


def test_carleson_heat_mode_vs_dense_oracle(grid32):
    u = single_mode(grid32)
    traj = heat_flow(u, graded_times(1.0, 24))
    impl = carleson_norm(traj)
    oracle = dense_carleson(traj, 1.0)
    assert abs(impl - oracle) / oracle < 0.02


def test_dbmo_zero(grid32):
    assert dbmo_norm(FourierVectorField.zero(grid32)) == 0.0


@pytest.mark.parametrize("n", [32, 64])
def test_dbmo_single_mode_golden(n):
    g = Grid(2.0 * np.pi, n)
    assert dbmo_norm(single_mode(g)) == pytest.approx(DBMO_GOLDEN[n], rel=1e-12)


def dense_dbmo(f, n_r=24, n_t=160):
    """Dense (x, R, t) evaluation of the heat-extension Carleson sup."""
    g = f.grid
    n = g.n
    x = g.points
    d = np.minimum(x, g.side - x)
    dist = np.sqrt(d[:, None] ** 2 + d[None, :] ** 2)
    sup = 0.0
    for R in np.linspace(g.side / 2 / n_r, g.side / 2, n_r):
        mask = (dist <= R).astype(float)
        mh = np.fft.fft2(mask / mask.sum())
        tt = np.linspace(0.0, R * R, n_t)
        vals = []
        for t in tt:
            s = np.fft.ifft2(f.coeffs * np.exp(-g.ksq * t), axes=(-2, -1)).real * n * n
            vals.append(np.fft.ifft2(np.fft.fft2(s[0] ** 2 + s[1] ** 2) * mh).real)
        sup = max(sup, float(np.max(np.trapezoid(np.stack(vals), x=tt, axis=0))))
    return float(np.sqrt(sup))


def test_dbmo_vs_dense_oracle(grid32):
    # the default discrete sup is a lower bound of the dense sup; the gap on
    # the smooth reference mode stays below 8% (measured 5.6%)
    u = single_mode(grid32)
    impl = dbmo_norm(u)
    oracle = dense_dbmo(u)
    assert impl <= oracle * (1.0 + 1e-9)
    assert abs(impl - oracle) / oracle < 0.08


def test_dbmo_heat_monotone(grid32):
    u = single_mode(grid32)
    base = dbmo_norm(u)
    for t in (0.01, 0.1, 1.0):
        assert dbmo_norm(heat_propagate(u, t)) <= base * (1.0 + 1e-6)


def test_dbmo_refinement_monotone(grid32):
    # enlarging the search grid (radii, centers) can only raise a discrete sup
    for seed in range(4):
        f = random_divfree_field(grid32, seed, amplitude=0.5)
        base = dbmo_norm(f)
        fine = dbmo_norm(f, r_levels=10, center_stride=2)
        assert fine >= base * (1.0 - 1e-9)
        assert abs(fine - base) / base < 0.05  # rough fields drift a few percent
    u = single_mode(grid32)
    assert abs(dbmo_norm(u, r_levels=10, center_stride=2) - dbmo_norm(u)) / dbmo_norm(u) < 0.02


def test_bmo_grad_constant_is_zero(grid32):
    c = np.zeros((32, 32), np.complex128)
    c[0, 0] = 2.0
    assert bmo_grad_norm(ScalarField(grid32, c)) == 0.0


def test_bmo_grad_dominates_gradient_components(grid32):
    # dbmo of each partial derivative is bounded by the BMO-type norm of f
    for seed in range(10):
        f = random_scalar_field(grid32, seed)
        bg = bmo_grad_norm(f)
        gr = gradient(f)
        for comp in range(2):
            part = ScalarField(grid32, gr.coeffs[comp])
            assert dbmo_norm(part) <= bg * (1.0 + 1e-9)


# -- mixed-time norms ------------------------------------------------------

def test_xt_zero(grid32):
    c = np.zeros((4, 2, 32, 32), np.complex128)
    assert xt_norm(Trajectory(grid32, np.linspace(0.0, 1.0, 4), c)) == 0.0


def test_xt_heat_mode_closed_form(grid32):
    # sup sqrt(t) a e^{-t} = a/sqrt(2e), sup t a e^{-t} = a/e; Carleson term
    # taken from the implementation (its own oracle test is above)
    u = single_mode(grid32)
    traj = heat_flow(u, graded_times(10.0, 64))
    want = A / np.sqrt(2.0 * np.e) + A / np.e + carleson_norm(traj)
    assert xt_norm(traj) == pytest.approx(want, rel=5e-3)


def test_yt_heat_mode_closed_form(grid32):
    # sup ||u||_2 = ||u0||_2 at t = 0; sup sqrt(t)||grad u||_2 = ||u0||_2/sqrt(2e)
    u = single_mode(grid32)
    traj = heat_flow(u, graded_times(10.0, 64))
    l2 = lebesgue_norm(u, 2.0)
    assert yt_norm(traj) == pytest.approx(l2 * (1.0 + 1.0 / np.sqrt(2.0 * np.e)), rel=5e-3)


def test_lpt_lqx_time_constant_factorizes(grid32):
    u = single_mode(grid32)
    T = 2.0
    times = np.linspace(0.0, T, 9)
    traj = Trajectory(grid32, times, np.broadcast_to(u.coeffs, (9, 2, 32, 32)).copy())
    for p, q in ((4.0, 4.0), (2.0, 2.0), (1.0, 4.0)):
        want = T ** (1.0 / p) * lebesgue_norm(u, q)
        assert lpt_lqx_norm(traj, p, q) == pytest.approx(want, rel=1e-12)
    # p = inf reduces to the sup over nodes
    assert lpt_lqx_norm(traj, np.inf, 4.0) == pytest.approx(lebesgue_norm(u, 4.0), rel=1e-12)


def test_z_norm_single_mode_terms(grid32):
    # V = c e^{-t} cos(x): the t ||V||_inf term peaks at c/e; check the total
    # against an independent per-term recomputation
    cval = 0.8
    times = graded_times(10.0, 64)
    base = np.zeros((32, 32), np.complex128)
    base[1, 0] = 0.5 * cval
    base[-1, 0] = 0.5 * cval
    coeffs = np.stack([(base * np.exp(-t))[None] for t in times])
    V = Trajectory(grid32, times, coeffs)
    zn = z_norm(V)

    term2 = max(t * cval * np.exp(-t) for t in times)  # grid max of |cos| is 1
    assert term2 == pytest.approx(cval / np.e, rel=5e-3)
    term3 = max(t**1.5 * cval * np.exp(-t) for t in times)
    assert zn > term2 + term3  # the L1-Carleson term is strictly positive here
    # 1-homogeneity is exact
    assert z_norm(2.0 * V) == pytest.approx(2.0 * zn, rel=1e-13)


def test_z_norm_rejects_vector_input(grid32):
    c = np.zeros((4, 2, 32, 32), np.complex128)
    with pytest.raises(ValueError):
        z_norm(Trajectory(grid32, np.linspace(0.0, 1.0, 4), c))


# -- axioms ----------------------------------------------------------------

def test_triangle_inequality_and_homogeneity(grid32):
    norms = [
        lambda f: lebesgue_norm(f, 2.0),
        lambda f: lebesgue_norm(f, 4.0),
        hdot1_norm,
        lambda f: besov_norm(f, 0.0, 2.0, 2.0),
        dbmo_norm,
    ]
    for seed in range(5):
        u = random_divfree_field(grid32, seed)
        v = random_divfree_field(grid32, seed + 50)
        for norm in norms:
            nu, nv, nuv = norm(u), norm(v), norm(u + v)
            assert nuv <= nu + nv + 1e-9
            assert norm(2.5 * u) == pytest.approx(2.5 * nu, rel=1e-11)
