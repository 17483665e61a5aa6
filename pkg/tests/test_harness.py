"""Verification harness: constant estimation, scaling/translation checks,
embedding chain, oscillation profiles, benchmarks, and family sweeps."""
import numpy as np
import pytest

from conftest import single_mode, single_scalar_mode, smooth_random_field
from ns2d import (
    ExperimentSpec,
    FourierVectorField,
    ScalarField,
    SolverConfig,
    bilinear_constant_table,
    embedding_chain_report,
    energy_continuation,
    estimate_bilinear_constant,
    heat_propagate,
    linear_oscillation_constant,
    random_divfree_field,
    small_data_family,
    taylor_green_benchmark,
    verify_energy_identity,
    verify_growth_exponent,
    verify_scaling_invariance,
    vmo_oscillation_profile,
)
from ns2d.harness import run_samples


# -- scaling and translation invariance --------------------------------------

def test_scaling_single_mode_exact(grid32):
    rep = verify_scaling_invariance(single_mode(grid32, 0.7))
    assert rep.passed
    for row in rep.rows:
        assert not row.skipped
        assert abs(row.ratio - 1.0) < 1e-12
        assert row.translation_delta < 1e-12


def test_scaling_random_field(grid32):
    f = random_divfree_field(grid32, 17, slope=2.0)
    rep = verify_scaling_invariance(f)
    assert rep.passed
    names = [r.norm for r in rep.rows]
    assert "dbmo" in names and "besov_critical_p4" in names


def test_scaling_zero_field_skipped(grid32):
    rep = verify_scaling_invariance(FourierVectorField.zero(grid32))
    assert rep.passed
    assert all(r.skipped for r in rep.rows)
    assert all(np.isnan(r.ratio) for r in rep.rows)


def test_scaling_unknown_norm_raises(grid32):
    with pytest.raises(ValueError, match="unknown norm"):
        verify_scaling_invariance(single_mode(grid32), norms=["h47"])


# -- embedding chain ---------------------------------------------------------

@pytest.fixture(scope="module")
def chain():
    return embedding_chain_report(count=20, n=32, seed=3)


def test_chain_passes(chain):
    assert chain.passed
    for pair in chain.pairs:
        assert np.isfinite(pair.max_ratio) and pair.max_ratio > 0.0
        assert 0.5 < pair.drift < 2.0
    for name, ax in chain.axioms.items():
        assert ax["ok"], name
        assert ax["homogeneity_max_dev"] <= 1e-12
        assert ax["triangle_max_excess"] <= 1e-12


def test_chain_l2_dominates_block_l2(chain):
    # the normalized two-block recombination is an l2 contraction of an l1
    # partition, so the first link's ratio stays below one
    first = chain.pairs[0]
    assert first.upstream == "l2"
    assert first.max_ratio < 1.0


def test_chain_serializes(chain):
    d = chain.to_dict()
    assert d["passed"] is True
    assert len(d["pairs"]) == len(chain.pairs)


# -- VMO oscillation profile -------------------------------------------------

def test_vmo_constant_is_oscillation_free(grid32):
    c = np.zeros((32, 32), np.complex128)
    c[0, 0] = 3.0
    prof = vmo_oscillation_profile(ScalarField.from_coeffs(grid32, c))
    assert float(np.max(prof.oscillation)) == 0.0


def test_vmo_profile_monotone_in_radius(grid32):
    prof = vmo_oscillation_profile(single_scalar_mode(grid32, 1.0, (2, 1)))
    # radii descend, and osc(rho) is a sup over all radii below rho
    assert np.all(np.diff(prof.radii) < 0.0)
    assert np.all(np.diff(prof.oscillation) <= 1e-15)
    assert np.all(prof.oscillation >= prof.per_radius - 1e-15)


def test_vmo_smooth_slope_matches_linear_oracle(grid32):
    # cos(x) has max|grad| = 1, so the small-radius oscillation slope is the
    # pure ramp geometry constant
    prof = vmo_oscillation_profile(single_scalar_mode(grid32, 1.0, (1, 0)))
    r = float(prof.radii[-1])
    slope = float(prof.per_radius[-1]) / r
    oracle = linear_oscillation_constant(grid32, r)
    assert abs(slope / oracle - 1.0) < 0.1
    assert prof.per_radius[-1] < prof.per_radius[0]   # vanishing at small radii


def test_vmo_jump_does_not_vanish(grid32):
    x = grid32.points
    half = np.where(x < grid32.side / 2.0, 1.0, -1.0)
    step = ScalarField.from_physical(grid32, half[None, :] * np.ones((32, 1)))
    prof = vmo_oscillation_profile(step)
    assert float(np.min(prof.oscillation)) > 0.5


# -- Taylor-Green benchmark --------------------------------------------------

def test_taylor_green_quick():
    cfg = SolverConfig(n=32, nodes=24, t_final=0.5)
    rep = taylor_green_benchmark(cfg, order_steps=30)
    assert rep.ok
    assert rep.max_rel_err_mild < 1e-12
    assert rep.max_rel_err_continuation < 1e-12
    assert rep.error_ratio > 3.5
    assert rep.order > 1.8


# -- small-data family -------------------------------------------------------

def test_small_data_family_quick():
    fam = small_data_family(count=4, cfg=SolverConfig(n=32, nodes=16), seed=2)
    assert fam.passed
    assert all(k <= 20 for k in fam.iterations)
    assert fam.max_rel_dev <= fam.band
    assert fam.rescale_rel_diff < 1e-10


# -- growth exponent sweep ---------------------------------------------------

def test_growth_sweep_structure():
    spec = ExperimentSpec("unit", seed=4, side=16.0 * np.pi, n=24, t_start=0.1,
                          t_final=2.0, steps=150, epsilons=(0.0, 0.05))
    rep = verify_growth_exponent(spec)
    assert rep.passed
    assert len(rep.exponents) == 2
    assert rep.zero_exponent_ok is True
    assert rep.monotone_ok
    assert set(rep.series) == {0.0, 0.05}
    assert all(np.isfinite(x) for x in rep.exponents)
    d = rep.to_dict()
    assert d["passed"] is True and d["params"]["name"] == "unit"


def test_growth_negative_epsilon_raises():
    spec = ExperimentSpec("bad", n=16, t_final=1.0, steps=20, epsilons=(-0.1,))
    with pytest.raises(ValueError, match="nonnegative"):
        verify_growth_exponent(spec)


def test_experiment_spec_validation():
    with pytest.raises(ValueError, match="name"):
        ExperimentSpec("")
    with pytest.raises(ValueError, match="non-empty"):
        ExperimentSpec("x", epsilons=())
    with pytest.raises(ValueError, match="t_start"):
        ExperimentSpec("x", t_start=2.0, t_final=1.0)


# -- bilinear constant estimation --------------------------------------------

def test_bilinear_validation():
    with pytest.raises(ValueError, match="at least 10"):
        bilinear_constant_table(9, 0.5, ["xt,xt"])
    with pytest.raises(ValueError, match="positive"):
        bilinear_constant_table(10, 0.0, ["xt,xt"])
    with pytest.raises(ValueError, match="unknown norm pair"):
        bilinear_constant_table(10, 0.5, ["xt,h].["])


def test_bilinear_prefix_monotone():
    # sample i is fully determined by (seed, i), so a larger sample count
    # keeps the earlier ratios and can only grow the max
    tab20 = bilinear_constant_table(20, 0.5, ["xt,xt", "xt,yt"], n=16, nodes=8, seed=9)
    tab10 = bilinear_constant_table(10, 0.5, ["xt,xt", "xt,yt"], n=16, nodes=8, seed=9)
    for pair in ("xt,xt", "xt,yt"):
        assert tab20[pair].ratios[:10] == tab10[pair].ratios
        assert tab20[pair].max_ratio >= tab10[pair].max_ratio
        assert tab10[pair].max_ratio > 0.0


def test_bilinear_wrapper_and_threads_agree():
    tab = bilinear_constant_table(10, 0.5, ["xt,xt"], n=16, nodes=8, seed=9)
    est = estimate_bilinear_constant(10, 0.5, "xt,xt", n=16, nodes=8, seed=9)
    assert est.max_ratio == tab["xt,xt"].max_ratio
    threaded = bilinear_constant_table(10, 0.5, ["xt,xt"], n=16, nodes=8, seed=9,
                                       threads=3)
    assert threaded["xt,xt"].ratios == tab["xt,xt"].ratios


def test_run_samples_keeps_order():
    assert run_samples(lambda x: x * x, [3, 1, 2], threads=2) == [9, 1, 4]
    assert run_samples(lambda x: x + 1, [1, 2], threads=1) == [2, 3]


# -- energy identity check ---------------------------------------------------

def test_verify_energy_identity_halving(grid32):
    cfg = SolverConfig(n=32, nodes=16)
    v = smooth_random_field(grid32, 0.3, 21)
    w0 = smooth_random_field(grid32, 0.2, 22)
    coupling = lambda t: heat_propagate(w0, t)
    runs = {m: energy_continuation(v, coupling, 0.2, 0.7, cfg,
                                   times=np.linspace(0.2, 0.7, m + 1))
            for m in (80, 160)}
    check = verify_energy_identity(runs[80], tolerance=1e-5, refined=runs[160])
    assert check.passed
    assert check.halving_ok and check.halving_ratio > 2.0
    assert check.max_residual < 1e-5
    strict = verify_energy_identity(runs[80], tolerance=1e-20)
    assert not strict.passed


def test_verify_energy_identity_exact_flow(grid32):
    cfg = SolverConfig(n=32, nodes=16)
    run = energy_continuation(single_mode(grid32, 0.7), None, 0.0, 1.0, cfg)
    check = verify_energy_identity(run.ledger, tolerance=1e-10)
    assert check.passed
    assert check.max_residual < 1e-12
    assert check.to_dict()["passed"] is True
