"""Spectral toolkit for 2D incompressible flow on the torus.

Layers: spectral core (grids, fields, operators, dyadic analysis), norms,
mild/energy solvers, a measurement harness, and reporting; the ``ns`` CLI
drives batch runs.
"""

__version__ = "0.1.0"

from .grid import Grid
from .fields import (FourierVectorField, ScalarField, hermitian_symmetrize,
                     load_field, save_field)
from .operators import (divergence, gradient, heat_propagate, leray_project,
                        nonlinear_term, to_physical, to_spectral)
from .dyadic import active_shells, dyadic_block, dyadic_rescale, shell_weight
from .trajectory import (Trajectory, graded_times, heat_flow, load_trajectory,
                         save_trajectory)
from .norms import (NormReport, besov_norm, bmo_grad_norm, carleson_norm,
                    dbmo_norm, hdot1_norm, lebesgue_norm, lpt_lqx_norm,
                    xt_norm, yt_norm, z_norm)
from .picard import PicardProblem, PicardResult, picard_solve
from .duhamel import duhamel_bilinear, force_duhamel, mild_residual
from .randfields import random_divfree_field, random_scalar_field, taylor_green
from .calibration import DEFAULT_CONSTANTS, load_constant, write_calibration
from .solver import (ContinuationResult, EnergyLedger, GlobalResult,
                     LocalResult, SmallDataResult, SolverConfig, SplitResult,
                     energy_continuation, solve_global, solve_small_data,
                     solve_v_local, split_initial_data)
from .harness import (BilinearEstimate, ChainReport, EnergyCheck,
                      ExperimentSpec, FamilyReport, GrowthReport,
                      ScalingReport, TaylorGreenReport, VmoProfile,
                      bilinear_constant_table, embedding_chain_report,
                      estimate_bilinear_constant, linear_oscillation_constant,
                      small_data_family, taylor_green_benchmark,
                      verify_energy_identity, verify_growth_exponent,
                      verify_scaling_invariance, vmo_oscillation_profile)
from .reports import RunManifest, write_json, write_norm_reports, write_series_csv

__all__ = [
    "Grid", "FourierVectorField", "ScalarField", "hermitian_symmetrize",
    "save_field", "load_field", "to_physical", "to_spectral", "gradient",
    "divergence", "leray_project", "heat_propagate", "nonlinear_term",
    "dyadic_block", "dyadic_rescale", "active_shells", "shell_weight",
    "Trajectory", "graded_times", "heat_flow", "save_trajectory",
    "load_trajectory", "NormReport", "lebesgue_norm", "hdot1_norm",
    "besov_norm", "carleson_norm", "dbmo_norm", "bmo_grad_norm", "xt_norm",
    "yt_norm", "lpt_lqx_norm", "z_norm", "PicardProblem", "PicardResult",
    "picard_solve", "duhamel_bilinear", "force_duhamel", "mild_residual",
    "random_divfree_field", "random_scalar_field", "taylor_green",
    "DEFAULT_CONSTANTS", "load_constant", "write_calibration",
    "SolverConfig", "SplitResult", "SmallDataResult", "LocalResult",
    "EnergyLedger", "ContinuationResult", "GlobalResult",
    "split_initial_data", "solve_small_data", "solve_v_local",
    "energy_continuation", "solve_global", "ExperimentSpec",
    "BilinearEstimate", "bilinear_constant_table",
    "estimate_bilinear_constant", "EnergyCheck",
    "verify_energy_identity", "GrowthReport", "verify_growth_exponent",
    "ScalingReport", "verify_scaling_invariance", "ChainReport",
    "embedding_chain_report", "VmoProfile", "vmo_oscillation_profile",
    "linear_oscillation_constant",
    "TaylorGreenReport", "taylor_green_benchmark", "FamilyReport",
    "small_data_family", "RunManifest", "write_json", "write_norm_reports",
    "write_series_csv",
]
