"""Numerical laboratory for de Branges spaces of Hermite-Biehler functions
and their Fock-type weighted norms."""
from .models import (HermiteBiehlerModel, ZeroFamily, Truncation, pw_model, finite_model,
                     power_model, ls_model, eval_theta, eval_E, phase_derivative, phase)
from .kernels import KernelEval, test_fn
from .levelset import LevelSetGeometry, d_eps, d_eps_interval, d0, distance_report, verify_lev_bounds
from .weights import IntervalCover, SpectralData, WeightField, whitney_cover, spectral_data
from .quadrature import NormReport, line_norm2, area_norm2, carleson_test, dyadic_intervals
from . import errors

__all__ = [
    "HermiteBiehlerModel", "ZeroFamily", "Truncation", "pw_model", "finite_model", "power_model",
    "ls_model", "eval_theta", "eval_E", "phase_derivative", "phase", "KernelEval", "test_fn",
    "LevelSetGeometry", "d_eps", "d_eps_interval", "d0", "distance_report", "verify_lev_bounds",
    "IntervalCover", "SpectralData", "WeightField", "whitney_cover", "spectral_data",
    "NormReport", "line_norm2", "area_norm2", "carleson_test", "dyadic_intervals", "errors",
]
