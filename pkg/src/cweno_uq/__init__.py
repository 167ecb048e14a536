"""Stochastic collocation surrogates: CWENO7 interpolation and gPC expansions."""

from cweno_uq.cweno import CwenoParameters, CwenoSurrogate1D, CwenoSurrogate2D, build_surrogate
from cweno_uq.experiments import RunOptions, reference_moments, run_example
from cweno_uq.gpc import GpcSurrogate, fit_gpc, fit_gpc_2d, gpc_moments
from cweno_uq.random_space import DistributionSpec, normal, uniform, uniform_grid
from cweno_uq.stats import cweno_moments, pdf_from_surrogate, pdf_l1_error, power_law_fit
from cweno_uq.swe import SweConfig, run_batch, run_dam_break

__version__ = "0.1.0"

__all__ = [
    "CwenoParameters",
    "CwenoSurrogate1D",
    "CwenoSurrogate2D",
    "DistributionSpec",
    "GpcSurrogate",
    "RunOptions",
    "SweConfig",
    "build_surrogate",
    "cweno_moments",
    "fit_gpc",
    "fit_gpc_2d",
    "gpc_moments",
    "normal",
    "pdf_from_surrogate",
    "pdf_l1_error",
    "power_law_fit",
    "reference_moments",
    "run_batch",
    "run_dam_break",
    "run_example",
    "uniform",
    "uniform_grid",
]
