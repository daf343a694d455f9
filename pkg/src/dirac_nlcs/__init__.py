"""Landau levels and nonlinear coherent states of anisotropic 2D Dirac materials."""

from .config import RunConfig, StrainBlock
from .errors import ConfigError, NumericalError
from .fockalg import IDENTITY, SHIFTED_ONE, SHIFTED_TWO, DeformationFamily, deformed_annihilator
from .landau import (
    AnisotropyParams,
    density_maxima,
    eigenfunction,
    spectrum,
    spinor_state,
    strain_to_params,
)
from .nlcs import CoherentState, build_state, closed_form_norm, eigen_residual, occupation_distribution
from .observables import ObservableReport, density, mean_energy, uncertainty
from .runner import figure_recipe, run

__version__ = "0.1.0"

__all__ = [
    "AnisotropyParams",
    "CoherentState",
    "ConfigError",
    "DeformationFamily",
    "IDENTITY",
    "NumericalError",
    "ObservableReport",
    "RunConfig",
    "SHIFTED_ONE",
    "SHIFTED_TWO",
    "StrainBlock",
    "build_state",
    "closed_form_norm",
    "deformed_annihilator",
    "density",
    "density_maxima",
    "eigen_residual",
    "eigenfunction",
    "figure_recipe",
    "mean_energy",
    "occupation_distribution",
    "run",
    "spectrum",
    "spinor_state",
    "strain_to_params",
    "uncertainty",
]
