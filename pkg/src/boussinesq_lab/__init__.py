"""Good and modified Boussinesq simulations, Painleve IV transcendents and
checks of their long-time asymptotic formulas."""

from .asymptotics import (RegionConstants, RegionLabel, ScatteringParams, classify_region,
                          error_band, eval_gb_painleve, eval_mb_dispersive, eval_mb_painleve,
                          matching_discrepancy)
from .miura import MiuraVariant, gb_residual, miura_transform
from .painleve import (IKParams, PainleveSolution, PIVParams, appendix_reduction_check,
                       clarkson_mcleod_from_seed, extract_from_simulation, fit_transcendent,
                       integrate_ivp, its_kapaev_eval, model_residual, piv_rhs)
from .spectral import (FieldState, PeriodicGrid, StepperConfig, integrate, paper_gb, paper_mb,
                       rhs_gb, rhs_mb, spectral_derivative, suggest_dt)

__version__ = "0.1.0"

__all__ = [
    "FieldState", "IKParams", "MiuraVariant", "PIVParams", "PainleveSolution", "PeriodicGrid",
    "RegionConstants", "RegionLabel", "ScatteringParams", "StepperConfig",
    "appendix_reduction_check", "clarkson_mcleod_from_seed", "classify_region", "error_band",
    "eval_gb_painleve", "eval_mb_dispersive", "eval_mb_painleve", "extract_from_simulation",
    "fit_transcendent", "gb_residual", "integrate", "integrate_ivp", "its_kapaev_eval",
    "matching_discrepancy", "miura_transform", "model_residual", "paper_gb", "paper_mb",
    "piv_rhs", "rhs_gb", "rhs_mb", "spectral_derivative", "suggest_dt",
]
