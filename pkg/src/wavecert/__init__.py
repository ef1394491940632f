"""Certified uniform error bounds for truncated wavelet expansions of
stationary Gaussian processes: Meyer wavelet machinery, spectral models,
the explicit constant ledger, tail certificates, truncation planning, and
exact joint Monte Carlo verification."""

__version__ = "0.1.0"

from .bounds import (ExpansionPlan, TailBound, TailProbability, delta,
                     entropy_integral, epsilon_plan, select_plan, sigma,
                     sigma_inv, tail_bound, tail_bound_for)
from .constants import (BoundConstants, assemble, compute_Q1, compute_c_alpha,
                        compute_spectral_constants, compute_wavelet_integrals,
                        default_delta_q)
from .errors import (ConditionFailure, ConfigError, FactorizationError,
                     InfeasiblePlanError, WavecertError)
from .simulate import (CoefficientIndex, JointGaussianSpec, VerificationReport,
                       basis_matrix, build_joint, coef_cov, covariance_decay_check,
                       empirical_tail, mean_square_profile, plan_indices,
                       reconstruct, sample_joint)
from .spectral import (DecayTag, SpectralModel, autocovariance,
                       check_spectral_conditions, gaussian_mixture_model,
                       gaussian_model, scale_model, tabulated_model)
from .wavelet import (ConditionEntry, ConditionReport, WaveletPair, check_conditions,
                      eval_basis, gram_matrix, make_meyer)

__all__ = [
    "__version__",
    "ExpansionPlan", "TailBound", "TailProbability", "delta", "entropy_integral",
    "epsilon_plan", "select_plan", "sigma", "sigma_inv", "tail_bound",
    "tail_bound_for",
    "BoundConstants", "assemble", "compute_Q1", "compute_c_alpha",
    "compute_spectral_constants", "compute_wavelet_integrals", "default_delta_q",
    "ConditionFailure", "ConfigError", "FactorizationError", "InfeasiblePlanError",
    "WavecertError",
    "CoefficientIndex", "JointGaussianSpec", "VerificationReport", "basis_matrix",
    "build_joint", "coef_cov", "covariance_decay_check", "empirical_tail",
    "mean_square_profile", "plan_indices", "reconstruct", "sample_joint",
    "DecayTag", "SpectralModel", "autocovariance", "check_spectral_conditions",
    "gaussian_mixture_model", "gaussian_model", "scale_model", "tabulated_model",
    "ConditionEntry", "ConditionReport", "WaveletPair", "check_conditions",
    "eval_basis", "gram_matrix", "make_meyer",
]
