"""Verification harness: Monte Carlo estimators and deterministic checks."""

from .estimators import (
    exact_circle_check,
    radius_law_check,
    reduction_checks,
    scaling_exponent_check,
    composed_decomposition_check,
    estimate_error_norms,
    fit_power_law,
    gamma_tail_check,
    ggauss_error_batch,
    linf_expectation_check,
    linf_union_check,
    lq_chain_check,
    linf_tail_check,
    mean_l1_error,
    negative_association_check,
    privacy_loss_tail,
    sphere_cap_check,
    sv_accuracy_check,
    sv_tail_check,
)
from .quadrature import (
    SubGammaSpec,
    ggamma_expectation,
    ggamma_moment_check,
    mgf_subgamma_check,
    mu_bounds_check,
)
from .verdicts import ErrorReport, NormSummary, Verdict

__all__ = [
    "ErrorReport",
    "NormSummary",
    "SubGammaSpec",
    "Verdict",
    "composed_decomposition_check",
    "estimate_error_norms",
    "exact_circle_check",
    "radius_law_check",
    "reduction_checks",
    "scaling_exponent_check",
    "fit_power_law",
    "gamma_tail_check",
    "ggamma_expectation",
    "ggamma_moment_check",
    "ggauss_error_batch",
    "linf_expectation_check",
    "linf_union_check",
    "lq_chain_check",
    "linf_tail_check",
    "mean_l1_error",
    "mgf_subgamma_check",
    "mu_bounds_check",
    "negative_association_check",
    "privacy_loss_tail",
    "sphere_cap_check",
    "sv_accuracy_check",
    "sv_tail_check",
]
