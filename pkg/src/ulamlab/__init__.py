"""Numerical lab for Hyers-Ulam stability of the unified additive, quadratic,
cubic and quartic functional equation on ternary Banach algebras."""
from .algebra import ModuleStructure, TernaryAlgebra, check_algebra_axioms, check_module_axioms, frobenius
from .config import ExperimentConfig, load_config
from .control import ContractionCertificate, ControlFunction, bound_value, closed_form_bound, contraction_factor, fit_theta
from .estimator import StabilityExtractor
from .exceptions import ConfigError, StructuralError, UlamLabError, UnsupportedOperation
from .experiments import ExperimentReport, reference_config, run
from .fixedpoint import ExtractionConfig, apply_T, extract, generalized_metric, iterate_T, picard_diagnostics
from .funceq import Permutation3, coeff_c, delta_m, derivation_residual, residual_sup, sigma_hom_residual
from .maps import Defect, EvalGrid, MapSpec, Radial

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractionCertificate",
    "ControlFunction",
    "Defect",
    "EvalGrid",
    "ExperimentConfig",
    "ExperimentReport",
    "ExtractionConfig",
    "MapSpec",
    "ModuleStructure",
    "Permutation3",
    "Radial",
    "StabilityExtractor",
    "StructuralError",
    "TernaryAlgebra",
    "UlamLabError",
    "UnsupportedOperation",
    "apply_T",
    "bound_value",
    "check_algebra_axioms",
    "check_module_axioms",
    "closed_form_bound",
    "coeff_c",
    "contraction_factor",
    "delta_m",
    "derivation_residual",
    "extract",
    "fit_theta",
    "frobenius",
    "generalized_metric",
    "iterate_T",
    "load_config",
    "picard_diagnostics",
    "reference_config",
    "residual_sup",
    "run",
    "sigma_hom_residual",
]
