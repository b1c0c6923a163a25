"""Principal support vector machines for linear and nonlinear sufficient dimension reduction."""

__version__ = "0.1.0"

from .baselines import DirectionalRegression, SlicedAverageVariance, SlicedInverseRegression, fit_dr, fit_save, fit_sir
from .dataset import Dataset, SlicePair, make_slices, moments, read_csv, standardize
from .exceptions import DataError, NumericError, PSVMError
from .kernel import KernelPSVM, KernelSpec, build_basis, evaluate_predictor, fit_kernel, gamma_population, gamma_sample
from .linear import LinearPSVM, SdrFit, fit, project
from .metrics import quadratic_recovery_score, spearman_abs, subspace_distance
from .order import BicConfig, bic_select, cvbic
from .qp import DualProblem, solve_dual
from .serialize import load_fit, save_fit
from .simulate import ModelSpec, generate

__all__ = [
    "BicConfig",
    "DataError",
    "Dataset",
    "DirectionalRegression",
    "DualProblem",
    "KernelPSVM",
    "KernelSpec",
    "LinearPSVM",
    "ModelSpec",
    "NumericError",
    "PSVMError",
    "SdrFit",
    "SlicePair",
    "SlicedAverageVariance",
    "SlicedInverseRegression",
    "bic_select",
    "build_basis",
    "cvbic",
    "evaluate_predictor",
    "fit",
    "fit_dr",
    "fit_kernel",
    "fit_save",
    "fit_sir",
    "gamma_population",
    "gamma_sample",
    "generate",
    "load_fit",
    "make_slices",
    "moments",
    "project",
    "quadratic_recovery_score",
    "read_csv",
    "save_fit",
    "solve_dual",
    "spearman_abs",
    "standardize",
    "subspace_distance",
]
