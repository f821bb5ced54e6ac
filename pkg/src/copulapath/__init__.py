"""Path-analysis effect estimation via classical OLS and elliptical copulas.

The package estimates direct, indirect, and total causal effects of a path
model, comparing classical least squares against Gaussian and Student-t
copula regression, and ships a scenario driver that reproduces the
simulation and cross-validation study design at desk scale.
"""

from . import errors
from .copula import (
    CopulaSpec,
    CorrelationMatrix,
    Empirical,
    MarginalModel,
    Normal,
    StandardNormal,
    StudentT,
    gaussian_copula_density,
    marginal_cdf,
    marginal_quantile,
    partition,
    sample,
)
from .dataio import Dataset, prepare, read_csv, write_report
from .evaluation import (
    CvReport,
    FoldSplit,
    cross_validate,
    information_criteria,
    kfold_split,
    mse,
)
from .numerics import (
    KsResult,
    cholesky,
    ks_test_normal,
    pearson_correlation,
    solve_spd,
    standardize,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
    student_t_quantile,
)
from .patheffects import EffectDecomposition, decompose, verify_identity
from .regression import (
    McSettings,
    PathCoefficients,
    RegressionModel,
    fit,
    gaussian_closed_form,
    gaussian_copula_regression_mc,
    ols_fit,
    predict,
    t_common_rho_closed_form,
    t_copula_regression_mc,
)
from .simulation import (
    Scenario,
    ScenarioResult,
    builtin_scenarios,
    builtin_sigma,
    emit_tables,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "CopulaSpec",
    "CorrelationMatrix",
    "Empirical",
    "MarginalModel",
    "Normal",
    "StandardNormal",
    "StudentT",
    "gaussian_copula_density",
    "marginal_cdf",
    "marginal_quantile",
    "partition",
    "sample",
    "Dataset",
    "prepare",
    "read_csv",
    "write_report",
    "CvReport",
    "FoldSplit",
    "cross_validate",
    "information_criteria",
    "kfold_split",
    "mse",
    "KsResult",
    "cholesky",
    "ks_test_normal",
    "pearson_correlation",
    "solve_spd",
    "standardize",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "EffectDecomposition",
    "decompose",
    "verify_identity",
    "McSettings",
    "PathCoefficients",
    "RegressionModel",
    "fit",
    "gaussian_closed_form",
    "gaussian_copula_regression_mc",
    "ols_fit",
    "predict",
    "t_common_rho_closed_form",
    "t_copula_regression_mc",
    "Scenario",
    "ScenarioResult",
    "builtin_scenarios",
    "builtin_sigma",
    "emit_tables",
    "run_scenario",
]
