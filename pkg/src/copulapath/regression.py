"""Structural regression fits: classical OLS and copula conditional means.

Two families of estimators share one model object:

* classical least squares (covariance-scale slopes plus an intercept);
* copula-based conditional means, where each covariate is pushed through
  its fitted marginal CDF, mapped to the latent elliptical scale, and the
  conditional expectation of Y is either evaluated in closed form (when
  the Y-side transform is affine, which covers normal marginals under the
  Gaussian copula) or by Monte Carlo averaging.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .copula import (
    PROB_CLAMP,
    CorrelationMatrix,
    Empirical,
    MarginalModel,
    Normal,
    StandardNormal,
    StudentT,
    derived_rng,
    partition,
)
from .dataio import Dataset
from .errors import (
    DegenerateConditional,
    DimensionMismatch,
    MissingColumn,
    NotPositiveDefinite,
    SchemaMismatch,
    SingularDesign,
)
from .numerics import pearson_correlation, solve_spd

__all__ = [
    "METHODS",
    "PathCoefficients",
    "McSettings",
    "RegressionModel",
    "ols_fit",
    "gaussian_closed_form",
    "fit",
    "gaussian_copula_regression_mc",
    "t_copula_regression_mc",
    "t_common_rho_closed_form",
    "predict",
]

METHODS = ("classical", "gaussian_copula", "t_copula")


@dataclass(frozen=True)
class PathCoefficients:
    """Slope vector (P_1..P_p) of the structural equation.

    ``intercept`` is ~0 for standardized fits. ``nu`` is set only for the
    Student-t copula method.
    """

    values: np.ndarray
    intercept: float = 0.0
    method: str = "classical"
    nu: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or not np.all(np.isfinite(vals)):
            raise ValueError("coefficients must be a finite 1-d vector")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def p(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class McSettings:
    n_draws: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.n_draws < 1:
            raise ValueError("n_draws must be positive")


@dataclass(frozen=True)
class RegressionModel:
    """Everything a prediction needs, fitted on one training sample."""

    coefficients: PathCoefficients
    marginals: tuple[MarginalModel, ...]
    sigma_hat: CorrelationMatrix
    names: tuple[str, ...]
    mc_settings: McSettings = field(default_factory=McSettings)

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.marginals) != self.sigma_hat.dim:
            raise DimensionMismatch("one marginal per variable is required")
        if len(self.names) != self.sigma_hat.dim:
            raise DimensionMismatch("one name per variable is required")

    @property
    def p(self) -> int:
        return self.sigma_hat.dim - 1


def _select(data: Dataset, endogenous, exogenous) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    if endogenous is None:
        endogenous = data.endogenous
    names = tuple(exogenous) if exogenous is not None else data.exogenous
    y = data.column(endogenous)
    x = np.column_stack([data.column(name) for name in names])
    return y, x, (endogenous,) + names


def ols_fit(data: Dataset, endogenous: str | None = None, exogenous=None) -> PathCoefficients:
    """Least-squares fit of Y on the exogenous columns (intercept included).

    Solved through the covariance normal equations, so for standardized
    data the slopes equal the correlation-based solution Sigma_X^-1 rho
    and the intercept vanishes.
    """
    y, x, _ = _select(data, endogenous, exogenous)
    n, p = x.shape
    if n <= p:
        raise ValueError(f"need more rows ({n}) than regressors ({p})")
    xc = x - x.mean(axis=0)
    yc = y - y.mean()
    cov_x = xc.T @ xc / (n - 1)
    cov_xy = xc.T @ yc / (n - 1)
    try:
        beta = solve_spd(cov_x, cov_xy)
    except NotPositiveDefinite as err:
        raise SingularDesign(f"collinear design: {err}") from err
    intercept = float(y.mean() - x.mean(axis=0) @ beta)
    return PathCoefficients(values=beta, intercept=intercept, method="classical")


def gaussian_closed_form(rho, sigma_x: CorrelationMatrix) -> PathCoefficients:
    """Path coefficients solving the normal equations Sigma_X P = rho."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1 or rho.size != sigma_x.dim:
        raise DimensionMismatch(
            f"rho of length {rho.size} for Sigma_X of dimension {sigma_x.dim}"
        )
    values = solve_spd(sigma_x.values, rho)
    return PathCoefficients(values=values, intercept=0.0, method="gaussian_copula")


def _fit_marginal(column: np.ndarray, kind: str, nu: float | None) -> MarginalModel:
    mean = float(column.mean())
    sd = float(column.std(ddof=1))
    if kind == "normal":
        return Normal(mean, sd)
    if kind == "standard_normal":
        return StandardNormal()
    if kind == "student_t":
        if nu is None or nu <= 2:
            raise ValueError("student_t marginals need nu > 2 to match the sample scale")
        return StudentT(nu, mean, sd * np.sqrt((nu - 2.0) / nu))
    if kind == "empirical":
        return Empirical(column)
    raise ValueError(f"unknown marginal kind {kind!r}")


def fit(
    data: Dataset,
    method: str = "classical",
    endogenous: str | None = None,
    exogenous=None,
    nu: float | None = None,
    mc_settings: McSettings | None = None,
    marginal_kind: str = "normal",
) -> RegressionModel:
    """Fit one method on (typically standardized) training data.

    Marginals and the correlation matrix are always estimated, whatever the
    method, so effect decompositions and copula predictions share one
    train-fitted Sigma-hat.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "t_copula":
        if nu is None or nu <= 1:
            raise ValueError("t_copula requires nu > 1 (conditional mean must exist)")
    y, x, names = _select(data, endogenous, exogenous)
    stacked = np.column_stack([y, x])
    sigma_hat = pearson_correlation(stacked)
    marginals = tuple(
        _fit_marginal(stacked[:, j], marginal_kind, nu) for j in range(stacked.shape[1])
    )
    ordered = Dataset(names=names, columns=stacked)
    if method == "classical":
        coefficients = ols_fit(ordered)
    else:
        rho, sigma_x = partition(sigma_hat)
        try:
            base = gaussian_closed_form(rho, sigma_x)
        except NotPositiveDefinite as err:
            raise SingularDesign(f"collinear design: {err}") from err
        coefficients = PathCoefficients(
            values=base.values, intercept=0.0, method=method, nu=nu
        )
    return RegressionModel(
        coefficients=coefficients,
        marginals=marginals,
        sigma_hat=sigma_hat,
        names=names,
        mc_settings=mc_settings or McSettings(),
    )


# ---------------------------------------------------------------------------
# conditional-mean machinery
# ---------------------------------------------------------------------------


def _clamp(p):
    return np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)


def _conditional_parts(model: RegressionModel) -> tuple[np.ndarray, CorrelationMatrix, float]:
    """Slope vector b = Sigma_X^-1 rho and conditional variance 1 - rho'b."""
    rho, sigma_x = partition(model.sigma_hat)
    b = solve_spd(sigma_x.values, rho)
    explained = float(rho @ b)
    if explained > 1.0 + 1e-8:
        raise DegenerateConditional(
            f"rho' Sigma_X^-1 rho = {explained:.6g} exceeds 1; correlations inconsistent"
        )
    return b, sigma_x, max(0.0, 1.0 - explained)


def _latent_scores(model: RegressionModel, x: np.ndarray, link_nu: float | None) -> np.ndarray:
    """Map covariate rows through the fitted marginal CDFs to latent scores."""
    u = np.empty_like(x)
    for j, marginal in enumerate(model.marginals[1:]):
        probs = _clamp(np.asarray(marginal.cdf(x[:, j]), dtype=float))
        u[:, j] = special.ndtri(probs) if link_nu is None else special.stdtrit(link_nu, probs)
    return u


def _affine_y_transform(model: RegressionModel, link_nu: float | None):
    """(shift, scale) with H_Y^-1(G(z)) = shift + scale * z, or None."""
    y_marginal = model.marginals[0]
    if link_nu is None:
        if isinstance(y_marginal, StandardNormal):
            return 0.0, 1.0
        if isinstance(y_marginal, Normal):
            return y_marginal.mu, y_marginal.sigma
    elif isinstance(y_marginal, StudentT) and y_marginal.nu == link_nu:
        return y_marginal.mu, y_marginal.sigma
    return None


def gaussian_copula_regression_mc(
    x, model: RegressionModel, rng: np.random.Generator | None = None
) -> float:
    """Monte-Carlo Gaussian-copula conditional mean of Y at one point x.

    Averages H_Y^-1(Phi(mu* + Z s*)) over standard normal draws Z, where
    mu* = u' Sigma_X^-1 rho on the normal-score scale and
    s*^2 = 1 - rho' Sigma_X^-1 rho.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape != (1, model.p):
        raise DimensionMismatch(f"expected one covariate row of length {model.p}")
    b, _, s2 = _conditional_parts(model)
    mu_star = float(_latent_scores(model, x, None)[0] @ b)
    if rng is None:
        rng = derived_rng(model.mc_settings.seed)
    z = rng.standard_normal(model.mc_settings.n_draws)
    draws = model.marginals[0].quantile(_clamp(special.ndtr(mu_star + np.sqrt(s2) * z)))
    return float(np.mean(draws))


def t_copula_regression_mc(
    x, model: RegressionModel, rng: np.random.Generator | None = None
) -> float:
    """Monte-Carlo Student-t-copula conditional mean of Y at one point x.

    The latent conditional law is location mu* = u' Sigma_X^-1 rho with
    scale sqrt(nu (1 - rho' Sigma_X^-1 rho)(1 + u' Sigma_X^-1 u / nu) /
    (nu + p)); Z is drawn with nu + p degrees of freedom, following the
    conditional-t construction.
    """
    nu = model.coefficients.nu
    if nu is None or nu <= 1:
        raise ValueError("t_copula_regression_mc requires a model with nu > 1")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape != (1, model.p):
        raise DimensionMismatch(f"expected one covariate row of length {model.p}")
    b, sigma_x, s2 = _conditional_parts(model)
    u = _latent_scores(model, x, nu)[0]
    mu_star = float(u @ b)
    quad = float(u @ solve_spd(sigma_x.values, u))
    scale = np.sqrt(nu * s2 * (1.0 + quad / nu) / (nu + model.p))
    if rng is None:
        rng = derived_rng(model.mc_settings.seed)
    z = rng.standard_t(nu + model.p, size=model.mc_settings.n_draws)
    draws = model.marginals[0].quantile(_clamp(special.stdtr(nu, mu_star + scale * z)))
    return float(np.mean(draws))


def t_common_rho_closed_form(x, rho: float, mu: float) -> float:
    """Conditional mean under a bivariate-exogenous t-copula with one
    common pairwise correlation and identical location-scale t marginals:
    (1-rho)/(1+rho) * mu + rho/(1+rho) * (x1 + x2).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise DimensionMismatch("closed form is for exactly two exogenous variables")
    if rho <= -1.0 or rho >= 1.0:
        raise ValueError("rho must lie strictly inside (-1, 1)")
    return float((1.0 - rho) / (1.0 + rho) * mu + rho / (1.0 + rho) * (x[0] + x[1]))


def _covariate_rows(model: RegressionModel, data) -> np.ndarray:
    if isinstance(data, Dataset):
        try:
            return np.column_stack([data.column(name) for name in model.names[1:]])
        except MissingColumn as err:
            raise SchemaMismatch(str(err)) from err
    x = np.atleast_2d(np.asarray(data, dtype=float))
    if x.shape[1] != model.p:
        raise SchemaMismatch(
            f"expected {model.p} covariate columns, got {x.shape[1]}"
        )
    return x


def predict(model: RegressionModel, data) -> np.ndarray:
    """Fitted values for each row of ``data``.

    ``data`` may be a Dataset (matched by column name) or a plain (n, p)
    array in the model's covariate order. Copula methods use the exact
    affine evaluation whenever the Y-side transform allows it and fall
    back to per-row Monte Carlo otherwise, with independent per-row
    substreams derived from the model seed.
    """
    x = _covariate_rows(model, data)
    method = model.coefficients.method
    if method == "classical":
        return model.coefficients.intercept + x @ model.coefficients.values
    link_nu = model.coefficients.nu if method == "t_copula" else None
    b, sigma_x, s2 = _conditional_parts(model)
    u = _latent_scores(model, x, link_nu)
    mu_star = u @ b
    affine = _affine_y_transform(model, link_nu)
    if affine is not None:
        shift, scale = affine
        return shift + scale * mu_star
    estimator = gaussian_copula_regression_mc if method == "gaussian_copula" else t_copula_regression_mc
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        rng = derived_rng(model.mc_settings.seed, i)
        out[i] = estimator(x[i : i + 1], model, rng=rng)
    return out
