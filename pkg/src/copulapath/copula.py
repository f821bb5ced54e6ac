"""Elliptical copula models (Gaussian, Student-t) with per-variable marginals.

Variable ordering convention used throughout the package: index 0 is the
endogenous variable Y, the exogenous variables follow in declaration order.
Sampling uses the Cholesky + inverse-CDF construction and a counter-based
(Philox) RNG keyed by an explicit seed tuple, so every (scenario, size,
replicate) cell owns an independent, reproducible stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from . import numerics
from .dataio import Dataset
from .errors import DimensionMismatch

__all__ = [
    "PROB_CLAMP",
    "MarginalModel",
    "StandardNormal",
    "Normal",
    "StudentT",
    "Empirical",
    "CorrelationMatrix",
    "CopulaSpec",
    "derived_rng",
    "partition",
    "sample",
    "gaussian_copula_density",
    "marginal_cdf",
    "marginal_quantile",
]

# Probabilities are clamped to this band before any quantile transform to
# keep extreme test points finite.
PROB_CLAMP = 1e-12


def derived_rng(*key) -> np.random.Generator:
    """Independent Philox stream keyed by a tuple of integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(tuple(int(k) for k in key))))


def _clamp(p):
    return np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)


class MarginalModel:
    """Base class for marginal distributions; subclasses are immutable."""

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class StandardNormal(MarginalModel):
    def cdf(self, x):
        return numerics.std_normal_cdf(x)

    def quantile(self, p):
        return numerics.std_normal_quantile(p)

    def mean(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Normal(MarginalModel):
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def cdf(self, x):
        return numerics.std_normal_cdf((np.asarray(x, float) - self.mu) / self.sigma)

    def quantile(self, p):
        return self.mu + self.sigma * numerics.std_normal_quantile(p)

    def mean(self) -> float:
        return self.mu


@dataclass(frozen=True)
class StudentT(MarginalModel):
    nu: float
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("degrees of freedom must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def cdf(self, x):
        return numerics.student_t_cdf((np.asarray(x, float) - self.mu) / self.sigma, self.nu)

    def quantile(self, p):
        return self.mu + self.sigma * numerics.student_t_quantile(p, self.nu)

    def mean(self) -> float:
        if self.nu <= 1:
            raise ValueError("mean undefined for nu <= 1")
        return self.mu


class Empirical(MarginalModel):
    """Marginal backed by a sorted sample.

    The quantile is the type-7 interpolated order statistic and the CDF is
    its piecewise-linear inverse, so the two round-trip exactly inside the
    sample range.
    """

    def __init__(self, sample):
        values = np.sort(np.asarray(sample, dtype=float))
        if values.size < 2:
            raise ValueError("empirical marginal needs at least 2 observations")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample entries must be finite")
        self._values = values
        self._grid = np.arange(values.size) / (values.size - 1)

    def cdf(self, x):
        out = np.interp(np.asarray(x, float), self._values, self._grid)
        return _clamp(out) if np.ndim(x) else float(_clamp(out))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0.0) or np.any(p >= 1.0):
            raise ValueError("p must lie strictly inside (0, 1)")
        out = np.interp(p, self._grid, self._values)
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return float(self._values.mean())

    def __eq__(self, other):
        return isinstance(other, Empirical) and np.array_equal(self._values, other._values)


def marginal_cdf(m: MarginalModel, x):
    return m.cdf(x)


def marginal_quantile(m: MarginalModel, p):
    return m.quantile(p)


class CorrelationMatrix:
    """Correlation matrix: symmetric, exact unit diagonal, |off-diag| <= 1.

    Positive-definiteness is validated eagerly when ``check_pd`` is true
    (the default for hand-constructed matrices); estimated matrices defer
    the check to factorization time so that collinear data can still be
    inspected and reported.
    """

    def __init__(self, values, check_pd: bool = True):
        m = np.asarray(values, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("correlation matrix must be square")
        if not np.all(np.isfinite(m)):
            raise ValueError("entries must be finite")
        if np.abs(m - m.T).max() > 1e-10:
            raise ValueError("correlation matrix must be symmetric")
        m = (m + m.T) / 2.0
        if np.abs(np.diag(m) - 1.0).max() > 1e-10:
            raise ValueError("diagonal must be 1")
        np.fill_diagonal(m, 1.0)
        if np.abs(m).max() > 1.0 + 1e-12:
            raise ValueError("off-diagonal entries must lie in [-1, 1]")
        m.flags.writeable = False
        self.values = m
        if check_pd:
            numerics.cholesky(m)  # raises NotPositiveDefinite if invalid

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def cholesky(self) -> np.ndarray:
        return numerics.cholesky(self.values)

    def __getitem__(self, key):
        return self.values[key]

    def __eq__(self, other):
        return isinstance(other, CorrelationMatrix) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"CorrelationMatrix({self.values.tolist()!r})"


@dataclass(frozen=True)
class CopulaSpec:
    """Elliptical copula plus marginals for the joint vector (Y, X1..Xp).

    ``family`` is ``"gaussian"`` or ``"student_t"``; the latter requires
    ``nu``. ``sigma`` is the (p+1)-dimensional correlation matrix and
    ``marginals`` one MarginalModel per variable, Y first.
    """

    family: str
    sigma: CorrelationMatrix
    marginals: tuple[MarginalModel, ...]
    nu: float | None = None

    def __post_init__(self):
        if self.family not in ("gaussian", "student_t"):
            raise ValueError(f"unknown copula family {self.family!r}")
        if self.family == "student_t":
            if self.nu is None or self.nu <= 0:
                raise ValueError("student_t copula requires nu > 0")
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) != self.sigma.dim:
            raise DimensionMismatch(
                f"{len(self.marginals)} marginals for dimension {self.sigma.dim}"
            )

    @property
    def p(self) -> int:
        return self.sigma.dim - 1


def partition(spec_or_sigma) -> tuple[np.ndarray, CorrelationMatrix]:
    """Split Sigma over (Y, X) into the Y-correlation vector and Sigma_X.

    Accepts a :class:`CopulaSpec` or a :class:`CorrelationMatrix` directly.
    """
    sigma = spec_or_sigma.sigma if isinstance(spec_or_sigma, CopulaSpec) else spec_or_sigma
    values = sigma.values
    rho = values[0, 1:].copy()
    sigma_x = CorrelationMatrix(values[1:, 1:], check_pd=False)
    return rho, sigma_x


def sample(spec: CopulaSpec, n: int, seed) -> Dataset:
    """Draw ``n`` i.i.d. rows from the copula model.

    The latent elliptical vector comes from the Cholesky factor of Sigma
    (Student-t additionally scales by sqrt(nu / chi2_nu)); coordinates are
    pushed through the elliptical CDF to uniforms and then through each
    inverse marginal. ``seed`` may be an int or a tuple of ints.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    key = seed if isinstance(seed, (tuple, list)) else (seed,)
    rng = derived_rng(*key)
    lower = spec.sigma.cholesky()
    d = spec.sigma.dim
    z = rng.standard_normal((n, d)) @ lower.T
    if spec.family == "gaussian":
        u = special.ndtr(z)
    else:
        w = rng.chisquare(spec.nu, size=n)
        z = z * np.sqrt(spec.nu / w)[:, None]
        u = special.stdtr(spec.nu, z)
    u = _clamp(u)
    cols = np.column_stack(
        [np.asarray(m.quantile(u[:, j]), dtype=float) for j, m in enumerate(spec.marginals)]
    )
    names = ("y",) + tuple(f"x{i}" for i in range(1, d))
    return Dataset(names=names, columns=cols)


def gaussian_copula_density(u, sigma: CorrelationMatrix) -> float:
    """Gaussian copula density at a point of the open unit hypercube.

    Computed as |Sigma|^(-1/2) * exp(-q' (Sigma^-1 - I) q / 2) with
    q_i the standard normal quantiles of the coordinates.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size != sigma.dim:
        raise DimensionMismatch(f"point of length {u.size} for dimension {sigma.dim}")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("coordinates must lie strictly inside (0, 1)")
    q = special.ndtri(u)
    lower = sigma.cholesky()
    log_det = 2.0 * np.log(np.diag(lower)).sum()
    solved = numerics.solve_spd(sigma.values, q)
    quad = q @ solved - q @ q
    return float(np.exp(-0.5 * (log_det + quad)))
