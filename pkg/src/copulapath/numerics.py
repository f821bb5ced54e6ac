"""Scalar special functions, small dense SPD kernels, and sample utilities.

Everything downstream (copula sampling, the regression fits, the CV harness)
funnels through this module. Matrices here are tiny (dimension <= ~10), so
the positive-definite factorization is written out explicitly: that gives an
unambiguous pivot-tolerance rule for flagging invalid correlation matrices
instead of whatever threshold the installed LAPACK happens to use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.linalg import solve_triangular

from .errors import DegenerateColumn, NotPositiveDefinite, TooFewObservations

__all__ = [
    "KsResult",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "cholesky",
    "solve_spd",
    "standardize",
    "pearson_correlation",
    "ks_test_normal",
]

# Pivots at or below PIVOT_RTOL * max(diag) are treated as nonpositive.
PIVOT_RTOL = 1e-12


def std_normal_cdf(x):
    """Standard normal CDF.

    Accepts a scalar or array and returns the same shape. Backed by the
    erf-based implementation in ``scipy.special`` (absolute error below
    1e-15 over the real line).
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    out = special.ndtr(x)
    return float(out) if out.ndim == 0 else out


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` for probabilities in (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("p must lie strictly inside (0, 1)")
    out = special.ndtri(p)
    return float(out) if out.ndim == 0 else out


def student_t_cdf(x, nu):
    """Student-t CDF with ``nu`` degrees of freedom."""
    if nu <= 0:
        raise ValueError("degrees of freedom must be positive")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    out = special.stdtr(nu, x)
    return float(out) if out.ndim == 0 else out


def student_t_quantile(p, nu):
    """Inverse Student-t CDF for probabilities in (0, 1)."""
    if nu <= 0:
        raise ValueError("degrees of freedom must be positive")
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("p must lie strictly inside (0, 1)")
    out = special.stdtrit(nu, p)
    return float(out) if out.ndim == 0 else out


def _check_square_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    scale = np.abs(m).max() or 1.0
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise ValueError("matrix must be symmetric")
    return m


def cholesky(m) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric PD matrix.

    Raises
    ------
    NotPositiveDefinite
        If any pivot falls at or below ``PIVOT_RTOL * max(diag)``.
    """
    a = _check_square_symmetric(m)
    n = a.shape[0]
    tol = PIVOT_RTOL * max(a.diagonal().max(), 0.0)
    lower = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= tol:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at index {j} (tolerance {tol:.3e})"
            )
        lower[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_spd(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for symmetric positive-definite ``m``.

    Uses the Cholesky factor from :func:`cholesky`, so non-PD input raises
    :class:`NotPositiveDefinite` rather than returning garbage.
    """
    rhs = np.asarray(rhs, dtype=float)
    lower = cholesky(m)
    if rhs.shape[0] != lower.shape[0]:
        raise ValueError(
            f"rhs length {rhs.shape[0]} does not match dimension {lower.shape[0]}"
        )
    y = solve_triangular(lower, rhs, lower=True)
    return solve_triangular(lower.T, y, lower=False)


def standardize(column) -> np.ndarray:
    """Center and scale to sample mean 0, sample SD 1 (divisor n-1)."""
    x = np.asarray(column, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("column must be a 1-d array with at least 2 entries")
    if not np.all(np.isfinite(x)):
        raise ValueError("column entries must be finite")
    sd = x.std(ddof=1)
    if sd == 0.0:
        raise DegenerateColumn("constant column cannot be standardized")
    return (x - x.mean()) / sd


def pearson_correlation(data) -> "CorrelationMatrix":
    """Product-moment correlation matrix of a dataset.

    Parameters
    ----------
    data : Dataset or (n, d) array
        Row-aligned observations; the column order is preserved.

    Returns
    -------
    CorrelationMatrix
        Symmetric with an exact unit diagonal; positive-definiteness is
        *not* enforced here (perfectly collinear columns are legal input
        and are only rejected where the matrix must be factorized).
    """
    from .copula import CorrelationMatrix

    cols = np.asarray(getattr(data, "columns", data), dtype=float)
    if cols.ndim != 2 or cols.shape[0] < 2:
        raise ValueError("need a 2-d array with at least 2 rows")
    sds = cols.std(axis=0, ddof=1)
    if np.any(sds == 0.0):
        raise DegenerateColumn("constant column has no defined correlation")
    centered = (cols - cols.mean(axis=0)) / sds
    corr = centered.T @ centered / (cols.shape[0] - 1)
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(corr, check_pd=False)


@dataclass(frozen=True)
class KsResult:
    """One-sample Kolmogorov-Smirnov outcome against the standard normal."""

    statistic: float
    p_value: float
    n: int


def ks_test_normal(sample, min_n: int = 8) -> KsResult:
    """One-sample KS test of a (standardized) sample against N(0, 1).

    The statistic is the exact sup-distance between the empirical CDF and
    the standard normal CDF. The p-value uses the asymptotic Kolmogorov
    series evaluated at the Stephens small-sample correction
    ``(sqrt(n) + 0.12 + 0.11/sqrt(n)) * D``.

    Standardizing the sample first is the caller's responsibility; passing
    raw data simply tests it against N(0, 1) as-is.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n < min_n:
        raise TooFewObservations(f"need at least {min_n} observations, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample entries must be finite")
    cdf = special.ndtr(x)
    i = np.arange(1, n + 1)
    d_plus = (i / n - cdf).max()
    d_minus = (cdf - (i - 1) / n).max()
    statistic = max(d_plus, d_minus)
    root_n = np.sqrt(n)
    p_value = float(special.kolmogorov((root_n + 0.12 + 0.11 / root_n) * statistic))
    return KsResult(statistic=float(statistic), p_value=min(max(p_value, 0.0), 1.0), n=n)
