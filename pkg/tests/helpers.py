"""Shared brute-force oracles and generators for the test suite.

Everything here is deliberately independent of the package internals:
quadrature, bisection, Gaussian elimination, cofactor expansion, and the
literal ratio formulas, so the implementations are checked against a
second route rather than against themselves.
"""

import os

import numpy as np
from scipy import integrate

from copulapath import Dataset, standardize


def quad_normal_cdf(x: float) -> float:
    """Standard normal CDF by brute-force quadrature of the density."""
    val, _ = integrate.quad(
        lambda t: np.exp(-t * t / 2.0) / np.sqrt(2.0 * np.pi),
        -np.inf,
        x,
        epsabs=1e-16,
        limit=400,
    )
    return val


def bisect_quantile(cdf, p: float, lo: float = -40.0, hi: float = 40.0) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gaussian_elimination_solve(a, b):
    """Textbook partial-pivot elimination, no numpy.linalg involved."""
    a = [list(map(float, row)) + [float(bi)] for row, bi in zip(a, b)]
    n = len(a)
    for i in range(n):
        piv = max(range(i, n), key=lambda r: abs(a[r][i]))
        a[i], a[piv] = a[piv], a[i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            for c in range(i, n + 1):
                a[r][c] -= f * a[i][c]
    x = [0.0] * n
    for i in reversed(range(n)):
        x[i] = (a[i][n] - sum(a[i][c] * x[c] for c in range(i + 1, n))) / a[i][i]
    return np.array(x)


def _minor(m, i, j):
    return [[m[r][c] for c in range(len(m)) if c != j] for r in range(len(m)) if r != i]


def _det(m):
    if len(m) == 0:
        return 1.0
    if len(m) == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * _det(_minor(m, 0, j)) for j in range(len(m))
    )


def adjugate_inverse(m):
    """Cofactor-expansion inverse; only sane for dim <= 4."""
    m = [list(map(float, row)) for row in np.asarray(m)]
    n = len(m)
    d = _det(m)
    adj = [[(-1) ** (i + j) * _det(_minor(m, j, i)) for j in range(n)] for i in range(n)]
    return np.array(adj) / d


def p2_ratio_coefficients(rho_1y, rho_2y, rho_12):
    """Literal two-regressor ratio formulas."""
    den = 1.0 - rho_12**2
    return np.array(
        [(rho_1y - rho_2y * rho_12) / den, (rho_2y - rho_1y * rho_12) / den]
    )


def p3_ratio_coefficients(rho, sx):
    """Literal three-regressor ratio formulas.

    ``rho`` holds (rho_1y, rho_2y, rho_3y); ``sx`` is the 3x3 exogenous
    correlation matrix.
    """
    r1, r2, r3 = rho
    r12, r13, r23 = sx[0][1], sx[0][2], sx[1][2]
    den = 1.0 - r12**2 - r13**2 - r23**2 + 2.0 * r12 * r13 * r23
    p1 = (r1 * (1 - r23**2) + r2 * (r23 * r13 - r12) + r3 * (r12 * r23 - r13)) / den
    p2 = (r2 * (1 - r13**2) + r1 * (r13 * r23 - r12) + r3 * (r12 * r13 - r23)) / den
    p3 = (r3 * (1 - r12**2) + r1 * (r12 * r23 - r13) + r2 * (r13 * r12 - r23)) / den
    return np.array([p1, p2, p3])


def naive_ks_statistic(sample, cdf) -> float:
    """O(n^2) sup-distance between the empirical CDF and ``cdf``."""
    x = np.asarray(sample, dtype=float)
    n = x.size
    best = 0.0
    for point in x:
        ecdf_at = np.sum(x <= point) / n
        ecdf_before = np.sum(x < point) / n
        f = cdf(point)
        best = max(best, abs(ecdf_at - f), abs(f - ecdf_before))
    return best


def random_correlation(rng, dim: int) -> np.ndarray:
    """Random positive-definite correlation matrix via a factor structure."""
    a = rng.standard_normal((dim, dim + 2))
    s = a @ a.T
    d = 1.0 / np.sqrt(np.diag(s))
    c = s * np.outer(d, d)
    np.fill_diagonal(c, 1.0)
    return c


def random_standardized_dataset(rng, n: int, p: int) -> Dataset:
    """Correlated sample with every column standardized exactly."""
    corr = random_correlation(rng, p + 1)
    raw = rng.standard_normal((n, p + 1)) @ np.linalg.cholesky(corr).T
    cols = np.column_stack([standardize(raw[:, j]) for j in range(p + 1)])
    names = ("y",) + tuple(f"x{i}" for i in range(1, p + 1))
    return Dataset(names=names, columns=cols, standardized=True)


def data_file(name: str):
    """Path of an optional user-supplied dataset, or None if absent."""
    base = os.environ.get(
        "COPULAPATH_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "data")
    )
    path = os.path.join(base, name)
    return path if os.path.exists(path) else None
