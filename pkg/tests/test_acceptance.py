"""Acceptance suite: one test per criterion, one printed PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Criterion 11 needs the user-supplied marketing/bodyfat CSV files
(see README); it skips with an explicit notice when they are absent, and
criteria 1-10 remain fully runnable offline.
"""

import math
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from copulapath import (
    CorrelationMatrix,
    McSettings,
    PathCoefficients,
    RegressionModel,
    Scenario,
    StandardNormal,
    StudentT,
    builtin_scenarios,
    builtin_sigma,
    cross_validate,
    decompose,
    gaussian_closed_form,
    gaussian_copula_regression_mc,
    information_criteria,
    ols_fit,
    partition,
    prepare,
    read_csv,
    run_scenario,
    solve_spd,
    t_common_rho_closed_form,
    t_copula_regression_mc,
)

from helpers import (
    data_file,
    p2_ratio_coefficients,
    p3_ratio_coefficients,
    random_correlation,
    random_standardized_dataset,
)


def report(num, text):
    print(f"[criterion {num:>2}] PASS  {text}")


def make_model(sigma_values, marginals, method="gaussian_copula", nu=None,
               n_draws=100000, seed=0):
    sigma = CorrelationMatrix(sigma_values, check_pd=False)
    rho, sigma_x = partition(sigma)
    coeffs = PathCoefficients(solve_spd(sigma_x.values, rho), method=method, nu=nu)
    return RegressionModel(
        coefficients=coeffs,
        marginals=marginals,
        sigma_hat=sigma,
        names=("y",) + tuple(f"x{i}" for i in range(1, sigma.dim)),
        mc_settings=McSettings(n_draws=n_draws, seed=seed),
    )


def test_criterion_01_normal_equation_identity():
    start = time.monotonic()
    rng = np.random.default_rng(1001)
    worst = 0.0
    for _ in range(1000):
        p = int(rng.integers(1, 5))
        n = int(rng.integers(p + 3, 201))
        data = random_standardized_dataset(rng, n, p)
        corr = np.corrcoef(data.columns, rowvar=False)
        closed = gaussian_closed_form(
            corr[0, 1:], CorrelationMatrix(corr[1:, 1:], check_pd=False)
        )
        worst = max(worst, np.abs(ols_fit(data).values - closed.values).max())
    elapsed = time.monotonic() - start
    assert worst <= 1e-10
    assert elapsed < 10.0
    report(1, f"ols == closed form on 1000 datasets (max dev {worst:.2e}, {elapsed:.1f}s)")


def test_criterion_02_closed_form_matches_ratio_formulas():
    rng = np.random.default_rng(1002)
    worst = 0.0
    for _ in range(1000):
        dim = int(rng.integers(3, 5))  # p = 2 or 3
        full = random_correlation(rng, dim)
        rho, sigma_x = partition(CorrelationMatrix(full))
        got = gaussian_closed_form(rho, sigma_x).values
        if dim == 3:
            want = p2_ratio_coefficients(rho[0], rho[1], sigma_x[0, 1])
        else:
            want = p3_ratio_coefficients(rho, sigma_x.values)
        worst = max(worst, np.abs(got - want).max())
    assert worst <= 1e-12
    report(2, f"ratio-formula agreement on 1000 PD inputs (max dev {worst:.2e})")


def test_criterion_03_effect_identity():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for _ in range(1000):
        dim = int(rng.integers(2, 7))
        full = random_correlation(rng, dim)
        rho, sigma_x = partition(CorrelationMatrix(full))
        coeffs = gaussian_closed_form(rho, sigma_x)
        d = decompose(coeffs, sigma_x, rho)
        assert np.array_equal(d.total, d.direct + d.indirect)
        worst = max(worst, np.abs(d.total - rho).max())
    assert worst <= 1e-10
    report(3, f"decompose o closed_form: total == rho on 1000 instances "
              f"(max dev {worst:.2e})")


@pytest.fixture(scope="module")
def low_scenario_bundle():
    scenario = Scenario.builtin(2, "low", 400, replications=20, seed=42)
    start = time.monotonic()
    bundle = run_scenario(scenario)
    return bundle, time.monotonic() - start


def test_criterion_04_low_scenario_coefficient_anchors(low_scenario_bundle):
    bundle, elapsed = low_scenario_bundle
    assert elapsed < 30.0
    for method in ("classical", "gaussian_copula"):
        p1, p2 = bundle.coefficients[method]["train"]
        assert abs(p1 - 0.3404) <= 0.05, method
        assert abs(p2 - (-0.5589)) <= 0.05, method
    p1, p2 = bundle.coefficients["classical"]["train"]
    report(4, f"p=2 low n=400 x20 reps: train P = ({p1:.4f}, {p2:.4f}) "
              f"within (0.3404, -0.5589) +/- 0.05 in {elapsed:.1f}s")


def test_criterion_05_worked_indirect_effects():
    d = decompose(
        np.array([0.340, -0.559]),
        CorrelationMatrix([[1.0, 0.103], [0.103, 1.0]]),
        rho=[0.3, -0.5],
    )
    assert round(d.indirect[0], 3) == -0.058
    assert round(d.indirect[1], 3) == 0.035
    report(5, "indirect effects (0.103 x -0.559, 0.103 x 0.340) = (-0.058, 0.035)")


def test_criterion_06_train_mse_anchors(low_scenario_bundle):
    bundle, _ = low_scenario_bundle
    low_mse = bundle.indices["classical"]["train"]["mean_mse"]
    assert abs(low_mse - 0.6263) <= 0.05
    high = run_scenario(Scenario.builtin(2, "high", 400, replications=20, seed=42))
    high_mse = high.indices["classical"]["train"]["mean_mse"]
    assert abs(high_mse - 0.4267) <= 0.05
    report(6, f"train mean MSE: low {low_mse:.4f} (target 0.6263 +/- 0.05), "
              f"high {high_mse:.4f} (target 0.4267 +/- 0.05)")


X_POINTS = {
    2: [(-1.0, -1.0), (-0.5, 0.5), (0.0, 0.0), (1.0, -1.0), (1.5, 1.0)],
    3: [(-1.0, -1.0, 0.5), (-0.5, 0.5, -0.5), (0.0, 0.0, 0.0), (1.0, -1.0, 1.0),
        (1.5, 1.0, -0.5)],
}


def test_criterion_07_mc_matches_closed_form_all_matrices():
    n_draws = 100000
    checked = 0
    for p, level, sigma in builtin_scenarios():
        model = make_model(sigma.values, (StandardNormal(),) * (p + 1),
                           n_draws=n_draws, seed=7000 + checked)
        rho, sigma_x = partition(sigma)
        b = solve_spd(sigma_x.values, rho)
        s_star = math.sqrt(1.0 - float(rho @ b))
        for x in X_POINTS[p]:
            closed = float(np.asarray(x) @ b)
            got = gaussian_copula_regression_mc(list(x), model)
            assert abs(got - closed) <= 3.0 * s_star / math.sqrt(n_draws), (p, level, x)
            checked += 1
    report(7, f"Gaussian MC within 3 SE of the closed form at {checked} "
              f"(matrix, x) pairs, 1e5 draws")


def test_criterion_08_t_limit_to_gaussian():
    sigma = builtin_sigma(2, "high")  # rho_x1x2 = 0.5
    rho, sigma_x = partition(sigma)
    b = solve_spd(sigma_x.values, rho)
    model = make_model(sigma.values, (StandardNormal(),) * 3, method="t_copula",
                       nu=1e4, n_draws=200000, seed=88)
    grid = np.linspace(-1.5, 1.5, 5)
    sup = 0.0
    for x1 in grid:
        for x2 in grid:
            closed = float(np.array([x1, x2]) @ b)
            got = t_copula_regression_mc([x1, x2], model)
            sup = max(sup, abs(got - closed))
    assert sup <= 0.01
    report(8, f"t-copula (nu=1e4) vs Gaussian closed form: sup dev {sup:.4f} "
              f"<= 0.01 on a 5x5 grid")


def test_criterion_09_common_rho_closed_form():
    rng = np.random.default_rng(1009)
    for _ in range(100):
        mu = float(rng.normal(scale=3.0))
        x = rng.normal(scale=2.0, size=2)
        assert t_common_rho_closed_form(x, 0.0, mu) == mu
    nu, n_draws = 5.0, 200000
    for idx, rho in enumerate((0.2, 1.0 / 3.0, 0.5)):
        sigma = np.full((3, 3), rho)
        np.fill_diagonal(sigma, 1.0)
        model = make_model(sigma, (StudentT(nu),) * 3, method="t_copula", nu=nu,
                           n_draws=n_draws, seed=9000 + idx)
        x = np.array([1.0, 1.0])
        want = t_common_rho_closed_form(x, rho, 0.0)
        got = t_copula_regression_mc(x, model)
        # analytic MC standard error of the affine t estimator
        b = solve_spd(sigma[1:, 1:], sigma[0, 1:])
        s2 = 1.0 - float(sigma[0, 1:] @ b)
        quad = float(x @ solve_spd(sigma[1:, 1:], x))
        scale2 = nu * s2 * (1.0 + quad / nu) / (nu + 2.0)
        se = math.sqrt(scale2 * (nu + 2.0) / nu / n_draws)
        assert abs(got - want) <= 3.0 * se, rho
    report(9, "common-rho closed form: exact at rho=0 (100 cases); "
              "t-copula MC within 3 SE at rho in {0.2, 1/3, 0.5}")


def test_criterion_10_information_criteria_gap():
    rng = np.random.default_rng(1010)
    for n, k in ((100, 3), (200, 3), (100, 6), (57, 2)):
        aic, bic = information_criteria(rng.standard_normal(n), k)
        assert_allclose(bic - aic, k * (math.log(n) - 2.0), atol=1e-12)
    aic, bic = information_criteria(rng.standard_normal(100), 3)
    assert_allclose(bic - aic, 7.8155, atol=5e-5)
    report(10, "bic - aic == k (log n - 2); gap at n=100, k=3 is 7.8155")


def _fold_mean_effects(report_obj, method, partition_name):
    records = report_obj.select(method, partition_name)
    direct = np.mean([o.coefficients for o in records], axis=0)
    totals = np.mean(
        [CorrelationMatrix(o.sigma_x, check_pd=False).values @ o.coefficients
         for o in records], axis=0,
    )
    return direct, totals


def test_criterion_11_marketing_fit():
    path = data_file("marketing.csv")
    if path is None:
        pytest.skip(
            "criterion 11 (marketing): user-supplied data/marketing.csv not found; "
            "see README for how to provide it"
        )
    data = read_csv(path, "sales", ["facebook", "newspaper"])
    assert data.n == 200
    std, _ = prepare(data)
    cv = cross_validate(std, ("classical", "gaussian_copula"), k=5, seed=1)
    direct, totals = _fold_mean_effects(cv, "classical", "train")
    assert_allclose(direct, [0.5665, 0.0270], atol=0.01)
    assert_allclose(totals, [0.5761, 0.2280], atol=0.01)
    report(11, f"marketing: direct {np.round(direct, 4)}, totals {np.round(totals, 4)} "
               "within +/- 0.01 of the reference values")


def test_criterion_11_bodyfat_fit():
    path = data_file("bodyfat.csv")
    if path is None:
        pytest.skip(
            "criterion 11 (bodyfat): user-supplied data/bodyfat.csv not found; "
            "see README for how to provide it"
        )
    data = read_csv(path, "siri", ["weight", "chest", "neck"])
    assert data.n == 252
    std, _ = prepare(data)
    cv = cross_validate(std, ("classical", "gaussian_copula"), k=5, seed=1)
    _, totals = _fold_mean_effects(cv, "classical", "train")
    assert_allclose(totals, [0.6125, 0.7023, 0.4902], atol=0.01)
    report(11, f"bodyfat: totals {np.round(totals, 4)} within +/- 0.01")


def test_criterion_11_reference_effect_algebra_offline():
    # The reference real-data effect values are internally consistent with
    # the normal-equation decomposition: feeding the reported correlation
    # estimates through the pipeline reproduces them.
    sigma_x = CorrelationMatrix([[1.0, 0.3548], [0.3548, 1.0]])
    rho = np.array([0.5761, 0.2280])
    d = decompose(gaussian_closed_form(rho, sigma_x), sigma_x, rho)
    assert_allclose(d.direct, [0.5665, 0.0270], atol=5e-4)
    assert_allclose(d.indirect, [0.0096, 0.2010], atol=5e-4)

    sigma_x = CorrelationMatrix(
        [[1.0, 0.8945, 0.8301], [0.8945, 1.0, 0.7846], [0.8301, 0.7846, 1.0]]
    )
    rho = np.array([0.6125, 0.7023, 0.4902])
    d = decompose(gaussian_closed_form(rho, sigma_x), sigma_x, rho)
    assert_allclose(d.direct, [0.0294, 0.8078, -0.1680], atol=5e-4)
    report(11, "reference correlation estimates reproduce the real-data effect "
               "values through the pipeline (offline consistency check)")


def test_criterion_12_absolute_ic_values_out_of_scope():
    # Absolute AIC/BIC levels depend on an arbitrary likelihood scaling and
    # parameter count, so no fixed levels are asserted; the algebraic gap
    # check of criterion 10 replaces them and the parameter count stays
    # configurable end to end.
    rng = np.random.default_rng(1012)
    r = rng.standard_normal(100)
    aic3, _ = information_criteria(r, 3)
    aic6, _ = information_criteria(r, 6)
    assert_allclose(aic6 - aic3, 6.0, atol=1e-12)
    data = random_standardized_dataset(rng, 100, 2)
    cv_default = cross_validate(data, ("classical",), k=5, seed=0)
    cv_k6 = cross_validate(data, ("classical",), k=5, seed=0, k_params=6)
    assert cv_default.k_params == 3
    assert cv_k6.k_params == 6
    report(12, "absolute AIC/BIC levels intentionally not pinned; "
               "k_params configurable (penalty shifts exactly), gap check in #10")
