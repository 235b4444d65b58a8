#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/rng.hpp"
#include "needlet/stats.hpp"

using namespace needlet;

TEST_SUITE("stats") {

TEST_CASE("the polynomial family satisfies its recurrence identities") {
    CHECK(hermite(0, 1.7) == 1.0);
    CHECK(hermite(1, 1.7) == 1.7);
    CHECK(hermite(2, 0.0) == -1.0);
    CHECK(hermite(2, 2.0) == doctest::Approx(3.0));
    CHECK(hermite(3, 2.0) == doctest::Approx(2.0));   // x^3 - 3x
    CHECK(hermite(4, 2.0) == doctest::Approx(-5.0));  // x^4 - 6x^2 + 3
    for (double x = -3.0; x <= 3.0; x += 0.37) {
        CHECK(hermite(3, x) + 3.0 * hermite(1, x) == doctest::Approx(x * x * x).epsilon(1e-13));
        CHECK(hermite(4, x) + 6.0 * hermite(2, x) ==
              doctest::Approx(x * x * x * x - 3.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(hermite(-1, 0.0), ConfigError);
}

TEST_CASE("statistic configurations must be rectangular with live rows") {
    StatisticConfig ok{{{0.0, 1.0}, {1.0, 0.0}}};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.components() == 2);
    CHECK(ok.max_degree() == 2);
    StatisticConfig ragged{{{1.0, 0.0}, {1.0}}};
    CHECK_THROWS_AS(ragged.validate(), ConfigError);
    StatisticConfig dead_row{{{1.0, 0.0}, {0.0, 0.0}}};
    CHECK_THROWS_AS(dead_row.validate(), ConfigError);
    StatisticConfig empty{};
    CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("normalization divides by the per-point deviation") {
    CubatureGrid grid = build_grid(2.0, 0, 3);
    CoefficientField field;
    field.grid = &grid;
    field.j = 0;
    field.values.assign(grid.size(), 2.0);
    std::vector<double> variances(grid.size(), 4.0);
    auto norm = normalize_coefficients(field, variances);
    REQUIRE(norm.size() == grid.size());
    for (double v : norm) CHECK(v == doctest::Approx(1.0));
    variances[0] = 0.0;
    CHECK_THROWS_AS(normalize_coefficients(field, variances), ConfigError);
    std::vector<double> short_var(grid.size() - 1, 1.0);
    CHECK_THROWS_AS(normalize_coefficients(field, short_var), ConfigError);
}

TEST_CASE("component sums weight the polynomial degrees as configured") {
    StatisticConfig config{{{0.0, 1.0, 0.0, 0.0},    // pure He_2
                            {0.0, 0.0, 0.0, 1.0}}};  // pure He_4
    std::vector<double> z = {0.5, -1.0, 2.0, 0.0};
    auto h = h_statistic(config, z);
    REQUIRE(h.size() == 2);
    double n = std::sqrt(4.0);
    KahanSum he2, he4;
    for (double x : z) {
        he2.add(x * x - 1.0);
        he4.add(x * x * x * x - 6.0 * x * x + 3.0);
    }
    CHECK(h[0] == doctest::Approx(he2.value() / n).epsilon(1e-14));
    CHECK(h[1] == doctest::Approx(he4.value() / n).epsilon(1e-14));
    std::vector<double> empty;
    CHECK_THROWS_AS(h_statistic(config, empty), ConfigError);
}

TEST_CASE("the variance-level estimator averages squares over weights") {
    CubatureGrid grid = build_grid(2.0, 0, 3);
    CoefficientField field;
    field.grid = &grid;
    field.j = 0;
    field.values.resize(grid.size());
    // values = sqrt(weight) * 3 makes every summand 9.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        field.values[i] = 3.0 * std::sqrt(grid.weight(i));
    }
    CHECK(gamma_estimator(field) == doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("third and fourth moment statistics match direct sums") {
    std::vector<double> z = {1.0, -0.5, 0.25, 2.0, -1.5};
    auto sk = skewness_kurtosis_stats(z);
    double rn = std::sqrt(5.0);
    KahanSum s3, s4;
    for (double x : z) {
        s3.add(x * x * x);
        s4.add(x * x * x * x - 3.0);
    }
    CHECK(sk.s3 == doctest::Approx(s3.value() / rn).epsilon(1e-14));
    CHECK(sk.s4 == doctest::Approx(s4.value() / rn).epsilon(1e-14));
}

TEST_CASE("the second-moment matrix is uncentered and symmetric") {
    std::vector<std::vector<double>> rows = {
        {1.0, 2.0}, {3.0, -1.0}, {0.0, 1.0}, {2.0, 2.0}};
    auto omega = estimate_omega(rows);
    CHECK(omega.components == 2);
    CHECK(omega.replicates == 4);
    // (1/4) sum h h^T computed by hand.
    CHECK(omega.matrix[0] == doctest::Approx((1.0 + 9.0 + 0.0 + 4.0) / 4.0));
    CHECK(omega.matrix[3] == doctest::Approx((4.0 + 1.0 + 1.0 + 4.0) / 4.0));
    CHECK(omega.matrix[1] == doctest::Approx((2.0 - 3.0 + 0.0 + 4.0) / 4.0));
    CHECK(omega.matrix[1] == omega.matrix[2]);
    CHECK(omega.min_eigenvalue > 0.0);
    std::vector<std::vector<double>> too_few = {{1.0, 2.0}, {3.0, -1.0}};
    CHECK_THROWS_AS(estimate_omega(too_few), ConfigError);
}

TEST_CASE("the eigen solver reproduces a known symmetric decomposition") {
    // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
    auto eig = jacobi_eigen({2.0, 1.0, 1.0, 2.0}, 2);
    REQUIRE(eig.values.size() == 2);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    // Residual ||A v - lambda v|| for each eigenpair.
    std::vector<double> A = {2.0, 1.0, 1.0, 2.0};
    for (int c = 0; c < 2; ++c) {
        double v0 = eig.vectors[0 * 2 + c], v1 = eig.vectors[1 * 2 + c];
        double r0 = A[0] * v0 + A[1] * v1 - eig.values[c] * v0;
        double r1 = A[2] * v0 + A[3] * v1 - eig.values[c] * v1;
        CHECK(std::abs(r0) < 1e-12);
        CHECK(std::abs(r1) < 1e-12);
        CHECK(v0 * v0 + v1 * v1 == doctest::Approx(1.0).epsilon(1e-12));
    }
    // A diagonal matrix is returned sorted ascending.
    auto diag = jacobi_eigen({5.0, 0.0, 0.0, -2.0}, 2);
    CHECK(diag.values[0] == doctest::Approx(-2.0));
    CHECK(diag.values[1] == doctest::Approx(5.0));
}

TEST_CASE("whitening maps the second moment to the identity") {
    CounterRng rng(3u, 0u);
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < 400; ++r) {
        double g1 = rng.next_gaussian();
        double g2 = rng.next_gaussian();
        // Correlated pair with covariance [[1, .6], [.6, 1.36]].
        rows.push_back({g1, 0.6 * g1 + g2});
    }
    auto omega = estimate_omega(rows);
    whiten_rows(omega, rows);
    auto after = estimate_omega(rows);
    CHECK(after.matrix[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(after.matrix[3] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(after.matrix[1] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("degenerate component sets fail the rank condition") {
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < 50; ++r) {
        double x = 0.1 * r - 2.5;
        rows.push_back({x, 2.0 * x});  // second component duplicates the first
    }
    auto omega = estimate_omega(rows);
    CHECK(omega.min_eigenvalue <= 1e-12 * omega.eigenvalues.back());
    CHECK_THROWS_AS(whiten_rows(omega, rows), RegimeError);
}

TEST_CASE("the distribution distance is small for normal draws, large for shifted ones") {
    CounterRng rng(8u, 0u);
    std::vector<double> z;
    for (int i = 0; i < 2000; ++i) z.push_back(rng.next_gaussian());
    double d = ks_distance_to_normal(z);
    CHECK(d < 1.63 / std::sqrt(2000.0));
    for (double& x : z) x += 2.0;
    CHECK(ks_distance_to_normal(z) > 0.5);
    std::vector<double> empty;
    CHECK_THROWS_AS(ks_distance_to_normal(empty), ConfigError);
}

TEST_CASE("the distribution distance matches a tiny hand case") {
    // For {-1, 0, 1}: D = max over the six one-sided gaps.
    std::vector<double> z = {0.0, -1.0, 1.0};
    double phi_m1 = normal_cdf(-1.0);
    double d_hand = std::max({1.0 / 3.0 - phi_m1, phi_m1,
                              2.0 / 3.0 - 0.5, 0.5 - 1.0 / 3.0,
                              1.0 - normal_cdf(1.0), normal_cdf(1.0) - 2.0 / 3.0});
    CHECK(ks_distance_to_normal(z) == doctest::Approx(d_hand).epsilon(1e-14));
}

TEST_CASE("the diagnostic accepts standard normal components and rejects shifted ones") {
    CounterRng rng(12u, 0u);
    std::vector<std::vector<double>> good;
    for (int r = 0; r < 1000; ++r) {
        good.push_back({rng.next_gaussian(), rng.next_gaussian()});
    }
    CltThresholds th{9.0 / std::sqrt(1000.0), 0.85, 1.15, 1.63 / std::sqrt(1000.0)};
    auto report = clt_diagnostic(good, th);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.pass);
    CHECK(report.rows[0].pass);
    CHECK(report.rows[1].pass);
    CHECK(report.rows[0].var == doctest::Approx(1.0).epsilon(0.15));

    std::vector<std::vector<double>> bad;
    for (int r = 0; r < 1000; ++r) {
        bad.push_back({rng.next_gaussian() + 1.0, rng.next_gaussian()});
    }
    auto bad_report = clt_diagnostic(bad, th);
    CHECK_FALSE(bad_report.pass);
    CHECK_FALSE(bad_report.rows[0].pass);
    CHECK(bad_report.rows[1].pass);

    std::vector<std::vector<double>> constant;
    for (int r = 0; r < 1000; ++r) constant.push_back({0.5, rng.next_gaussian()});
    auto const_report = clt_diagnostic(constant, th);
    CHECK_FALSE(const_report.rows[0].pass);  // variance collapses below var_lo

    std::vector<std::vector<double>> tiny = {{0.1, 0.2}, {0.3, 0.4}};
    CHECK_THROWS_AS(clt_diagnostic(tiny, th), ConfigError);
}

TEST_CASE("the variance-level pipeline is reproducible and scale-aware") {
    auto kern = NeedletKernel::mexican(2.0, 1);
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0);
    std::vector<int> js = {2, 3};
    auto res = run_gamma_pipeline(kern, spec, js, 32, 5u, 0, 1e-12, 1);
    REQUIRE(res.size() == 2);
    CHECK(res[0].j == 2);
    CHECK(res[1].j == 3);
    CHECK(res[0].n_points > 0);
    CHECK(res[0].analytic > 0.0);
    CHECK(res[0].mc_se > 0.0);
    // Replicated estimate within five standard errors of the series value.
    CHECK(std::abs(res[0].mc_mean - res[0].analytic) <= 5.0 * res[0].mc_se);
    CHECK(std::abs(res[1].mc_mean - res[1].analytic) <= 5.0 * res[1].mc_se);
    auto again = run_gamma_pipeline(kern, spec, js, 32, 5u, 0, 1e-12, 2);
    CHECK(again[0].mc_mean == res[0].mc_mean);
    CHECK(again[1].mc_se == res[1].mc_se);
    CHECK_THROWS_AS(run_gamma_pipeline(kern, spec, js, 8, 5u, 0, 1e-12, 1),
                    ConfigError);
}

TEST_CASE("the component pipeline produces a full diagnostic") {
    auto kern = NeedletKernel::mexican(2.0, 1);
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0);
    StatisticConfig config{{{0.0, 1.0}, {1.0, 0.0}}};
    CltThresholds th{9.0 / std::sqrt(64.0), 0.5, 1.5, 1.63 / std::sqrt(64.0)};
    auto res = run_clt_pipeline(kern, spec, 3, config, 64, 9u, 0, 1e-12, 1, th);
    CHECK(res.j == 3);
    CHECK(res.n_points > 0);
    CHECK(res.gamma_analytic > 0.0);
    CHECK(res.omega.components == 2);
    CHECK(res.omega.replicates == 64);
    REQUIRE(res.h.size() == 64);
    REQUIRE(res.report.rows.size() == 2);
    auto again = run_clt_pipeline(kern, spec, 3, config, 64, 9u, 0, 1e-12, 2, th);
    CHECK(again.h[10][0] == res.h[10][0]);
    CHECK(again.h[63][1] == res.h[63][1]);
}

}  // TEST_SUITE
