#include "doctest.h"

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/sphere.hpp"

using namespace needlet;

TEST_SUITE("cubature") {

TEST_CASE("Gauss-Legendre nodes and weights match the classical rules") {
    std::vector<double> x, w;
    gauss_legendre(1, x, w);
    CHECK(x[0] == doctest::Approx(0.0));
    CHECK(w[0] == doctest::Approx(2.0));
    gauss_legendre(2, x, w);
    CHECK(x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(1.0));
    gauss_legendre(3, x, w);
    CHECK(x[1] == doctest::Approx(0.0));
    CHECK(x[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_legendre(0, x, w), ConfigError);
}

TEST_CASE("Gauss-Legendre integrates monomials exactly up to 2n - 1") {
    std::vector<double> x, w;
    const int n = 12;
    gauss_legendre(n, x, w);
    for (int k = 0; k <= 2 * n - 1; ++k) {
        KahanSum acc;
        for (int i = 0; i < n; ++i) acc.add(w[i] * std::pow(x[i], k));
        double want = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        CHECK(acc.value() == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("grid weights sum to the sphere area") {
    for (int j : {0, 1, 3}) {
        auto grid = build_grid_default(2.0, j);
        KahanSum total;
        for (std::size_t i = 0; i < grid.size(); ++i) total.add(grid.weight(i));
        CHECK(total.value() == doctest::Approx(kFourPi).epsilon(1e-12));
    }
}

TEST_CASE("grid integrates the constant and low harmonics exactly") {
    auto grid = build_grid(2.0, 2, 9);
    std::vector<double> ones(grid.size(), 1.0);
    CHECK(integrate(grid, ones) == doctest::Approx(kFourPi).epsilon(1e-12));
    // Y_00 integrates to sqrt(4 pi); higher harmonics to zero.
    std::vector<std::complex<double>> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = spherical_harmonic(0, 0, grid.point(i));
    }
    auto y00 = integrate(grid, std::span<const std::complex<double>>(vals));
    CHECK(y00.real() == doctest::Approx(std::sqrt(kFourPi)).epsilon(1e-12));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = spherical_harmonic(3, 2, grid.point(i));
    }
    auto y32 = integrate(grid, std::span<const std::complex<double>>(vals));
    CHECK(std::abs(y32) < 1e-12);
}

TEST_CASE("exactness residual is tiny below the stated degree") {
    auto grid = build_grid(2.0, 2, 17);
    CHECK(exactness_check(grid, 16) < 1e-10);
    auto fine = build_grid(2.0, 4, 65);
    CHECK(exactness_check(fine, 64) < 1e-10);
    CHECK_THROWS_AS(exactness_check(grid, 17), ConfigError);
}

TEST_CASE("default degree tracks the scale") {
    auto grid = build_grid_default(2.0, 3);
    CHECK(grid.exact_degree == 16);
    CHECK(grid.B == 2.0);
    CHECK(grid.j == 3);
    // Point count within a factor 4 of B^{2j} = 64.
    CHECK(grid.size() >= 64);
    CHECK(grid.size() <= 4 * 64);
}

TEST_CASE("grid construction validates its inputs") {
    CHECK_THROWS_AS(build_grid(1.0, 2, 9), ConfigError);
    CHECK_THROWS_AS(build_grid(2.0, -1, 9), ConfigError);
    CHECK_THROWS_AS(build_grid(2.0, 2, 0), ConfigError);
    CHECK_THROWS_AS(build_grid(2.0, 30, 1 << 30), ConfigError);
    std::vector<double> short_vals(3, 1.0);
    auto grid = build_grid(2.0, 1, 5);
    CHECK_THROWS_AS(integrate(grid, short_vals), ConfigError);
}

TEST_CASE("points enumerate ring-major with equispaced longitudes") {
    auto grid = build_grid(2.0, 1, 5);
    REQUIRE(grid.n_phi >= 5);
    auto p0 = grid.point(0);
    auto p1 = grid.point(1);
    CHECK(p0.theta == doctest::Approx(p1.theta));
    CHECK(p1.phi - p0.phi == doctest::Approx(2.0 * kPi / grid.n_phi).epsilon(1e-13));
    auto last_first = grid.point(static_cast<std::size_t>(grid.n_phi));
    CHECK(last_first.phi == doctest::Approx(0.0));
    CHECK(last_first.theta != doctest::Approx(p0.theta));
    // Ascending nodes in cos(theta) mean descending colatitudes.
    CHECK(grid.ring_theta.front() > grid.ring_theta.back());
}

TEST_CASE("csv export carries one labeled row per point") {
    auto grid = build_grid(2.0, 0, 3);
    std::ostringstream out;
    export_grid_csv(grid, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,phi,weight");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == grid.size());
}

}  // TEST_SUITE
