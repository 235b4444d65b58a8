#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "needlet/errors.hpp"
#include "needlet/spectrum.hpp"

using namespace needlet;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    std::string path = "/tmp/needlet_test_" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("power-law values match closed forms") {
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0);
    CHECK(spec.evaluate(1) == doctest::Approx(1.0));
    CHECK(spec.evaluate(2) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(spec.evaluate(10) == doctest::Approx(1e-3).epsilon(1e-13));
    CHECK(spec.has_unit_factor());
    auto spec4 = PowerSpectrum::alpha_regular(4.0, 2.0);
    CHECK(spec4.evaluate(3) == doctest::Approx(1.0 / 81.0).epsilon(1e-14));
}

TEST_CASE("power-law construction rejects bad parameters") {
    CHECK_THROWS_AS(PowerSpectrum::alpha_regular(2.0, 2.0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::alpha_regular(1.5, 2.0), ConfigError);
    CHECK_THROWS_WITH_AS(PowerSpectrum::alpha_regular(2.0, 2.0),
                         doctest::Contains("alpha must satisfy alpha > 2"),
                         ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::alpha_regular(3.0, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::alpha_regular(3.0, 0.5), ConfigError);
}

TEST_CASE("shape factor multiplies the power law") {
    auto g = [](double u) { return 2.0 + std::sin(u); };
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0, g, 0);
    CHECK_FALSE(spec.has_unit_factor());
    for (int l : {1, 2, 7, 33}) {
        double want = std::pow(l, -3.0) * (2.0 + std::sin(static_cast<double>(l)));
        CHECK(spec.evaluate(l) == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("regularity checker estimates bounds of the shape factor") {
    auto g = [](double u) { return 2.0 + std::sin(u); };
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0, g, 0);
    // Over u in [1/2, 2]: sup g = 3 (peak at pi/2 inside), inf g = 2 + sin(1/2)
    // at the left edge.
    std::vector<double> claims = {1.0, 1.1};
    auto report = spec.validate_regularity(0, 0, 2, 3.5, claims);
    CHECK(report.sup_g == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(report.inf_g == doctest::Approx(2.0 + std::sin(0.5)).epsilon(1e-6));
    CHECK(report.c0_estimate == doctest::Approx(3.0).epsilon(1e-6));
    REQUIRE(report.derivative_sup.size() == 2);
    // g' = cos u: sup over [1/2, 2] is cos(1/2), attained at the edge the
    // difference stencil trims, so the estimate sits slightly below it.
    // g'' = -sin u: sup is sin(pi/2) = 1, attained in the interior.
    CHECK(report.derivative_sup[0] == doctest::Approx(std::cos(0.5)).epsilon(2e-3));
    CHECK(report.derivative_sup[1] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(report.pass);
}

TEST_CASE("regularity checker flags violated claims") {
    auto g = [](double u) { return 2.0 + std::sin(u); };
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0, g, 0);
    std::vector<double> weak = {0.1, 0.1};
    auto report = spec.validate_regularity(0, 0, 2, 3.5, weak);
    CHECK_FALSE(report.pass);
    std::vector<double> strong = {1.0, 1.1};
    auto ok = spec.validate_regularity(0, 0, 2, 3.5, strong);
    CHECK(ok.pass);
}

TEST_CASE("exponential spectra decay as prescribed") {
    auto spec = PowerSpectrum::exponential({1.0}, 1.0);
    CHECK(spec.evaluate(3) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
    CHECK(spec.evaluate(3) == doctest::Approx(0.049787068367863944).epsilon(1e-14));
    auto poly = PowerSpectrum::exponential({1.0, 0.0, 2.0}, 1.0);
    CHECK(poly.evaluate(4) == doctest::Approx((1.0 + 2.0 * 16.0) * std::exp(-4.0)).epsilon(1e-13));
    auto sub = PowerSpectrum::exponential({1.0}, 0.5);
    CHECK(sub.evaluate(9) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
}

TEST_CASE("exponential construction rejects bad coefficients") {
    CHECK_THROWS_AS(PowerSpectrum::exponential({}, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::exponential({0.0, 0.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::exponential({1.0, -0.5}, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::exponential({1.0}, 0.0), ConfigError);
}

TEST_CASE("tabulated spectra cover exactly the table") {
    auto spec = PowerSpectrum::tabulated({4.0, 3.0, 2.0});
    CHECK(spec.l_max_hint() == 3);
    CHECK(spec.evaluate(1) == doctest::Approx(4.0));
    CHECK(spec.evaluate(3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(spec.evaluate(4), ConfigError);
    CHECK_THROWS_AS(spec.evaluate(0), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::tabulated({}), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::tabulated({1.0, -1.0}), ConfigError);
}

TEST_CASE("tabulated files parse with comments and fail with line numbers") {
    auto path = write_temp("spec_ok.txt",
                           "# spectrum table\n1 4.0\n2 3.0\n\n3 2.5\n");
    auto spec = PowerSpectrum::tabulated_from_file(path);
    CHECK(spec.l_max_hint() == 3);
    CHECK(spec.evaluate(2) == doctest::Approx(3.0));

    auto bad_order = write_temp("spec_order.txt", "1 4.0\n3 3.0\n");
    CHECK_THROWS_WITH_AS(PowerSpectrum::tabulated_from_file(bad_order),
                         doctest::Contains("line 2"), ConfigError);
    auto bad_token = write_temp("spec_token.txt", "1 4.0\n2 abc\n");
    CHECK_THROWS_WITH_AS(PowerSpectrum::tabulated_from_file(bad_token),
                         doctest::Contains("line 2"), ConfigError);
    auto bad_start = write_temp("spec_start.txt", "2 4.0\n");
    CHECK_THROWS_AS(PowerSpectrum::tabulated_from_file(bad_start), ConfigError);
    CHECK_THROWS_AS(PowerSpectrum::tabulated_from_file("/tmp/needlet_no_such_file"),
                    ConfigError);
    std::remove(path.c_str());
    std::remove(bad_order.c_str());
    std::remove(bad_token.c_str());
    std::remove(bad_start.c_str());
}

TEST_CASE("summability partial sums converge and tails shrink") {
    auto spec = PowerSpectrum::alpha_regular(3.0, 2.0);
    auto [partial_lo, tail_lo] = spec.summability_check(10);
    auto [partial_hi, tail_hi] = spec.summability_check(1000);
    CHECK(partial_hi > partial_lo);
    CHECK(tail_hi < tail_lo);
    CHECK(tail_hi > 0.0);
    // sum (2l+1) l^{-3} = 2 zeta(2) + zeta(3) in the limit.
    const double limit = 2.0 * 1.6449340668482264 + 1.2020569031595943;
    CHECK(partial_hi == doctest::Approx(limit).epsilon(1e-3));
    CHECK(partial_hi + tail_hi >= limit);

    auto exp_spec = PowerSpectrum::exponential({1.0}, 1.0);
    auto [ep, et] = exp_spec.summability_check(50);
    CHECK(et < 1e-18);
    CHECK(ep == doctest::Approx(ep + et).epsilon(1e-15));

    auto tab = PowerSpectrum::tabulated({1.0, 0.5});
    auto [tp, tt] = tab.summability_check(2);
    CHECK(tp == doctest::Approx(3.0 * 1.0 + 5.0 * 0.5));
    CHECK(tt == 0.0);
}

}  // TEST_SUITE
