#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "needlet/mathutil.hpp"
#include "needlet/rng.hpp"
#include "needlet/simd.hpp"
#include "needlet/sphere.hpp"

using namespace needlet;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t stream) {
    CounterRng rng(4242u, stream);
    std::vector<double> v(n);
    for (double& x : v) x = 2.0 * rng.next_uniform() - 1.0;
    return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("the scalar series kernel matches the polynomial recurrence") {
    const auto& k = simd::scalar_kernels();
    CHECK(std::string(k.name) == "scalar");
    auto x = random_vector(7, 1);
    std::vector<double> coeff = {0.5, -1.0, 0.25, 2.0, 0.125};
    std::vector<double> out(x.size());
    k.legendre_series_multi(x.data(), x.size(), coeff.data(), 4, out.data());
    for (std::size_t i = 0; i < x.size(); ++i) {
        KahanSum want;
        for (int l = 0; l <= 4; ++l) {
            want.add(coeff[static_cast<std::size_t>(l)] * legendre_poly(l, x[i]));
        }
        CHECK(out[i] == doctest::Approx(want.value()).epsilon(1e-13));
    }
}

TEST_CASE("the scalar dot kernel matches a direct sum") {
    const auto& k = simd::scalar_kernels();
    auto t = random_vector(33, 2);
    auto re = random_vector(33, 3);
    auto im = random_vector(33, 4);
    double re_out = 0.0, im_out = 0.0;
    k.dot_real_complex(t.data(), re.data(), im.data(), t.size(), &re_out, &im_out);
    KahanSum wr, wi;
    for (std::size_t i = 0; i < t.size(); ++i) {
        wr.add(t[i] * re[i]);
        wi.add(t[i] * im[i]);
    }
    CHECK(re_out == doctest::Approx(wr.value()).epsilon(1e-13));
    CHECK(im_out == doctest::Approx(wi.value()).epsilon(1e-13));
}

TEST_CASE("the scalar Fourier kernel matches direct trigonometry") {
    const auto& k = simd::scalar_kernels();
    for (long r : {0L, 1L, 5L, 17L}) {
        for (std::size_t nphi : {std::size_t{4}, std::size_t{9}, std::size_t{32}}) {
            std::vector<double> acc(nphi, 0.25);
            k.fourier_accum(0.7, -0.4, r, nphi, acc.data());
            for (std::size_t kk = 0; kk < nphi; ++kk) {
                double phi = 2.0 * kPi * static_cast<double>(kk) / static_cast<double>(nphi);
                double want = 0.25 + 0.7 * std::cos(r * phi) + 0.4 * std::sin(r * phi);
                CHECK(acc[kk] == doctest::Approx(want).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("vector kernels agree with the scalar reference") {
    const auto* vec = simd::avx2_kernels();
    if (vec == nullptr) {
        MESSAGE("no vector variant on this host; scalar reference only");
        return;
    }
    const auto& ref = simd::scalar_kernels();

    // Sizes straddle the lane width, including remainders.
    for (std::size_t n : {std::size_t{1}, std::size_t{4}, std::size_t{5},
                          std::size_t{31}, std::size_t{257}}) {
        auto x = random_vector(n, 10 + n);
        auto coeff = random_vector(40, 20 + n);
        std::vector<double> out_ref(n), out_vec(n);
        ref.legendre_series_multi(x.data(), n, coeff.data(), 39, out_ref.data());
        vec->legendre_series_multi(x.data(), n, coeff.data(), 39, out_vec.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(out_vec[i] == doctest::Approx(out_ref[i]).epsilon(1e-12));
        }

        auto t = random_vector(n, 30 + n);
        auto re = random_vector(n, 40 + n);
        auto im = random_vector(n, 50 + n);
        double rr = 0.0, ri = 0.0, vr = 0.0, vi = 0.0;
        ref.dot_real_complex(t.data(), re.data(), im.data(), n, &rr, &ri);
        vec->dot_real_complex(t.data(), re.data(), im.data(), n, &vr, &vi);
        CHECK(vr == doctest::Approx(rr).epsilon(1e-12));
        CHECK(vi == doctest::Approx(ri).epsilon(1e-12));

        std::vector<double> acc_ref(n, 0.0), acc_vec(n, 0.0);
        ref.fourier_accum(0.3, 0.9, 7, n, acc_ref.data());
        vec->fourier_accum(0.3, 0.9, 7, n, acc_vec.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(acc_vec[i] == doctest::Approx(acc_ref[i]).epsilon(1e-11));
        }
    }
}

TEST_CASE("the force-scalar hook pins the active set") {
    const auto& before = simd::active();
    simd::force_scalar(true);
    CHECK(std::string(simd::active().name) == "scalar");
    simd::force_scalar(false);
    const auto& after = simd::active();
    CHECK(std::string(after.name) == std::string(before.name));
    if (simd::avx2_runtime_available()) {
        CHECK(std::string(after.name) != "scalar");
    } else {
        CHECK(std::string(after.name) == "scalar");
    }
}

}  // TEST_SUITE
