#include <cmath>
#include <cstddef>

#include "needlet/simd.hpp"

namespace needlet::simd {
namespace {

void legendre_series_multi_scalar(const double* x, std::size_t n,
                                  const double* coeff, int lmax, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        double pm2 = 1.0;
        double acc = coeff[0];
        if (lmax >= 1) {
            double pm1 = xi;
            acc += coeff[1] * pm1;
            for (int l = 2; l <= lmax; ++l) {
                const double a = static_cast<double>(2 * l - 1) / static_cast<double>(l);
                const double b = static_cast<double>(l - 1) / static_cast<double>(l);
                const double pl = a * xi * pm1 - b * pm2;
                acc += coeff[l] * pl;
                pm2 = pm1;
                pm1 = pl;
            }
        }
        out[i] = acc;
    }
}

void dot_real_complex_scalar(const double* t, const double* re, const double* im,
                             std::size_t n, double* re_out, double* im_out) {
    double ar = 0.0;
    double ai = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ar += t[i] * re[i];
        ai += t[i] * im[i];
    }
    *re_out = ar;
    *im_out = ai;
}

void fourier_accum_scalar(double fre, double fim, long r, std::size_t nphi,
                          double* out) {
    const double step = 2.0 * 3.14159265358979323846264338327950288 *
                        static_cast<double>(r) / static_cast<double>(nphi);
    const double cs = std::cos(step);
    const double sn = std::sin(step);
    double c = 1.0;
    double s = 0.0;
    for (std::size_t k = 0; k < nphi; ++k) {
        out[k] += fre * c - fim * s;
        const double cn = c * cs - s * sn;
        s = s * cs + c * sn;
        c = cn;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{
        "scalar",
        legendre_series_multi_scalar,
        dot_real_complex_scalar,
        fourier_accum_scalar,
    };
    return k;
}

}  // namespace needlet::simd
