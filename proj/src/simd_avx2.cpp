#include <cmath>
#include <cstddef>
#include <immintrin.h>

#include "needlet/simd.hpp"

namespace needlet::simd {
namespace {

double hsum4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// Two independent 4-lane recurrence chains per iteration hide FMA latency.
void legendre_series_multi_avx2(const double* x, std::size_t n,
                                const double* coeff, int lmax, double* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d x0 = _mm256_loadu_pd(x + i);
        const __m256d x1 = _mm256_loadu_pd(x + i + 4);
        __m256d pm2a = _mm256_set1_pd(1.0);
        __m256d pm2b = _mm256_set1_pd(1.0);
        __m256d acc0 = _mm256_set1_pd(coeff[0]);
        __m256d acc1 = acc0;
        if (lmax >= 1) {
            __m256d pm1a = x0;
            __m256d pm1b = x1;
            const __m256d c1 = _mm256_set1_pd(coeff[1]);
            acc0 = _mm256_fmadd_pd(c1, pm1a, acc0);
            acc1 = _mm256_fmadd_pd(c1, pm1b, acc1);
            for (int l = 2; l <= lmax; ++l) {
                const __m256d a = _mm256_set1_pd(static_cast<double>(2 * l - 1) /
                                                 static_cast<double>(l));
                const __m256d b = _mm256_set1_pd(static_cast<double>(l - 1) /
                                                 static_cast<double>(l));
                const __m256d pla =
                    _mm256_fmsub_pd(_mm256_mul_pd(a, x0), pm1a, _mm256_mul_pd(b, pm2a));
                const __m256d plb =
                    _mm256_fmsub_pd(_mm256_mul_pd(a, x1), pm1b, _mm256_mul_pd(b, pm2b));
                const __m256d cl = _mm256_set1_pd(coeff[l]);
                acc0 = _mm256_fmadd_pd(cl, pla, acc0);
                acc1 = _mm256_fmadd_pd(cl, plb, acc1);
                pm2a = pm1a;
                pm1a = pla;
                pm2b = pm1b;
                pm1b = plb;
            }
        }
        _mm256_storeu_pd(out + i, acc0);
        _mm256_storeu_pd(out + i + 4, acc1);
    }
    if (i < n) {
        scalar_kernels().legendre_series_multi(x + i, n - i, coeff, lmax, out + i);
    }
}

void dot_real_complex_avx2(const double* t, const double* re, const double* im,
                           std::size_t n, double* re_out, double* im_out) {
    __m256d ar0 = _mm256_setzero_pd();
    __m256d ar1 = _mm256_setzero_pd();
    __m256d ai0 = _mm256_setzero_pd();
    __m256d ai1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d t0 = _mm256_loadu_pd(t + i);
        const __m256d t1 = _mm256_loadu_pd(t + i + 4);
        ar0 = _mm256_fmadd_pd(t0, _mm256_loadu_pd(re + i), ar0);
        ar1 = _mm256_fmadd_pd(t1, _mm256_loadu_pd(re + i + 4), ar1);
        ai0 = _mm256_fmadd_pd(t0, _mm256_loadu_pd(im + i), ai0);
        ai1 = _mm256_fmadd_pd(t1, _mm256_loadu_pd(im + i + 4), ai1);
    }
    double ar = hsum4(_mm256_add_pd(ar0, ar1));
    double ai = hsum4(_mm256_add_pd(ai0, ai1));
    for (; i < n; ++i) {
        ar += t[i] * re[i];
        ai += t[i] * im[i];
    }
    *re_out = ar;
    *im_out = ai;
}

// Lane k carries phase r*phi_{base+k}; each iteration rotates all lanes by
// 4*step. Rotation drift over one ring is O(nphi * eps), well inside the
// equivalence tolerance.
void fourier_accum_avx2(double fre, double fim, long r, std::size_t nphi,
                        double* out) {
    const double step = 2.0 * 3.14159265358979323846264338327950288 *
                        static_cast<double>(r) / static_cast<double>(nphi);
    __m256d c = _mm256_setr_pd(1.0, std::cos(step), std::cos(2 * step), std::cos(3 * step));
    __m256d s = _mm256_setr_pd(0.0, std::sin(step), std::sin(2 * step), std::sin(3 * step));
    const __m256d c4 = _mm256_set1_pd(std::cos(4 * step));
    const __m256d s4 = _mm256_set1_pd(std::sin(4 * step));
    const __m256d vre = _mm256_set1_pd(fre);
    const __m256d vim = _mm256_set1_pd(fim);
    std::size_t k = 0;
    for (; k + 4 <= nphi; k += 4) {
        __m256d o = _mm256_loadu_pd(out + k);
        o = _mm256_fmadd_pd(vre, c, o);
        o = _mm256_fnmadd_pd(vim, s, o);
        _mm256_storeu_pd(out + k, o);
        const __m256d cn = _mm256_fmsub_pd(c, c4, _mm256_mul_pd(s, s4));
        s = _mm256_fmadd_pd(s, c4, _mm256_mul_pd(c, s4));
        c = cn;
    }
    for (; k < nphi; ++k) {
        const double ang = step * static_cast<double>(k);
        out[k] += fre * std::cos(ang) - fim * std::sin(ang);
    }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
    static const Kernels k{
        "avx2",
        legendre_series_multi_avx2,
        dot_real_complex_avx2,
        fourier_accum_avx2,
    };
    return &k;
}

}  // namespace needlet::simd
