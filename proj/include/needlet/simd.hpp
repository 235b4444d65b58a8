#pragma once

#include <cstddef>

namespace needlet::simd {

// Hot-loop kernels with interchangeable scalar and vector implementations.
// Variants are selected once at startup from CPU capabilities; the scalar
// reference defines the semantics and the vector paths must agree within
// accumulation-order rounding (they are equivalence-tested, not bitwise).
struct Kernels {
    const char* name;

    // out[i] = sum_{l=0..lmax} coeff[l] * P_l(x[i]) by the three-term
    // recurrence, carried independently per evaluation point.
    void (*legendre_series_multi)(const double* x, std::size_t n,
                                  const double* coeff, int lmax, double* out);

    // re_out = sum t[i]*re[i], im_out = sum t[i]*im[i].
    void (*dot_real_complex)(const double* t, const double* re, const double* im,
                             std::size_t n, double* re_out, double* im_out);

    // out[k] += fre*cos(r*phi_k) - fim*sin(r*phi_k) for phi_k = 2*pi*k/nphi,
    // k = 0..nphi-1, via phase-rotation recurrences.
    void (*fourier_accum)(double fre, double fim, long r, std::size_t nphi,
                          double* out);
};

const Kernels& scalar_kernels();

// Null when the binary carries no vector variant or the CPU lacks it.
const Kernels* avx2_kernels();

bool avx2_runtime_available();

// Active kernel set: AVX2 when available, else scalar. force_scalar(true)
// pins the scalar reference regardless of CPU (test hook; also set by the
// NEEDLET_FORCE_SCALAR environment variable).
const Kernels& active();
void force_scalar(bool on);

}  // namespace needlet::simd
