#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/spectrum.hpp"
#include "needlet/sphere.hpp"
#include "needlet/windows.hpp"

namespace needlet {

// Harmonic coefficients of a real field, stored for m >= 0 in the same
// m-major packed layout as AssocLegendreScheme; m < 0 follows from
// a_{l,-m} = (-1)^m conj(a_{l,m}). Real and imaginary parts live in separate
// planes so fixed-m rows are contiguous for the reduction kernels.
class HarmonicCoefficients {
  public:
    explicit HarmonicCoefficients(int l_max);

    int l_max() const { return l_max_; }
    std::size_t size() const { return re_.size(); }
    std::size_t index(int l, int m) const;  // requires 0 <= m <= l <= l_max

    double& re(int l, int m) { return re_[index(l, m)]; }
    double& im(int l, int m) { return im_[index(l, m)]; }
    double re(int l, int m) const { return re_[index(l, m)]; }
    double im(int l, int m) const { return im_[index(l, m)]; }

    // Any m in [-l, l]; negative m resolved through the reality relation.
    std::complex<double> get(int l, int m) const;
    void set(int l, int m, std::complex<double> v);  // m >= 0 only

    const double* re_row(int m) const;  // entries l = m .. l_max
    const double* im_row(int m) const;
    double* re_row(int m);
    double* im_row(int m);

  private:
    int l_max_;
    std::vector<double> re_, im_;
};

// Gaussian sample with E|a_lm|^2 = C_l and the reality constraint: a_l0 real
// with variance C_l, m > 0 parts independent with variance C_l/2 each. l = 0
// is left at zero. Identical (seed, stream) pairs reproduce bit-identical
// coefficients regardless of call site or thread count.
HarmonicCoefficients sample_alm(const PowerSpectrum& spectrum, int l_max,
                                std::uint64_t seed, std::uint64_t stream = 0);

// out_lm = w[l] * in_lm; w must cover l = 0 .. l_max.
void apply_multipole_weights(const HarmonicCoefficients& in, std::span<const double> w,
                             HarmonicCoefficients& out);

// Largest degree the synthesis of a scale-j analysis is allowed to assume
// absent: compact windows end at their support edge; decaying windows are cut
// where the weight has fallen far below its peak.
long synthesis_truncation_l(const NeedletKernel& kernel, int j);

// Direct pointwise synthesis sum_{l,m} a_lm Y_lm. The imaginary residue (only
// the m = 0 row can produce one) must stay below 1e-10 or a ConfigError
// reports a reality violation.
std::vector<double> synthesize_field(const HarmonicCoefficients& coeffs,
                                     std::span<const SphericalPoint> points);

// Ring-structured synthesis on a cubature grid: per ring a fixed-m reduction
// over l, then a Fourier accumulation over rings with m folded modulo the
// ring length. Tables of associated Legendre values are cached per ring.
class RingSynthesizer {
  public:
    RingSynthesizer(const CubatureGrid& grid, int l_max);

    const CubatureGrid& grid() const { return *grid_; }
    int l_max() const { return scheme_.l_max(); }

    // out.size() must equal grid().size(); returns the largest imaginary
    // residue accumulated on any ring.
    double synthesize(const HarmonicCoefficients& coeffs, std::span<double> out) const;

  private:
    const CubatureGrid* grid_;
    AssocLegendreScheme scheme_;
    std::vector<double> tables_;  // n_rings x scheme_.table_size()
};

std::vector<double> synthesize_field(const HarmonicCoefficients& coeffs,
                                     const CubatureGrid& grid);

// Needlet coefficients on a grid; values carry the sqrt(point weight) factor.
struct CoefficientField {
    const CubatureGrid* grid = nullptr;
    int j = 0;
    std::vector<double> values;
};

CoefficientField needlet_coefficients_harmonic(const HarmonicCoefficients& coeffs,
                                               const NeedletKernel& kernel, int j,
                                               const RingSynthesizer& synth);
CoefficientField needlet_coefficients_harmonic(const HarmonicCoefficients& coeffs,
                                               const NeedletKernel& kernel, int j,
                                               const CubatureGrid& grid);

// Same coefficients through the analysis integral: the field sampled on a
// fine quadrature grid is integrated against the kernel profile centered at
// each analysis point. The fine grid must be exact beyond twice the kernel
// truncation degree at scale j.
CoefficientField needlet_coefficients_quadrature(const CubatureGrid& fine_grid,
                                                 std::span<const double> field_values,
                                                 const NeedletKernel& kernel, int j,
                                                 const CubatureGrid& analysis_grid);

// Weighted-coefficient contraction at one fixed point, reused across
// replicates: beta_lambda_free = sum_{l,m} (w a)_lm Y_lm(point).
class PointEvaluator {
  public:
    PointEvaluator(SphericalPoint point, int l_max);
    double lambda_free(const HarmonicCoefficients& weighted) const;

  private:
    int l_max_;
    std::vector<double> table_, cos_m_, sin_m_;
};

struct McCorrelationResult {
    double empirical = 0.0;
    double jackknife_se = 0.0;
    std::size_t replicates = 0;
    std::vector<std::array<double, 2>> pairs;  // kept only on request
};

// Pearson correlation of the two lambda-free coefficients over independent
// replicate fields, with a leave-one-out jackknife standard error. Replicate
// r always draws from stream r of the seed, so results do not depend on the
// thread count.
McCorrelationResult monte_carlo_correlation(const NeedletKernel& kernel,
                                            const PowerSpectrum& spectrum, int j1,
                                            int j2, SphericalPoint a, SphericalPoint b,
                                            std::size_t replicates, std::uint64_t seed,
                                            int l_max, int threads, bool keep_pairs);

}  // namespace needlet
