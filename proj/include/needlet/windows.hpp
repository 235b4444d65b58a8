#pragma once

#include <span>
#include <utility>
#include <vector>

namespace needlet {

struct CubatureGrid;

// Smooth cutoff: identically 1 on [0, 1/B], identically 0 on [1, inf),
// a C-infinity mollifier bridge between. Nonincreasing, values in [0, 1].
class BumpFunction {
public:
    explicit BumpFunction(double B);
    double B() const { return B_; }
    double phi(double xi) const;

private:
    double B_ = 0.0;
};

BumpFunction build_bump(double B);

// Frequency window of a needlet family: either the compact window
// b(xi) = sqrt(phi(xi/B) - phi(xi)) supported on [1/B, B], or the Mexican
// weight s^p e^{-s} at s = l(l+1)/B^{2j}.
class NeedletKernel {
public:
    enum class Kind { Npw, Mexican };

    static NeedletKernel npw(double B);
    static NeedletKernel mexican(double B, int p);

    Kind kind() const { return kind_; }
    double B() const { return B_; }
    int p() const { return p_; }

    // b(xi); exact zero for xi <= 1/B or xi >= B. Npw kind only.
    double npw_window(double xi) const;

    // s^p e^{-s} with s = l(l+1)/B^{2j}. Mexican kind only, l >= 1, j >= 0.
    double mexican_weight(int l, int j) const;

    // Unified multipole weight w_j(l): window at l/B^j for Npw, Mexican
    // weight otherwise. Zero for l = 0 in both families.
    double weight(int l, int j) const;

    // [first, last] degrees with possibly nonzero weight at scale j; for the
    // compact window this is the open interval (B^{j-1}, B^{j+1}) clipped to
    // integers, for Mexican it is [1, long-max].
    std::pair<long, long> support_range(int j) const;

    // Degree at the weight maximum (truncation heuristics key off it).
    long peak_l(int j) const;

    // Smallest degree past which the Mexican weight argument exceeds p + 40;
    // used as the series cut for real-space profiles. Mexican kind only.
    long profile_truncation_l(int j) const;

private:
    NeedletKernel() = default;
    Kind kind_ = Kind::Npw;
    double B_ = 0.0;
    int p_ = 0;
    double bump_B_ = 0.0;
};

// Real-space profile of the stereographic Mexican hat at scale t = B^{-j}:
// value(theta) with y = 2 tan(theta/2) is
//   [1 + (y/2)^2]^2 [2 - y^2/(2 t^2)] exp(-y^2/(4 t^2))
//   / (sqrt(2 pi) sqrt(2) t sqrt(1 + t^2 + t^4)).
struct SmhwProfile {
    double B = 0.0;
    int j = 0;

    SmhwProfile(double B_in, int j_in);
    double scale_t() const;
    double value(double theta) const;  // theta in [0, pi)
};

// Legendre-series evaluation of the lambda-free Mexican needlet profile
// psi_j(theta) = sum_l w_j(l) (2l+1)/(4 pi) P_l(cos theta), truncated at
// profile_truncation_l(j).
std::vector<double> mexican_profile_series(const NeedletKernel& kernel, int j,
                                           std::span<const double> thetas);

struct SmhwGapResult {
    double K_fit = 0.0;              // scalar least-squares match of profile onto psi
    std::vector<double> gap_curve;   // |profile - K_fit * psi| on the input grid
};

// Fits K over the theta grid (unweighted least squares) and reports the
// pointwise absolute gap on that grid. The cubature grid participates only
// through its (B, j) consistency check: the comparison itself is lambda-free.
SmhwGapResult smhw_approximation_gap(const SmhwProfile& prof, const NeedletKernel& kernel,
                                     std::span<const double> theta_grid,
                                     const CubatureGrid& grid);

}  // namespace needlet
