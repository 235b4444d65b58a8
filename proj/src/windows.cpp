#include "needlet/windows.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "needlet/cubature.hpp"
#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/simd.hpp"

namespace needlet {

namespace {

// exp(-1/x) for x > 0, else 0: the standard C-infinity mollifier leg.
double moll(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

BumpFunction::BumpFunction(double B) : B_(B) {
    if (!(B > 1.0)) {
        throw ConfigError("bump construction requires B > 1");
    }
}

double BumpFunction::phi(double xi) const {
    if (xi < 0.0) {
        throw ConfigError("bump argument must be nonnegative");
    }
    const double lo = 1.0 / B_;
    if (xi <= lo) return 1.0;
    if (xi >= 1.0) return 0.0;
    // Affine map of [1/B, 1] onto [0, 1], reversed so phi falls from 1 to 0.
    const double u = (1.0 - xi) / (1.0 - lo);
    const double a = moll(u);
    const double b = moll(1.0 - u);
    return a / (a + b);
}

BumpFunction build_bump(double B) { return BumpFunction(B); }

NeedletKernel NeedletKernel::npw(double B) {
    if (!(B > 1.0)) {
        throw ConfigError("needlet base B must exceed 1");
    }
    NeedletKernel k;
    k.kind_ = Kind::Npw;
    k.B_ = B;
    return k;
}

NeedletKernel NeedletKernel::mexican(double B, int p) {
    if (!(B > 1.0)) {
        throw ConfigError("needlet base B must exceed 1");
    }
    if (p < 1) {
        throw ConfigError("Mexican order p must be a positive integer");
    }
    NeedletKernel k;
    k.kind_ = Kind::Mexican;
    k.B_ = B;
    k.p_ = p;
    return k;
}

double NeedletKernel::npw_window(double xi) const {
    if (kind_ != Kind::Npw) {
        throw ConfigError("window evaluation requires the compact-window kind");
    }
    const BumpFunction bump(B_);
    const double b2 = bump.phi(xi / B_) - bump.phi(xi);
    return b2 > 0.0 ? std::sqrt(b2) : 0.0;
}

double NeedletKernel::mexican_weight(int l, int j) const {
    if (kind_ != Kind::Mexican) {
        throw ConfigError("Mexican weight requires the Mexican kind");
    }
    if (l < 1 || j < 0) {
        throw ConfigError("Mexican weight requires l >= 1 and j >= 0");
    }
    const double s = static_cast<double>(l) * (l + 1.0) / std::pow(B_, 2.0 * j);
    const double e = std::exp(-s);
    return e > 0.0 ? std::pow(s, p_) * e : 0.0;
}

double NeedletKernel::weight(int l, int j) const {
    if (l == 0) return 0.0;
    if (kind_ == Kind::Mexican) return mexican_weight(l, j);
    return npw_window(static_cast<double>(l) / std::pow(B_, j));
}

std::pair<long, long> NeedletKernel::support_range(int j) const {
    if (kind_ == Kind::Mexican) {
        return {1L, std::numeric_limits<long>::max()};
    }
    // b(l/B^j) > 0 only for B^{j-1} < l < B^{j+1}.
    const double lo = std::pow(B_, j - 1);
    const double hi = std::pow(B_, j + 1);
    long first = static_cast<long>(std::floor(lo)) + 1;
    long last = static_cast<long>(std::ceil(hi)) - 1;
    if (first < 1) first = 1;
    return {first, last};
}

long NeedletKernel::peak_l(int j) const {
    if (kind_ == Kind::Mexican) {
        // s = l(l+1)/B^{2j} peaks the weight at s = p.
        return static_cast<long>(std::ceil(std::sqrt(static_cast<double>(p_)) * std::pow(B_, j)));
    }
    return static_cast<long>(std::ceil(std::pow(B_, j)));
}

long NeedletKernel::profile_truncation_l(int j) const {
    if (kind_ != Kind::Mexican) {
        throw ConfigError("profile truncation applies to the Mexican kind");
    }
    if (j < 0) {
        throw ConfigError("profile truncation requires j >= 0");
    }
    const double target = (static_cast<double>(p_) + 40.0) * std::pow(B_, 2.0 * j);
    const double l_est = 0.5 * (std::sqrt(1.0 + 4.0 * target) - 1.0);
    long l = static_cast<long>(std::floor(l_est));
    while (static_cast<double>(l) * (l + 1.0) <= target) ++l;
    if (l > 1'000'000L) {
        throw TruncationError("profile series truncation exceeds the degree cap");
    }
    return l;
}

SmhwProfile::SmhwProfile(double B_in, int j_in) : B(B_in), j(j_in) {
    if (!(B > 1.0) || j < 0) {
        throw ConfigError("stereographic profile requires B > 1 and j >= 0");
    }
}

double SmhwProfile::scale_t() const { return std::pow(B, -j); }

double SmhwProfile::value(double theta) const {
    if (!(theta >= 0.0 && theta < kPi)) {
        throw ConfigError("profile argument must lie in [0, pi)");
    }
    const double t = scale_t();
    const double y = 2.0 * std::tan(0.5 * theta);
    const double t2 = t * t;
    const double norm = 1.0 / (std::sqrt(2.0 * kPi) * std::sqrt(2.0) * t *
                               std::sqrt(1.0 + t2 + t2 * t2));
    const double half_y = 0.5 * y;
    const double lift = 1.0 + half_y * half_y;
    const double y2 = y * y;
    return norm * lift * lift * (2.0 - y2 / (2.0 * t2)) * std::exp(-y2 / (4.0 * t2));
}

std::vector<double> mexican_profile_series(const NeedletKernel& kernel, int j,
                                           std::span<const double> thetas) {
    if (kernel.kind() != NeedletKernel::Kind::Mexican) {
        throw ConfigError("profile series requires the Mexican kind");
    }
    const long l_trunc = kernel.profile_truncation_l(j);
    std::vector<double> coeff(static_cast<std::size_t>(l_trunc) + 1, 0.0);
    for (long l = 1; l <= l_trunc; ++l) {
        coeff[static_cast<std::size_t>(l)] =
            kernel.weight(static_cast<int>(l), j) * static_cast<double>(2 * l + 1) / kFourPi;
    }
    std::vector<double> x(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        x[i] = std::cos(thetas[i]);
    }
    std::vector<double> out(thetas.size());
    simd::active().legendre_series_multi(x.data(), x.size(), coeff.data(),
                                         static_cast<int>(l_trunc), out.data());
    return out;
}

SmhwGapResult smhw_approximation_gap(const SmhwProfile& prof, const NeedletKernel& kernel,
                                     std::span<const double> theta_grid,
                                     const CubatureGrid& grid) {
    if (kernel.kind() != NeedletKernel::Kind::Mexican) {
        throw ConfigError("approximation gap requires the Mexican kind");
    }
    if (kernel.B() != prof.B) {
        throw ConfigError("profile and kernel must share the base B");
    }
    if (grid.B != prof.B || grid.j != prof.j) {
        throw ConfigError("cubature grid must be built at the profile's (B, j)");
    }
    if (theta_grid.empty()) {
        throw ConfigError("approximation gap requires a nonempty theta grid");
    }
    const std::vector<double> psi = mexican_profile_series(kernel, prof.j, theta_grid);
    KahanSum num, den;
    std::vector<double> target(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        target[i] = prof.value(theta_grid[i]);
        num.add(target[i] * psi[i]);
        den.add(psi[i] * psi[i]);
    }
    if (den.value() <= 0.0) {
        throw ConfigError("profile series vanishes on the fit grid");
    }
    SmhwGapResult res;
    res.K_fit = num.value() / den.value();
    res.gap_curve.resize(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        res.gap_curve[i] = std::abs(target[i] - res.K_fit * psi[i]);
    }
    return res;
}

}  // namespace needlet
