#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace needlet {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kFourPi = 4.0 * kPi;

// Compensated accumulator; the correction term carries what the naive sum drops.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x; residual is root mean square.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    KahanSum sxx, sxy;
    for (std::size_t i = 0; i < n; ++i) {
        sxx.add((x[i] - mx) * (x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    LineFit f;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    KahanSum sr;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sr.add(r * r);
    }
    f.rms_residual = std::sqrt(sr.value() / static_cast<double>(n));
    return f;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace needlet
