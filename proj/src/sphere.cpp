#include "needlet/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"

namespace needlet {

namespace {

double checked_cosine(double x, const char* what) {
    if (std::isnan(x) || std::abs(x) > 1.0 + 1e-14) {
        throw ConfigError(std::string(what) + " must lie in [-1, 1]");
    }
    return std::clamp(x, -1.0, 1.0);
}

}  // namespace

void validate_point(const SphericalPoint& pt) {
    if (!(pt.theta >= 0.0 && pt.theta <= kPi)) {
        throw ConfigError("colatitude must lie in [0, pi]");
    }
    if (!(pt.phi >= 0.0 && pt.phi < 2.0 * kPi)) {
        throw ConfigError("longitude must lie in [0, 2*pi)");
    }
}

double geodesic_distance(const SphericalPoint& a, const SphericalPoint& b) {
    validate_point(a);
    validate_point(b);
    const double dot = std::cos(a.theta) * std::cos(b.theta) +
                       std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

double legendre_poly(int l, double x) {
    if (l < 0) {
        throw ConfigError("Legendre degree must be nonnegative");
    }
    x = checked_cosine(x, "Legendre argument");
    if (l == 0) return 1.0;
    double pm2 = 1.0;
    double pm1 = x;
    for (int k = 2; k <= l; ++k) {
        const double pk = (static_cast<double>(2 * k - 1) * x * pm1 -
                           static_cast<double>(k - 1) * pm2) /
                          static_cast<double>(k);
        pm2 = pm1;
        pm1 = pk;
    }
    return pm1;
}

std::vector<double> legendre_batch(int l_max, double x) {
    if (l_max < 0) {
        throw ConfigError("Legendre degree must be nonnegative");
    }
    x = checked_cosine(x, "Legendre argument");
    std::vector<double> out(static_cast<std::size_t>(l_max) + 1);
    out[0] = 1.0;
    if (l_max >= 1) out[1] = x;
    for (int k = 2; k <= l_max; ++k) {
        out[k] = (static_cast<double>(2 * k - 1) * x * out[k - 1] -
                  static_cast<double>(k - 1) * out[k - 2]) /
                 static_cast<double>(k);
    }
    return out;
}

double addition_kernel(int l, double cos_angle) {
    return static_cast<double>(2 * l + 1) / kFourPi * legendre_poly(l, cos_angle);
}

std::complex<double> spherical_harmonic(int l, int m, const SphericalPoint& pt) {
    if (l < 0 || std::abs(m) > l) {
        throw ConfigError("harmonic index requires l >= 0 and |m| <= l");
    }
    validate_point(pt);
    const int ma = std::abs(m);
    const double x = std::cos(pt.theta);
    const double s = std::sin(pt.theta);

    // Diagonal ascent to (ma, ma), then upward in l at fixed order.
    double pmm = 1.0 / std::sqrt(kFourPi);
    for (int k = 1; k <= ma; ++k) {
        pmm *= -std::sqrt(static_cast<double>(2 * k + 1) / static_cast<double>(2 * k)) * s;
    }
    double plm = pmm;
    if (l > ma) {
        double pm2 = pmm;
        double pm1 = std::sqrt(static_cast<double>(2 * ma + 3)) * x * pmm;
        plm = pm1;
        for (int k = ma + 2; k <= l; ++k) {
            const double kk = static_cast<double>(k) * k;
            const double mm = static_cast<double>(ma) * ma;
            const double a = std::sqrt((4.0 * kk - 1.0) / (kk - mm));
            const double b = std::sqrt(static_cast<double>(2 * k + 1) *
                                       static_cast<double>(k - 1 - ma) *
                                       static_cast<double>(k - 1 + ma) /
                                       (static_cast<double>(2 * k - 3) * (kk - mm)));
            const double pk = a * x * pm1 - b * pm2;
            pm2 = pm1;
            pm1 = pk;
            plm = pk;
        }
    }
    const std::complex<double> phase(std::cos(ma * pt.phi), std::sin(ma * pt.phi));
    std::complex<double> y = plm * phase;
    if (m < 0) {
        y = std::conj(y);
        if (ma % 2 != 0) y = -y;
    }
    return y;
}

AssocLegendreScheme::AssocLegendreScheme(int l_max) : l_max_(l_max) {
    if (l_max < 0) {
        throw ConfigError("associated Legendre table requires l_max >= 0");
    }
    size_ = static_cast<std::size_t>(l_max + 1) * (l_max + 2) / 2;
    rec_a_.assign(size_, 0.0);
    rec_b_.assign(size_, 0.0);
    diag_.resize(static_cast<std::size_t>(l_max) + 1);
    below_.resize(static_cast<std::size_t>(l_max) + 1);
    for (int m = 1; m <= l_max; ++m) {
        diag_[m] = -std::sqrt(static_cast<double>(2 * m + 1) / static_cast<double>(2 * m));
    }
    for (int m = 0; m < l_max; ++m) {
        below_[m] = std::sqrt(static_cast<double>(2 * m + 3));
    }
    for (int m = 0; m <= l_max; ++m) {
        const std::size_t base = offset(m);
        const double mm = static_cast<double>(m) * m;
        for (int l = m + 2; l <= l_max; ++l) {
            const double ll = static_cast<double>(l) * l;
            rec_a_[base + (l - m)] = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
            rec_b_[base + (l - m)] =
                std::sqrt(static_cast<double>(2 * l + 1) *
                          static_cast<double>(l - 1 - m) * static_cast<double>(l - 1 + m) /
                          (static_cast<double>(2 * l - 3) * (ll - mm)));
        }
    }
}

void AssocLegendreScheme::fill(double x, double s, double* out) const {
    double pmm = 1.0 / std::sqrt(kFourPi);
    for (int m = 0; m <= l_max_; ++m) {
        if (m > 0) pmm *= diag_[m] * s;
        const std::size_t base = offset(m);
        out[base] = pmm;
        if (m < l_max_) {
            out[base + 1] = below_[m] * x * pmm;
            const double* a = rec_a_.data() + base;
            const double* b = rec_b_.data() + base;
            double pm2 = out[base];
            double pm1 = out[base + 1];
            for (int l = m + 2; l <= l_max_; ++l) {
                const double pk = a[l - m] * x * pm1 - b[l - m] * pm2;
                out[base + (l - m)] = pk;
                pm2 = pm1;
                pm1 = pk;
            }
        }
    }
}

}  // namespace needlet
