#include "needlet/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"

namespace needlet {

namespace {

constexpr long kHardDegreeCap = 1'000'000;
constexpr int kBlock = 64;

void check_common(const PowerSpectrum* spectrum, int j1, int j2, double theta,
                  double tolerance) {
    if (spectrum == nullptr) throw ConfigError("covariance query needs a spectrum");
    if (j1 < 0 || j2 < 0) throw ConfigError("scale indices must be nonnegative");
    if (!(theta >= 0.0 && theta <= kPi))
        throw ConfigError("separation angle must lie in [0, pi]");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw ConfigError("truncation tolerance must lie in (0, 1)");
}

}  // namespace

Regime classify_regime(double alpha, int p) {
    const double critical = 4.0 * p + 2.0;
    if (alpha < critical) return Regime::Subcritical;
    if (alpha > critical) return Regime::Supercritical;
    return Regime::Critical;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Supercritical: return "supercritical";
        case Regime::Critical: return "critical";
    }
    return "unknown";
}

SeriesValue needlet_covariance_detail(const NeedletKernel& kernel,
                                      const PowerSpectrum& spectrum, int j1, int j2,
                                      double theta, double tolerance,
                                      long l_cap_override) {
    check_common(&spectrum, j1, j2, theta, tolerance);
    const long cap = l_cap_override > 0 ? l_cap_override : kHardDegreeCap;

    long lo = 1;
    long hi = cap + 1;  // open-ended until a stopping rule fires
    if (kernel.kind() == NeedletKernel::Kind::Npw) {
        const auto [lo1, hi1] = kernel.support_range(j1);
        const auto [lo2, hi2] = kernel.support_range(j2);
        lo = std::max(lo1, lo2);
        hi = std::min(hi1, hi2);
        if (lo > hi) return {0.0, 0};  // disjoint windows, exact zero
    }
    if (spectrum.variant() == PowerSpectrum::Variant::Tabulated) {
        hi = std::min(hi, static_cast<long>(spectrum.l_max_hint()));
        if (lo > hi) return {0.0, 0};
    }

    const long peak = std::max(kernel.peak_l(j1), kernel.peak_l(j2));
    const double x = std::cos(theta);

    KahanSum total;
    // Stream P_l with the three-term recurrence from l = 1 upward,
    // accumulating only l >= lo.
    double p_prev = 1.0;  // P_{l-1}
    double p_curr = x;    // P_l at l = 1
    long l = 1;
    long last_l = 0;
    bool done = false;
    while (!done) {
        KahanSum block;
        for (int i = 0; i < kBlock; ++i) {
            if (l > hi) { done = true; break; }
            if (l > cap)
                throw TruncationError(
                    "covariance series exceeded the degree cap without converging");
            if (l >= lo) {
                const double w = kernel.weight(l, j1) * kernel.weight(l, j2);
                if (w != 0.0) {
                    const double cl = spectrum.evaluate(static_cast<int>(l));
                    if (cl != 0.0) {
                        block.add(w * (2.0 * l + 1.0) / kFourPi * cl * p_curr);
                        last_l = l;
                    }
                }
            }
            // advance P recurrence to degree l+1
            const double p_next =
                ((2.0 * l + 1.0) * x * p_curr - static_cast<double>(l) * p_prev) /
                static_cast<double>(l + 1);
            p_prev = p_curr;
            p_curr = p_next;
            ++l;
        }
        total.add(block.value());
        if (done) break;
        if (l > peak && std::abs(block.value()) <= tolerance * std::abs(total.value()))
            break;
    }
    return {total.value(), last_l};
}

double needlet_covariance(const NeedletKernel& kernel, const PowerSpectrum& spectrum,
                          int j1, int j2, double theta, double tolerance) {
    return needlet_covariance_detail(kernel, spectrum, j1, j2, theta, tolerance).value;
}

double needlet_variance(const NeedletKernel& kernel, const PowerSpectrum& spectrum,
                        int j, double tolerance) {
    const double v =
        needlet_covariance_detail(kernel, spectrum, j, j, 0.0, tolerance).value;
    if (!(v > 0.0))
        throw ConfigError(
            "variance vanished: kernel window and spectrum support do not overlap");
    return v;
}

SeriesValue correlation_detail(const CorrelationQuery& q) {
    check_common(q.spectrum, q.j1, q.j2, q.theta, q.tolerance);
    if (q.j1 == q.j2 && q.theta == 0.0) {
        // covariance and variance are the same series here; unity is exact
        const SeriesValue v =
            needlet_covariance_detail(q.kernel, *q.spectrum, q.j1, q.j1, 0.0,
                                      q.tolerance);
        if (!(v.value > 0.0))
            throw ConfigError(
                "variance vanished: kernel window and spectrum support do not overlap");
        return {1.0, v.l_max_used};
    }
    const double v1 = needlet_variance(q.kernel, *q.spectrum, q.j1, q.tolerance);
    const double v2 = needlet_variance(q.kernel, *q.spectrum, q.j2, q.tolerance);
    const SeriesValue cov = needlet_covariance_detail(q.kernel, *q.spectrum, q.j1, q.j2,
                                                      q.theta, q.tolerance);
    double c = cov.value / std::sqrt(v1 * v2);
    const double excess = std::abs(c) - 1.0;
    if (excess > 0.0) {
        if (excess > 1e-12)
            throw TruncationError(
                "correlation left [-1, 1] by more than rounding allows");
        c = std::copysign(1.0, c);
    }
    return {c, cov.l_max_used};
}

double correlation(const CorrelationQuery& q) { return correlation_detail(q).value; }

double decay_bound_constant(int p, double alpha, double B, double c0, double Cg) {
    if (p < 1) throw ConfigError("shape order p must be a positive integer");
    if (!(B > 1.0)) throw ConfigError("scale base B must exceed 1");
    if (!(alpha > 2.0)) throw ConfigError("alpha must satisfy alpha > 2");
    if (!(c0 > 0.0 && Cg > 0.0))
        throw ConfigError("envelope constants c0 and Cg must be positive");
    const double critical = 4.0 * p + 2.0;
    if (alpha >= critical)
        throw RegimeError(
            "decay envelope undefined: alpha >= 4p+2 is the persistence regime");
    if (alpha >= critical - 1.0)
        throw RegimeError(
            "decay envelope constant undefined for alpha in [4p+1, 4p+2)");
    const double M = critical - alpha;
    return std::pow(2.0, 2.0 * p) * std::pow(kPi, M + 1.0) * M * M *
           std::tgamma(critical - 1.0 - alpha) * c0 * Cg * std::log(B);
}

double decay_bound(int p, double alpha, double B, int j1, int j2, double theta,
                   double c0, double Cg) {
    const double cm = decay_bound_constant(p, alpha, B, c0, Cg);
    if (j1 < 0 || j2 < 0 || j1 + j2 < 1)
        throw ConfigError("envelope needs nonnegative scales with j1 + j2 >= 1");
    if (!(theta >= 0.0 && theta <= kPi))
        throw ConfigError("separation angle must lie in [0, pi]");
    const double S = 0.5 * (j1 + j2);
    const double growth = std::pow(B, S - std::log(S) / std::log(B));
    return cm / std::pow(1.0 + growth * theta, 4.0 * p + 2.0 - alpha);
}

double persistence_angle(double epsilon, double alpha, int p, double c0) {
    if (p < 1) throw ConfigError("shape order p must be a positive integer");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ConfigError("persistence level epsilon must lie in (0, 1)");
    if (!(c0 > 0.0)) throw ConfigError("spectral constant c0 must be positive");
    const double critical = 4.0 * p + 2.0;
    if (!(alpha > critical))
        throw RegimeError(
            "persistence threshold requires alpha > 4p+2 (supercritical regime)");
    return epsilon * std::pow(1.0 + c0 * c0, -1.0 / (alpha - critical));
}

DecayFit decay_exponent_fit(double B, std::span<const int> j,
                            std::span<const double> corr) {
    if (!(B > 1.0)) throw ConfigError("scale base B must exceed 1");
    if (j.size() != corr.size())
        throw ConfigError("decay fit needs matching scale and correlation lists");
    if (j.size() < 4) throw ConfigError("decay fit needs at least 4 scales");
    const double lnB = std::log(B);
    std::vector<double> x(j.size()), y(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] < 1) throw ConfigError("decay fit scales must be >= 1");
        const double a = std::abs(corr[i]);
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("decay fit input degenerate: correlation underflowed");
        x[i] = (static_cast<double>(j[i]) - std::log(static_cast<double>(j[i])) / lnB) *
               lnB;
        y[i] = std::log(a);
    }
    const LineFit f = fit_line(x, y);
    return {-f.slope, f.rms_residual};
}

void write_report_csv(const CorrelationReport& report, std::ostream& out) {
    out << "j1,j2,theta,corr,bound,lmax\n";
    char buf[192];
    for (const ReportEntry& e : report.entries) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%ld\n", e.j1, e.j2,
                      e.theta, e.corr, e.bound, e.l_max_used);
        out << buf;
    }
}

}  // namespace needlet
