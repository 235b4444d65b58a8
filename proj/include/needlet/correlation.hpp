#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "needlet/spectrum.hpp"
#include "needlet/windows.hpp"

namespace needlet {

// alpha < 4p+2: coefficient correlations die out across scales (subcritical);
// alpha > 4p+2: they persist at small angles (supercritical).
enum class Regime { Subcritical, Supercritical, Critical };

Regime classify_regime(double alpha, int p);
const char* regime_name(Regime r);

struct CorrelationQuery {
    NeedletKernel kernel;
    const PowerSpectrum* spectrum = nullptr;
    int j1 = 0;
    int j2 = 0;
    double theta = 0.0;        // radians in [0, pi]
    double tolerance = 1e-12;  // relative truncation tolerance in (0, 1)
};

struct SeriesValue {
    double value = 0.0;
    long l_max_used = 0;
};

// Lambda-free covariance series
//   sum_{l>=1} w_{j1}(l) w_{j2}(l) (2l+1)/(4 pi) C_l P_l(cos theta),
// summed sequentially in ascending l. Truncation: once past the weight peak,
// stop when a whole 64-term block moves the running sum by less than
// tolerance times its magnitude; hard degree cap 1e6 (TruncationError).
// Compact-window kernels sum only their support overlap: disjoint scales
// (|j1 - j2| >= 2) give an exact 0. l_cap_override, when positive, replaces
// the hard cap (truncation-soundness tests).
SeriesValue needlet_covariance_detail(const NeedletKernel& kernel,
                                      const PowerSpectrum& spectrum, int j1, int j2,
                                      double theta, double tolerance,
                                      long l_cap_override = 0);

double needlet_covariance(const NeedletKernel& kernel, const PowerSpectrum& spectrum,
                          int j1, int j2, double theta, double tolerance);

// Covariance at j1 = j2 = j, theta = 0; strictly positive.
double needlet_variance(const NeedletKernel& kernel, const PowerSpectrum& spectrum,
                        int j, double tolerance);

// covariance / sqrt(variance1 * variance2), clamped into [-1, 1] only against
// rounding within 1e-12 (beyond that it is a TruncationError).
double correlation(const CorrelationQuery& q);
SeriesValue correlation_detail(const CorrelationQuery& q);

// Subcritical decay envelope
//   C_M / (1 + B^{S - log_B S} * theta)^{4p+2-alpha},   S = (j1+j2)/2,
// with C_M = 2^{2p} pi^{M+1} (4p+2-alpha)^2 Gamma(4p+1-alpha) c0 Cg ln B and
// M = 4p+2-alpha taken as a real number; ln B is the natural logarithm.
// Refuses alpha >= 4p+1 (the constant's Gamma factor loses meaning there)
// and alpha >= 4p+2 (persistence regime) with a RegimeError.
double decay_bound(int p, double alpha, double B, int j1, int j2, double theta,
                   double c0, double Cg);

// The constant C_M alone (theta = 0 value of the envelope).
double decay_bound_constant(int p, double alpha, double B, double c0, double Cg);

// Largest angular separation with guaranteed correlation persistence:
// epsilon * (1 + c0^2)^{-1/(alpha - 4p - 2)}. Requires alpha > 4p+2.
double persistence_angle(double epsilon, double alpha, int p, double c0);

struct DecayFit {
    double exponent = 0.0;      // kappa in |corr| ~ B^{-(j - log_B j) kappa}
    double rms_residual = 0.0;  // of log|corr| about the fitted line
};

// Least-squares slope of log|correlation| against (j - log_B j) * ln B over
// at least 4 scales; correlations must be nonzero and finite.
DecayFit decay_exponent_fit(double B, std::span<const int> j,
                            std::span<const double> corr);

struct ReportEntry {
    int j1 = 0;
    int j2 = 0;
    double theta = 0.0;
    double corr = 0.0;
    double bound = 0.0;  // NaN when no envelope applies
    long l_max_used = 0;
};

struct CorrelationReport {
    std::vector<ReportEntry> entries;
    Regime regime = Regime::Subcritical;
    bool has_fit = false;
    DecayFit fit;
};

// CSV with header "j1,j2,theta,corr,bound,lmax".
void write_report_csv(const CorrelationReport& report, std::ostream& out);

}  // namespace needlet
