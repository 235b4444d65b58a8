#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "needlet/field.hpp"
#include "needlet/spectrum.hpp"
#include "needlet/windows.hpp"

namespace needlet {

// Probabilists' polynomial family: He_0 = 1, He_1 = x,
// He_{q+1} = x He_q - q He_{q-1}.
double hermite(int q, double x);

// Component u sums the degree-q polynomials with weights w[u][q-1], q >= 1.
struct StatisticConfig {
    std::vector<std::vector<double>> weights;

    int components() const { return static_cast<int>(weights.size()); }
    int max_degree() const;
    void validate() const;  // rectangular, nonempty, every row has a nonzero
};

// beta_hat_k = values_k / sqrt(variances_k); variances must be positive.
std::vector<double> normalize_coefficients(const CoefficientField& field,
                                           std::span<const double> variances);

// h_u = N^{-1/2} sum_k sum_q w_uq He_q(beta_hat_k).
std::vector<double> h_statistic(const StatisticConfig& config,
                                std::span<const double> normalized);

// Mean of values^2 / point weight: the scale-free variance level estimate.
double gamma_estimator(const CoefficientField& field);

struct SkewKurtStats {
    double s3 = 0.0;  // N^{-1/2} sum beta_hat^3
    double s4 = 0.0;  // N^{-1/2} sum (beta_hat^4 - 3)
};
SkewKurtStats skewness_kurtosis_stats(std::span<const double> normalized);

struct OmegaEstimate {
    int components = 0;
    std::size_t replicates = 0;
    std::vector<double> matrix;       // row-major U x U, uncentered second moment
    std::vector<double> eigenvalues;  // ascending
    double min_eigenvalue = 0.0;
};

// (1/R) sum_r h_r h_r^T over replicate component vectors; needs R >= U + 1.
OmegaEstimate estimate_omega(const std::vector<std::vector<double>>& h_rows);

struct SymEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major; column c is the eigenvector of values[c]
};
SymEigen jacobi_eigen(std::vector<double> a, int n);

// Multiplies every row by Omega^{-1/2}. A smallest eigenvalue at or below
// 1e-12 of the largest is a rank failure (RegimeError).
void whiten_rows(const OmegaEstimate& omega, std::vector<std::vector<double>>& h_rows);

// Largest gap between the sample's empirical distribution and the standard
// normal distribution function.
double ks_distance_to_normal(std::span<const double> sample);

struct CltThresholds {
    double mean_abs_max = 0.0;
    double var_lo = 0.0;
    double var_hi = 0.0;
    double ks_max = 0.0;
};

struct CltComponentRow {
    int u = 0;
    double mean = 0.0;
    double var = 0.0;   // unbiased sample variance
    double skew = 0.0;
    double exkurt = 0.0;
    double ks = 0.0;
    bool pass = false;
};

struct CltReport {
    std::vector<CltComponentRow> rows;
    bool pass = false;
};

CltReport clt_diagnostic(const std::vector<std::vector<double>>& whitened,
                         const CltThresholds& thresholds);

// Replicated Monte Carlo pipelines shared by the command line tools and the
// acceptance gate. Replicate r always draws from stream r.

struct GammaRunResult {
    int j = 0;
    std::size_t n_points = 0;
    double analytic = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;  // standard error of the replicate mean
};

// One field sample per replicate, analyzed at every requested scale.
// l_max = 0 selects the smallest degree the scales admit.
std::vector<GammaRunResult> run_gamma_pipeline(const NeedletKernel& kernel,
                                               const PowerSpectrum& spectrum,
                                               std::span<const int> js,
                                               std::size_t replicates,
                                               std::uint64_t seed, int l_max,
                                               double tolerance, int threads);

struct CltRunResult {
    int j = 0;
    std::size_t n_points = 0;
    double gamma_analytic = 0.0;
    OmegaEstimate omega;
    CltReport report;
    std::vector<std::vector<double>> h;  // raw R x U component draws
};

CltRunResult run_clt_pipeline(const NeedletKernel& kernel,
                              const PowerSpectrum& spectrum, int j,
                              const StatisticConfig& config, std::size_t replicates,
                              std::uint64_t seed, int l_max, double tolerance,
                              int threads, const CltThresholds& thresholds);

}  // namespace needlet
