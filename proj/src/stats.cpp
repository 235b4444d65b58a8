#include "needlet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "needlet/correlation.hpp"
#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/parallel.hpp"

namespace needlet {

double hermite(int q, double x) {
    if (q < 0) throw ConfigError("polynomial degree must be nonnegative");
    if (q == 0) return 1.0;
    double hm1 = 1.0;  // He_0
    double h = x;      // He_1
    for (int k = 1; k < q; ++k) {
        const double next = x * h - static_cast<double>(k) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

int StatisticConfig::max_degree() const {
    return weights.empty() ? 0 : static_cast<int>(weights.front().size());
}

void StatisticConfig::validate() const {
    if (weights.empty()) throw ConfigError("statistic needs at least one component");
    const std::size_t q = weights.front().size();
    if (q == 0) throw ConfigError("statistic rows must list at least one weight");
    for (const auto& row : weights) {
        if (row.size() != q)
            throw ConfigError("statistic weight rows must share one length");
        bool any = false;
        for (double w : row)
            if (w != 0.0) any = true;
        if (!any) throw ConfigError("statistic rows must have a nonzero weight");
    }
}

std::vector<double> normalize_coefficients(const CoefficientField& field,
                                           std::span<const double> variances) {
    if (field.values.size() != variances.size())
        throw ConfigError("variance table does not match the coefficient count");
    std::vector<double> out(field.values.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!(variances[k] > 0.0))
            throw ConfigError("coefficient variances must be positive");
        out[k] = field.values[k] / std::sqrt(variances[k]);
    }
    return out;
}

std::vector<double> h_statistic(const StatisticConfig& config,
                                std::span<const double> normalized) {
    config.validate();
    if (normalized.empty()) throw ConfigError("statistic needs a nonempty sample");
    const int U = config.components();
    const int Q = config.max_degree();
    std::vector<KahanSum> acc(static_cast<std::size_t>(U));
    std::vector<double> he(static_cast<std::size_t>(Q) + 1);
    for (double x : normalized) {
        he[0] = 1.0;
        if (Q >= 1) he[1] = x;
        for (int q = 1; q < Q; ++q)
            he[static_cast<std::size_t>(q) + 1] =
                x * he[static_cast<std::size_t>(q)] -
                static_cast<double>(q) * he[static_cast<std::size_t>(q) - 1];
        for (int u = 0; u < U; ++u) {
            double s = 0.0;
            const auto& row = config.weights[static_cast<std::size_t>(u)];
            for (int q = 1; q <= Q; ++q)
                s += row[static_cast<std::size_t>(q) - 1] * he[static_cast<std::size_t>(q)];
            acc[static_cast<std::size_t>(u)].add(s);
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(normalized.size()));
    std::vector<double> h(static_cast<std::size_t>(U));
    for (int u = 0; u < U; ++u) h[static_cast<std::size_t>(u)] = scale * acc[static_cast<std::size_t>(u)].value();
    return h;
}

double gamma_estimator(const CoefficientField& field) {
    if (field.grid == nullptr || field.values.size() != field.grid->size())
        throw ConfigError("coefficient field is not attached to its grid");
    KahanSum sum;
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        const double lambda = field.grid->weight(k);
        sum.add(field.values[k] * field.values[k] / lambda);
    }
    return sum.value() / static_cast<double>(field.values.size());
}

SkewKurtStats skewness_kurtosis_stats(std::span<const double> normalized) {
    if (normalized.empty()) throw ConfigError("statistic needs a nonempty sample");
    KahanSum s3, s4;
    for (double x : normalized) {
        const double x2 = x * x;
        s3.add(x * x2);
        s4.add(x2 * x2 - 3.0);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(normalized.size()));
    return {scale * s3.value(), scale * s4.value()};
}

OmegaEstimate estimate_omega(const std::vector<std::vector<double>>& h_rows) {
    if (h_rows.empty()) throw ConfigError("component covariance needs replicates");
    const int U = static_cast<int>(h_rows.front().size());
    if (U == 0) throw ConfigError("component vectors must be nonempty");
    if (h_rows.size() < static_cast<std::size_t>(U) + 1)
        throw ConfigError("component covariance needs at least U + 1 replicates");
    for (const auto& row : h_rows)
        if (static_cast<int>(row.size()) != U)
            throw ConfigError("component vectors must share one length");

    OmegaEstimate est;
    est.components = U;
    est.replicates = h_rows.size();
    est.matrix.assign(static_cast<std::size_t>(U) * U, 0.0);
    std::vector<KahanSum> acc(static_cast<std::size_t>(U) * U);
    for (const auto& row : h_rows)
        for (int i = 0; i < U; ++i)
            for (int k = i; k < U; ++k)
                acc[static_cast<std::size_t>(i) * U + k].add(
                    row[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(k)]);
    const double inv = 1.0 / static_cast<double>(h_rows.size());
    for (int i = 0; i < U; ++i)
        for (int k = i; k < U; ++k) {
            const double v = inv * acc[static_cast<std::size_t>(i) * U + k].value();
            est.matrix[static_cast<std::size_t>(i) * U + k] = v;
            est.matrix[static_cast<std::size_t>(k) * U + i] = v;
        }
    const SymEigen eig = jacobi_eigen(est.matrix, U);
    est.eigenvalues = eig.values;
    est.min_eigenvalue = eig.values.front();
    return est;
}

SymEigen jacobi_eigen(std::vector<double> a, int n) {
    if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n)
        throw ConfigError("eigensolver needs a square matrix");
    auto at = [&](int i, int k) -> double& { return a[static_cast<std::size_t>(i) * n + k]; };
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(at(i, i)));
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off <= 1e-30 * std::max(scale * scale, 1e-300)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double app = at(p, p), aqq = at(q, q);
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        const double aip = at(i, p), aiq = at(i, q);
                        at(i, p) = aip - s * (aiq + tau * aip);
                        at(p, i) = at(i, p);
                        at(i, q) = aiq + s * (aip - tau * aiq);
                        at(q, i) = at(i, q);
                    }
                    const double vip = v[static_cast<std::size_t>(i) * n + p];
                    const double viq = v[static_cast<std::size_t>(i) * n + q];
                    v[static_cast<std::size_t>(i) * n + p] = vip - s * (viq + tau * vip);
                    v[static_cast<std::size_t>(i) * n + q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return at(x, x) < at(y, y); });
    SymEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        out.values[static_cast<std::size_t>(c)] = at(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(c)]);
        for (int i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(i) * n + c] =
                v[static_cast<std::size_t>(i) * n + order[static_cast<std::size_t>(c)]];
    }
    return out;
}

void whiten_rows(const OmegaEstimate& omega, std::vector<std::vector<double>>& h_rows) {
    const int U = omega.components;
    const SymEigen eig = jacobi_eigen(omega.matrix, U);
    const double lmax = eig.values.back();
    if (!(lmax > 0.0) || eig.values.front() <= 1e-12 * lmax)
        throw RegimeError("component covariance is numerically singular: "
                          "the rank condition fails");
    // W = V diag(lambda^{-1/2}) V^T
    std::vector<double> w(static_cast<std::size_t>(U) * U, 0.0);
    for (int i = 0; i < U; ++i)
        for (int k = 0; k < U; ++k) {
            double s = 0.0;
            for (int c = 0; c < U; ++c)
                s += eig.vectors[static_cast<std::size_t>(i) * U + c] *
                     eig.vectors[static_cast<std::size_t>(k) * U + c] /
                     std::sqrt(eig.values[static_cast<std::size_t>(c)]);
            w[static_cast<std::size_t>(i) * U + k] = s;
        }
    std::vector<double> tmp(static_cast<std::size_t>(U));
    for (auto& row : h_rows) {
        if (static_cast<int>(row.size()) != U)
            throw ConfigError("component vectors must share one length");
        for (int i = 0; i < U; ++i) {
            double s = 0.0;
            for (int k = 0; k < U; ++k)
                s += w[static_cast<std::size_t>(i) * U + k] * row[static_cast<std::size_t>(k)];
            tmp[static_cast<std::size_t>(i)] = s;
        }
        row.assign(tmp.begin(), tmp.end());
    }
}

double ks_distance_to_normal(std::span<const double> sample) {
    if (sample.empty()) throw ConfigError("distribution distance needs a sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = normal_cdf(s[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

CltReport clt_diagnostic(const std::vector<std::vector<double>>& whitened,
                         const CltThresholds& thresholds) {
    if (whitened.empty()) throw ConfigError("diagnostics need replicates");
    const int U = static_cast<int>(whitened.front().size());
    const double n = static_cast<double>(whitened.size());
    if (whitened.size() < 8)
        throw ConfigError("diagnostics need at least 8 replicates");
    CltReport report;
    report.pass = true;
    std::vector<double> col(whitened.size());
    for (int u = 0; u < U; ++u) {
        for (std::size_t r = 0; r < whitened.size(); ++r)
            col[r] = whitened[r][static_cast<std::size_t>(u)];
        KahanSum ms;
        for (double x : col) ms.add(x);
        const double mean = ms.value() / n;
        KahanSum c2, c3, c4;
        for (double x : col) {
            const double d = x - mean;
            c2.add(d * d);
            c3.add(d * d * d);
            c4.add(d * d * d * d);
        }
        const double m2 = c2.value() / n;
        const double var = c2.value() / (n - 1.0);
        CltComponentRow row;
        row.u = u + 1;
        row.mean = mean;
        row.var = var;
        row.skew = m2 > 0.0 ? (c3.value() / n) / std::pow(m2, 1.5) : 0.0;
        row.exkurt = m2 > 0.0 ? (c4.value() / n) / (m2 * m2) - 3.0 : 0.0;
        row.ks = ks_distance_to_normal(col);
        row.pass = std::abs(row.mean) <= thresholds.mean_abs_max &&
                   row.var >= thresholds.var_lo && row.var <= thresholds.var_hi &&
                   row.ks <= thresholds.ks_max;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<GammaRunResult> run_gamma_pipeline(const NeedletKernel& kernel,
                                               const PowerSpectrum& spectrum,
                                               std::span<const int> js,
                                               std::size_t replicates,
                                               std::uint64_t seed, int l_max,
                                               double tolerance, int threads) {
    if (js.empty()) throw ConfigError("variance-level run needs at least one scale");
    if (replicates < 16)
        throw ConfigError("variance-level run needs at least 16 replicates");
    long need = 0;
    for (int j : js) need = std::max(need, synthesis_truncation_l(kernel, j));
    if (l_max == 0) l_max = static_cast<int>(need);
    if (l_max < need)
        throw ConfigError("l_max " + std::to_string(l_max) +
                          " too low for the requested scales (needs >= " +
                          std::to_string(need) + ")");

    struct Scale {
        int j;
        CubatureGrid grid;
        RingSynthesizer* synth;
        std::vector<double> weights;
        double analytic;
    };
    std::vector<Scale> scales;
    std::vector<std::unique_ptr<RingSynthesizer>> synths;
    scales.reserve(js.size());
    for (int j : js) {
        Scale s;
        s.j = j;
        s.grid = build_grid_default(kernel.B(), j);
        s.analytic = needlet_variance(kernel, spectrum, j, tolerance);
        s.weights.resize(static_cast<std::size_t>(l_max) + 1);
        for (int l = 0; l <= l_max; ++l)
            s.weights[static_cast<std::size_t>(l)] = kernel.weight(l, j);
        scales.push_back(std::move(s));
    }
    for (Scale& s : scales) {
        synths.emplace_back(std::make_unique<RingSynthesizer>(s.grid, l_max));
        s.synth = synths.back().get();
    }

    std::vector<std::vector<double>> gamma(scales.size(),
                                           std::vector<double>(replicates, 0.0));
    parallel_for(replicates, threads, [&](std::size_t r) {
        const HarmonicCoefficients alm = sample_alm(spectrum, l_max, seed, r);
        HarmonicCoefficients weighted(l_max);
        for (std::size_t si = 0; si < scales.size(); ++si) {
            const Scale& s = scales[si];
            apply_multipole_weights(alm, s.weights, weighted);
            CoefficientField field;
            field.grid = &s.grid;
            field.j = s.j;
            field.values.resize(s.grid.size());
            s.synth->synthesize(weighted, field.values);
            for (std::size_t i = 0; i < field.values.size(); ++i)
                field.values[i] *= std::sqrt(s.grid.weight(i));
            gamma[si][r] = gamma_estimator(field);
        }
    });

    std::vector<GammaRunResult> out;
    const double n = static_cast<double>(replicates);
    for (std::size_t si = 0; si < scales.size(); ++si) {
        KahanSum ms;
        for (double g : gamma[si]) ms.add(g);
        const double mean = ms.value() / n;
        KahanSum vs;
        for (double g : gamma[si]) vs.add((g - mean) * (g - mean));
        GammaRunResult r;
        r.j = scales[si].j;
        r.n_points = scales[si].grid.size();
        r.analytic = scales[si].analytic;
        r.mc_mean = mean;
        r.mc_se = std::sqrt(vs.value() / (n - 1.0) / n);
        out.push_back(r);
    }
    return out;
}

CltRunResult run_clt_pipeline(const NeedletKernel& kernel,
                              const PowerSpectrum& spectrum, int j,
                              const StatisticConfig& config, std::size_t replicates,
                              std::uint64_t seed, int l_max, double tolerance,
                              int threads, const CltThresholds& thresholds) {
    config.validate();
    const long need = synthesis_truncation_l(kernel, j);
    if (l_max == 0) l_max = static_cast<int>(need);
    if (l_max < need)
        throw ConfigError("l_max " + std::to_string(l_max) +
                          " too low for scale " + std::to_string(j) +
                          " (needs >= " + std::to_string(need) + ")");
    if (replicates < static_cast<std::size_t>(config.components()) + 1)
        throw ConfigError("component covariance needs at least U + 1 replicates");

    CltRunResult result;
    result.j = j;
    const CubatureGrid grid = build_grid_default(kernel.B(), j);
    result.n_points = grid.size();
    result.gamma_analytic = needlet_variance(kernel, spectrum, j, tolerance);
    const RingSynthesizer synth(grid, l_max);
    std::vector<double> weights(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
        weights[static_cast<std::size_t>(l)] = kernel.weight(l, j);
    std::vector<double> variances(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        variances[k] = grid.weight(k) * result.gamma_analytic;

    result.h.assign(replicates, {});
    parallel_for(replicates, threads, [&](std::size_t r) {
        const HarmonicCoefficients alm = sample_alm(spectrum, l_max, seed, r);
        HarmonicCoefficients weighted(l_max);
        apply_multipole_weights(alm, weights, weighted);
        CoefficientField field;
        field.grid = &grid;
        field.j = j;
        field.values.resize(grid.size());
        synth.synthesize(weighted, field.values);
        for (std::size_t i = 0; i < field.values.size(); ++i)
            field.values[i] *= std::sqrt(grid.weight(i));
        const std::vector<double> norm = normalize_coefficients(field, variances);
        result.h[r] = h_statistic(config, norm);
    });

    result.omega = estimate_omega(result.h);
    std::vector<std::vector<double>> whitened = result.h;
    whiten_rows(result.omega, whitened);
    result.report = clt_diagnostic(whitened, thresholds);
    return result;
}

}  // namespace needlet
