#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "needlet/correlation.hpp"
#include "needlet/cubature.hpp"
#include "needlet/errors.hpp"
#include "needlet/field.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/spectrum.hpp"
#include "needlet/stats.hpp"
#include "needlet/windows.hpp"

namespace needlet::tools {

namespace {

using nlohmann::json;

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Output files live under one directory; every file opens with the command
// name and the digest of the effective config. The timestamp line is the one
// part reruns may change.
class OutputWriter {
  public:
    OutputWriter(const Config& cfg, std::string command)
        : dir_(cfg.get("run.out", "out")),
          command_(std::move(command)),
          digest_(cfg.digest_hex()),
          stamp_(utc_stamp()) {
        std::filesystem::create_directories(dir_);
    }

    std::ofstream csv(const std::string& name) const {
        std::ofstream out(dir_ / name);
        if (!out) throw ConfigError("cannot open output file " + (dir_ / name).string());
        out << "# command=" << command_ << "\n";
        out << "# config_digest=" << digest_ << "\n";
        out << "# generated=" << stamp_ << "\n";
        return out;
    }

    void write_json(const std::string& name, json j) const {
        j["command"] = command_;
        j["config_digest"] = digest_;
        j["generated"] = stamp_;
        std::ofstream out(dir_ / name);
        if (!out) throw ConfigError("cannot open output file " + (dir_ / name).string());
        out << j.dump(2) << "\n";
    }

  private:
    std::filesystem::path dir_;
    std::string command_;
    std::string digest_;
    std::string stamp_;
};

NeedletKernel kernel_from(const Config& cfg) {
    const std::string type = cfg.get("kernel.type", "mexican");
    const double B = cfg.get_double("kernel.B", 2.0);
    if (type == "npw") return NeedletKernel::npw(B);
    if (type == "mexican")
        return NeedletKernel::mexican(B, static_cast<int>(cfg.get_long("kernel.p", 1)));
    throw ConfigError("config key kernel.type: '" + type +
                      "' is not one of mexican, npw");
}

PowerSpectrum spectrum_from(const Config& cfg, const NeedletKernel& kernel) {
    const std::string variant = cfg.get("spectrum.variant", "alpha_regular");
    if (variant == "alpha_regular")
        return PowerSpectrum::alpha_regular(cfg.require_double("spectrum.alpha"),
                                            kernel.B());
    if (variant == "exponential")
        return PowerSpectrum::exponential(cfg.require_double_list("spectrum.h_coeffs"),
                                          cfg.get_double("spectrum.p_exp", 1.0));
    if (variant == "tabulated")
        return PowerSpectrum::tabulated_from_file(cfg.require("spectrum.table"));
    throw ConfigError("config key spectrum.variant: '" + variant +
                      "' is not one of alpha_regular, exponential, tabulated");
}

double csv_num(double v) { return v; }

void append_csv_row(std::ofstream& out, std::initializer_list<double> vals) {
    char buf[64];
    bool first = true;
    for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.17g", csv_num(v));
        if (!first) out << ',';
        out << buf;
        first = false;
    }
    out << '\n';
}

struct CommonRun {
    NeedletKernel kernel;
    PowerSpectrum spectrum;
    double tolerance;
    std::uint64_t seed;
    int threads;
};

CommonRun common_from(const Config& cfg) {
    NeedletKernel k = kernel_from(cfg);
    PowerSpectrum s = spectrum_from(cfg, k);
    return {std::move(k), std::move(s), cfg.get_double("run.tolerance", 1e-12),
            static_cast<std::uint64_t>(cfg.get_long("run.seed", 1)),
            static_cast<int>(cfg.get_long("run.threads", 1))};
}

Regime regime_of(const CommonRun& run) {
    if (run.spectrum.variant() != PowerSpectrum::Variant::AlphaRegular ||
        run.kernel.kind() != NeedletKernel::Kind::Mexican)
        return Regime::Subcritical;  // envelope machinery does not apply anyway
    return classify_regime(run.spectrum.alpha(), run.kernel.p());
}

// Envelope value for one entry, NaN when outside its regime of validity.
double optional_bound(const CommonRun& run, const Config& cfg, int j1, int j2,
                      double theta) {
    if (run.spectrum.variant() != PowerSpectrum::Variant::AlphaRegular ||
        run.kernel.kind() != NeedletKernel::Kind::Mexican)
        return std::numeric_limits<double>::quiet_NaN();
    try {
        return decay_bound(run.kernel.p(), run.spectrum.alpha(), run.kernel.B(), j1, j2,
                           theta, cfg.get_double("spectrum.c0", 1.0),
                           cfg.get_double("spectrum.Cg", 1.0));
    } catch (const RegimeError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::vector<std::pair<int, int>> scale_pairs(const Config& cfg) {
    std::vector<std::pair<int, int>> pairs;
    if (cfg.has("run.j_pairs")) {
        for (const std::string& item : [&] {
                 std::vector<std::string> v;
                 std::string raw = cfg.require("run.j_pairs");
                 std::size_t start = 0;
                 while (true) {
                     const std::size_t pos = raw.find(',', start);
                     v.push_back(raw.substr(start, pos - start));
                     if (pos == std::string::npos) break;
                     start = pos + 1;
                 }
                 return v;
             }()) {
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("config key run.j_pairs: entries look like j1:j2");
            pairs.emplace_back(std::stoi(item.substr(0, colon)),
                               std::stoi(item.substr(colon + 1)));
        }
        return pairs;
    }
    const std::vector<int> js = cfg.require_int_list("run.j");
    for (std::size_t i = 0; i < js.size(); ++i)
        for (std::size_t k = i; k < js.size(); ++k) pairs.emplace_back(js[i], js[k]);
    return pairs;
}

CorrelationReport build_report(const CommonRun& run, const Config& cfg,
                               const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<double>& thetas, bool need_bound) {
    CorrelationReport report;
    report.regime = regime_of(run);
    for (const auto& [j1, j2] : pairs) {
        for (double theta : thetas) {
            const SeriesValue c = correlation_detail(
                {run.kernel, &run.spectrum, j1, j2, theta, run.tolerance});
            ReportEntry e;
            e.j1 = j1;
            e.j2 = j2;
            e.theta = theta;
            e.corr = c.value;
            e.l_max_used = c.l_max_used;
            e.bound = need_bound
                          ? decay_bound(run.kernel.p(), run.spectrum.alpha(),
                                        run.kernel.B(), j1, j2, theta,
                                        cfg.get_double("spectrum.c0", 1.0),
                                        cfg.get_double("spectrum.Cg", 1.0))
                          : optional_bound(run, cfg, j1, j2, theta);
            report.entries.push_back(e);
        }
    }
    return report;
}

int run_kernel_dump(const Config& cfg) {
    OutputWriter out(cfg, "kernel-dump");
    const NeedletKernel kernel = kernel_from(cfg);
    const std::vector<int> js = cfg.require_int_list("run.j");
    std::ofstream weights = out.csv("weights.csv");
    weights << "j,l,weight\n";
    for (int j : js) {
        long lo = 1, hi = 0;
        if (kernel.kind() == NeedletKernel::Kind::Npw) {
            const auto [a, b] = kernel.support_range(j);
            lo = a;
            hi = b;
        } else {
            hi = kernel.profile_truncation_l(j);
        }
        for (long l = lo; l <= hi; ++l) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%d,%ld,%.17g\n", j, l,
                          kernel.weight(static_cast<int>(l), j));
            weights << buf;
        }
    }
    json summary;
    summary["kind"] = kernel.kind() == NeedletKernel::Kind::Npw ? "npw" : "mexican";
    summary["B"] = kernel.B();
    if (kernel.kind() == NeedletKernel::Kind::Mexican) summary["p"] = kernel.p();
    summary["j"] = js;
    if (cfg.get_bool("run.grids", true)) {
        for (int j : js) {
            const CubatureGrid grid = build_grid_default(kernel.B(), j);
            std::ofstream g = out.csv("grid_j" + std::to_string(j) + ".csv");
            export_grid_csv(grid, g);
            summary["grid_points"][std::to_string(j)] = grid.size();
        }
    }
    out.write_json("summary.json", summary);
    return 0;
}

int run_corr_table(const Config& cfg) {
    OutputWriter out(cfg, "corr-table");
    const CommonRun run = common_from(cfg);
    const CorrelationReport report = build_report(
        run, cfg, scale_pairs(cfg), cfg.require_double_list("run.theta"), false);
    std::ofstream table = out.csv("table.csv");
    write_report_csv(report, table);
    json summary;
    summary["regime"] = regime_name(report.regime);
    summary["entries"] = report.entries.size();
    out.write_json("summary.json", summary);
    return 0;
}

int run_decay_fit(const Config& cfg) {
    OutputWriter out(cfg, "decay-fit");
    const CommonRun run = common_from(cfg);
    const std::vector<double> thetas = cfg.require_double_list("run.theta");
    if (thetas.size() != 1)
        throw ConfigError("config key run.theta: decay-fit needs exactly one angle");
    const std::vector<int> js = cfg.require_int_list("run.j");
    std::vector<std::pair<int, int>> pairs;
    for (int j : js) pairs.emplace_back(j, j);
    CorrelationReport report = build_report(run, cfg, pairs, thetas, false);
    std::vector<double> corr;
    for (const ReportEntry& e : report.entries) corr.push_back(e.corr);
    report.fit = decay_exponent_fit(run.kernel.B(), js, corr);
    report.has_fit = true;
    std::ofstream series = out.csv("series.csv");
    write_report_csv(report, series);
    json fit;
    fit["theta"] = thetas.front();
    fit["exponent"] = report.fit.exponent;
    fit["rms_residual"] = report.fit.rms_residual;
    fit["regime"] = regime_name(report.regime);
    out.write_json("fit.json", fit);
    return 0;
}

int run_bound_check(const Config& cfg) {
    OutputWriter out(cfg, "bound-check");
    const CommonRun run = common_from(cfg);
    if (run.spectrum.variant() != PowerSpectrum::Variant::AlphaRegular ||
        run.kernel.kind() != NeedletKernel::Kind::Mexican)
        throw ConfigError("bound-check needs the mexican kernel with an "
                          "alpha-regular spectrum");
    const CorrelationReport report = build_report(
        run, cfg, scale_pairs(cfg), cfg.require_double_list("run.theta"), true);
    std::ofstream table = out.csv("check.csv");
    write_report_csv(report, table);
    std::size_t violations = 0;
    for (const ReportEntry& e : report.entries)
        if (std::abs(e.corr) > e.bound) ++violations;
    json verdict;
    verdict["entries"] = report.entries.size();
    verdict["violations"] = violations;
    verdict["pass"] = violations == 0;
    out.write_json("verdict.json", verdict);
    return violations == 0 ? 0 : 1;
}

int run_supercritical_check(const Config& cfg) {
    OutputWriter out(cfg, "supercritical-check");
    const CommonRun run = common_from(cfg);
    if (run.spectrum.variant() != PowerSpectrum::Variant::AlphaRegular ||
        run.kernel.kind() != NeedletKernel::Kind::Mexican)
        throw ConfigError("supercritical-check needs the mexican kernel with an "
                          "alpha-regular spectrum");
    const double epsilon = cfg.require_double("run.epsilon");
    const double delta = persistence_angle(epsilon, run.spectrum.alpha(),
                                           run.kernel.p(),
                                           cfg.get_double("spectrum.c0", 1.0));
    const double theta = std::min(cfg.get_double("run.theta", 0.05), delta);
    const std::vector<int> js = cfg.require_int_list("run.j");
    std::vector<std::pair<int, int>> pairs;
    for (int j : js) pairs.emplace_back(j, j);
    const CorrelationReport report = build_report(run, cfg, pairs, {theta}, false);
    std::ofstream table = out.csv("plateau.csv");
    write_report_csv(report, table);
    double min_corr = std::numeric_limits<double>::infinity();
    for (const ReportEntry& e : report.entries) min_corr = std::min(min_corr, e.corr);
    const bool pass = min_corr > 1.0 - epsilon;
    json verdict;
    verdict["epsilon"] = epsilon;
    verdict["persistence_angle"] = delta;
    verdict["theta"] = theta;
    verdict["min_corr"] = min_corr;
    verdict["pass"] = pass;
    out.write_json("verdict.json", verdict);
    return pass ? 0 : 1;
}

int run_smhw_gap(const Config& cfg) {
    OutputWriter out(cfg, "smhw-gap");
    const NeedletKernel kernel = kernel_from(cfg);
    if (kernel.kind() != NeedletKernel::Kind::Mexican || kernel.p() != 1)
        throw ConfigError("smhw-gap compares against the order-1 mexican kernel; "
                          "set kernel.type=mexican and kernel.p=1");
    const std::vector<int> js = cfg.require_int_list("run.j");
    const long n_theta = cfg.get_long("run.theta_points", 200);
    if (n_theta < 8) throw ConfigError("config key run.theta_points: needs >= 8");
    json summary;
    for (int j : js) {
        const double scale = std::pow(kernel.B(), -j);
        const double tmin = cfg.get_double("run.theta_min", scale / 4.0);
        const double tmax = cfg.get_double("run.theta_max", 1.0);
        if (!(tmin > 0.0 && tmax > tmin))
            throw ConfigError("config keys run.theta_min/max: need 0 < min < max");
        std::vector<double> thetas(static_cast<std::size_t>(n_theta));
        for (long i = 0; i < n_theta; ++i)
            thetas[static_cast<std::size_t>(i)] =
                tmin * std::pow(tmax / tmin,
                                static_cast<double>(i) / static_cast<double>(n_theta - 1));
        const SmhwProfile prof(kernel.B(), j);
        const CubatureGrid grid = build_grid_default(kernel.B(), j);
        const SmhwGapResult gap = smhw_approximation_gap(prof, kernel, thetas, grid);
        const std::vector<double> psi = mexican_profile_series(kernel, j, thetas);
        std::ofstream curve = out.csv("gap_j" + std::to_string(j) + ".csv");
        curve << "theta,target,fitted,gap\n";
        double sup_gap = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            append_csv_row(curve, {thetas[i], prof.value(thetas[i]),
                                   gap.K_fit * psi[i], gap.gap_curve[i]});
            sup_gap = std::max(sup_gap, gap.gap_curve[i]);
        }
        json row;
        row["j"] = j;
        row["K_fit"] = gap.K_fit;
        row["sup_gap"] = sup_gap;
        row["sup_gap_scaled"] = sup_gap / scale;
        summary["scales"].push_back(row);
    }
    out.write_json("summary.json", summary);
    return 0;
}

int run_mc_corr(const Config& cfg) {
    OutputWriter out(cfg, "mc-corr");
    const CommonRun run = common_from(cfg);
    const std::vector<int> js = cfg.require_int_list("run.j");
    if (js.empty() || js.size() > 2)
        throw ConfigError("config key run.j: mc-corr takes one or two scales");
    const int j1 = js.front();
    const int j2 = js.back();
    const std::vector<double> thetas = cfg.require_double_list("run.theta");
    if (thetas.size() != 1)
        throw ConfigError("config key run.theta: mc-corr needs exactly one angle");
    const double theta = thetas.front();
    const std::size_t replicates =
        static_cast<std::size_t>(cfg.get_long("run.replicates", 500));
    long l_max = cfg.get_long("run.l_max", 0);
    if (l_max == 0)
        l_max = std::max(synthesis_truncation_l(run.kernel, j1),
                         synthesis_truncation_l(run.kernel, j2));
    const SphericalPoint a{kPi / 2.0, 0.0};
    const SphericalPoint b{kPi / 2.0, theta};
    const double analytic =
        correlation({run.kernel, &run.spectrum, j1, j2, theta, run.tolerance});
    const McCorrelationResult mc = monte_carlo_correlation(
        run.kernel, run.spectrum, j1, j2, a, b, replicates, run.seed,
        static_cast<int>(l_max), run.threads, true);
    std::ofstream pairs = out.csv("pairs.csv");
    pairs << "replicate,k,beta\n";
    for (std::size_t r = 0; r < mc.pairs.size(); ++r) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%zu,0,%.17g\n%zu,1,%.17g\n", r, mc.pairs[r][0],
                      r, mc.pairs[r][1]);
        pairs << buf;
    }
    const double z = mc.jackknife_se > 0.0 ? (mc.empirical - analytic) / mc.jackknife_se
                                           : std::numeric_limits<double>::infinity();
    json result;
    result["j1"] = j1;
    result["j2"] = j2;
    result["theta"] = theta;
    result["l_max"] = l_max;
    result["replicates"] = replicates;
    result["analytic"] = analytic;
    result["empirical"] = mc.empirical;
    result["jackknife_se"] = mc.jackknife_se;
    result["z"] = z;
    int code = 0;
    if (cfg.has("run.epsilon")) {
        const double epsilon = cfg.require_double("run.epsilon");
        const bool pass = mc.empirical > 1.0 - epsilon;
        result["epsilon"] = epsilon;
        result["pass"] = pass;
        if (!pass) code = 1;
    }
    out.write_json("result.json", result);
    return code;
}

int run_clt(const Config& cfg) {
    OutputWriter out(cfg, "clt");
    const CommonRun run = common_from(cfg);
    const std::vector<int> js = cfg.require_int_list("run.j");
    if (js.size() != 1)
        throw ConfigError("config key run.j: clt takes exactly one scale");
    const std::size_t replicates =
        static_cast<std::size_t>(cfg.get_long("run.replicates", 256));
    StatisticConfig stat;
    stat.weights = cfg.require_matrix("statistic.rows");
    const double sqrt_r = std::sqrt(static_cast<double>(replicates));
    CltThresholds thresholds;
    thresholds.mean_abs_max = cfg.get_double("thresholds.mean_abs_max", 9.0 / sqrt_r);
    thresholds.var_lo = cfg.get_double("thresholds.var_lo", 0.85);
    thresholds.var_hi = cfg.get_double("thresholds.var_hi", 1.15);
    thresholds.ks_max = cfg.get_double("thresholds.ks_max", 1.63 / sqrt_r);
    const CltRunResult res = run_clt_pipeline(
        run.kernel, run.spectrum, js.front(), stat, replicates, run.seed,
        static_cast<int>(cfg.get_long("run.l_max", 0)), run.tolerance, run.threads,
        thresholds);
    std::ofstream comps = out.csv("components.csv");
    comps << "u,mean,var,skew,kurt,ks\n";
    for (const CltComponentRow& row : res.report.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.u,
                      row.mean, row.var, row.skew, row.exkurt, row.ks);
        comps << buf;
    }
    json result;
    result["j"] = res.j;
    result["n_points"] = res.n_points;
    result["replicates"] = replicates;
    result["gamma_analytic"] = res.gamma_analytic;
    result["omega"]["matrix"] = json::array();
    const int U = res.omega.components;
    for (int i = 0; i < U; ++i) {
        json jrow = json::array();
        for (int k = 0; k < U; ++k)
            jrow.push_back(res.omega.matrix[static_cast<std::size_t>(i) * U + k]);
        result["omega"]["matrix"].push_back(jrow);
    }
    result["omega"]["eigenvalues"] = res.omega.eigenvalues;
    result["omega"]["min_eigenvalue"] = res.omega.min_eigenvalue;
    result["thresholds"] = {{"mean_abs_max", thresholds.mean_abs_max},
                            {"var_lo", thresholds.var_lo},
                            {"var_hi", thresholds.var_hi},
                            {"ks_max", thresholds.ks_max}};
    json rows = json::array();
    for (const CltComponentRow& row : res.report.rows)
        rows.push_back({{"u", row.u},
                        {"mean", row.mean},
                        {"var", row.var},
                        {"skew", row.skew},
                        {"exkurt", row.exkurt},
                        {"ks", row.ks},
                        {"pass", row.pass}});
    result["components"] = rows;
    result["pass"] = res.report.pass;
    out.write_json("result.json", result);
    if (cfg.get_bool("run.enforce", false) && !res.report.pass) return 1;
    return 0;
}

int run_gamma(const Config& cfg) {
    OutputWriter out(cfg, "gamma");
    const CommonRun run = common_from(cfg);
    const std::vector<int> js = cfg.require_int_list("run.j");
    const std::size_t replicates =
        static_cast<std::size_t>(cfg.get_long("run.replicates", 256));
    const std::vector<GammaRunResult> rows = run_gamma_pipeline(
        run.kernel, run.spectrum, js, replicates, run.seed,
        static_cast<int>(cfg.get_long("run.l_max", 0)), run.tolerance, run.threads);
    std::ofstream table = out.csv("gamma.csv");
    table << "j,n_points,analytic,mc_mean,mc_se,z\n";
    bool pass = true;
    json jrows = json::array();
    for (const GammaRunResult& r : rows) {
        const double z = r.mc_se > 0.0 ? (r.mc_mean - r.analytic) / r.mc_se
                                       : std::numeric_limits<double>::infinity();
        pass = pass && std::abs(z) <= 3.0;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g\n", r.j,
                      r.n_points, r.analytic, r.mc_mean, r.mc_se, z);
        table << buf;
        jrows.push_back({{"j", r.j},
                         {"n_points", r.n_points},
                         {"analytic", r.analytic},
                         {"mc_mean", r.mc_mean},
                         {"mc_se", r.mc_se},
                         {"z", z}});
    }
    json result;
    result["replicates"] = replicates;
    result["scales"] = jrows;
    result["pass"] = pass;
    out.write_json("result.json", result);
    if (cfg.get_bool("run.enforce", false) && !pass) return 1;
    return 0;
}

}  // namespace

int run_command(const std::string& command, const Config& cfg) {
    if (command == "kernel-dump") return run_kernel_dump(cfg);
    if (command == "corr-table") return run_corr_table(cfg);
    if (command == "decay-fit") return run_decay_fit(cfg);
    if (command == "bound-check") return run_bound_check(cfg);
    if (command == "supercritical-check") return run_supercritical_check(cfg);
    if (command == "smhw-gap") return run_smhw_gap(cfg);
    if (command == "mc-corr") return run_mc_corr(cfg);
    if (command == "clt") return run_clt(cfg);
    if (command == "gamma") return run_gamma(cfg);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace needlet::tools
