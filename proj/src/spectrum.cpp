#include "needlet/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"

namespace needlet {

namespace {

double eval_poly(std::span<const double> coeffs, double x) {
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        v = v * x + coeffs[k];
    }
    return v;
}

}  // namespace

PowerSpectrum PowerSpectrum::alpha_regular(double alpha, double B,
                                           std::function<double(double)> g, int j_ref) {
    if (!(alpha > 2.0)) {
        throw ConfigError("alpha must satisfy alpha > 2 (square-summable spectrum)");
    }
    if (!(B > 1.0)) {
        throw ConfigError("spectrum base B must exceed 1");
    }
    PowerSpectrum s;
    s.variant_ = Variant::AlphaRegular;
    s.alpha_ = alpha;
    s.base_ = B;
    s.g_ = std::move(g);
    s.j_ref_ = j_ref;
    s.l_max_hint_ = std::numeric_limits<int>::max();
    return s;
}

PowerSpectrum PowerSpectrum::exponential(std::vector<double> h_coeffs, double p_exp) {
    if (!(p_exp > 0.0)) {
        throw ConfigError("exponential spectrum requires p_exp > 0");
    }
    bool any = false;
    for (double c : h_coeffs) {
        if (c < 0.0) {
            throw ConfigError("exponential spectrum polynomial coefficients must be >= 0");
        }
        if (c > 0.0) any = true;
    }
    if (!any) {
        throw ConfigError("exponential spectrum polynomial must not vanish identically");
    }
    PowerSpectrum s;
    s.variant_ = Variant::Exponential;
    s.h_coeffs_ = std::move(h_coeffs);
    s.p_exp_ = p_exp;
    s.l_max_hint_ = std::numeric_limits<int>::max();
    return s;
}

PowerSpectrum PowerSpectrum::tabulated(std::vector<double> values) {
    if (values.empty()) {
        throw ConfigError("tabulated spectrum must contain at least one value");
    }
    bool any_positive = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw ConfigError("tabulated spectrum value at l=" + std::to_string(i + 1) +
                              " must be nonnegative and finite");
        }
        any_positive = any_positive || values[i] > 0.0;
    }
    if (!any_positive) {
        throw ConfigError("tabulated spectrum must carry some positive power");
    }
    PowerSpectrum s;
    s.variant_ = Variant::Tabulated;
    s.l_max_hint_ = static_cast<int>(values.size());
    s.table_ = std::move(values);
    return s;
}

PowerSpectrum PowerSpectrum::tabulated_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open spectrum table: " + path);
    }
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    int expected_l = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long l = 0;
        double cl = 0.0;
        if (!(ls >> l)) {
            continue;  // blank or comment-only line
        }
        if (!(ls >> cl)) {
            throw ConfigError("spectrum table " + path + " line " + std::to_string(line_no) +
                              ": expected two columns 'l C_l'");
        }
        std::string extra;
        if (ls >> extra) {
            throw ConfigError("spectrum table " + path + " line " + std::to_string(line_no) +
                              ": trailing content '" + extra + "'");
        }
        if (l != expected_l) {
            throw ConfigError("spectrum table " + path + " line " + std::to_string(line_no) +
                              ": degree " + std::to_string(l) + " out of order, expected " +
                              std::to_string(expected_l));
        }
        if (!(cl >= 0.0) || !std::isfinite(cl)) {
            throw ConfigError("spectrum table " + path + " line " + std::to_string(line_no) +
                              ": C_l must be nonnegative and finite");
        }
        values.push_back(cl);
        ++expected_l;
    }
    if (values.empty()) {
        throw ConfigError("spectrum table " + path + " contains no entries");
    }
    return tabulated(std::move(values));
}

double PowerSpectrum::evaluate(int l) const {
    if (l < 1) {
        throw ConfigError("spectrum degree must satisfy l >= 1");
    }
    switch (variant_) {
        case Variant::AlphaRegular: {
            const double base = std::pow(static_cast<double>(l), -alpha_);
            if (!g_) return base;
            const double u = static_cast<double>(l) / std::pow(base_, j_ref_);
            const double gv = g_(u);
            if (!(gv > 0.0)) {
                throw ConfigError("shape factor g must be positive at u=" + std::to_string(u));
            }
            return base * gv;
        }
        case Variant::Exponential: {
            const double h = eval_poly(h_coeffs_, static_cast<double>(l));
            if (!(h > 0.0)) {
                throw ConfigError("exponential spectrum polynomial must be positive at l=" +
                                  std::to_string(l));
            }
            return h * std::exp(-std::pow(static_cast<double>(l), p_exp_));
        }
        case Variant::Tabulated: {
            if (l > l_max_hint_) {
                throw ConfigError("tabulated spectrum unsupported beyond l=" +
                                  std::to_string(l_max_hint_) + " (requested l=" +
                                  std::to_string(l) + ")");
            }
            return table_[static_cast<std::size_t>(l) - 1];
        }
    }
    throw ConfigError("unreachable spectrum variant");
}

PowerSpectrum::RegularityReport PowerSpectrum::validate_regularity(
    int j_lo, int j_hi, int M, double c0_claim, std::span<const double> cr_claims) const {
    if (variant_ != Variant::AlphaRegular) {
        throw ConfigError("regularity validation applies to the alpha-regular variant only");
    }
    if (j_lo > j_hi) {
        throw ConfigError("scale range requires j_lo <= j_hi");
    }
    if (M < 0) {
        throw ConfigError("derivative order must be nonnegative");
    }
    constexpr int kGrid = 1024;
    const double lo = 1.0 / base_;
    const double hi = base_;
    const double h = (hi - lo) / static_cast<double>(kGrid - 1);
    std::vector<double> gv(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        const double u = lo + h * i;
        gv[i] = g_ ? g_(u) : 1.0;
        if (!(gv[i] > 0.0)) {
            throw ConfigError("shape factor g must be positive on [1/B, B]");
        }
    }
    RegularityReport rep;
    rep.sup_g = *std::max_element(gv.begin(), gv.end());
    rep.inf_g = *std::min_element(gv.begin(), gv.end());
    rep.c0_estimate = std::max(rep.sup_g, 1.0 / rep.inf_g);

    // Iterated central first differences: pass r trims one point per side and
    // estimates g^(r) on the surviving interior grid.
    std::vector<double> d = gv;
    rep.derivative_sup.resize(static_cast<std::size_t>(M));
    for (int r = 1; r <= M; ++r) {
        std::vector<double> next(d.size() >= 2 ? d.size() - 2 : 0);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = (d[i + 2] - d[i]) / (2.0 * h);
        }
        d = std::move(next);
        double sup = 0.0;
        for (double v : d) sup = std::max(sup, std::abs(v));
        rep.derivative_sup[static_cast<std::size_t>(r) - 1] = sup;
    }

    constexpr double kSlack = 1e-9;
    rep.pass = rep.c0_estimate <= c0_claim + kSlack;
    for (int r = 1; r <= M; ++r) {
        const double claim = static_cast<std::size_t>(r) <= cr_claims.size()
                                 ? cr_claims[static_cast<std::size_t>(r) - 1]
                                 : std::numeric_limits<double>::infinity();
        if (rep.derivative_sup[static_cast<std::size_t>(r) - 1] > claim + kSlack) {
            rep.pass = false;
        }
    }
    return rep;
}

std::pair<double, double> PowerSpectrum::summability_check(int l_max) const {
    if (l_max < 1) {
        throw ConfigError("summability check requires l_max >= 1");
    }
    if (variant_ == Variant::Tabulated && l_max > l_max_hint_) {
        throw ConfigError("summability check beyond tabulated support");
    }
    KahanSum partial;
    for (int l = 1; l <= l_max; ++l) {
        partial.add(static_cast<double>(2 * l + 1) * evaluate(l));
    }
    double tail = 0.0;
    switch (variant_) {
        case Variant::AlphaRegular: {
            // sum_{l>L} (2l+1) l^-a <= int_L^inf (2x+1) x^-a dx, scaled by sup g.
            double sup_g = 1.0;
            if (g_) {
                constexpr int kGrid = 1024;
                const double lo = 1.0 / base_;
                const double h = (base_ - lo) / static_cast<double>(kGrid - 1);
                for (int i = 0; i < kGrid; ++i) {
                    sup_g = std::max(sup_g, g_(lo + h * i));
                }
            }
            const double L = static_cast<double>(l_max);
            tail = sup_g * (2.0 * std::pow(L, 2.0 - alpha_) / (alpha_ - 2.0) +
                            std::pow(L, 1.0 - alpha_) / (alpha_ - 1.0));
            break;
        }
        case Variant::Exponential: {
            auto term = [&](int l) {
                return static_cast<double>(2 * l + 1) * evaluate(l);
            };
            if (p_exp_ >= 1.0) {
                // Ratios t_{l+1}/t_l decrease (convex exponent, nonnegative
                // polynomial), so the first ratio caps a geometric tail.
                const double t1 = term(l_max + 1);
                const double t2 = term(l_max + 2);
                const double r = t1 > 0.0 ? t2 / t1 : 0.0;
                tail = r < 1.0 ? t1 / (1.0 - r)
                               : std::numeric_limits<double>::infinity();
            } else {
                KahanSum ext;
                bool converged = false;
                for (int l = l_max + 1; l <= l_max + 10'000'000; ++l) {
                    const double t = term(l);
                    ext.add(t);
                    if (t < 1e-320 || (ext.value() > 0.0 && t < 1e-18 * ext.value())) {
                        converged = true;
                        break;
                    }
                }
                tail = converged ? ext.value() * (1.0 + 1e-12)
                                 : std::numeric_limits<double>::infinity();
            }
            break;
        }
        case Variant::Tabulated:
            tail = 0.0;
            break;
    }
    return {partial.value(), tail};
}

}  // namespace needlet
