#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace needlet {

// Angular power spectrum model C_l, l >= 1. Immutable after construction.
class PowerSpectrum {
public:
    enum class Variant { AlphaRegular, Exponential, Tabulated };

    // C_l = l^{-alpha} * g(l / B^{j_ref}); alpha > 2 keeps sum (2l+1)C_l finite.
    // g defaults to the constant 1 and must be positive on its evaluation range.
    static PowerSpectrum alpha_regular(double alpha, double B,
                                       std::function<double(double)> g = nullptr,
                                       int j_ref = 0);

    // C_l = H(l) * exp(-l^{p_exp}) with H(x) = sum_k h[k] x^k, coefficients >= 0,
    // H not identically zero.
    static PowerSpectrum exponential(std::vector<double> h_coeffs, double p_exp);

    // values[i] = C_{i+1}; evaluation past the table is an error, never an
    // extrapolation.
    static PowerSpectrum tabulated(std::vector<double> values);

    // Two-column whitespace-separated text "l C_l", l strictly increasing from 1.
    // '#' starts a comment. Parse errors name the offending line.
    static PowerSpectrum tabulated_from_file(const std::string& path);

    double evaluate(int l) const;

    Variant variant() const { return variant_; }
    double alpha() const { return alpha_; }
    double base() const { return base_; }
    double p_exp() const { return p_exp_; }
    // Largest supported degree for Tabulated; INT_MAX for parametric variants.
    int l_max_hint() const { return l_max_hint_; }
    bool has_unit_factor() const { return !g_; }

    struct RegularityReport {
        double sup_g = 0.0;
        double inf_g = 0.0;
        double c0_estimate = 0.0;          // max(sup g, 1/inf g)
        std::vector<double> derivative_sup;  // index r-1 holds sup |g^(r)|
        bool pass = false;
    };

    // Grid check of the shape-factor bounds over u in [1/B, B]: c0 from
    // sup/inf, derivative suprema by iterated central differences, each
    // compared against the caller's claimed bounds. AlphaRegular only.
    RegularityReport validate_regularity(int j_lo, int j_hi, int M, double c0_claim,
                                         std::span<const double> cr_claims) const;

    // (partial sum of (2l+1)C_l up to l_max, tail estimate beyond it).
    // Tail: closed-form integral comparison for AlphaRegular; geometric ratio
    // bound for Exponential with p_exp >= 1, direct extended summation below
    // that; identically 0 for Tabulated (the table is the whole model).
    std::pair<double, double> summability_check(int l_max) const;

private:
    PowerSpectrum() = default;

    Variant variant_ = Variant::AlphaRegular;
    double alpha_ = 0.0;
    double base_ = 0.0;
    int j_ref_ = 0;
    std::function<double(double)> g_;
    std::vector<double> h_coeffs_;
    double p_exp_ = 0.0;
    std::vector<double> table_;
    int l_max_hint_ = 0;
};

}  // namespace needlet
