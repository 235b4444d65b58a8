#include "needlet/field.hpp"

#include <algorithm>
#include <cmath>

#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"
#include "needlet/parallel.hpp"
#include "needlet/rng.hpp"
#include "needlet/simd.hpp"

namespace needlet {

namespace {

constexpr double kImagResidueLimit = 1e-10;
constexpr std::size_t kRingTableByteCap = 1'600'000'000;

void check_l_max(int l_max) {
    if (l_max < 0) throw ConfigError("coefficient degree l_max must be nonnegative");
    if (l_max > 100'000) throw ConfigError("coefficient degree l_max is unreasonably large");
}

[[noreturn]] void reality_violation(double residue) {
    throw ConfigError("synthesis imaginary residue " + std::to_string(residue) +
                      " exceeds 1e-10: m = 0 coefficients must be real");
}

}  // namespace

HarmonicCoefficients::HarmonicCoefficients(int l_max) : l_max_(l_max) {
    check_l_max(l_max);
    const std::size_t n = static_cast<std::size_t>(l_max + 1) * (l_max + 2) / 2;
    re_.assign(n, 0.0);
    im_.assign(n, 0.0);
}

std::size_t HarmonicCoefficients::index(int l, int m) const {
    if (m < 0 || m > l || l > l_max_)
        throw ConfigError("coefficient index (l, m) out of range");
    const std::size_t offset =
        static_cast<std::size_t>(m) * (2 * l_max_ + 3 - m) / 2;
    return offset + static_cast<std::size_t>(l - m);
}

std::complex<double> HarmonicCoefficients::get(int l, int m) const {
    if (m >= 0) {
        const std::size_t i = index(l, m);
        return {re_[i], im_[i]};
    }
    const std::size_t i = index(l, -m);
    const double sign = (m & 1) ? -1.0 : 1.0;
    return {sign * re_[i], -sign * im_[i]};
}

void HarmonicCoefficients::set(int l, int m, std::complex<double> v) {
    if (m < 0) throw ConfigError("set() stores m >= 0; m < 0 follows by reality");
    const std::size_t i = index(l, m);
    re_[i] = v.real();
    im_[i] = v.imag();
}

const double* HarmonicCoefficients::re_row(int m) const {
    return re_.data() + index(m, m);
}

const double* HarmonicCoefficients::im_row(int m) const {
    return im_.data() + index(m, m);
}

double* HarmonicCoefficients::re_row(int m) { return re_.data() + index(m, m); }

double* HarmonicCoefficients::im_row(int m) { return im_.data() + index(m, m); }

HarmonicCoefficients sample_alm(const PowerSpectrum& spectrum, int l_max,
                                std::uint64_t seed, std::uint64_t stream) {
    check_l_max(l_max);
    HarmonicCoefficients a(l_max);
    CounterRng rng(seed, stream);
    // Fixed draw order (l ascending, m ascending within l) pins the sample to
    // the (seed, stream) pair.
    for (int l = 1; l <= l_max; ++l) {
        const double cl = spectrum.evaluate(l);
        if (!(cl >= 0.0))
            throw ConfigError("spectrum value must be nonnegative for sampling");
        const double s0 = std::sqrt(cl);
        const double sh = std::sqrt(0.5 * cl);
        a.re(l, 0) = s0 * rng.next_gaussian();
        for (int m = 1; m <= l; ++m) {
            a.re(l, m) = sh * rng.next_gaussian();
            a.im(l, m) = sh * rng.next_gaussian();
        }
    }
    return a;
}

void apply_multipole_weights(const HarmonicCoefficients& in, std::span<const double> w,
                             HarmonicCoefficients& out) {
    const int L = in.l_max();
    if (w.size() < static_cast<std::size_t>(L) + 1)
        throw ConfigError("weight table must cover l = 0 .. l_max");
    if (out.l_max() != L) out = HarmonicCoefficients(L);
    for (int m = 0; m <= L; ++m) {
        const double* ri = in.re_row(m);
        const double* ii = in.im_row(m);
        double* ro = out.re_row(m);
        double* io = out.im_row(m);
        for (int l = m; l <= L; ++l) {
            const double wl = w[static_cast<std::size_t>(l)];
            ro[l - m] = wl * ri[l - m];
            io[l - m] = wl * ii[l - m];
        }
    }
}

long synthesis_truncation_l(const NeedletKernel& kernel, int j) {
    if (j < 0) throw ConfigError("scale index must be nonnegative");
    if (kernel.kind() == NeedletKernel::Kind::Npw) return kernel.support_range(j).second;
    // Decaying window: cut where the weight drops below 1e-4 of its peak.
    const int p = kernel.p();
    const double peak_value = std::pow(static_cast<double>(p), p) * std::exp(-p);
    long l = kernel.peak_l(j);
    if (l < 1) l = 1;
    for (; l <= 10'000'000; ++l) {
        if (kernel.weight(l, j) <= 1e-4 * peak_value) return l;
    }
    throw ConfigError("synthesis truncation degree exceeds the supported range");
}

std::vector<double> synthesize_field(const HarmonicCoefficients& coeffs,
                                     std::span<const SphericalPoint> points) {
    const int L = coeffs.l_max();
    AssocLegendreScheme scheme(L);
    std::vector<double> table(scheme.table_size());
    std::vector<double> out(points.size());
    const simd::Kernels& k = simd::active();
    for (std::size_t pidx = 0; pidx < points.size(); ++pidx) {
        const SphericalPoint& pt = points[pidx];
        validate_point(pt);
        scheme.fill(std::cos(pt.theta), std::sin(pt.theta), table.data());
        double dre = 0.0, dim = 0.0;
        k.dot_real_complex(table.data() + scheme.offset(0), coeffs.re_row(0),
                           coeffs.im_row(0), static_cast<std::size_t>(L) + 1, &dre,
                           &dim);
        if (std::abs(dim) > kImagResidueLimit) reality_violation(std::abs(dim));
        KahanSum total;
        total.add(dre);
        const double cphi = std::cos(pt.phi);
        const double sphi = std::sin(pt.phi);
        double cm = 1.0, sm = 0.0;  // cos/sin of m * phi
        for (int m = 1; m <= L; ++m) {
            const double cn = cm * cphi - sm * sphi;
            const double sn = sm * cphi + cm * sphi;
            cm = cn;
            sm = sn;
            k.dot_real_complex(table.data() + scheme.offset(m), coeffs.re_row(m),
                               coeffs.im_row(m), static_cast<std::size_t>(L - m) + 1,
                               &dre, &dim);
            total.add(2.0 * (dre * cm - dim * sm));
        }
        out[pidx] = total.value();
    }
    return out;
}

RingSynthesizer::RingSynthesizer(const CubatureGrid& grid, int l_max)
    : grid_(&grid), scheme_(l_max) {
    check_l_max(l_max);
    if (grid.size() == 0) throw ConfigError("ring synthesis needs a nonempty grid");
    const std::size_t bytes =
        grid.n_rings() * scheme_.table_size() * sizeof(double);
    if (bytes > kRingTableByteCap)
        throw ConfigError("ring tables would exceed the memory budget; "
                          "lower l_max or the grid degree");
    tables_.resize(grid.n_rings() * scheme_.table_size());
    for (std::size_t r = 0; r < grid.n_rings(); ++r)
        scheme_.fill(grid.ring_cos[r], grid.ring_sin[r],
                     tables_.data() + r * scheme_.table_size());
}

double RingSynthesizer::synthesize(const HarmonicCoefficients& coeffs,
                                   std::span<double> out) const {
    const int L = scheme_.l_max();
    if (coeffs.l_max() != L)
        throw ConfigError("coefficient degree does not match the synthesis tables");
    if (out.size() != grid_->size())
        throw ConfigError("output span does not match the grid size");
    const std::size_t nphi = grid_->n_phi;
    const simd::Kernels& kern = simd::active();
    std::vector<double> acc_re(nphi), acc_im(nphi);
    double residue = 0.0;
    for (std::size_t r = 0; r < grid_->n_rings(); ++r) {
        const double* table = tables_.data() + r * scheme_.table_size();
        double f0re = 0.0, f0im = 0.0;
        kern.dot_real_complex(table + scheme_.offset(0), coeffs.re_row(0),
                              coeffs.im_row(0), static_cast<std::size_t>(L) + 1, &f0re,
                              &f0im);
        residue = std::max(residue, std::abs(f0im));
        std::fill(acc_re.begin(), acc_re.end(), 0.0);
        std::fill(acc_im.begin(), acc_im.end(), 0.0);
        for (int m = 1; m <= L; ++m) {
            double fre = 0.0, fim = 0.0;
            kern.dot_real_complex(table + scheme_.offset(m), coeffs.re_row(m),
                                  coeffs.im_row(m), static_cast<std::size_t>(L - m) + 1,
                                  &fre, &fim);
            const std::size_t fold = static_cast<std::size_t>(m) % nphi;
            acc_re[fold] += 2.0 * fre;
            acc_im[fold] += 2.0 * fim;
        }
        std::span<double> slice = out.subspan(r * nphi, nphi);
        std::fill(slice.begin(), slice.end(), f0re);
        for (std::size_t fold = 0; fold < nphi; ++fold) {
            if (acc_re[fold] == 0.0 && acc_im[fold] == 0.0) continue;
            kern.fourier_accum(acc_re[fold], acc_im[fold], static_cast<long>(fold),
                               nphi, slice.data());
        }
    }
    return residue;
}

std::vector<double> synthesize_field(const HarmonicCoefficients& coeffs,
                                     const CubatureGrid& grid) {
    RingSynthesizer synth(grid, coeffs.l_max());
    std::vector<double> out(grid.size());
    const double residue = synth.synthesize(coeffs, out);
    if (residue > kImagResidueLimit) reality_violation(residue);
    return out;
}

CoefficientField needlet_coefficients_harmonic(const HarmonicCoefficients& coeffs,
                                               const NeedletKernel& kernel, int j,
                                               const RingSynthesizer& synth) {
    const int L = coeffs.l_max();
    const long needed = synthesis_truncation_l(kernel, j);
    if (L < needed)
        throw ConfigError("coefficient degree " + std::to_string(L) +
                          " too low for scale " + std::to_string(j) +
                          " analysis (needs >= " + std::to_string(needed) + ")");
    std::vector<double> w(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) w[static_cast<std::size_t>(l)] = kernel.weight(l, j);
    HarmonicCoefficients weighted(L);
    apply_multipole_weights(coeffs, w, weighted);
    CoefficientField field;
    field.grid = &synth.grid();
    field.j = j;
    field.values.resize(synth.grid().size());
    const double residue = synth.synthesize(weighted, field.values);
    if (residue > kImagResidueLimit) reality_violation(residue);
    for (std::size_t i = 0; i < field.values.size(); ++i)
        field.values[i] *= std::sqrt(synth.grid().weight(i));
    return field;
}

CoefficientField needlet_coefficients_harmonic(const HarmonicCoefficients& coeffs,
                                               const NeedletKernel& kernel, int j,
                                               const CubatureGrid& grid) {
    RingSynthesizer synth(grid, coeffs.l_max());
    return needlet_coefficients_harmonic(coeffs, kernel, j, synth);
}

CoefficientField needlet_coefficients_quadrature(const CubatureGrid& fine_grid,
                                                 std::span<const double> field_values,
                                                 const NeedletKernel& kernel, int j,
                                                 const CubatureGrid& analysis_grid) {
    if (field_values.size() != fine_grid.size())
        throw ConfigError("field sample count does not match the fine grid");
    const long trunc = kernel.kind() == NeedletKernel::Kind::Npw
                           ? kernel.support_range(j).second
                           : kernel.profile_truncation_l(j);
    if (fine_grid.exact_degree <= 2 * trunc)
        throw ConfigError("fine grid exactness degree " +
                          std::to_string(fine_grid.exact_degree) +
                          " insufficient: needs > " + std::to_string(2 * trunc));
    // Kernel profile as a Legendre series in the angle cosine.
    std::vector<double> coeff(static_cast<std::size_t>(trunc) + 1, 0.0);
    for (long l = 1; l <= trunc; ++l)
        coeff[static_cast<std::size_t>(l)] =
            kernel.weight(l, j) * (2.0 * l + 1.0) / kFourPi;

    const std::size_t nf = fine_grid.size();
    std::vector<double> mu_t(nf);
    for (std::size_t i = 0; i < nf; ++i) mu_t[i] = fine_grid.weight(i) * field_values[i];

    // Unit-vector pieces of every fine point.
    std::vector<double> fc(nf), fs(nf), fcp(nf), fsp(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        const SphericalPoint pt = fine_grid.point(i);
        const std::size_t ring = i / fine_grid.n_phi;
        fc[i] = fine_grid.ring_cos[ring];
        fs[i] = fine_grid.ring_sin[ring];
        fcp[i] = std::cos(pt.phi);
        fsp[i] = std::sin(pt.phi);
    }

    const simd::Kernels& kern = simd::active();
    CoefficientField out;
    out.grid = &analysis_grid;
    out.j = j;
    out.values.resize(analysis_grid.size());
    std::vector<double> dots(nf), series(nf);
    for (std::size_t kidx = 0; kidx < analysis_grid.size(); ++kidx) {
        const SphericalPoint pt = analysis_grid.point(kidx);
        const std::size_t ring = kidx / analysis_grid.n_phi;
        const double ac = analysis_grid.ring_cos[ring];
        const double as = analysis_grid.ring_sin[ring];
        const double acp = std::cos(pt.phi);
        const double asp = std::sin(pt.phi);
        for (std::size_t i = 0; i < nf; ++i) {
            const double d = ac * fc[i] + as * fs[i] * (acp * fcp[i] + asp * fsp[i]);
            dots[i] = std::clamp(d, -1.0, 1.0);
        }
        kern.legendre_series_multi(dots.data(), nf, coeff.data(), trunc, series.data());
        KahanSum sum;
        for (std::size_t i = 0; i < nf; ++i) sum.add(mu_t[i] * series[i]);
        out.values[kidx] = std::sqrt(analysis_grid.weight(kidx)) * sum.value();
    }
    return out;
}

PointEvaluator::PointEvaluator(SphericalPoint point, int l_max) : l_max_(l_max) {
    check_l_max(l_max);
    validate_point(point);
    AssocLegendreScheme scheme(l_max);
    table_.resize(scheme.table_size());
    scheme.fill(std::cos(point.theta), std::sin(point.theta), table_.data());
    cos_m_.resize(static_cast<std::size_t>(l_max) + 1);
    sin_m_.resize(static_cast<std::size_t>(l_max) + 1);
    for (int m = 0; m <= l_max; ++m) {
        cos_m_[static_cast<std::size_t>(m)] = std::cos(m * point.phi);
        sin_m_[static_cast<std::size_t>(m)] = std::sin(m * point.phi);
    }
}

double PointEvaluator::lambda_free(const HarmonicCoefficients& weighted) const {
    const int L = l_max_;
    if (weighted.l_max() != L)
        throw ConfigError("coefficient degree does not match the evaluator");
    // offsets match AssocLegendreScheme's packed layout
    const simd::Kernels& kern = simd::active();
    KahanSum total;
    std::size_t offset = 0;
    for (int m = 0; m <= L; ++m) {
        double dre = 0.0, dim = 0.0;
        kern.dot_real_complex(table_.data() + offset, weighted.re_row(m),
                              weighted.im_row(m), static_cast<std::size_t>(L - m) + 1,
                              &dre, &dim);
        if (m == 0)
            total.add(dre);
        else
            total.add(2.0 * (dre * cos_m_[static_cast<std::size_t>(m)] -
                             dim * sin_m_[static_cast<std::size_t>(m)]));
        offset += static_cast<std::size_t>(L - m) + 1;
    }
    return total.value();
}

McCorrelationResult monte_carlo_correlation(const NeedletKernel& kernel,
                                            const PowerSpectrum& spectrum, int j1,
                                            int j2, SphericalPoint a, SphericalPoint b,
                                            std::size_t replicates, std::uint64_t seed,
                                            int l_max, int threads, bool keep_pairs) {
    if (replicates < 100)
        throw ConfigError("Monte Carlo correlation needs at least 100 replicates");
    check_l_max(l_max);
    const long need = std::max(synthesis_truncation_l(kernel, j1),
                               synthesis_truncation_l(kernel, j2));
    if (l_max < need)
        throw ConfigError("l_max " + std::to_string(l_max) +
                          " too low for the requested scales (needs >= " +
                          std::to_string(need) + ")");
    const PointEvaluator eval_a(a, l_max);
    const PointEvaluator eval_b(b, l_max);
    std::vector<double> w1(static_cast<std::size_t>(l_max) + 1),
        w2(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l) {
        w1[static_cast<std::size_t>(l)] = kernel.weight(l, j1);
        w2[static_cast<std::size_t>(l)] = kernel.weight(l, j2);
    }

    std::vector<double> xs(replicates), ys(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        const HarmonicCoefficients alm = sample_alm(spectrum, l_max, seed, r);
        HarmonicCoefficients wa(l_max);
        apply_multipole_weights(alm, w1, wa);
        xs[r] = eval_a.lambda_free(wa);
        if (j2 != j1) apply_multipole_weights(alm, w2, wa);
        ys[r] = eval_b.lambda_free(wa);
    });

    const double n = static_cast<double>(replicates);
    KahanSum mx_sum, my_sum;
    for (std::size_t r = 0; r < replicates; ++r) {
        mx_sum.add(xs[r]);
        my_sum.add(ys[r]);
    }
    const double mx = mx_sum.value() / n;
    const double my = my_sum.value() / n;
    KahanSum sxx, syy, sxy;
    for (std::size_t r = 0; r < replicates; ++r) {
        const double dx = xs[r] - mx;
        const double dy = ys[r] - my;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    if (!(sxx.value() > 0.0) || !(syy.value() > 0.0))
        throw ConfigError("degenerate variance in the Monte Carlo sample");
    McCorrelationResult res;
    res.replicates = replicates;
    res.empirical = sxy.value() / std::sqrt(sxx.value() * syy.value());

    // Leave-one-out estimates from the centered sufficient statistics.
    std::vector<double> loo(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        const double dx = xs[r] - mx;
        const double dy = ys[r] - my;
        const double m = n - 1.0;
        // centered sums with replicate r removed; means shift by d/(n-1)
        const double cxx = sxx.value() - dx * dx - (dx * dx) / m;
        const double cyy = syy.value() - dy * dy - (dy * dy) / m;
        const double cxy = sxy.value() - dx * dy - (dx * dy) / m;
        if (!(cxx > 0.0) || !(cyy > 0.0))
            throw ConfigError("degenerate variance in a jackknife subsample");
        loo[r] = cxy / std::sqrt(cxx * cyy);
    }
    KahanSum lm;
    for (double v : loo) lm.add(v);
    const double loo_mean = lm.value() / n;
    KahanSum dev;
    for (double v : loo) dev.add((v - loo_mean) * (v - loo_mean));
    res.jackknife_se = std::sqrt((n - 1.0) / n * dev.value());

    if (keep_pairs) {
        res.pairs.resize(replicates);
        for (std::size_t r = 0; r < replicates; ++r) res.pairs[r] = {xs[r], ys[r]};
    }
    return res;
}

}  // namespace needlet
