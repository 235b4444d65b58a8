#include "needlet/cubature.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "needlet/errors.hpp"
#include "needlet/mathutil.hpp"

namespace needlet {

namespace {
constexpr long kPointCap = 40'000'000L;
}

SphericalPoint CubatureGrid::point(std::size_t idx) const {
    const std::size_t r = idx / static_cast<std::size_t>(n_phi);
    const std::size_t k = idx % static_cast<std::size_t>(n_phi);
    return {ring_theta[r], 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_phi)};
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) {
        throw ConfigError("Gauss-Legendre rule needs at least one node");
    }
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

CubatureGrid build_grid(double B, int j, int exact_degree) {
    if (!(B > 1.0) || j < 0) {
        throw ConfigError("grid construction requires B > 1 and j >= 0");
    }
    if (exact_degree < 1) {
        throw ConfigError("grid exactness degree must be >= 1");
    }
    const int n_theta = (exact_degree + 2) / 2;  // ceil((exact_degree + 1) / 2)
    const int n_phi = exact_degree + 1;
    if (static_cast<long>(n_theta) * n_phi > kPointCap) {
        throw ConfigError("grid would exceed the point cap of 4e7 (exactness degree " +
                          std::to_string(exact_degree) + ")");
    }
    CubatureGrid g;
    g.B = B;
    g.j = j;
    g.exact_degree = exact_degree;
    g.n_phi = n_phi;
    std::vector<double> glw;
    gauss_legendre(n_theta, g.ring_cos, glw);
    g.ring_sin.resize(g.ring_cos.size());
    g.ring_theta.resize(g.ring_cos.size());
    g.point_weight.resize(g.ring_cos.size());
    for (std::size_t r = 0; r < g.ring_cos.size(); ++r) {
        g.ring_theta[r] = std::acos(g.ring_cos[r]);
        g.ring_sin[r] = std::sin(g.ring_theta[r]);
        g.point_weight[r] = glw[r] * 2.0 * kPi / static_cast<double>(n_phi);
    }
    return g;
}

CubatureGrid build_grid_default(double B, int j) {
    return build_grid(B, j, static_cast<int>(std::ceil(std::pow(B, j + 1))));
}

double integrate(const CubatureGrid& grid, std::span<const double> values) {
    if (values.size() != grid.size()) {
        throw ConfigError("integrand length does not match the grid point count");
    }
    KahanSum acc;
    std::size_t idx = 0;
    for (std::size_t r = 0; r < grid.n_rings(); ++r) {
        const double lw = grid.point_weight[r];
        for (int k = 0; k < grid.n_phi; ++k, ++idx) {
            acc.add(lw * values[idx]);
        }
    }
    return acc.value();
}

std::complex<double> integrate(const CubatureGrid& grid,
                               std::span<const std::complex<double>> values) {
    if (values.size() != grid.size()) {
        throw ConfigError("integrand length does not match the grid point count");
    }
    KahanSum re, im;
    std::size_t idx = 0;
    for (std::size_t r = 0; r < grid.n_rings(); ++r) {
        const double lw = grid.point_weight[r];
        for (int k = 0; k < grid.n_phi; ++k, ++idx) {
            re.add(lw * values[idx].real());
            im.add(lw * values[idx].imag());
        }
    }
    return {re.value(), im.value()};
}

double exactness_check(const CubatureGrid& grid, int l_max) {
    if (l_max >= grid.exact_degree) {
        throw ConfigError("exactness check requires l_max < the grid's exactness degree");
    }
    if (l_max < 0) {
        throw ConfigError("exactness check requires l_max >= 0");
    }
    // Longitude phase sums S_m = sum_k e^{i m phi_k}, evaluated numerically.
    std::vector<double> s_re(static_cast<std::size_t>(l_max) + 1);
    std::vector<double> s_im(static_cast<std::size_t>(l_max) + 1);
    for (int m = 0; m <= l_max; ++m) {
        KahanSum cre, cim;
        for (int k = 0; k < grid.n_phi; ++k) {
            const double ang = 2.0 * kPi * static_cast<double>(m) * k / grid.n_phi;
            cre.add(std::cos(ang));
            cim.add(std::sin(ang));
        }
        s_re[m] = cre.value();
        s_im[m] = cim.value();
    }
    const AssocLegendreScheme scheme(l_max);
    std::vector<double> table(scheme.table_size());
    // ring_part[(m,l)] accumulates sum_r w_r * Ptilde_lm(x_r).
    std::vector<KahanSum> ring_part(scheme.table_size());
    for (std::size_t r = 0; r < grid.n_rings(); ++r) {
        scheme.fill(grid.ring_cos[r], grid.ring_sin[r], table.data());
        for (std::size_t i = 0; i < table.size(); ++i) {
            ring_part[i].add(grid.point_weight[r] * table[i]);
        }
    }
    double worst = 0.0;
    const double sqrt4pi = std::sqrt(kFourPi);
    for (int m = 0; m <= l_max; ++m) {
        const std::size_t base = scheme.offset(m);
        for (int l = m; l <= l_max; ++l) {
            const double rp = ring_part[base + (l - m)].value();
            const double ire = rp * s_re[m];
            const double iim = rp * s_im[m];
            const double target = (l == 0) ? sqrt4pi : 0.0;
            const double err = std::hypot(ire - target, iim);
            if (err > worst) worst = err;
        }
    }
    return worst;
}

void export_grid_csv(const CubatureGrid& grid, std::ostream& out) {
    out << "theta,phi,weight\n";
    char buf[128];
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const SphericalPoint pt = grid.point(idx);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", pt.theta, pt.phi,
                      grid.weight(idx));
        out << buf;
    }
}

}  // namespace needlet
