#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace needlet {

struct SphericalPoint {
    double theta = 0.0;  // colatitude, radians in [0, pi]
    double phi = 0.0;    // longitude, radians in [0, 2*pi)
};

// Throws ConfigError when angles leave their stated ranges.
void validate_point(const SphericalPoint& pt);

// arccos of the clamped inner product, in [0, pi].
double geodesic_distance(const SphericalPoint& a, const SphericalPoint& b);

// Degree-l Legendre polynomial by the three-term recurrence. |x| <= 1.
double legendre_poly(int l, double x);

// P_0(x)..P_{l_max}(x), same recurrence as legendre_poly term by term.
std::vector<double> legendre_batch(int l_max, double x);

// Fully normalized spherical harmonic (unit L2 norm over the sphere),
// Condon-Shortley phase. Negative m via Y_{l,-m} = (-1)^m conj(Y_{lm}).
std::complex<double> spherical_harmonic(int l, int m, const SphericalPoint& pt);

// (2l+1)/(4*pi) * P_l(cos_angle): the reproducing kernel of degree l,
// equal to sum_m Y_lm(xi) conj(Y_lm(eta)) at cos_angle = <xi, eta>.
double addition_kernel(int l, double cos_angle);

// Packed table of fully normalized associated Legendre values at one
// colatitude: entry (m, l) holds the theta-part of Y_lm, m >= 0, l = m..l_max.
// Layout is m-major so all degrees of one order are contiguous, matching the
// per-order dot products of ring synthesis. Recurrence coefficients are
// precomputed once and shared by every ring of a grid.
class AssocLegendreScheme {
public:
    explicit AssocLegendreScheme(int l_max);

    int l_max() const { return l_max_; }
    std::size_t table_size() const { return size_; }
    std::size_t offset(int m) const {
        return static_cast<std::size_t>(m) * (2 * l_max_ + 3 - m) / 2;
    }

    // out must hold table_size() doubles; x = cos(theta), s = sin(theta) >= 0.
    void fill(double x, double s, double* out) const;

private:
    int l_max_;
    std::size_t size_;
    std::vector<double> rec_a_;   // packed like the output, valid for l >= m+2
    std::vector<double> rec_b_;
    std::vector<double> diag_;    // -sqrt((2m+1)/(2m)) for m = 1..l_max
    std::vector<double> below_;   // sqrt(2m+3) for m = 0..l_max-1
};

}  // namespace needlet
