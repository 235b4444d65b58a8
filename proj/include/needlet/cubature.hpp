#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "needlet/sphere.hpp"

namespace needlet {

// Product rule: Gauss-Legendre nodes in cos(theta) crossed with equispaced
// longitudes. Spherical polynomials of degree < exact_degree integrate
// exactly; total weight is 4*pi. Points are ring-major: index r*n_phi + k is
// ring r at phi = 2*pi*k/n_phi. Grids built with the default degree
// ceil(B^{j+1}) carry a point count within a factor 4 of B^{2j}.
struct CubatureGrid {
    double B = 0.0;
    int j = 0;
    int exact_degree = 0;
    int n_phi = 0;
    std::vector<double> ring_cos;     // ascending Gauss-Legendre nodes
    std::vector<double> ring_sin;
    std::vector<double> ring_theta;
    std::vector<double> point_weight;  // per-point weight of each ring

    std::size_t n_rings() const { return ring_cos.size(); }
    std::size_t size() const { return n_rings() * static_cast<std::size_t>(n_phi); }
    SphericalPoint point(std::size_t idx) const;
    double weight(std::size_t idx) const { return point_weight[idx / n_phi]; }
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

CubatureGrid build_grid(double B, int j, int exact_degree);

// exact_degree = ceil(B^{j+1}).
CubatureGrid build_grid_default(double B, int j);

double integrate(const CubatureGrid& grid, std::span<const double> values);
std::complex<double> integrate(const CubatureGrid& grid,
                               std::span<const std::complex<double>> values);

// Max over l <= l_max, |m| <= l of |integral of Y_lm - delta_{l0} sqrt(4 pi)|,
// evaluated ring-separably (same arithmetic as integrate, reassociated by
// ring and longitude). Requires l_max < exact_degree.
double exactness_check(const CubatureGrid& grid, int l_max);

// CSV with header "theta,phi,weight", one point per row.
void export_grid_csv(const CubatureGrid& grid, std::ostream& out);

}  // namespace needlet
