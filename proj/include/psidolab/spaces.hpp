#pragma once

#include <vector>

#include "psidolab/quantize.hpp"

namespace psidolab::spaces {

using geometry::MetricField;
using geometry::Point;
using quantize::GridDensity;
using quantize::NotFlat;

struct KappaUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kInjectivityRadius = kPi;  // r0 on the unit torus

// Length of the shortest periodic straight segment from x to y in the metric
// line element (exact geodesic distance for the flat metric, an upper bound
// for diagonal metrics).
double chart_distance(const MetricField& metric, const Point& x, const Point& y);

// (integral of |f|^p sqrt(det g) dx)^{1/p}; p = infinity returns max |f|.
// Independent of kappa by the |dx|^{1/p - kappa} convention.
double lp_norm(const GridDensity& u, double p, const MetricField& metric);

// Mean-oscillation sup over balls of radius < r0/4 plus the sup of |f|
// averages over balls of radius exactly r0/4. Centers are grid points;
// radii follow a geometric sequence until balls fall under 4 grid cells.
double bmo_norm(const GridDensity& u, const MetricField& metric);

// Fourier multiplier (1 + |xi|^2)^{lambda/2} on modes |xi|_inf <= N; modes
// outside the band pass through unchanged. Flat torus only.
GridDensity bessel_apply(double lambda, const GridDensity& u, int N,
                         const MetricField* metric = nullptr);

// Lu = g^{-1} d_i (g g^{ij} d_j u) with g = sqrt(det g_ij), by spectral
// differentiation. Defined for 0-densities.
GridDensity laplace_beltrami_apply(const MetricField& metric, const GridDensity& u);

struct VolumeGrowthReport {
    std::vector<double> radii;
    std::vector<double> volumes;  // worst case over sampled centers
    double c0 = 0.0;
    double mu0 = 0.0;
    double k0 = 0.0;  // torus: exponential factor pinned to 0
    bool pass = false;
};

// Measures worst-case ball volumes and fits Vol B_r <= C0 (1 + r)^{mu0}.
VolumeGrowthReport volume_growth_check(const MetricField& metric,
                                       const std::vector<double>& radii,
                                       int grid_per_axis = 64);

}  // namespace psidolab::spaces
