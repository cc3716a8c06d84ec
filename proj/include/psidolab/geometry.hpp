#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psidolab/common.hpp"

namespace psidolab::geometry {

// Points, tangent vectors and covectors on the chart [0,2pi)^n with n in {1,2}.
// Unused components are zero.
using Point = Eigen::Vector2d;
using Vec = Eigen::Vector2d;
using Mat = Eigen::Matrix2d;

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutsideInjectivityRadius : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma^i_{kj}, indexed [i][k][j].
struct Christoffel {
    std::array<std::array<std::array<double, 2>, 2>, 2> v{};
    double& operator()(int i, int k, int j) { return v[i][k][j]; }
    double operator()(int i, int k, int j) const { return v[i][k][j]; }
};

// d_l Gamma^i_{kj}, indexed (i,k,j,l).
struct ChristoffelJet {
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> v{};
    double& operator()(int i, int k, int j, int l) { return v[i][k][j][l]; }
    double operator()(int i, int k, int j, int l) const { return v[i][k][j][l]; }
};

// T^i_{jk}, indexed (i,j,k).
struct Torsion {
    std::array<std::array<std::array<double, 2>, 2>, 2> v{};
    double& operator()(int i, int j, int k) { return v[i][j][k]; }
    double operator()(int i, int j, int k) const { return v[i][j][k]; }
};

// R^i_{jkl}, indexed (i,j,k,l); antisymmetric in (k,l).
struct Curvature {
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> v{};
    double& operator()(int i, int j, int k, int l) { return v[i][j][k][l]; }
    double operator()(int i, int j, int k, int l) const { return v[i][j][k][l]; }
};

// Periodic metric g_{ij}(y) on the torus chart, with optional analytic first
// and second partials. Missing derivative evaluators fall back to central
// finite differences.
struct MetricField {
    int n = 1;
    std::function<Mat(const Point&)> coeff;
    std::function<std::array<Mat, 2>(const Point&)> dcoeff;                  // d_k g
    std::function<std::array<std::array<Mat, 2>, 2>(const Point&)> d2coeff;  // d_k d_l g
    bool flat = false;  // true only for the constant identity metric
    std::string label = "metric";

    static MetricField euclidean(int n);
    // g = diag(1, f(y1)^2) on T^2 with analytic derivatives of f supplied.
    static MetricField warped_product(std::function<double(double)> f,
                                      std::function<double(double)> df,
                                      std::function<double(double)> d2f);

    Mat at(const Point& y) const;
    Mat inverse(const Point& y) const;
    double sqrt_det(const Point& y) const;
    std::array<Mat, 2> d(const Point& y) const;
    std::array<std::array<Mat, 2>, 2> d2(const Point& y) const;

    // Checks symmetry, positive definiteness and g g^{-1} = I on a sample grid.
    void validate(int samples_per_axis = 16) const;
};

// Periodic connection Gamma^i_{kj}(y), possibly non-metric and non-symmetric.
struct ConnectionField {
    int n = 1;
    std::function<Christoffel(const Point&)> gamma;
    std::function<ChristoffelJet(const Point&)> dgamma;  // optional
    bool is_symmetric = false;
    bool is_flat = false;
    bool is_trivial = false;  // Gamma identically zero
    std::string label = "connection";

    static ConnectionField zero(int n);
    static ConnectionField constant(int n, const Christoffel& g0);
    static ConnectionField levi_civita(const MetricField& metric);
    // Each component Gamma^i_{kj} given by a finite Fourier series
    // sum_k (re + i*im) e^{i k y} (1D) with the real part taken.
    // coeffs[i][k][j] is a list of {mode, re, im}.
    struct FourierTable {
        int n = 1;
        // flat list of entries: component indices + mode vector + coefficient
        struct Entry {
            int i, k, j;
            int mode0, mode1;
            double re, im;
        };
        std::vector<Entry> entries;

        std::string to_json() const;
        static FourierTable from_json(const std::string& text);
    };
    static ConnectionField from_fourier(const FourierTable& table);

    Christoffel at(const Point& y) const;
    ChristoffelJet jet(const Point& y) const;
    void validate(int samples_per_axis = 16,
                  const MetricField* levi_civita_of = nullptr) const;
};

struct GeodesicSolution {
    Point x = Point::Zero();
    Vec v = Vec::Zero();
    std::vector<Point> z;     // samples on the uniform t-grid in [0,1]
    std::vector<Vec> zdot;
    double step = 0.0;

    const Point& end() const { return z.back(); }
    const Vec& end_velocity() const { return zdot.back(); }
    // Max 4th-order finite-difference residual of the geodesic equation.
    double residual(const ConnectionField& conn) const;
};

struct TransportResult {
    Point x = Point::Zero();
    Point y = Point::Zero();
    Mat phi = Mat::Identity();  // phi(i,j): component i at y from component j at x
    double upsilon = 1.0;
};

inline constexpr double kDefaultGuard = 0.9 * kPi;

Torsion torsion(const ConnectionField& conn, const Point& y);
Curvature curvature(const ConnectionField& conn, const Point& y);

GeodesicSolution geodesic_shoot(const ConnectionField& conn, const Point& x, const Vec& v,
                                double step = 1.0 / 256);
Vec log_map(const ConnectionField& conn, const Point& x, const Point& y,
            double r_guard = kDefaultGuard);
TransportResult parallel_transport(const ConnectionField& conn, const Point& x, const Point& y);
double upsilon(const ConnectionField& conn, const Point& x, const Point& y);
double phase(const ConnectionField& conn, const Point& x, const Point& y, double tau,
             const Vec& zeta);
double scalar_curvature(const MetricField& metric, const Point& y);

// Shortest periodic representative of (to - from), componentwise.
Vec chart_displacement(int n, const Point& from, const Point& to);

}  // namespace psidolab::geometry
