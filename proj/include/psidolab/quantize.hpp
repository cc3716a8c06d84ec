#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "psidolab/geometry.hpp"
#include "psidolab/symbols.hpp"

namespace psidolab::quantize {

using geometry::ConnectionField;
using geometry::MetricField;
using geometry::Point;
using geometry::Vec;
using symbols::SymbolSpec;

struct NotFlat : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AliasRisk : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AssemblyOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DerivativesUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuantizationParams {
    double tau = 0.0;
    double kappa = 0.0;
    int N = 1;          // frequency cutoff |zeta|_inf <= N
    int M = 4;          // grid size per axis
    double eps = -1.0;  // Gaussian damping e^{-eps^2 |zeta|^2}; < 0 means default 1/N
    double r_chi = 0.9 * kPi;

    double effective_eps() const { return eps < 0.0 ? 1.0 / N : eps; }
    void validate() const;
};

// Scalar coefficient samples of u = f * |dx|^kappa on the uniform periodic
// grid, row-major over axes for n = 2.
struct GridDensity {
    int n = 1;
    int M = 0;
    double kappa = 0.0;
    std::vector<Complex> f;

    std::size_t size() const { return f.size(); }
    static GridDensity sample(int n, int M, double kappa,
                              const std::function<Complex(const Point&)>& fn);
    Point grid_point(std::size_t idx) const;
};

struct KernelMatrix {
    int n = 1;
    int M = 0;
    QuantizationParams params;
    Eigen::MatrixXcd mat;           // M^n x M^n, quadrature weights folded in
    std::vector<double> weights;    // sqrt(det g) * (2pi/M)^n at grid points
    std::string symbol_label;
    std::string geometry_label;
};

// C^2 bump: 1 for d <= r/2, 0 for d >= r, quintic-smoothstep transition.
double diagonal_bump(double d, double r);

// Au(x) = (2pi)^{-n} sum_{|xi|_inf <= N} int e^{i(x-y) xi} a(z_tau, xi) u(y) dy
// on the flat torus with z_tau = x + tau * wrap(y - x); tau = 0 uses the
// Fourier fast path.
GridDensity toroidal_apply(const SymbolSpec& a, const GridDensity& u, double tau, int N);

KernelMatrix kernel_assemble(const SymbolSpec& a, const MetricField& metric,
                             const ConnectionField& conn, const QuantizationParams& params,
                             int threads = 0);

GridDensity kernel_apply(const KernelMatrix& k, const GridDensity& u);

// Conjugate transpose in the weighted pairing of kappa- and (1-kappa)-densities.
KernelMatrix adjoint_kernel(const KernelMatrix& k);

// Truncated flat-case composition expansion, terms in {1, 2}:
//   sigma = a b + (-i) sum_j d_{xi_j} a * d_{x_j} b.
// Requires analytic gradients when terms == 2.
SymbolSpec compose_leading(const SymbolSpec& a, const SymbolSpec& b, int terms);

// Raw binary layout: magic "PSDK1", then n, M, kappa, tau, N as
// little-endian 64-bit fields, then row-major complex doubles.
void kernel_export(const KernelMatrix& k, const std::string& path);
KernelMatrix kernel_import(const std::string& path);

}  // namespace psidolab::quantize
