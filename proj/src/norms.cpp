#include "psidolab/norms.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

namespace psidolab::norms {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

double weighted_lp(const VectorXcd& f, const VectorXd& w, double p) {
    double acc = 0.0;
    for (Index j = 0; j < f.size(); ++j) acc += std::pow(std::abs(f[j]), p) * w[j];
    return std::pow(acc, 1.0 / p);
}

// Pointwise duality map J_r(v) = |v|^{r-1} v/|v|.
VectorXcd duality_map(const VectorXcd& v, double r) {
    VectorXcd out(v.size());
    for (Index j = 0; j < v.size(); ++j) {
        const double a = std::abs(v[j]);
        out[j] = a > 0.0 ? std::pow(a, r - 1.0) * (v[j] / a) : Complex(0, 0);
    }
    return out;
}

// Deterministic uniform [0,1) from raw 64-bit output (avoids the
// implementation-defined std distributions).
double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Complex rand_gaussian(std::mt19937_64& rng) {
    const double u1 = std::max(rand_unit(rng), 1e-300);
    const double u2 = rand_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return Complex(r * std::cos(kPeriod * u2), r * std::sin(kPeriod * u2));
}

}  // namespace

NormEstimate opnorm_dense(const KernelMatrix& k) {
    const Index sz = k.mat.rows();
    if (sz > 4096) throw SizeCap("opnorm_dense: matrix side exceeds 4096");
    VectorXd w(sz);
    for (Index j = 0; j < sz; ++j) w[j] = k.weights[static_cast<std::size_t>(j)];
    const VectorXd ws = w.cwiseSqrt();
    MatrixXcd b = ws.asDiagonal() * k.mat * ws.cwiseInverse().asDiagonal();
    MatrixXcd gram = b.adjoint() * b;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    NormEstimate est;
    est.value = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    est.method = "dense-svd";
    est.converged = true;
    return est;
}

NormEstimate opnorm_lplq(const KernelMatrix& k, double p, double q, int restarts,
                         std::uint64_t seed) {
    if (!(p > 1.0 && q > 1.0 && std::isfinite(p) && std::isfinite(q)))
        throw BadParams("opnorm_lplq: exponents must satisfy 1 < p, q < infinity");
    const Index sz = k.mat.rows();
    VectorXd w(sz);
    for (Index j = 0; j < sz; ++j) w[j] = k.weights[static_cast<std::size_t>(j)];

    auto apply = [&](const VectorXcd& u) -> VectorXcd { return k.mat * u; };
    auto apply_adjoint = [&](const VectorXcd& g) -> VectorXcd {
        VectorXcd z = k.mat.adjoint() * (w.asDiagonal() * g);
        return w.cwiseInverse().asDiagonal() * z;
    };
    const double pprime = p / (p - 1.0);
    NormEstimate est;
    est.p = p;
    est.q = q;
    est.method = "boyd-iteration";
    est.restarts = 0;
    est.converged = false;

    auto refine = [&](VectorXcd u) {
        double nu = weighted_lp(u, w, p);
        if (nu <= 0.0) return;
        u /= nu;
        double prev = 0.0;
        int stable = 0;
        for (int it = 0; it < 100; ++it) {
            const VectorXcd v = apply(u);
            const double r = weighted_lp(v, w, q);
            if (r > est.value) est.value = r;
            ++est.iterations;
            if (r <= prev * (1.0 + 1e-9)) {
                if (++stable >= 3) {
                    est.converged = true;
                    break;
                }
            } else {
                stable = 0;
            }
            prev = r;
            VectorXcd z = apply_adjoint(duality_map(v, q));
            u = duality_map(z, pprime);
            const double n2 = weighted_lp(u, w, p);
            if (n2 <= 0.0) break;
            u /= n2;
        }
    };

    // Modulated-bump trial family: e^{ikx} * wrapped Gaussian bump.
    const int n = k.n;
    const int M = k.M;
    quantize::GridDensity proto;
    proto.n = n;
    proto.M = M;
    proto.f.assign(static_cast<std::size_t>(sz), Complex(0, 0));
    const int N = k.params.N;
    const double min_width = 4.0 * kPeriod / M;
    for (int kk : {0, N / 4, N / 2, 3 * N / 4, N}) {
        for (double width : {kPi, kPi / 4.0, kPi / 16.0, min_width}) {
            if (width < min_width) continue;
            VectorXcd u(sz);
            for (Index j = 0; j < sz; ++j) {
                const geometry::Point x = proto.grid_point(static_cast<std::size_t>(j));
                double d2 = 0.0;
                for (int ax = 0; ax < n; ++ax) {
                    const double dd = wrap_displacement(x[ax]);
                    d2 += dd * dd;
                }
                u[j] = std::exp(-d2 / (width * width)) *
                       std::polar(1.0, kk * x[0]);
            }
            refine(u);
        }
    }

    std::mt19937_64 rng(seed);
    for (int r = 0; r < restarts; ++r) {
        VectorXcd u(sz);
        for (Index j = 0; j < sz; ++j) u[j] = rand_gaussian(rng);
        refine(u);
        ++est.restarts;
    }
    return est;
}

}  // namespace psidolab::norms
