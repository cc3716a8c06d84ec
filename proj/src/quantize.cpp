#include "psidolab/quantize.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "psidolab/fourier.hpp"

namespace psidolab::quantize {

namespace {

std::size_t pow_int(int base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Frequency lattice |zeta|_inf <= N.
std::vector<Vec> frequency_lattice(int n, int N) {
    std::vector<Vec> out;
    if (n == 1) {
        out.reserve(static_cast<std::size_t>(2 * N + 1));
        for (int k = -N; k <= N; ++k) {
            Vec z = Vec::Zero();
            z[0] = k;
            out.push_back(z);
        }
    } else {
        out.reserve(static_cast<std::size_t>(2 * N + 1) * static_cast<std::size_t>(2 * N + 1));
        for (int k0 = -N; k0 <= N; ++k0)
            for (int k1 = -N; k1 <= N; ++k1) {
                Vec z;
                z << k0, k1;
                out.push_back(z);
            }
    }
    return out;
}

// In-place 2D DFT of a row-major M x M array.
void dft2(std::vector<Complex>& x, int M) {
    std::vector<Complex> line(static_cast<std::size_t>(M));
    for (int r = 0; r < M; ++r) {
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(r) * M, M, line.begin());
        fourier::dft(line);
        std::copy_n(line.begin(), M, x.begin() + static_cast<std::ptrdiff_t>(r) * M);
    }
    for (int c = 0; c < M; ++c) {
        for (int r = 0; r < M; ++r) line[static_cast<std::size_t>(r)] = x[static_cast<std::size_t>(r) * M + c];
        fourier::dft(line);
        for (int r = 0; r < M; ++r) x[static_cast<std::size_t>(r) * M + c] = line[static_cast<std::size_t>(r)];
    }
}

}  // namespace

void QuantizationParams::validate() const {
    if (N < 1) throw BadParams("quantization: N must be >= 1");
    if (M < 4 * N) throw AliasRisk("quantization: M must be >= 4N");
    if (!(tau >= 0.0 && tau <= 1.0)) throw BadParams("quantization: tau must be in [0,1]");
    if (!(r_chi > 0.0 && r_chi <= 0.9 * kPi + 1e-12))
        throw BadParams("quantization: r_chi must be in (0, 0.9 pi]");
    if (eps >= 0.0 && !(std::isfinite(eps))) throw BadParams("quantization: eps must be finite");
}

GridDensity GridDensity::sample(int n, int M, double kappa,
                                const std::function<Complex(const Point&)>& fn) {
    GridDensity u;
    u.n = n;
    u.M = M;
    u.kappa = kappa;
    const std::size_t total = pow_int(M, n);
    u.f.resize(total);
    for (std::size_t i = 0; i < total; ++i) u.f[i] = fn(u.grid_point(i));
    return u;
}

Point GridDensity::grid_point(std::size_t idx) const {
    Point p = Point::Zero();
    if (n == 1) {
        p[0] = kPeriod * static_cast<double>(idx) / M;
    } else {
        p[0] = kPeriod * static_cast<double>(idx / static_cast<std::size_t>(M)) / M;
        p[1] = kPeriod * static_cast<double>(idx % static_cast<std::size_t>(M)) / M;
    }
    return p;
}

double diagonal_bump(double d, double r) {
    return 1.0 - smoothstep5((d - 0.5 * r) / (0.5 * r));
}

GridDensity toroidal_apply(const SymbolSpec& a, const GridDensity& u, double tau, int N) {
    if (N < 1) throw BadParams("toroidal_apply: N must be >= 1");
    if (u.M < 4 * N) throw AliasRisk("toroidal_apply: grid M must be >= 4N");
    const int n = u.n;
    const int M = u.M;
    GridDensity out = u;

    if (tau == 0.0) {
        if (n == 1) {
            const auto c = fourier::coefficients(u.f, N);
            parallel_for(u.size(), [&](std::size_t i) {
                const Point x = u.grid_point(i);
                Complex acc(0, 0);
                for (int k = -N; k <= N; ++k) {
                    Vec xi = Vec::Zero();
                    xi[0] = k;
                    acc += a.eval(x, xi) * c[static_cast<std::size_t>(k + N)] *
                           std::polar(1.0, k * x[0]);
                }
                out.f[i] = acc;
            });
        } else {
            std::vector<Complex> hat = u.f;
            dft2(hat, M);
            const double inv = 1.0 / static_cast<double>(u.size());
            parallel_for(u.size(), [&](std::size_t i) {
                const Point x = u.grid_point(i);
                Complex acc(0, 0);
                for (int k0 = -N; k0 <= N; ++k0)
                    for (int k1 = -N; k1 <= N; ++k1) {
                        const int r = ((k0 % M) + M) % M;
                        const int c = ((k1 % M) + M) % M;
                        Vec xi;
                        xi << k0, k1;
                        acc += a.eval(x, xi) * hat[static_cast<std::size_t>(r) * M + c] * inv *
                               std::polar(1.0, k0 * x[0] + k1 * x[1]);
                    }
                out.f[i] = acc;
            });
        }
        return out;
    }

    // General tau: direct double sum over the grid and the frequency lattice.
    const auto lattice = frequency_lattice(n, N);
    const double invMn = 1.0 / static_cast<double>(u.size());
    parallel_for(u.size(), [&](std::size_t i) {
        const Point x = u.grid_point(i);
        Complex acc(0, 0);
        for (std::size_t j = 0; j < u.size(); ++j) {
            const Point y = u.grid_point(j);
            Vec d = Vec::Zero();
            for (int ax = 0; ax < n; ++ax) d[ax] = wrap_displacement(y[ax] - x[ax]);
            const Point z = x + tau * d;
            Complex inner(0, 0);
            for (const auto& xi : lattice) {
                double ph = 0.0;
                for (int ax = 0; ax < n; ++ax) ph -= d[ax] * xi[ax];
                inner += a.eval(z, xi) * std::polar(1.0, ph);
            }
            acc += inner * u.f[j];
        }
        out.f[i] = acc * invMn;
    });
    return out;
}

KernelMatrix kernel_assemble(const SymbolSpec& a, const MetricField& metric,
                             const ConnectionField& conn, const QuantizationParams& params,
                             int threads) {
    params.validate();
    const int n = metric.n;
    const int M = params.M;
    if ((n == 1 && M > 4096) || (n == 2 && M > 128))
        throw AssemblyOverflow("kernel_assemble: dense size cap exceeded");
    if (params.tau != 0.0 && !conn.is_trivial)
        throw BadParams("kernel_assemble: tau != 0 requires the trivial connection");

    const std::size_t total = pow_int(M, n);
    KernelMatrix k;
    k.n = n;
    k.M = M;
    k.params = params;
    k.symbol_label = a.label;
    k.geometry_label = metric.label + "/" + conn.label;
    k.mat = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total),
                                   static_cast<Eigen::Index>(total));

    GridDensity proto;
    proto.n = n;
    proto.M = M;
    const double cell = std::pow(kPeriod / M, n);
    k.weights.resize(total);
    for (std::size_t j = 0; j < total; ++j)
        k.weights[j] = metric.sqrt_det(proto.grid_point(j)) * cell;

    const auto lattice = frequency_lattice(n, params.N);
    const double eps = params.effective_eps();
    const double norm = std::pow(kPeriod, -n);

    parallel_for(total, [&](std::size_t i) {
        const Point x = proto.grid_point(i);
        std::vector<Complex> sym(lattice.size());
        for (std::size_t s = 0; s < lattice.size(); ++s) {
            const double q = lattice[s].squaredNorm();
            sym[s] = a.eval(x, lattice[s]) * std::exp(-eps * eps * q);
        }
        for (std::size_t j = 0; j < total; ++j) {
            const Point y = proto.grid_point(j);
            const Vec disp = geometry::chart_displacement(n, x, y);
            const double d = disp.norm();
            if (d >= params.r_chi) continue;
            Vec ync;
            double ups = 1.0;
            if (conn.is_trivial) {
                ync = -disp;
            } else {
                ync = -geometry::log_map(conn, x, y);
                ups = geometry::upsilon(conn, x, y);
            }
            Complex osc(0, 0);
            for (std::size_t s = 0; s < lattice.size(); ++s) {
                double ph = 0.0;
                for (int ax = 0; ax < n; ++ax) ph += ync[ax] * lattice[s][ax];
                osc += sym[s] * std::polar(1.0, ph);
            }
            k.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                diagonal_bump(d, params.r_chi) * norm *
                std::pow(ups, 1.0 - params.kappa) * osc * k.weights[j];
        }
    }, threads);
    return k;
}

GridDensity kernel_apply(const KernelMatrix& k, const GridDensity& u) {
    if (u.n != k.n || u.M != k.M) throw GridMismatch("kernel_apply: grid mismatch");
    if (std::abs(u.kappa - k.params.kappa) > 1e-12)
        throw GridMismatch("kernel_apply: density weight mismatch");
    GridDensity out = u;
    Eigen::Map<const Eigen::VectorXcd> fin(u.f.data(), static_cast<Eigen::Index>(u.f.size()));
    Eigen::VectorXcd fout = k.mat * fin;
    std::copy(fout.data(), fout.data() + fout.size(), out.f.begin());
    return out;
}

KernelMatrix adjoint_kernel(const KernelMatrix& k) {
    KernelMatrix adj = k;
    adj.params.kappa = 1.0 - k.params.kappa;
    adj.symbol_label = "adjoint(" + k.symbol_label + ")";
    const Eigen::Index sz = k.mat.rows();
    adj.mat.resize(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i)
        for (Eigen::Index j = 0; j < sz; ++j)
            adj.mat(i, j) = std::conj(k.mat(j, i)) *
                            (k.weights[static_cast<std::size_t>(j)] /
                             k.weights[static_cast<std::size_t>(i)]);
    return adj;
}

SymbolSpec compose_leading(const SymbolSpec& a, const SymbolSpec& b, int terms) {
    if (terms < 1 || terms > 2) throw BadParams("compose_leading: terms must be 1 or 2");
    if (terms == 2 && (!a.deta || !b.dy))
        throw DerivativesUnavailable(
            "compose_leading: analytic gradients required for the two-term expansion");
    SymbolSpec out;
    out.m = a.m + b.m;
    out.rho = std::min(a.rho, b.rho);
    out.delta = std::max(a.delta, b.delta);
    out.n = a.n;
    out.label = "compose(" + a.label + "," + b.label + ")";
    const SymbolSpec fa = a, fb = b;
    const int n = a.n;
    if (terms == 1) {
        out.eval = [fa, fb](const Point& y, const Vec& eta) {
            return fa.eval(y, eta) * fb.eval(y, eta);
        };
    } else {
        out.eval = [fa, fb, n](const Point& y, const Vec& eta) {
            Complex v = fa.eval(y, eta) * fb.eval(y, eta);
            const auto da = fa.deta(y, eta);
            const auto db = fb.dy(y, eta);
            for (int j = 0; j < n; ++j) v += Complex(0, -1) * da[j] * db[j];
            return v;
        };
    }
    return out;
}

void kernel_export(const KernelMatrix& k, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw BadParams("kernel_export: cannot open " + path);
    f.write("PSDK1", 5);
    const std::int64_t n = k.n, M = k.M, N = k.params.N;
    const double kappa = k.params.kappa, tau = k.params.tau;
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&M), 8);
    f.write(reinterpret_cast<const char*>(&kappa), 8);
    f.write(reinterpret_cast<const char*>(&tau), 8);
    f.write(reinterpret_cast<const char*>(&N), 8);
    const Eigen::Index sz = k.mat.rows();
    for (Eigen::Index i = 0; i < sz; ++i)
        for (Eigen::Index j = 0; j < sz; ++j) {
            const Complex v = k.mat(i, j);
            const double re = v.real(), im = v.imag();
            f.write(reinterpret_cast<const char*>(&re), 8);
            f.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!f) throw BadParams("kernel_export: write failed for " + path);
}

KernelMatrix kernel_import(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw BadParams("kernel_import: cannot open " + path);
    char magic[5];
    f.read(magic, 5);
    if (!f || std::memcmp(magic, "PSDK1", 5) != 0)
        throw BadParams("kernel_import: bad magic in " + path);
    std::int64_t n = 0, M = 0, N = 0;
    double kappa = 0.0, tau = 0.0;
    f.read(reinterpret_cast<char*>(&n), 8);
    f.read(reinterpret_cast<char*>(&M), 8);
    f.read(reinterpret_cast<char*>(&kappa), 8);
    f.read(reinterpret_cast<char*>(&tau), 8);
    f.read(reinterpret_cast<char*>(&N), 8);
    KernelMatrix k;
    k.n = static_cast<int>(n);
    k.M = static_cast<int>(M);
    k.params.N = static_cast<int>(N);
    k.params.M = k.M;
    k.params.kappa = kappa;
    k.params.tau = tau;
    const std::size_t total = pow_int(k.M, k.n);
    k.mat.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = 0; j < total; ++j) {
            double re = 0.0, im = 0.0;
            f.read(reinterpret_cast<char*>(&re), 8);
            f.read(reinterpret_cast<char*>(&im), 8);
            k.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
        }
    if (!f) throw BadParams("kernel_import: truncated file " + path);
    // The layout stores the matrix only; weights are rebuilt for the flat grid.
    k.weights.assign(total, std::pow(kPeriod / k.M, k.n));
    return k;
}

}  // namespace psidolab::quantize
