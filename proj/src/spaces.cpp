#include "psidolab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "psidolab/fourier.hpp"

namespace psidolab::spaces {

namespace {

// Spectral derivative along one axis of a row-major M^n grid (Nyquist zeroed).
std::vector<Complex> spectral_derivative(const std::vector<Complex>& f, int n, int M, int axis) {
    std::vector<Complex> out(f.size());
    const int half = M / 2;
    auto mode = [&](int idx) {
        int k = idx <= half ? idx : idx - M;
        if (2 * std::abs(k) == M) k = 0;  // drop the unpaired Nyquist mode
        return k;
    };
    if (n == 1) {
        std::vector<Complex> hat = f;
        fourier::dft(hat);
        for (int i = 0; i < M; ++i) hat[static_cast<std::size_t>(i)] *= Complex(0.0, mode(i));
        fourier::idft(hat);
        return hat;
    }
    std::vector<Complex> line(static_cast<std::size_t>(M));
    for (int fixed = 0; fixed < M; ++fixed) {
        for (int t = 0; t < M; ++t) {
            const std::size_t idx = axis == 0
                                        ? static_cast<std::size_t>(t) * M + fixed
                                        : static_cast<std::size_t>(fixed) * M + t;
            line[static_cast<std::size_t>(t)] = f[idx];
        }
        fourier::dft(line);
        for (int t = 0; t < M; ++t) line[static_cast<std::size_t>(t)] *= Complex(0.0, mode(t));
        fourier::idft(line);
        for (int t = 0; t < M; ++t) {
            const std::size_t idx = axis == 0
                                        ? static_cast<std::size_t>(t) * M + fixed
                                        : static_cast<std::size_t>(fixed) * M + t;
            out[idx] = line[static_cast<std::size_t>(t)];
        }
    }
    return out;
}

}  // namespace

double chart_distance(const MetricField& metric, const Point& x, const Point& y) {
    const geometry::Vec d = geometry::chart_displacement(metric.n, x, y);
    if (metric.flat) return d.norm();
    const int segs = 32;
    double len = 0.0;
    for (int s = 0; s < segs; ++s) {
        const double t = (s + 0.5) / segs;
        const Point z = x + t * d;
        const geometry::Mat g = metric.at(z);
        double q = 0.0;
        for (int a = 0; a < metric.n; ++a)
            for (int b = 0; b < metric.n; ++b) q += g(a, b) * d[a] * d[b];
        len += std::sqrt(q) / segs;
    }
    return len;
}

double lp_norm(const GridDensity& u, double p, const MetricField& metric) {
    if (!(p >= 1.0)) throw BadParams("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : u.f) m = std::max(m, std::abs(v));
        return m;
    }
    const double cell = std::pow(kPeriod / u.M, u.n);
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        acc += std::pow(std::abs(u.f[j]), p) * metric.sqrt_det(u.grid_point(j)) * cell;
    return std::pow(acc, 1.0 / p);
}

double bmo_norm(const GridDensity& u, const MetricField& metric) {
    const std::size_t total = u.size();
    const double cell = std::pow(kPeriod / u.M, u.n);
    std::vector<Point> pts(total);
    std::vector<double> w(total);
    for (std::size_t j = 0; j < total; ++j) {
        pts[j] = u.grid_point(j);
        w[j] = metric.sqrt_det(pts[j]) * cell;
    }

    // Radii r0/4 * 2^{-j} until a flat ball of that radius holds < 4 cells.
    std::vector<double> radii;
    for (double r = kInjectivityRadius / 4.0;; r *= 0.5) {
        const double cells = u.n == 1 ? 2.0 * r / (kPeriod / u.M)
                                      : kPi * r * r / cell;
        if (cells < 4.0) break;
        radii.push_back(r);
    }
    if (radii.empty()) radii.push_back(kInjectivityRadius / 4.0);

    double osc_term = 0.0;
    double avg_term = 0.0;
    std::mutex best;
    parallel_for(total, [&](std::size_t ci) {
        const Point& x = pts[ci];
        double local_osc = 0.0, local_avg = 0.0;
        std::vector<double> dist(total);
        for (std::size_t j = 0; j < total; ++j) dist[j] = chart_distance(metric, x, pts[j]);
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
            const double r = radii[ri];
            double vol = 0.0;
            Complex mean(0, 0);
            for (std::size_t j = 0; j < total; ++j) {
                if (dist[j] < r) {
                    vol += w[j];
                    mean += u.f[j] * w[j];
                }
            }
            if (vol <= 0.0) continue;
            mean /= vol;
            double osc = 0.0, avg = 0.0;
            for (std::size_t j = 0; j < total; ++j) {
                if (dist[j] < r) {
                    osc += std::abs(u.f[j] - mean) * w[j];
                    avg += std::abs(u.f[j]) * w[j];
                }
            }
            local_osc = std::max(local_osc, osc / vol);
            if (ri == 0) local_avg = std::max(local_avg, avg / vol);
        }
        std::lock_guard<std::mutex> lock(best);
        osc_term = std::max(osc_term, local_osc);
        avg_term = std::max(avg_term, local_avg);
    });
    return osc_term + avg_term;
}

GridDensity bessel_apply(double lambda, const GridDensity& u, int N, const MetricField* metric) {
    if (metric && !metric->flat) throw NotFlat("bessel_apply: flat metric required");
    if (N < 1) throw BadParams("bessel_apply: N must be >= 1");
    GridDensity out = u;
    const int M = u.M;
    auto mult = [lambda](double k2) { return std::pow(1.0 + k2, 0.5 * lambda); };
    if (u.n == 1) {
        std::vector<Complex> hat = u.f;
        fourier::dft(hat);
        for (int i = 0; i < M; ++i) {
            const int k = i <= M / 2 ? i : i - M;
            if (std::abs(k) <= N)
                hat[static_cast<std::size_t>(i)] *= mult(static_cast<double>(k) * k);
        }
        fourier::idft(hat);
        out.f = std::move(hat);
    } else {
        std::vector<Complex> hat = u.f;
        // 2D DFT rows+cols
        std::vector<Complex> line(static_cast<std::size_t>(M));
        auto pass = [&](bool rows, bool inverse) {
            for (int fixed = 0; fixed < M; ++fixed) {
                for (int t = 0; t < M; ++t) {
                    const std::size_t idx = rows ? static_cast<std::size_t>(fixed) * M + t
                                                 : static_cast<std::size_t>(t) * M + fixed;
                    line[static_cast<std::size_t>(t)] = hat[idx];
                }
                if (inverse)
                    fourier::idft(line);
                else
                    fourier::dft(line);
                for (int t = 0; t < M; ++t) {
                    const std::size_t idx = rows ? static_cast<std::size_t>(fixed) * M + t
                                                 : static_cast<std::size_t>(t) * M + fixed;
                    hat[idx] = line[static_cast<std::size_t>(t)];
                }
            }
        };
        pass(true, false);
        pass(false, false);
        for (int i0 = 0; i0 < M; ++i0)
            for (int i1 = 0; i1 < M; ++i1) {
                const int k0 = i0 <= M / 2 ? i0 : i0 - M;
                const int k1 = i1 <= M / 2 ? i1 : i1 - M;
                if (std::max(std::abs(k0), std::abs(k1)) <= N)
                    hat[static_cast<std::size_t>(i0) * M + i1] *=
                        mult(static_cast<double>(k0) * k0 + static_cast<double>(k1) * k1);
            }
        pass(false, true);
        pass(true, true);
        out.f = std::move(hat);
    }
    return out;
}

GridDensity laplace_beltrami_apply(const MetricField& metric, const GridDensity& u) {
    if (std::abs(u.kappa) > 1e-12)
        throw KappaUnsupported("laplace_beltrami_apply: only 0-densities supported");
    const int n = u.n;
    const int M = u.M;
    GridDensity out = u;
    std::vector<std::vector<Complex>> du(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) du[static_cast<std::size_t>(j)] = spectral_derivative(u.f, n, M, j);

    std::vector<Complex> acc(u.size(), Complex(0, 0));
    for (int i = 0; i < n; ++i) {
        std::vector<Complex> flux(u.size());
        for (std::size_t idx = 0; idx < u.size(); ++idx) {
            const Point y = u.grid_point(idx);
            const geometry::Mat ginv = metric.inverse(y);
            const double g = metric.sqrt_det(y);
            Complex v(0, 0);
            for (int j = 0; j < n; ++j) v += ginv(i, j) * du[static_cast<std::size_t>(j)][idx];
            flux[idx] = g * v;
        }
        const auto dflux = spectral_derivative(flux, n, M, i);
        for (std::size_t idx = 0; idx < u.size(); ++idx) acc[idx] += dflux[idx];
    }
    for (std::size_t idx = 0; idx < u.size(); ++idx)
        out.f[idx] = acc[idx] / metric.sqrt_det(u.grid_point(idx));
    return out;
}

VolumeGrowthReport volume_growth_check(const MetricField& metric,
                                       const std::vector<double>& radii, int grid_per_axis) {
    VolumeGrowthReport rep;
    rep.radii = radii;
    const int M = grid_per_axis;
    GridDensity proto;
    proto.n = metric.n;
    proto.M = M;
    const std::size_t total = metric.n == 1 ? static_cast<std::size_t>(M)
                                            : static_cast<std::size_t>(M) * M;
    proto.f.assign(total, Complex(0, 0));
    const double cell = std::pow(kPeriod / M, metric.n);

    std::vector<Point> pts(total);
    std::vector<double> w(total);
    for (std::size_t j = 0; j < total; ++j) {
        pts[j] = proto.grid_point(j);
        w[j] = metric.sqrt_det(pts[j]) * cell;
    }
    // Worst case over a sparse set of centers (8 per axis).
    std::vector<std::size_t> centers;
    const int stride = std::max(1, M / 8);
    if (metric.n == 1) {
        for (int c = 0; c < M; c += stride) centers.push_back(static_cast<std::size_t>(c));
    } else {
        for (int c0 = 0; c0 < M; c0 += stride)
            for (int c1 = 0; c1 < M; c1 += stride)
                centers.push_back(static_cast<std::size_t>(c0) * M + c1);
    }
    rep.volumes.assign(radii.size(), 0.0);
    std::mutex mu;
    parallel_for(centers.size(), [&](std::size_t ci) {
        const Point& x = pts[centers[ci]];
        std::vector<double> local(radii.size(), 0.0);
        for (std::size_t j = 0; j < total; ++j) {
            const double d = chart_distance(metric, x, pts[j]);
            for (std::size_t r = 0; r < radii.size(); ++r)
                if (d < radii[r]) local[r] += w[j];
        }
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t r = 0; r < radii.size(); ++r)
            rep.volumes[r] = std::max(rep.volumes[r], local[r]);
    });

    // On the torus volumes saturate at Vol(M), so the polynomial degree of the
    // bound can be pinned to the dimension; C0 is then the worst ratio.
    rep.mu0 = static_cast<double>(metric.n);
    rep.c0 = 0.0;
    for (std::size_t r = 0; r < radii.size(); ++r)
        rep.c0 = std::max(rep.c0, rep.volumes[r] / std::pow(1.0 + radii[r], rep.mu0));
    rep.pass = true;
    for (std::size_t r = 0; r < radii.size(); ++r)
        if (rep.volumes[r] > rep.c0 * std::pow(1.0 + radii[r], rep.mu0) * (1.0 + 1e-9))
            rep.pass = false;
    return rep;
}

}  // namespace psidolab::spaces
