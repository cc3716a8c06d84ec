#include "psidolab/symbols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

namespace psidolab::symbols {

namespace {

// Central-difference step for a derivative at nesting depth d. The optimal
// step for a d-fold nested first difference balances rounding eps/h^d
// against O(h^2) truncation, so it must grow with depth.
double fd_step(int depth) {
    const double eps = 2.2e-16;
    return std::max(1e-4, std::pow(eps, 1.0 / (depth + 2)));
}

Complex check_finite(Complex v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NonFinite("symbol evaluator returned a non-finite value");
    return v;
}

// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 joins.
double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

double weight(const MetricField& metric, const Point& y, const Vec& eta) {
    const geometry::Mat ginv = metric.inverse(y);
    double q = 0.0;
    for (int a = 0; a < metric.n; ++a)
        for (int b = 0; b < metric.n; ++b) q += ginv(a, b) * eta[a] * eta[b];
    return std::sqrt(1.0 + q);
}

SymbolSpec eta_partial(const SymbolSpec& a, int j) {
    SymbolSpec out;
    out.m = a.m - a.rho;
    out.rho = a.rho;
    out.delta = a.delta;
    out.n = a.n;
    out.fd_depth = a.fd_depth + 1;
    out.label = "d_eta" + std::to_string(j) + "(" + a.label + ")";
    if (a.deta) {
        auto g = a.deta;
        out.eval = [g, j](const Point& y, const Vec& eta) { return g(y, eta)[j]; };
    } else {
        auto base = a.eval;
        const int depth = out.fd_depth;
        out.eval = [base, j, depth](const Point& y, const Vec& eta) {
            const double h = fd_step(depth) * (1.0 + eta.norm());
            Vec ep = eta, em = eta;
            ep[j] += h;
            em[j] -= h;
            return (base(y, ep) - base(y, em)) / (2.0 * h);
        };
    }
    return out;
}

SymbolSpec horizontal_derivative(const SymbolSpec& a, const ConnectionField& conn, int k) {
    SymbolSpec out;
    out.m = a.m + a.delta;
    out.rho = a.rho;
    out.delta = a.delta;
    out.n = a.n;
    out.fd_depth = a.fd_depth + 1;
    out.label = "del" + std::to_string(k) + "(" + a.label + ")";

    const SymbolSpec base = a;
    const int n = a.n;
    const int depth = out.fd_depth;
    out.eval = [base, conn, k, n, depth](const Point& y, const Vec& eta) {
        Complex dy_term;
        if (base.dy) {
            dy_term = base.dy(y, eta)[k];
        } else {
            const double h = fd_step(depth);
            Point yp = y, ym = y;
            yp[k] += h;
            ym[k] -= h;
            dy_term = (base.eval(yp, eta) - base.eval(ym, eta)) / (2.0 * h);
        }
        Complex gamma_term(0.0, 0.0);
        if (!conn.is_trivial) {
            const geometry::Christoffel g = conn.at(y);
            for (int j = 0; j < n; ++j) {
                double coef = 0.0;
                for (int i = 0; i < n; ++i) coef += g(i, k, j) * eta[i];
                if (coef == 0.0) continue;
                Complex d;
                if (base.deta) {
                    d = base.deta(y, eta)[j];
                } else {
                    const double h = fd_step(depth) * (1.0 + eta.norm());
                    Vec ep = eta, em = eta;
                    ep[j] += h;
                    em[j] -= h;
                    d = (base.eval(y, ep) - base.eval(y, em)) / (2.0 * h);
                }
                gamma_term += coef * d;
            }
        }
        return dy_term + gamma_term;
    };
    return out;
}

SeminormReport seminorm_estimate(const SymbolSpec& a, const ConnectionField& conn,
                                 const MetricField& metric, int l, double eta_max,
                                 int y_samples_per_axis, double threshold) {
    if (l < 0 || l > 6) throw BadParams("seminorm_estimate: level must be in [0,6]");
    if (!(eta_max >= 1.0)) throw BadParams("seminorm_estimate: eta_max must be >= 1");
    const int n = a.n;

    // All derivative words d_eta^alpha del_{i_1..i_q} a with |alpha| + q <= l.
    struct Word {
        SymbolSpec sym;
        std::array<int, 2> alpha{0, 0};
        int q = 0;
    };
    std::vector<Word> words;
    std::vector<SymbolSpec> level{a};          // horizontal words of length q
    std::vector<std::vector<SymbolSpec>> horiz{{a}};
    for (int q = 1; q <= l; ++q) {
        std::vector<SymbolSpec> next;
        for (const auto& s : horiz.back())
            for (int k = 0; k < n; ++k) next.push_back(horizontal_derivative(s, conn, k));
        horiz.push_back(std::move(next));
    }
    for (int q = 0; q <= l; ++q) {
        for (const auto& hs : horiz[static_cast<std::size_t>(q)]) {
            // attach eta-partials up to total order l - q
            struct Frame {
                SymbolSpec sym;
                std::array<int, 2> alpha;
                int last_axis;
            };
            std::vector<Frame> stack{{hs, {0, 0}, 0}};
            while (!stack.empty()) {
                Frame f = stack.back();
                stack.pop_back();
                words.push_back({f.sym, f.alpha, q});
                const int total = f.alpha[0] + f.alpha[1];
                if (total + q >= l) continue;
                for (int j = f.last_axis; j < n; ++j) {
                    Frame nf{eta_partial(f.sym, j), f.alpha, j};
                    ++nf.alpha[static_cast<std::size_t>(j)];
                    stack.push_back(nf);
                }
            }
        }
    }

    // Sample points: uniform y-grid x log-spaced eta shells x directions.
    std::vector<Point> ys;
    const int my = y_samples_per_axis;
    const int ny = n == 1 ? my : my * my;
    for (int s = 0; s < ny; ++s) {
        Point y = Point::Zero();
        y[0] = kPeriod * (s % my) / my;
        if (n == 2) y[1] = kPeriod * (s / my) / my;
        ys.push_back(y);
    }
    std::vector<Vec> etas;
    int shells = 0;
    for (double r = 1.0; r <= eta_max * (1.0 + 1e-12); r *= 2.0) {
        ++shells;
        if (n == 1) {
            for (double sgn : {1.0, -1.0}) {
                Vec e = Vec::Zero();
                e[0] = sgn * r;
                etas.push_back(e);
            }
        } else {
            const int dirs = 8;
            for (int d = 0; d < dirs; ++d) {
                const double ang = kPeriod * d / dirs;
                Vec e = Vec::Zero();
                e[0] = r * std::cos(ang);
                e[1] = r * std::sin(ang);
                etas.push_back(e);
            }
        }
    }

    SeminormReport rep;
    rep.level = l;
    rep.y_samples = ny;
    rep.shells = shells;
    rep.directions = n == 1 ? 2 : 8;
    rep.threshold = threshold;

    std::mutex best_mutex;
    parallel_for(etas.size(), [&](std::size_t ei) {
        const Vec& eta = etas[ei];
        double local_best = -1.0;
        Point local_y;
        std::array<int, 2> local_alpha{0, 0};
        int local_q = 0;
        for (const auto& y : ys) {
            const double w = weight(metric, y, eta);
            for (const auto& word : words) {
                const int na = word.alpha[0] + word.alpha[1];
                const double expo = a.m + a.delta * word.q - a.rho * na;
                const double val =
                    std::abs(check_finite(word.sym.eval(y, eta))) / std::pow(w, expo);
                if (val > local_best) {
                    local_best = val;
                    local_y = y;
                    local_alpha = word.alpha;
                    local_q = word.q;
                }
            }
        }
        std::lock_guard<std::mutex> lock(best_mutex);
        if (local_best > rep.value) {
            rep.value = local_best;
            rep.witness_y = local_y;
            rep.witness_eta = eta;
            rep.witness_alpha = local_alpha;
            rep.witness_q = local_q;
        }
    });
    rep.pass = threshold <= 0.0 || rep.value <= threshold;
    return rep;
}

SymbolSpec make_multiplier(std::function<Complex(const Vec&)> m_fun, double m, double rho,
                           double delta, int n,
                           std::function<std::array<Complex, 2>(const Vec&)> grad) {
    SymbolSpec s;
    s.m = m;
    s.rho = rho;
    s.delta = delta;
    s.n = n;
    s.eval = [m_fun](const Point&, const Vec& eta) { return m_fun(eta); };
    if (grad) s.deta = [grad](const Point&, const Vec& eta) { return grad(eta); };
    s.dy = [](const Point&, const Vec&) {
        return std::array<Complex, 2>{Complex(0, 0), Complex(0, 0)};
    };
    s.label = "multiplier";
    return s;
}

SymbolSpec make_counterexample(double rho, double theta, int n) {
    if (!(rho > 0.0 && rho < 1.0)) throw BadParams("make_counterexample: rho must be in (0,1)");
    if (theta < 0.0) throw BadParams("make_counterexample: theta must be >= 0");
    auto f = [rho, theta, n](const Vec& xi) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += xi[i] * xi[i];
        const double r = std::sqrt(r2);
        const double cut = smoothstep5((r - 0.5) / 0.5);
        if (cut == 0.0) return Complex(0.0, 0.0);
        const double phase = std::pow(r, 1.0 - rho);
        const double amp = cut / (1.0 + std::pow(r, theta));
        return Complex(amp * std::cos(phase), amp * std::sin(phase));
    };
    SymbolSpec s = make_multiplier(f, -theta, rho, 0.0, n);
    s.label = "counterexample(rho=" + std::to_string(rho) + ",theta=" + std::to_string(theta) + ")";
    return s;
}

SymbolSpec make_bessel(double lambda, int n) {
    auto f = [lambda, n](const Vec& xi) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += xi[i] * xi[i];
        return Complex(std::pow(1.0 + r2, 0.5 * lambda), 0.0);
    };
    auto g = [lambda, n](const Vec& xi) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += xi[i] * xi[i];
        const double c = lambda * std::pow(1.0 + r2, 0.5 * lambda - 1.0);
        return std::array<Complex, 2>{Complex(c * xi[0], 0.0), Complex(c * xi[1], 0.0)};
    };
    SymbolSpec s = make_multiplier(f, lambda, 1.0, 0.0, n, g);
    s.label = "bessel(" + std::to_string(lambda) + ")";
    return s;
}

SymbolSpec make_laplacian_symbol(const MetricField& metric) {
    SymbolSpec s;
    s.m = 2.0;
    s.rho = 1.0;
    s.delta = 0.0;
    s.n = metric.n;
    const int n = metric.n;
    s.eval = [metric, n](const Point& y, const Vec& xi) {
        const geometry::Mat ginv = metric.inverse(y);
        double q = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) q += ginv(a, b) * xi[a] * xi[b];
        const double scal = n == 2 ? geometry::scalar_curvature(metric, y) : 0.0;
        return Complex(-q + scal / 3.0, 0.0);
    };
    s.label = "laplacian(" + metric.label + ")";
    return s;
}

MembershipReport class_membership_check(const SymbolSpec& a, double target_m, double target_rho,
                                        double target_delta, int l, double eta_max,
                                        const ConnectionField* conn, const MetricField* metric) {
    SymbolSpec probe = a;
    probe.m = target_m;
    probe.rho = target_rho;
    probe.delta = target_delta;
    const ConnectionField trivial = ConnectionField::zero(a.n);
    const MetricField flat = MetricField::euclidean(a.n);
    const ConnectionField& c = conn ? *conn : trivial;
    const MetricField& g = metric ? *metric : flat;

    MembershipReport rep;
    double worst_ratio = 0.0;
    for (double em : {eta_max, 2.0 * eta_max, 4.0 * eta_max}) {
        rep.estimates.push_back(seminorm_estimate(probe, c, g, l, em).value);
    }
    for (std::size_t i = 1; i < rep.estimates.size(); ++i) {
        const double prev = rep.estimates[i - 1];
        const double ratio = prev > 0.0 ? rep.estimates[i] / prev : 1.0;
        worst_ratio = std::max(worst_ratio, ratio);
    }
    rep.margin = 1.1 - worst_ratio;
    rep.pass = worst_ratio < 1.1;
    return rep;
}

}  // namespace psidolab::symbols
