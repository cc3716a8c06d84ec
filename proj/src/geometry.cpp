#include "psidolab/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "json.hpp"

namespace psidolab::geometry {

namespace {

constexpr double kMetricFdStep = 1e-5;
constexpr double kGammaFdStep = 1e-5;

struct State {
    Point z;
    Vec w;
};

Vec acceleration(const ConnectionField& conn, const Point& z, const Vec& w) {
    const Christoffel g = conn.at(z);
    Vec a = Vec::Zero();
    for (int i = 0; i < conn.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < conn.n; ++j)
            for (int k = 0; k < conn.n; ++k) s += g(i, j, k) * w[j] * w[k];
        a[i] = -s;
    }
    return a;
}

// RK4 on the first-order system (z, w).
State rk4_step(const ConnectionField& conn, const State& s, double h) {
    auto f = [&](const State& q) {
        return State{q.w, acceleration(conn, q.z, q.w)};
    };
    const State k1 = f(s);
    const State k2 = f(State{s.z + 0.5 * h * k1.z, s.w + 0.5 * h * k1.w});
    const State k3 = f(State{s.z + 0.5 * h * k2.z, s.w + 0.5 * h * k2.w});
    const State k4 = f(State{s.z + h * k3.z, s.w + h * k3.w});
    return State{s.z + (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
                 s.w + (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

GeodesicSolution integrate_geodesic(const ConnectionField& conn, const Point& x, const Vec& v,
                                    double total_time, int steps) {
    GeodesicSolution sol;
    sol.x = x;
    sol.v = v;
    sol.step = total_time / steps;
    sol.z.reserve(steps + 1);
    sol.zdot.reserve(steps + 1);
    State s{x, v};
    sol.z.push_back(s.z);
    sol.zdot.push_back(s.w);
    for (int t = 0; t < steps; ++t) {
        s = rk4_step(conn, s, sol.step);
        sol.z.push_back(s.z);
        sol.zdot.push_back(s.w);
    }
    return sol;
}

}  // namespace

Vec chart_displacement(int n, const Point& from, const Point& to) {
    Vec d = Vec::Zero();
    for (int i = 0; i < n; ++i) d[i] = wrap_displacement(to[i] - from[i]);
    return d;
}

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::euclidean(int n) {
    MetricField m;
    m.n = n;
    m.coeff = [](const Point&) { return Mat::Identity(); };
    m.dcoeff = [](const Point&) { return std::array<Mat, 2>{Mat::Zero(), Mat::Zero()}; };
    m.d2coeff = [](const Point&) {
        return std::array<std::array<Mat, 2>, 2>{
            std::array<Mat, 2>{Mat::Zero(), Mat::Zero()},
            std::array<Mat, 2>{Mat::Zero(), Mat::Zero()}};
    };
    m.flat = true;
    m.label = "euclidean";
    return m;
}

MetricField MetricField::warped_product(std::function<double(double)> f,
                                        std::function<double(double)> df,
                                        std::function<double(double)> d2f) {
    MetricField m;
    m.n = 2;
    m.coeff = [f](const Point& y) {
        Mat g = Mat::Identity();
        const double fy = f(y[0]);
        g(1, 1) = fy * fy;
        return g;
    };
    m.dcoeff = [f, df](const Point& y) {
        std::array<Mat, 2> d{Mat::Zero(), Mat::Zero()};
        d[0](1, 1) = 2.0 * f(y[0]) * df(y[0]);
        return d;
    };
    m.d2coeff = [f, df, d2f](const Point& y) {
        std::array<std::array<Mat, 2>, 2> dd{
            std::array<Mat, 2>{Mat::Zero(), Mat::Zero()},
            std::array<Mat, 2>{Mat::Zero(), Mat::Zero()}};
        dd[0][0](1, 1) = 2.0 * (df(y[0]) * df(y[0]) + f(y[0]) * d2f(y[0]));
        return dd;
    };
    m.label = "warped";
    return m;
}

Mat MetricField::at(const Point& y) const {
    Mat g = coeff(y);
    if (n == 1) {
        g(0, 1) = g(1, 0) = 0.0;
        g(1, 1) = 1.0;
    }
    return g;
}

Mat MetricField::inverse(const Point& y) const { return at(y).inverse(); }

double MetricField::sqrt_det(const Point& y) const {
    const Mat g = at(y);
    if (n == 1) return std::sqrt(std::abs(g(0, 0)));
    return std::sqrt(std::abs(g.determinant()));
}

std::array<Mat, 2> MetricField::d(const Point& y) const {
    if (dcoeff) return dcoeff(y);
    std::array<Mat, 2> out{Mat::Zero(), Mat::Zero()};
    for (int k = 0; k < n; ++k) {
        Point yp = y, ym = y;
        yp[k] += kMetricFdStep;
        ym[k] -= kMetricFdStep;
        out[k] = (at(yp) - at(ym)) / (2.0 * kMetricFdStep);
    }
    return out;
}

std::array<std::array<Mat, 2>, 2> MetricField::d2(const Point& y) const {
    if (d2coeff) return d2coeff(y);
    std::array<std::array<Mat, 2>, 2> out{
        std::array<Mat, 2>{Mat::Zero(), Mat::Zero()},
        std::array<Mat, 2>{Mat::Zero(), Mat::Zero()}};
    for (int l = 0; l < n; ++l) {
        Point yp = y, ym = y;
        yp[l] += kMetricFdStep;
        ym[l] -= kMetricFdStep;
        const auto dp = d(yp);
        const auto dm = d(ym);
        for (int k = 0; k < n; ++k) out[k][l] = (dp[k] - dm[k]) / (2.0 * kMetricFdStep);
    }
    return out;
}

void MetricField::validate(int samples_per_axis) const {
    const int m = samples_per_axis;
    const int total = n == 1 ? m : m * m;
    for (int s = 0; s < total; ++s) {
        Point y = Point::Zero();
        y[0] = kPeriod * (s % m) / m;
        if (n == 2) y[1] = kPeriod * (s / m) / m;
        const Mat g = at(y);
        if (std::abs(g(0, 1) - g(1, 0)) > 1e-12)
            throw BadParams("metric: g_ij not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> eig(g);
        if (eig.eigenvalues().minCoeff() <= 1e-8)
            throw BadParams("metric: not positive definite");
        const Mat id = g * inverse(y);
        if ((id - Mat::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw BadParams("metric: inverse check failed");
        Point yw = y;
        for (int i = 0; i < n; ++i) yw[i] += kPeriod;
        if ((at(yw) - g).cwiseAbs().maxCoeff() > 1e-10)
            throw BadParams("metric: coefficients not periodic");
    }
}

// ---------------------------------------------------------------------------
// ConnectionField

ConnectionField ConnectionField::zero(int n) {
    ConnectionField c;
    c.n = n;
    c.gamma = [](const Point&) { return Christoffel{}; };
    c.dgamma = [](const Point&) { return ChristoffelJet{}; };
    c.is_symmetric = true;
    c.is_flat = true;
    c.is_trivial = true;
    c.label = "zero";
    return c;
}

ConnectionField ConnectionField::constant(int n, const Christoffel& g0) {
    ConnectionField c;
    c.n = n;
    c.gamma = [g0](const Point&) { return g0; };
    c.dgamma = [](const Point&) { return ChristoffelJet{}; };
    bool sym = true;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                if (std::abs(g0(i, k, j) - g0(i, j, k)) > 1e-15) sym = false;
    c.is_symmetric = sym;
    c.label = "constant";
    return c;
}

ConnectionField ConnectionField::levi_civita(const MetricField& metric) {
    ConnectionField c;
    c.n = metric.n;
    const int n = metric.n;
    c.gamma = [metric, n](const Point& y) {
        const Mat ginv = metric.inverse(y);
        const auto dg = metric.d(y);
        Christoffel out;
        for (int l = 0; l < n; ++l)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int r = 0; r < n; ++r)
                        s += ginv(l, r) * (dg[k](r, j) + dg[j](r, k) - dg[r](j, k));
                    out(l, j, k) = 0.5 * s;
                }
        return out;
    };
    c.is_symmetric = true;
    c.is_flat = metric.flat;
    c.is_trivial = metric.flat;
    c.label = "levi-civita(" + metric.label + ")";
    return c;
}

ConnectionField ConnectionField::from_fourier(const FourierTable& table) {
    ConnectionField c;
    c.n = table.n;
    auto entries = table.entries;
    c.gamma = [entries](const Point& y) {
        Christoffel out;
        for (const auto& e : entries) {
            const double ph = e.mode0 * y[0] + e.mode1 * y[1];
            out(e.i, e.k, e.j) += e.re * std::cos(ph) - e.im * std::sin(ph);
        }
        return out;
    };
    c.dgamma = [entries](const Point& y) {
        ChristoffelJet out;
        for (const auto& e : entries) {
            const double ph = e.mode0 * y[0] + e.mode1 * y[1];
            const double d = -e.re * std::sin(ph) - e.im * std::cos(ph);
            out(e.i, e.k, e.j, 0) += d * e.mode0;
            out(e.i, e.k, e.j, 1) += d * e.mode1;
        }
        return out;
    };
    c.label = "fourier";
    return c;
}

std::string ConnectionField::FourierTable::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["gamma"] = "fourier";
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        arr.push_back({e.i, e.k, e.j, e.mode0, e.mode1, e.re, e.im});
    }
    j["coeffs"] = arr;
    return j.dump();
}

ConnectionField::FourierTable ConnectionField::FourierTable::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    FourierTable t;
    t.n = j.at("n").get<int>();
    if (j.at("gamma").get<std::string>() != "fourier")
        throw BadParams("connection table: expected gamma == \"fourier\"");
    for (const auto& row : j.at("coeffs")) {
        Entry e;
        e.i = row.at(0).get<int>();
        e.k = row.at(1).get<int>();
        e.j = row.at(2).get<int>();
        e.mode0 = row.at(3).get<int>();
        e.mode1 = row.at(4).get<int>();
        e.re = row.at(5).get<double>();
        e.im = row.at(6).get<double>();
        t.entries.push_back(e);
    }
    return t;
}

Christoffel ConnectionField::at(const Point& y) const { return gamma(y); }

ChristoffelJet ConnectionField::jet(const Point& y) const {
    if (dgamma) return dgamma(y);
    ChristoffelJet out;
    for (int l = 0; l < n; ++l) {
        Point yp = y, ym = y;
        yp[l] += kGammaFdStep;
        ym[l] -= kGammaFdStep;
        const Christoffel gp = gamma(yp);
        const Christoffel gm = gamma(ym);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    out(i, k, j, l) = (gp(i, k, j) - gm(i, k, j)) / (2.0 * kGammaFdStep);
    }
    return out;
}

void ConnectionField::validate(int samples_per_axis, const MetricField* levi_civita_of) const {
    const int m = samples_per_axis;
    const int total = n == 1 ? m : m * m;
    ConnectionField lc;
    if (levi_civita_of) lc = ConnectionField::levi_civita(*levi_civita_of);
    for (int s = 0; s < total; ++s) {
        Point y = Point::Zero();
        y[0] = kPeriod * (s % m) / m;
        if (n == 2) y[1] = kPeriod * (s / m) / m;
        const Christoffel g = at(y);
        Point yw = y;
        for (int i = 0; i < n; ++i) yw[i] += kPeriod;
        const Christoffel gw = at(yw);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) {
                    if (std::abs(g(i, k, j) - gw(i, k, j)) > 1e-10)
                        throw BadParams("connection: coefficients not periodic");
                    if (is_symmetric && std::abs(g(i, k, j) - g(i, j, k)) > 1e-12)
                        throw BadParams("connection: symmetry flag violated");
                }
        if (levi_civita_of) {
            const Christoffel ref = lc.at(y);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    for (int j = 0; j < n; ++j)
                        if (std::abs(g(i, k, j) - ref(i, k, j)) > 1e-8)
                            throw BadParams("connection: Levi-Civita mismatch");
        }
    }
}

// ---------------------------------------------------------------------------
// Operations

Torsion torsion(const ConnectionField& conn, const Point& y) {
    const Christoffel g = conn.at(y);
    Torsion t;
    for (int i = 0; i < conn.n; ++i)
        for (int j = 0; j < conn.n; ++j)
            for (int k = 0; k < conn.n; ++k) t(i, j, k) = g(i, j, k) - g(i, k, j);
    return t;
}

Curvature curvature(const ConnectionField& conn, const Point& y) {
    const Christoffel g = conn.at(y);
    const ChristoffelJet dg = conn.jet(y);
    Curvature r;
    const int n = conn.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = dg(i, l, j, k) - dg(i, k, j, l);
                    for (int m = 0; m < n; ++m)
                        s += g(i, k, m) * g(m, l, j) - g(i, l, m) * g(m, k, j);
                    r(i, j, k, l) = s;
                }
    return r;
}

double GeodesicSolution::residual(const ConnectionField& conn) const {
    const int m = static_cast<int>(z.size());
    if (m < 5) return 0.0;
    const double h = step;
    double worst = 0.0;
    for (int t = 2; t + 2 < m; ++t) {
        const Point acc =
            (-z[t - 2] + 16.0 * z[t - 1] - 30.0 * z[t] + 16.0 * z[t + 1] - z[t + 2]) /
            (12.0 * h * h);
        const Vec model = acceleration(conn, z[t], zdot[t]);
        worst = std::max(worst, (acc - model).cwiseAbs().maxCoeff());
    }
    return worst;
}

GeodesicSolution geodesic_shoot(const ConnectionField& conn, const Point& x, const Vec& v,
                                double step) {
    double h = step;
    for (int attempt = 0; attempt < 5; ++attempt) {
        const int steps = std::max(4, static_cast<int>(std::lround(1.0 / h)));
        GeodesicSolution sol = integrate_geodesic(conn, x, v, 1.0, steps);
        if (sol.residual(conn) <= 1e-6) return sol;
        h *= 0.5;
    }
    throw StepFailure("geodesic_shoot: residual tolerance not met after step halving");
}

Vec log_map(const ConnectionField& conn, const Point& x, const Point& y, double r_guard) {
    const Vec d0 = chart_displacement(conn.n, x, y);
    for (int i = 0; i < conn.n; ++i)
        if (std::abs(d0[i]) > r_guard)
            throw OutsideInjectivityRadius("log_map: target beyond injectivity guard");
    if (conn.is_trivial || d0.isZero(0.0)) return d0;

    Vec v = d0;
    const double dv = 1e-6;
    for (int it = 0; it < 50; ++it) {
        const GeodesicSolution sol = geodesic_shoot(conn, x, v);
        const Vec err = chart_displacement(conn.n, sol.end(), y);
        if (err.cwiseAbs().maxCoeff() < 1e-11) return v;
        Mat jac = Mat::Identity();
        for (int a = 0; a < conn.n; ++a) {
            Vec vp = v, vm = v;
            vp[a] += dv;
            vm[a] -= dv;
            const Point ep = geodesic_shoot(conn, x, vp).end();
            const Point em = geodesic_shoot(conn, x, vm).end();
            const Vec col = (ep - em) / (2.0 * dv);
            for (int b = 0; b < conn.n; ++b) jac(b, a) = col[b];
        }
        Vec delta = Vec::Zero();
        if (conn.n == 1) {
            delta[0] = err[0] / jac(0, 0);
        } else {
            delta = jac.fullPivLu().solve(err);
        }
        v += delta;
    }
    throw NoConvergence("log_map: Newton shooting did not converge");
}

TransportResult parallel_transport(const ConnectionField& conn, const Point& x, const Point& y) {
    TransportResult out;
    out.x = x;
    out.y = y;
    if (conn.is_trivial || chart_displacement(conn.n, x, y).isZero(0.0)) {
        out.phi = Mat::Identity();
        out.upsilon = 1.0;
        return out;
    }
    const Vec v = log_map(conn, x, y);

    // Joint RK4 of geodesic + covector transport zeta' = B zeta with
    // B(r,c) = Gamma^c_{sr} zdot^s (velocity contracted with the first lower
    // index; this is the convention that satisfies the transport derivative
    // identity at y = x).
    struct Full {
        Point z;
        Vec w;
        Mat p;
    };
    auto rhs = [&](const Full& s) {
        const Christoffel g = conn.at(s.z);
        Mat b = Mat::Zero();
        for (int r = 0; r < conn.n; ++r)
            for (int c = 0; c < conn.n; ++c) {
                double val = 0.0;
                for (int sidx = 0; sidx < conn.n; ++sidx) val += g(c, sidx, r) * s.w[sidx];
                b(r, c) = val;
            }
        return Full{s.w, acceleration(conn, s.z, s.w), b * s.p};
    };
    const int steps = 256;
    const double h = 1.0 / steps;
    Full s{x, v, Mat::Identity()};
    if (conn.n == 1) s.p(1, 1) = 1.0;
    for (int t = 0; t < steps; ++t) {
        const Full k1 = rhs(s);
        const Full k2 = rhs(Full{s.z + 0.5 * h * k1.z, s.w + 0.5 * h * k1.w, s.p + 0.5 * h * k1.p});
        const Full k3 = rhs(Full{s.z + 0.5 * h * k2.z, s.w + 0.5 * h * k2.w, s.p + 0.5 * h * k2.p});
        const Full k4 = rhs(Full{s.z + h * k3.z, s.w + h * k3.w, s.p + h * k3.p});
        s.z += (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        s.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        s.p += (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    }
    out.phi = s.p;
    out.upsilon = conn.n == 1 ? std::abs(s.p(0, 0)) : std::abs(s.p.determinant());
    if (!(out.upsilon > 0.0))
        throw NoConvergence("parallel_transport: degenerate transport determinant");
    return out;
}

double upsilon(const ConnectionField& conn, const Point& x, const Point& y) {
    return parallel_transport(conn, x, y).upsilon;
}

double phase(const ConnectionField& conn, const Point& x, const Point& y, double tau,
             const Vec& zeta) {
    const Vec v = log_map(conn, x, y);
    Vec vel = v;
    if (!conn.is_trivial && tau > 0.0) {
        const int steps = std::max(4, static_cast<int>(std::ceil(256.0 * tau)));
        GeodesicSolution sol = integrate_geodesic(conn, x, v, tau, steps);
        vel = sol.end_velocity();
    }
    double s = 0.0;
    for (int i = 0; i < conn.n; ++i) s += vel[i] * zeta[i];
    return -s;
}

double scalar_curvature(const MetricField& metric, const Point& y) {
    if (metric.n == 1) return 0.0;
    const ConnectionField lc = ConnectionField::levi_civita(metric);
    const Curvature r = curvature(lc, y);
    const Mat ginv = metric.inverse(y);
    double s = 0.0;
    for (int j = 0; j < metric.n; ++j)
        for (int l = 0; l < metric.n; ++l) {
            double ric = 0.0;
            for (int i = 0; i < metric.n; ++i) ric += r(i, j, i, l);
            s += ginv(j, l) * ric;
        }
    return s;
}

}  // namespace psidolab::geometry
