#include <cmath>
#include <vector>

#include "doctest.h"
#include "psidolab/spaces.hpp"

using namespace psidolab;
using namespace psidolab::spaces;
using geometry::Mat;
using geometry::Point;
using quantize::GridDensity;

namespace {

GridDensity sample1(int m, const std::function<Complex(double)>& f, double kappa = 0.0) {
    return GridDensity::sample(1, m, kappa, [&](const Point& x) { return f(x[0]); });
}

MetricField scaled_1d(double g11) {
    MetricField m = MetricField::euclidean(1);
    m.flat = false;
    m.coeff = [g11](const Point&) {
        Mat g = Mat::Identity();
        g(0, 0) = g11;
        return g;
    };
    m.dcoeff = nullptr;
    m.d2coeff = nullptr;
    return m;
}

MetricField warped() {
    return MetricField::warped_product([](double t) { return 2.0 + std::cos(t); },
                                       [](double t) { return -std::sin(t); },
                                       [](double t) { return -std::cos(t); });
}

}  // namespace

TEST_CASE("chart distance: flat shortest representative and metric scaling") {
    auto flat = MetricField::euclidean(1);
    Point x = Point::Zero(), y = Point::Zero();
    x[0] = 0.1;
    y[0] = 6.2;
    CHECK(chart_distance(flat, x, y) == doctest::Approx(kPeriod - 6.1));
    CHECK(chart_distance(scaled_1d(4.0), x, y) == doctest::Approx(2.0 * (kPeriod - 6.1)));
    CHECK(chart_distance(flat, x, x) == doctest::Approx(0.0));
}

TEST_CASE("Lp norms: constants, Parseval, the kappa convention, p = infinity") {
    auto flat = MetricField::euclidean(1);
    auto one = sample1(128, [](double) { return Complex(1.0); });
    for (double p : {1.0, 2.0, 4.0})
        CHECK(lp_norm(one, p, flat) == doctest::Approx(std::pow(kPeriod, 1.0 / p)).epsilon(1e-10));
    CHECK(lp_norm(one, std::numeric_limits<double>::infinity(), flat) == doctest::Approx(1.0));

    auto u = sample1(128, [](double x) {
        return std::exp(Complex(0.0, 3.0 * x)) + 0.5 * std::exp(Complex(0.0, -x));
    });
    CHECK(lp_norm(u, 2.0, flat) ==
          doctest::Approx(std::sqrt(kPeriod * (1.0 + 0.25))).epsilon(1e-10));

    auto u1 = sample1(128, [](double x) { return Complex(std::sin(x), 0.2); }, 0.0);
    auto u2 = sample1(128, [](double x) { return Complex(std::sin(x), 0.2); }, 1.0);
    CHECK(lp_norm(u1, 3.0, flat) == doctest::Approx(lp_norm(u2, 3.0, flat)));
}

TEST_CASE("Lp norms satisfy the Holder comparison on the torus") {
    auto flat = MetricField::euclidean(1);
    auto u = sample1(64, [](double x) { return Complex(std::sin(2.0 * x) + 0.3, std::cos(x)); });
    for (double p : {1.5, 2.0, 4.0}) {
        CHECK(lp_norm(u, 1.0, flat) <=
              std::pow(kPeriod, 1.0 - 1.0 / p) * lp_norm(u, p, flat) + 1e-9);
    }
}

TEST_CASE("BMO norm: constants, homogeneity, domination by the sup norm") {
    auto flat = MetricField::euclidean(1);
    auto c = sample1(64, [](double) { return Complex(-2.5, 0.0); });
    CHECK(bmo_norm(c, flat) == doctest::Approx(2.5).epsilon(1e-10));

    auto u = sample1(64, [](double x) { return Complex(std::sin(3.0 * x), 0.4 * std::cos(x)); });
    auto u3 = u;
    for (auto& v : u3.f) v *= -3.0;
    CHECK(bmo_norm(u3, flat) == doctest::Approx(3.0 * bmo_norm(u, flat)).epsilon(1e-10));
    CHECK(bmo_norm(u, flat) <=
          3.0 * lp_norm(u, std::numeric_limits<double>::infinity(), flat) + 1e-9);
}

TEST_CASE("BMO norm of the sawtooth matches a dense-radius scan") {
    const int m = 256;
    auto flat = MetricField::euclidean(1);
    auto saw = sample1(m, [](double x) { return Complex(x / kPeriod - 0.5, 0.0); });
    const double fast = bmo_norm(saw, flat);

    // brute force: identical definition with a 10x denser radius scan
    const double r_top = kInjectivityRadius / 4.0;
    const double cell = kPeriod / m;
    double osc_sup = 0.0, avg_sup = 0.0;
    auto ball_terms = [&](int ci, double r, double& osc, double& avg) {
        const double xc = cell * ci;
        Complex sum = 0.0;
        double vol = 0.0;
        for (int j = 0; j < m; ++j) {
            if (std::abs(wrap_displacement(cell * j - xc)) > r) continue;
            sum += saw.f[j] * cell;
            vol += cell;
        }
        const Complex mean = sum / vol;
        double dev = 0.0, mag = 0.0;
        for (int j = 0; j < m; ++j) {
            if (std::abs(wrap_displacement(cell * j - xc)) > r) continue;
            dev += std::abs(saw.f[j] - mean) * cell;
            mag += std::abs(saw.f[j]) * cell;
        }
        osc = dev / vol;
        avg = mag / vol;
    };
    for (int ci = 0; ci < m; ++ci) {
        for (int jr = 0; jr <= 60; ++jr) {
            const double r = r_top * std::pow(2.0, -jr / 10.0);
            if (2.0 * r < 4.0 * cell) break;
            double osc = 0.0, avg = 0.0;
            ball_terms(ci, r, osc, avg);
            osc_sup = std::max(osc_sup, osc);
            if (jr == 0) avg_sup = std::max(avg_sup, avg);
        }
    }
    const double brute = osc_sup + avg_sup;
    CHECK(fast == doctest::Approx(brute).epsilon(0.02));
}

TEST_CASE("Bessel multipliers: identity, eigenvalues, inverses, band pass-through") {
    auto u = sample1(64, [](double x) { return std::exp(Complex(0.0, 4.0 * x)); });
    auto same = bessel_apply(0.0, u, 8);
    for (std::size_t i = 0; i < u.f.size(); ++i) CHECK(std::abs(same.f[i] - u.f[i]) < 1e-12);

    auto b2 = bessel_apply(2.0, u, 8);
    for (std::size_t i = 0; i < u.f.size(); ++i)
        CHECK(std::abs(b2.f[i] - 17.0 * u.f[i]) < 1e-10);

    auto mixed = sample1(64, [](double x) {
        return std::exp(Complex(0.0, 2.0 * x)) - Complex(0.0, 0.5) * std::exp(Complex(0.0, -x));
    });
    auto round = bessel_apply(-1.3, bessel_apply(1.3, mixed, 8), 8);
    for (std::size_t i = 0; i < mixed.f.size(); ++i)
        CHECK(std::abs(round.f[i] - mixed.f[i]) < 1e-12);

    // modes beyond the band are untouched
    auto high = sample1(64, [](double x) { return std::exp(Complex(0.0, 12.0 * x)); });
    auto hb = bessel_apply(-2.0, high, 8);
    for (std::size_t i = 0; i < high.f.size(); ++i) CHECK(std::abs(hb.f[i] - high.f[i]) < 1e-10);

    auto curved = scaled_1d(2.0);
    CHECK_THROWS_AS(bessel_apply(1.0, u, 8, &curved), NotFlat);
}

TEST_CASE("Bessel smoothing norms are nonincreasing in the smoothing order") {
    auto flat = MetricField::euclidean(1);
    auto u = sample1(64, [](double x) {
        return std::exp(Complex(0.0, 5.0 * x)) + 0.7 * std::exp(Complex(0.0, -2.0 * x)) + 0.1;
    });
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
        const double v = lp_norm(bessel_apply(-s, u, 16), 2.0, flat);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("Laplace operator: flat eigenvalues, constant metric scaling, kappa guard") {
    auto flat = MetricField::euclidean(1);
    auto u = sample1(64, [](double x) { return std::exp(Complex(0.0, 3.0 * x)); });
    auto lu = laplace_beltrami_apply(flat, u);
    for (std::size_t i = 0; i < u.f.size(); ++i) CHECK(std::abs(lu.f[i] + 9.0 * u.f[i]) < 1e-9);

    auto quarter = scaled_1d(4.0);
    auto v = sample1(64, [](double x) { return std::exp(Complex(0.0, x)); });
    auto lv = laplace_beltrami_apply(quarter, v);
    for (std::size_t i = 0; i < v.f.size(); ++i)
        CHECK(std::abs(lv.f[i] + 0.25 * v.f[i]) < 1e-9);

    auto bad = sample1(64, [](double) { return Complex(1.0); }, 0.5);
    CHECK_THROWS_AS(laplace_beltrami_apply(flat, bad), KappaUnsupported);
}

TEST_CASE("Laplace operator matches the analytic formula on a warped metric") {
    auto m = warped();
    const int grid = 64;
    auto u = GridDensity::sample(2, grid, 0.0, [](const Point& y) {
        return Complex(std::sin(y[0]) * std::cos(y[1]), 0.0);
    });
    auto lu = laplace_beltrami_apply(m, u);
    auto f = [](double t) { return 2.0 + std::cos(t); };
    auto df = [](double t) { return -std::sin(t); };
    double worst = 0.0;
    for (std::size_t idx = 0; idx < lu.f.size(); ++idx) {
        const Point y = u.grid_point(idx);
        const double y0 = y[0], y1 = y[1];
        const double expected =
            (1.0 / f(y0)) * ((df(y0) * std::cos(y0) - f(y0) * std::sin(y0)) * std::cos(y1) -
                             (1.0 / f(y0)) * std::sin(y0) * std::cos(y1));
        worst = std::max(worst, std::abs(lu.f[idx] - expected));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("Laplace operator is self-adjoint in the volume-weighted pairing") {
    auto m = warped();
    const int grid = 32;
    auto u = GridDensity::sample(2, grid, 0.0, [](const Point& y) {
        return Complex(std::sin(y[0]), std::cos(2.0 * y[1]));
    });
    auto v = GridDensity::sample(2, grid, 0.0, [](const Point& y) {
        return Complex(std::cos(y[0] + y[1]), 0.3);
    });
    auto lu = laplace_beltrami_apply(m, u);
    auto lv = laplace_beltrami_apply(m, v);
    Complex lhs = 0.0, rhs = 0.0;
    const double cell = kPeriod / grid;
    for (std::size_t idx = 0; idx < u.f.size(); ++idx) {
        const double w = m.sqrt_det(u.grid_point(idx)) * cell * cell;
        lhs += lu.f[idx] * std::conj(v.f[idx]) * w;
        rhs += u.f[idx] * std::conj(lv.f[idx]) * w;
    }
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(lhs)));
}

TEST_CASE("ball volume growth fits a polynomial envelope on flat tori") {
    const std::vector<double> radii{0.5, 1.0, 2.0, 3.0};
    auto r1 = volume_growth_check(MetricField::euclidean(1), radii);
    CHECK(r1.pass);
    CHECK(r1.mu0 == doctest::Approx(1.0));
    CHECK(r1.k0 == doctest::Approx(0.0));
    CHECK(r1.c0 <= 2.0 + 1e-6);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(r1.volumes[i] <= r1.c0 * std::pow(1.0 + radii[i], r1.mu0) + 1e-9);
        CHECK(r1.volumes[i] == doctest::Approx(std::min(2.0 * radii[i], kPeriod)).epsilon(0.12));
    }

    auto r2 = volume_growth_check(MetricField::euclidean(2), radii, 48);
    CHECK(r2.pass);
    CHECK(r2.mu0 == doctest::Approx(2.0));
    // small radii on flat T^2: area of a euclidean disc
    CHECK(r2.volumes[0] == doctest::Approx(kPi * 0.25).epsilon(0.1));
}

TEST_CASE("ball volume growth passes on a warped metric") {
    auto rep = volume_growth_check(warped(), {0.5, 1.0, 2.0}, 32);
    CHECK(rep.pass);
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        CHECK(rep.volumes[i] <= rep.c0 * std::pow(1.0 + rep.radii[i], rep.mu0) + 1e-9);
}
