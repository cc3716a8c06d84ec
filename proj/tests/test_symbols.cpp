#include <cmath>

#include "doctest.h"
#include "psidolab/symbols.hpp"

using namespace psidolab;
using namespace psidolab::symbols;
using geometry::Christoffel;
using geometry::Mat;

namespace {

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
    m.label = "scaled";
    return m;
}

ConnectionField constant_1d(double k0) {
    Christoffel g{};
    g(0, 0, 0) = k0;
    return ConnectionField::constant(1, g);
}

Vec eta1(double v) {
    Vec e = Vec::Zero();
    e[0] = v;
    return e;
}

}  // namespace

TEST_CASE("weight examples") {
    auto flat1 = MetricField::euclidean(1);
    auto flat2 = MetricField::euclidean(2);
    const Point y = Point::Zero();
    CHECK(weight(flat1, y, Vec::Zero()) == doctest::Approx(1.0));
    Vec e;
    e << std::sqrt(3.0) / std::sqrt(2.0), std::sqrt(3.0) / std::sqrt(2.0);
    CHECK(weight(flat2, y, e) == doctest::Approx(2.0));
    // inverse metric g^{11} = 4 means g_11 = 1/4
    CHECK(weight(scaled_1d(0.25), y, eta1(1.0)) == doctest::Approx(std::sqrt(5.0)));
    CHECK(weight(flat2, y, e) >= 1.0);
}

TEST_CASE("horizontal derivative: constants, pure y-dependence, connection lift") {
    auto a = make_multiplier([](const Vec&) { return Complex(3.0, 0.0); }, 0.0, 1.0, 0.0, 1);
    auto flat = ConnectionField::zero(1);
    auto da = horizontal_derivative(a, flat, 0);
    const Point y = Point::Zero();
    CHECK(std::abs(da.eval(y, eta1(2.0))) < 1e-8);

    SymbolSpec c;
    c.n = 1;
    c.eval = [](const Point& p, const Vec&) { return Complex(std::sin(p[0]), 0.0); };
    auto dc = horizontal_derivative(c, flat, 0);
    Point p = Point::Zero();
    p[0] = 0.7;
    CHECK(dc.eval(p, eta1(1.0)).real() == doctest::Approx(std::cos(0.7)).epsilon(1e-6));

    // a = 1 + eta^2 with Gamma = k0: the lift contributes k0 * eta * 2 eta.
    const double k0 = 0.4;
    SymbolSpec w2;
    w2.n = 1;
    w2.m = 2.0;
    w2.eval = [](const Point&, const Vec& eta) { return Complex(1.0 + eta[0] * eta[0], 0.0); };
    auto dw = horizontal_derivative(w2, constant_1d(k0), 0);
    for (double e : {0.5, 1.0, 3.0}) {
        CHECK(dw.eval(Point::Zero(), eta1(e)).real() ==
              doctest::Approx(2.0 * k0 * e * e).epsilon(1e-5));
    }
    CHECK(dw.m == doctest::Approx(w2.m + w2.delta));
}

TEST_CASE("seminorm of the constant symbol is one") {
    auto a = make_multiplier([](const Vec&) { return Complex(1.0, 0.0); }, 0.0, 1.0, 0.0, 1);
    auto rep = seminorm_estimate(a, ConnectionField::zero(1), MetricField::euclidean(1), 2, 16.0);
    CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.pass);
}

TEST_CASE("seminorms of weight powers stay finite with polynomial growth in the exponent") {
    double prev = 0.0;
    for (double gamma : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        auto a = make_bessel(gamma, 1);
        auto rep =
            seminorm_estimate(a, ConnectionField::zero(1), MetricField::euclidean(1), 3, 32.0);
        CHECK(std::isfinite(rep.value));
        CHECK(rep.value >= 1.0 - 1e-9);
        CHECK(rep.value < 20.0 * (1.0 + gamma * gamma));  // generous polynomial envelope
        prev = rep.value;
    }
    (void)prev;
}

TEST_CASE("seminorm estimates are monotone in the level") {
    auto a = make_bessel(-1.0, 1);
    auto flat = ConnectionField::zero(1);
    auto metric = MetricField::euclidean(1);
    double last = -1.0;
    for (int l = 0; l <= 3; ++l) {
        auto rep = seminorm_estimate(a, flat, metric, l, 16.0);
        CHECK(rep.value >= last - 1e-12);
        last = rep.value;
    }
}

TEST_CASE("level-zero seminorm of a product is submultiplicative") {
    auto a = make_bessel(-0.5, 1);
    auto b = make_counterexample(0.5, 0.25, 1);
    SymbolSpec ab;
    ab.n = 1;
    ab.m = a.m + b.m;
    ab.rho = 0.5;
    auto ae = a.eval, be = b.eval;
    ab.eval = [ae, be](const Point& y, const Vec& eta) { return ae(y, eta) * be(y, eta); };
    auto flat = ConnectionField::zero(1);
    auto metric = MetricField::euclidean(1);
    const double na = seminorm_estimate(a, flat, metric, 0, 32.0).value;
    const double nb = seminorm_estimate(b, flat, metric, 0, 32.0).value;
    const double nab = seminorm_estimate(ab, flat, metric, 0, 32.0).value;
    CHECK(nab <= na * nb * (1.0 + 1e-9));
}

TEST_CASE("oscillating multiplier evaluates to the expected modulus and phase") {
    auto a = make_counterexample(0.5, 0.25, 1);
    const Complex v = a.eval(Point::Zero(), eta1(16.0));
    CHECK(std::abs(v) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::arg(v) == doctest::Approx(4.0 - kPeriod).epsilon(1e-12));  // e^{i4}

    // theta = 0 keeps the 1/(1 + r^theta) = 1/2 amplitude
    auto a0 = make_counterexample(0.5, 0.0, 1);
    CHECK(std::abs(a0.eval(Point::Zero(), eta1(1.0)) - 0.5 * std::exp(Complex(0.0, 1.0))) < 1e-12);

    // the cutoff kills the symbol near the origin
    CHECK(std::abs(a.eval(Point::Zero(), eta1(0.25))) < 1e-12);
    CHECK_THROWS_AS(make_counterexample(1.5, 0.0, 1), BadParams);
    CHECK_THROWS_AS(make_counterexample(0.0, 0.0, 1), BadParams);
}

TEST_CASE("bessel multiplier values and analytic gradient") {
    auto b2 = make_bessel(2.0, 1);
    CHECK(b2.eval(Point::Zero(), eta1(3.0)).real() == doctest::Approx(10.0));
    auto b0 = make_bessel(0.0, 1);
    CHECK(b0.eval(Point::Zero(), eta1(7.0)).real() == doctest::Approx(1.0));
    auto bm2 = make_bessel(-2.0, 1);
    CHECK((b2.eval(Point::Zero(), eta1(5.0)) * bm2.eval(Point::Zero(), eta1(5.0))).real() ==
          doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(b2.deta);
    const double h = 1e-6, e0 = 1.7;
    const Complex fd =
        (b2.eval(Point::Zero(), eta1(e0 + h)) - b2.eval(Point::Zero(), eta1(e0 - h))) / (2.0 * h);
    CHECK(std::abs(b2.deta(Point::Zero(), eta1(e0))[0] - fd) < 1e-5);
}

TEST_CASE("laplacian symbol: flat, scaled, and curved metrics") {
    auto flat = make_laplacian_symbol(MetricField::euclidean(1));
    CHECK(flat.eval(Point::Zero(), eta1(3.0)).real() == doctest::Approx(-9.0).epsilon(1e-8));

    auto scaled = make_laplacian_symbol(scaled_1d(4.0));
    CHECK(scaled.eval(Point::Zero(), eta1(2.0)).real() ==
          doctest::Approx(-4.0 / 4.0).epsilon(1e-8));

    auto warped = MetricField::warped_product([](double t) { return 2.0 + std::cos(t); },
                                              [](double t) { return -std::sin(t); },
                                              [](double t) { return -std::cos(t); });
    auto lap = make_laplacian_symbol(warped);
    Point p;
    p << 0.9, 1.2;
    CHECK(lap.eval(p, Vec::Zero()).real() ==
          doctest::Approx(geometry::scalar_curvature(warped, p) / 3.0).epsilon(1e-6));
}

TEST_CASE("class membership: constants pass, first-order symbols fail order zero") {
    auto flat = ConnectionField::zero(1);
    auto metric = MetricField::euclidean(1);
    auto one = make_multiplier([](const Vec&) { return Complex(1.0, 0.0); }, 0.0, 1.0, 0.0, 1);
    CHECK(class_membership_check(one, 0.0, 1.0, 0.0, 2, 16.0, &flat, &metric).pass);

    auto deriv = make_multiplier([](const Vec& e) { return Complex(0.0, e[0]); }, 0.0, 1.0, 0.0, 1);
    CHECK_FALSE(class_membership_check(deriv, 0.0, 1.0, 0.0, 1, 16.0, &flat, &metric).pass);
}

TEST_CASE("class membership separates the true decay rate of the oscillating multiplier") {
    auto flat = ConnectionField::zero(1);
    auto metric = MetricField::euclidean(1);
    auto a = make_counterexample(1.0 / 3.0, 0.3, 1);
    CHECK(class_membership_check(a, -0.3, 1.0 / 3.0, 0.0, 2, 16.0, &flat, &metric).pass);
    CHECK_FALSE(class_membership_check(a, -0.3, 2.0 / 3.0, 0.0, 2, 16.0, &flat, &metric).pass);
}

TEST_CASE("vertical derivative lowers the order bookkeeping by rho") {
    auto a = make_bessel(1.0, 1);
    auto da = eta_partial(a, 0);
    CHECK(da.m == doctest::Approx(a.m - a.rho));
    // d/d eta <eta> = eta / <eta>
    const double e0 = 2.0;
    CHECK(da.eval(Point::Zero(), eta1(e0)).real() ==
          doctest::Approx(e0 / std::sqrt(1.0 + e0 * e0)).epsilon(1e-6));
}
