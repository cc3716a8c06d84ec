#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "psidolab/common.hpp"

using namespace psidolab;

TEST_CASE("wrap_displacement maps to the shortest representative in (-pi, pi]") {
    CHECK(wrap_displacement(0.3) == doctest::Approx(0.3));
    CHECK(wrap_displacement(6.1) == doctest::Approx(6.1 - kPeriod));
    CHECK(wrap_displacement(-6.1) == doctest::Approx(kPeriod - 6.1));
    CHECK(wrap_displacement(kPi) == doctest::Approx(kPi));
    CHECK(wrap_displacement(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_displacement(3.0 * kPeriod + 0.25) == doctest::Approx(0.25));
}

TEST_CASE("wrap_coordinate maps into [0, 2pi)") {
    CHECK(wrap_coordinate(-0.5) == doctest::Approx(kPeriod - 0.5));
    CHECK(wrap_coordinate(kPeriod + 1.0) == doctest::Approx(1.0));
    CHECK(wrap_coordinate(0.0) == doctest::Approx(0.0));
}

TEST_CASE("Rational arithmetic is exact and normalized") {
    Rational a(1, 2), b(1, 3);
    CHECK((a + b) == Rational(5, 6));
    CHECK((a - b) == Rational(1, 6));
    CHECK((a * b) == Rational(1, 6));
    CHECK((a / b) == Rational(3, 2));
    CHECK(Rational(4, -8) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0, 1));
    CHECK(a < Rational(2, 3));
    CHECK(a >= Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(1, 3));
    CHECK(Rational(7, 3).str() == "7/3");
    CHECK(Rational(4, 2).str() == "2");
}

TEST_CASE("Rational::from_double recovers simple fractions") {
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    CHECK(Rational::from_double(1.0 / 3.0) == Rational(1, 3));
    CHECK(Rational::from_double(0.125) == Rational(1, 8));
    CHECK(Rational::from_double(-0.2) == Rational(-1, 5));
    CHECK(Rational::from_double(2.0) == Rational(2, 1));
}

TEST_CASE("Rational rejects a zero denominator") {
    CHECK_THROWS_AS(Rational(1, 0), BadParams);
}

TEST_CASE("least_squares_line fits an exact line with zero residual") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{3.0, 5.0, 7.0, 9.0};
    const auto fit = least_squares_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.residual == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("parallel_for visits every index exactly once") {
    const std::size_t count = 10007;
    std::vector<std::atomic<int>> hits(count);
    parallel_for(count, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (std::size_t i = 0; i < count; ++i) CHECK(hits[i].load() == 1);
}

TEST_CASE("parallel_for propagates worker exceptions") {
    CHECK_THROWS_AS(
        parallel_for(64, [](std::size_t i) {
            if (i == 17) throw std::runtime_error("boom");
        }),
        std::runtime_error);
}

TEST_CASE("worker_count honors an explicit request") {
    CHECK(worker_count(3) == 3);
    CHECK(worker_count(1) == 1);
    CHECK(worker_count(0) >= 1);
}
