#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace psidolab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kPeriod = 2.0 * kPi;

using Complex = std::complex<double>;

// Wraps a chart displacement to the shortest periodic representative in (-pi, pi].
inline double wrap_displacement(double d) {
    d = std::fmod(d, kPeriod);
    if (d <= -kPi) d += kPeriod;
    if (d > kPi) d -= kPeriod;
    return d;
}

// Wraps a chart coordinate into [0, 2pi).
inline double wrap_coordinate(double x) {
    x = std::fmod(x, kPeriod);
    if (x < 0.0) x += kPeriod;
    return x;
}

struct BadParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Number of worker threads: explicit request, then PSIDOLAB_THREADS, then hardware.
int worker_count(int requested = 0);

// Runs fn(i) for i in [0, count) on up to worker_count(threads) threads.
// Iterations must be independent; results must not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

// Exact rational arithmetic on 64-bit numerator/denominator, always normalized
// with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d);

    static Rational from_double(double x, std::int64_t max_den = 1000000);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }
};

// Least-squares slope of y against x; requires x.size() == y.size() >= 2.
// Returns {slope, intercept, rms residual}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace psidolab
