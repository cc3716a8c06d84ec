#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "psidolab/geometry.hpp"

namespace psidolab::symbols {

using geometry::ConnectionField;
using geometry::MetricField;
using geometry::Point;
using geometry::Vec;

// A symbol a(y, eta) with its class metadata (m, rho, delta). Analytic
// gradient closures are optional; derivatives fall back to central finite
// differences whose step grows with the nesting depth fd_depth.
struct SymbolSpec {
    double m = 0.0;
    double rho = 1.0;
    double delta = 0.0;
    int n = 1;
    std::function<Complex(const Point&, const Vec&)> eval;
    std::function<std::array<Complex, 2>(const Point&, const Vec&)> deta;  // optional
    std::function<std::array<Complex, 2>(const Point&, const Vec&)> dy;    // optional
    int fd_depth = 0;
    std::string label = "symbol";
};

struct SeminormReport {
    int level = 0;
    double value = 0.0;
    int y_samples = 0;
    int shells = 0;
    int directions = 0;
    Point witness_y = Point::Zero();
    Vec witness_eta = Vec::Zero();
    std::array<int, 2> witness_alpha{0, 0};
    int witness_q = 0;
    double threshold = 0.0;
    bool pass = true;
};

struct MembershipReport {
    bool pass = false;
    double margin = 0.0;               // 1.1 - worst successive ratio
    std::vector<double> estimates;     // seminorm at eta_max, 2 eta_max, 4 eta_max
};

// <eta>_y = (1 + g^{ab}(y) eta_a eta_b)^{1/2}.
double weight(const MetricField& metric, const Point& y, const Vec& eta);

// Vertical derivative d/d eta_j; order metadata drops by rho.
SymbolSpec eta_partial(const SymbolSpec& a, int j);

// Horizontal lift along axis k: del_k a = d_{y^k} a + Gamma^i_{kj} eta_i d_{eta_j} a;
// order metadata rises by delta.
SymbolSpec horizontal_derivative(const SymbolSpec& a, const ConnectionField& conn, int k);

// Grid estimate (a lower bound) of
//   sup_{|alpha|+q <= l} sup_{y, eta} |d_eta^alpha del_{i_1..i_q} a| / <eta>^{m + delta q - rho |alpha|}
// with eta sampled on log-spaced shells 2^j up to eta_max.
SeminormReport seminorm_estimate(const SymbolSpec& a, const ConnectionField& conn,
                                 const MetricField& metric, int l, double eta_max,
                                 int y_samples_per_axis = 8,
                                 double threshold = 0.0);

SymbolSpec make_multiplier(std::function<Complex(const Vec&)> m_fun, double m, double rho,
                           double delta, int n = 1,
                           std::function<std::array<Complex, 2>(const Vec&)> grad = nullptr);

// e^{i |xi|^{1-rho}} / (1 + |xi|^theta) with a smooth cutoff vanishing for
// |xi| <= 1/2 and identically 1 for |xi| >= 1. Class S^{-theta}_{rho,0}.
SymbolSpec make_counterexample(double rho, double theta, int n = 1);

// (1 + |xi|^2)^{lambda/2}, order lambda, class S^lambda_{1,0}.
SymbolSpec make_bessel(double lambda, int n = 1);

// -|xi|^2_x + S(x)/3 for the Levi-Civita connection of `metric`.
SymbolSpec make_laplacian_symbol(const MetricField& metric);

// Seminorm sweep over eta_max doublings against the target class exponents;
// pass iff successive estimates grow by a ratio < 1.1.
MembershipReport class_membership_check(const SymbolSpec& a, double target_m, double target_rho,
                                        double target_delta, int l, double eta_max,
                                        const ConnectionField* conn = nullptr,
                                        const MetricField* metric = nullptr);

}  // namespace psidolab::symbols
