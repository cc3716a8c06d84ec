#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "psidolab/norms.hpp"
#include "psidolab/spaces.hpp"

namespace psidolab::experiments {

using geometry::ConnectionField;
using geometry::MetricField;
using norms::NormEstimate;
using symbols::SymbolSpec;

struct BadExponents : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Admissible Lebesgue range |1/p - 1/2| <= theta / (n (1 - rho)) in exact
// rational arithmetic; the boundary order theta >= n(1-rho)/2 (or rho = 1)
// degenerates to the open full range (1, infinity).
struct PInterval {
    bool full_open = false;  // (1, infinity)
    Rational p_min{2, 1};
    Rational p_max{2, 1};
    std::string str() const;
};

PInterval fefferman_interval(int n, const Rational& rho, const Rational& theta);

struct ShiftAdmissibility {
    bool ok = false;
    Rational theta_eff{0, 1};
    PInterval interval;  // valid when theta_eff >= 0
};

// Order-shift arithmetic with effective order theta_eff = theta + s1 - s2.
ShiftAdmissibility sobolev_shift_admissible(int n, const Rational& rho, const Rational& theta,
                                            const Rational& s1, const Rational& s2);

struct LpLqVerdict {
    bool admissible = false;
    char branch = 'A';
    Rational lhs{0, 1};  // normalized condition lhs <= theta
    std::string printed_sign_note;
};

LpLqVerdict lplq_admissible(int n, const Rational& rho, const Rational& theta, const Rational& p,
                            const Rational& q);

struct SweepPoint {
    double param = 0.0;
    NormEstimate estimate;
    std::uint64_t seed = 0;
};

struct SweepReport {
    std::string swept = "N";
    std::vector<SweepPoint> points;
    double slope = 0.0;      // log-log fit over the last ceil(n/2) points
    double residual = 0.0;
    bool slope_valid = false;
    std::string verdict;     // "pass" / "fail" (+ context)
    bool pass = false;
    std::map<std::string, double> thresholds;
    std::uint64_t seed = 0;
};

// Geometry self-checks: finite differences of the transport matrix and of the
// density factor at the diagonal against the Christoffel coefficients.
struct GeometryCheckReport {
    double transport_residual = 0.0;
    double determinant_residual = 0.0;
    double reciprocity_residual = 0.0;
    bool pass = false;
};

GeometryCheckReport geometry_identity_probe(const ConnectionField& conn, int sample_points = 5);

// Dense L2 norms across the cutoff sweep; pass iff max/median < 1.5.
SweepReport l2_uniformity_probe(const SymbolSpec& a, const MetricField& metric,
                                const ConnectionField& conn, const std::vector<int>& n_list);

// Lower-bound Lp norm growth of the truncated oscillating multiplier.
SweepReport sharpness_sweep(double rho, double theta, double p, const std::vector<int>& n_list,
                            std::uint64_t seed);

struct SobolevProbeReport {
    std::vector<int> bands;
    std::vector<double> ratios;  // sup over trials of ||B^{-s}u||_q / ||u||_p
    double growth = 0.0;         // ratio at the last band / ratio at the first
    bool admissible = false;     // arithmetic verdict n(1/p - 1/q) <= s
    bool bounded = false;        // growth < 1.2
    bool pass = false;           // bounded iff admissible
    std::uint64_t seed = 0;
};

SobolevProbeReport sobolev_embedding_probe(double s, double p, double q, int trials,
                                           std::uint64_t seed,
                                           const std::vector<int>& bands = {32, 64, 128});

struct BmoProbeReport {
    std::vector<int> bands;
    std::vector<double> bmo_values;   // sup over trials per band
    double growth = 0.0;
    std::vector<int> rings;
    std::vector<double> ring_norms;   // exact L-infinity operator norms
    double ring_spread = 0.0;         // max/median over rings
    bool pass = false;
    std::uint64_t seed = 0;
};

// L-infinity -> BMO boundedness probe for a symbol of order -n(1-rho)/2,
// plus the ring-localized L-infinity -> L-infinity uniform bound.
BmoProbeReport bmo_probe(const SymbolSpec& a, double rho, int trials, std::uint64_t seed,
                         const std::vector<int>& bands = {16, 32, 64},
                         const std::vector<int>& rings = {8, 16, 32});

// Residual decay of the two-term composition expansion on e^{ikx}.
SweepReport composition_residual_probe(const SymbolSpec& a, const SymbolSpec& b,
                                       const std::vector<int>& k_list);

}  // namespace psidolab::experiments
