#pragma once

#include <cstdint>
#include <string>

#include "psidolab/quantize.hpp"

namespace psidolab::norms {

using quantize::KernelMatrix;

struct SizeCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NormEstimate {
    double p = 2.0;
    double q = 2.0;
    double value = 0.0;  // exact for dense-svd, a lower bound otherwise
    std::string method = "dense-svd";
    int iterations = 0;
    int restarts = 0;
    bool converged = true;
};

// Exact L2 -> L2 operator norm of the discretized operator: the largest
// singular value of W^{1/2} A W^{-1/2} with W the quadrature weights.
NormEstimate opnorm_dense(const KernelMatrix& k);

// Lower bound for the Lp -> Lq operator norm: nonlinear (Boyd-type) power
// iteration from random starts plus a modulated-bump trial family.
NormEstimate opnorm_lplq(const KernelMatrix& k, double p, double q, int restarts,
                         std::uint64_t seed = 1);

}  // namespace psidolab::norms
