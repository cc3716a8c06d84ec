#pragma once

#include <string>

#include "psidolab/experiments.hpp"

namespace psidolab::report {

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed %.12e formatting for cross-run byte stability.
std::string format_double(double v);

// CSV with the sweep schema: param,p,q,norm_lb,method,iterations,converged,seed.
std::string sweep_csv(const experiments::SweepReport& rep);

// Two-column (param, value) plot-ready data.
std::string sweep_gnuplot(const experiments::SweepReport& rep);

void write_file(const std::string& path, const std::string& content);

}  // namespace psidolab::report
