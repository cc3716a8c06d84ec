#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace psidolab::runner {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

// Throws ConfigInvalid on a malformed config ("missing field: X", ...).
void validate_config_file(const std::string& path);

// Executes the experiment named in the config; writes report.json plus
// per-sweep CSV and plot data. Returns 0 on pass verdicts, 2 on fail verdicts.
int run_config(const RunOptions& opts);

}  // namespace psidolab::runner
