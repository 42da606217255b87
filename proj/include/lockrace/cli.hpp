#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lockrace/params.hpp"

namespace lockrace::cli {

// Effective run configuration: builtin defaults, overridden by the
// LOCKRACE_SEED environment variable (seed only), then the config file,
// then command-line flags.
struct RunConfig {
    GameParams params;
    long reps = 1'000'000;
    std::uint64_t seed = 42;
    int n_segments = 40;
    double grid_h = 1e-3;
    std::string format = "human";  // human | json | csv
    std::string out;               // empty -> stdout
};

// Flat JSON object with keys: beta_i, beta_j, nu, horizon, locks, n_agents,
// reps, seed, n_segments, grid_h, format, out.  Unknown keys are rejected;
// parse errors cite the location, invariant violations cite the field.
RunConfig load_config(const std::string& path);

// Exit status: 0 success, 1 validation error, 2 certification failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lockrace::cli
