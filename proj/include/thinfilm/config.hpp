#pragma once

// Run configuration: documented defaults for every knob, a JSON config-file
// tree whose keys mirror the flag names, and strict merging with flag
// precedence. Unknown keys are rejected with their full path.

#include <string>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/evolve.hpp"

namespace thinfilm {

struct RunConfig {
    std::string command; // constants | steady | evolve | classify | sweep
    ModelParams params;  // m = 4, M = 1
    double height = 0.0; // steady: build by height instead of mass (> 0)
    double lambda = 1.0; // dilation of the steady initial datum
    std::string initial_kind = "dilated"; // dilated | gaussian | file
    double sigma = 1.0;
    std::string initial_file;
    int grid_n = 1024;
    double grid_half_width = 0.0; // <= 0: factor-4 auto sizing
    SolverConfig solver;
    std::vector<double> sweep_m;
    std::vector<double> sweep_lambda;
    std::string output_dir; // empty: constants prints to stdout only
    long seed = 0;          // echoed into the manifest; reserved
    bool overwrite = false;
    int jobs = 1;

    InitialSpec initial_spec() const;
    std::string echo_json() const; // resolved config, config-file schema
};

// Thrown for --help / --version so the driver can print and exit 0.
struct HelpRequested {
    std::string text;
};

// Merges defaults, then the --config file, then the flags (flags win).
// Throws ConfigError on unknown keys, malformed values, or invariant
// violations; HelpRequested for --help.
RunConfig parse_config(const std::vector<std::string>& args);

} // namespace thinfilm
