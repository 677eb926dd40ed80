#pragma once

#include <string>
#include <vector>

#include "twinqft/fock.hpp"
#include "twinqft/propagator.hpp"

namespace twinqft {

// Shared configuration of every subcommand. Identical config and seed give
// byte-identical reports: nothing time- or host-dependent is ever emitted.
struct RunConfig {
    double mass = 1.0;
    int n_max = 4;
    double label_tol = 1e-9;
    double prune_tol = 1e-14;
    double rel_tol = 1e-6; // quadrature relative tolerance
    double epsilon = 1e-2; // top of the regulator ladder, units of the mass
    double k_max = 0.0;    // radial cutoff; 0 picks the automatic one
    int extrapolation_steps = 5;
    unsigned long long seed = 42;
    std::string out_dir = ".";
    std::vector<double> speeds = {0.3, 0.6, 0.9};
    int workers = 1;

    FockConfig fock() const { return {n_max, label_tol, prune_tol}; }
    QuadratureParams quadrature() const { return {epsilon, k_max, rel_tol, extrapolation_steps}; }

    void validate() const; // throws std::invalid_argument
};

// Accepts either flat "key = value" lines (# starts a comment) or a JSON
// object with the same keys; unknown keys are rejected. Command-line flags
// are applied after the file, so they win.
RunConfig config_from_file(const std::string& path);
void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value);

// "0.3,0.6,0.9" -> {0.3, 0.6, 0.9}; the empty string is the empty list.
std::vector<double> parse_speed_list(const std::string& text);

// Full command-line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv);

} // namespace twinqft
