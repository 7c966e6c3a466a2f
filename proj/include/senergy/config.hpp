#pragma once

// Run configuration: a flat JSON object, every key optional. See
// docs/config.md for the key list.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace senergy {

struct RunConfig {
    std::size_t n = 5;
    double rho = 0.25;
    std::vector<double> s = {0.5, 1.0};
    std::vector<double> eps = {0.01};
    std::string policy = "midpoint";
    std::string graph = "erdos-renyi";
    double edge_prob = 0.3;
    std::string dynamics = "averaging";  // or "stochastic"
    bool type_symmetric = true;
    std::size_t steps_cap = 100'000;
    double diameter_cutoff = 1e-12;
    std::uint64_t seed = 1;

    // opinion
    std::size_t d = 2;
    double alpha = 0.5;
    std::string squeeze = "uniform";

    // kuramoto
    double coupling = 0.5;
    double margin = 0.1;
};

// Throws ParameterError on malformed JSON, unknown keys or wrong types.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace senergy
