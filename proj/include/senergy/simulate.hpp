#pragma once

// Trajectory generation for averaging systems: random graph sequences, a
// policy per step, truncation at a diameter threshold or a step cap.

#include <cstddef>
#include <string>

#include "senergy/core.hpp"
#include "senergy/trace.hpp"

namespace senergy {

enum class GraphModelKind {
    erdos_renyi,  // each pair independently with probability edge_prob
    single_edge,  // one uniformly random pair
    complete,
    path,         // random contiguous rank range joined as a path
};

const char* to_string(GraphModelKind kind);
GraphModelKind parse_graph_model(const std::string& name);

struct GraphModel {
    GraphModelKind kind = GraphModelKind::erdos_renyi;
    double edge_prob = 0.3;
};

struct SimulationLimits {
    std::size_t steps_cap = 1'000'000;
    double diameter_cutoff = 1e-12;
};

StepGraph random_graph(const Configuration& x, const GraphModel& model, Rng& rng);

// n positions uniform in [0, 1], with one agent pinned at 0 and one at 1 so
// the initial diameter is 1 (n >= 2).
Configuration random_configuration(std::size_t n, Rng& rng);

// Random row-stochastic matrix supported on g (self-loops included) whose
// positive entries are all >= rho.
DenseMatrix random_policy_matrix(const StepGraph& g, double rho, Rng& rng);

// Runs until the diameter falls below the cutoff or the cap is reached. The
// returned trace always carries a truncation marker. For the matrix policy a
// fresh random matrix consistent with each step's graph is drawn.
Trace simulate(const Configuration& initial, const AveragingParams& params, const GraphModel& model,
               PolicyKind policy, const SimulationLimits& limits, Rng& rng);

}  // namespace senergy
