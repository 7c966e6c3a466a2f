#pragma once

// Directed communication: cut-balanced digraphs, type-symmetric stochastic
// steps, and the hovering condition that lets the twist reduction go
// through when edges are one-way.
//
// Digraphs are StepGraphs built with directed = true. An arc (i, j) means
// agent i listens to agent j, i.e. P(i, j) > 0.

#include <cstddef>
#include <optional>

#include "senergy/simulate.hpp"
#include "senergy/trace.hpp"

namespace senergy {

// Every weakly connected component is strongly connected. Undirected
// graphs are always cut-balanced.
bool is_cut_balanced(const StepGraph& g);

// P(i, j) > 0 iff P(j, i) > 0.
bool is_type_symmetric(const DenseMatrix& P);

// Off-diagonal support of P as a digraph.
StepGraph support_digraph(const DenseMatrix& P);

// For every gap between ranks i-1 and i with u < i <= v, some arc crosses
// the gap left to right and some arc crosses it right to left.
bool hovering_check(const StepGraph& g, const Configuration& x, Rank u, Rank v);

struct StochasticStep {
    DenseMatrix matrix;
    double rho_floor = 0.0;
    StepGraph support;

    // Throws PolicyError unless rows sum to 1 (1e-12), the diagonal is
    // positive and every positive entry is >= rho_floor. Without an explicit
    // floor the smallest positive entry is used, capped at 1/2 so it stays a
    // valid averaging parameter.
    static StochasticStep from_matrix(DenseMatrix P, std::optional<double> rho_floor = std::nullopt);
};

struct AsymStepResult {
    Configuration after;
    bool cut_balanced = true;
    bool type_symmetric = true;
};

// y = P x by agent id.
AsymStepResult asym_step(const Configuration& x, const StochasticStep& step);

struct DigraphModel {
    double arc_prob = 0.4;
    // true: symmetric support with asymmetric weights. false: random groups
    // each carrying a directed cycle plus extra one-way arcs.
    bool type_symmetric = true;
    double rho_target = 0.1;  // lower bound on every positive matrix entry
};

// Random cut-balanced digraph with out-degree at most floor(1/rho) - 1.
StepGraph random_cut_balanced(std::size_t n, const DigraphModel& model, Rng& rng);

struct StochasticRun {
    Trace trace;  // kind stochastic, asymmetric, params.rho = model.rho_target
    double min_rho_floor = 0.5;
    bool all_cut_balanced = true;
    bool all_type_symmetric = true;
    // Steps where some nondegenerate rank component failed hovering_check.
    std::size_t hovering_failures = 0;
};

StochasticRun stochastic_trajectory(const Configuration& initial, const DigraphModel& model,
                                    const SimulationLimits& limits, Rng& rng);

}  // namespace senergy
