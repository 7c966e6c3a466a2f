#include "senergy/simulate.hpp"

#include <algorithm>
#include <numeric>

#include "senergy/error.hpp"

namespace senergy {

const char* to_string(GraphModelKind kind) {
    switch (kind) {
        case GraphModelKind::erdos_renyi: return "erdos-renyi";
        case GraphModelKind::single_edge: return "single-edge";
        case GraphModelKind::complete: return "complete";
        case GraphModelKind::path: return "path";
    }
    return "?";
}

GraphModelKind parse_graph_model(const std::string& name) {
    for (auto k : {GraphModelKind::erdos_renyi, GraphModelKind::single_edge, GraphModelKind::complete,
                   GraphModelKind::path}) {
        if (name == to_string(k)) return k;
    }
    throw ParameterError("unknown graph model '" + name + "'");
}

StepGraph random_graph(const Configuration& x, const GraphModel& model, Rng& rng) {
    const std::size_t n = x.size();
    StepGraph g(n);
    if (n < 2) return g;
    switch (model.kind) {
        case GraphModelKind::erdos_renyi:
            for (AgentId a = 0; a < n; ++a) {
                for (AgentId b = a + 1; b < n; ++b) {
                    if (rng.bernoulli(model.edge_prob)) g.add(a, b);
                }
            }
            break;
        case GraphModelKind::single_edge: {
            const AgentId a = rng.below(n);
            AgentId b = rng.below(n - 1);
            if (b >= a) ++b;
            g.add(a, b);
            break;
        }
        case GraphModelKind::complete: g = StepGraph::complete(n); break;
        case GraphModelKind::path: {
            Rank lo = rng.below(n - 1);
            Rank hi = lo + 1 + rng.below(n - 1 - lo);
            for (Rank r = lo; r < hi; ++r) g.add(x.id_at(r), x.id_at(r + 1));
            break;
        }
    }
    return g;
}

Configuration random_configuration(std::size_t n, Rng& rng) {
    std::vector<double> pos(n);
    for (auto& p : pos) p = rng.uniform();
    if (n >= 2) {
        const AgentId low = rng.below(n);
        AgentId high = rng.below(n - 1);
        if (high >= low) ++high;
        pos[low] = 0.0;
        pos[high] = 1.0;
    }
    return Configuration(std::move(pos));
}

namespace {

// Drops edges (in random order) until every agent has at most
// floor(1/rho) - 1 neighbours, so a matrix with entries >= rho exists.
StepGraph prune_for_matrix(const StepGraph& g, double rho, Rng& rng) {
    const auto cap = static_cast<std::size_t>(1.0 / rho + 1e-12) - 1;
    auto pairs = g.pairs();
    for (std::size_t k = pairs.size(); k > 1; --k) std::swap(pairs[k - 1], pairs[rng.below(k)]);
    StepGraph out(g.size(), g.is_directed());
    std::vector<std::size_t> degree(g.size(), 0);
    for (auto [a, b] : pairs) {
        if (degree[a] < cap && (g.is_directed() || degree[b] < cap)) {
            out.add(a, b);
            ++degree[a];
            if (!g.is_directed()) ++degree[b];
        }
    }
    return out;
}

}  // namespace

DenseMatrix random_policy_matrix(const StepGraph& g, double rho, Rng& rng) {
    const std::size_t n = g.size();
    DenseMatrix P(n);
    for (AgentId i = 0; i < n; ++i) {
        auto support = g.neighbors(i);
        support.push_back(i);
        std::sort(support.begin(), support.end());
        const double free_mass = 1.0 - rho * static_cast<double>(support.size());
        if (free_mass < -1e-12) {
            throw PolicyError("agent " + std::to_string(i) + " has too many neighbours for entries >= rho");
        }
        std::vector<double> w(support.size());
        for (auto& v : w) v = rng.uniform();
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        double row = 0.0;
        AgentId largest = i;
        for (std::size_t k = 0; k < support.size(); ++k) {
            const double share = total > 0.0 ? w[k] / total : 1.0 / static_cast<double>(w.size());
            P(i, support[k]) = rho + std::max(free_mass, 0.0) * share;
            row += P(i, support[k]);
            if (P(i, support[k]) > P(i, largest)) largest = support[k];
        }
        // Rounding residue goes to the largest entry so no entry drops below rho.
        P(i, largest) += 1.0 - row;
    }
    return P;
}

Trace simulate(const Configuration& initial, const AveragingParams& params, const GraphModel& model,
               PolicyKind policy, const SimulationLimits& limits, Rng& rng) {
    Trace trace;
    trace.kind = TraceKind::averaging;
    trace.n = initial.size();
    trace.params = params;

    Configuration x = initial;
    for (;;) {
        if (x.diameter() < limits.diameter_cutoff) {
            trace.truncation = Truncation{trace.records.size(), "diameter"};
            break;
        }
        if (trace.records.size() >= limits.steps_cap) {
            trace.truncation = Truncation{trace.records.size(), "steps-cap"};
            break;
        }
        StepGraph g = random_graph(x, model, rng);
        Policy p{policy, {}};
        if (policy == PolicyKind::matrix) {
            g = prune_for_matrix(g, params.rho, rng);
            p.matrix = random_policy_matrix(g, params.rho, rng);
        }
        Configuration y = apply_policy(x, g, params, p, rng);
        TraceRecord rec;
        rec.t = trace.records.size();
        rec.graph = std::move(g);
        rec.before = x;
        rec.after = y;
        trace.records.push_back(std::move(rec));
        x = std::move(y);
    }
    return trace;
}

}  // namespace senergy
