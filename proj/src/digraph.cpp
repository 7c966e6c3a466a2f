#include "senergy/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "senergy/error.hpp"

namespace senergy {

bool is_cut_balanced(const StepGraph& g) {
    if (!g.is_directed()) return true;
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Graph bg(g.size());
    for (auto [a, b] : g.pairs()) boost::add_edge(a, b, bg);
    std::vector<std::size_t> component(g.size());
    boost::strong_components(bg, boost::make_iterator_property_map(component.begin(),
                                                                   boost::get(boost::vertex_index, bg)));
    // Weak components are strongly connected iff no arc leaves its SCC.
    return std::all_of(g.pairs().begin(), g.pairs().end(),
                       [&](const StepGraph::Arc& arc) { return component[arc.first] == component[arc.second]; });
}

bool is_type_symmetric(const DenseMatrix& P) {
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (std::size_t j = i + 1; j < P.size(); ++j) {
            if ((P(i, j) > 0.0) != (P(j, i) > 0.0)) return false;
        }
    }
    return true;
}

StepGraph support_digraph(const DenseMatrix& P) {
    StepGraph g(P.size(), true);
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (std::size_t j = 0; j < P.size(); ++j) {
            if (i != j && P(i, j) > 0.0) g.add(i, j);
        }
    }
    return g;
}

bool hovering_check(const StepGraph& g, const Configuration& x, Rank u, Rank v) {
    if (v >= x.size() || u > v) throw ParameterError("hovering window outside the configuration");
    const auto ranks = x.ranks();
    for (Rank i = u + 1; i <= v; ++i) {
        bool rightward = false;
        bool leftward = false;
        for (auto [a, b] : g.pairs()) {
            const Rank ra = ranks[a];
            const Rank rb = ranks[b];
            const bool crosses_lr = ra < i && i <= rb;
            const bool crosses_rl = rb < i && i <= ra;
            if (g.is_directed()) {
                rightward = rightward || crosses_lr;
                leftward = leftward || crosses_rl;
            } else if (crosses_lr || crosses_rl) {
                rightward = leftward = true;
            }
        }
        if (!rightward || !leftward) return false;
    }
    return true;
}

StochasticStep StochasticStep::from_matrix(DenseMatrix P, std::optional<double> rho_floor) {
    const std::size_t n = P.size();
    double min_positive = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = P(i, j);
            if (!(w >= 0.0)) throw PolicyError("stochastic matrix has a negative entry in row " + std::to_string(i));
            if (w > 0.0) min_positive = std::min(min_positive, w);
            row += w;
        }
        if (std::abs(row - 1.0) > 1e-12) throw PolicyError("row " + std::to_string(i) + " does not sum to 1");
        if (!(P(i, i) > 0.0)) throw PolicyError("diagonal entry " + std::to_string(i) + " is not positive");
    }
    StochasticStep step;
    step.rho_floor = rho_floor ? *rho_floor : std::min(min_positive, 0.5);
    if (!(step.rho_floor > 0.0 && step.rho_floor <= 0.5)) throw ParameterError("rho floor must lie in (0, 1/2]");
    if (n > 0 && min_positive < step.rho_floor) {
        throw PolicyError("a positive entry lies below the rho floor");
    }
    step.support = support_digraph(P);
    step.matrix = std::move(P);
    return step;
}

AsymStepResult asym_step(const Configuration& x, const StochasticStep& step) {
    const std::size_t n = x.size();
    if (step.matrix.size() != n) throw DimensionError("matrix size differs from configuration");
    std::vector<double> y(n, 0.0);
    for (AgentId i = 0; i < n; ++i) {
        for (AgentId j = 0; j < n; ++j) y[i] += step.matrix(i, j) * x.position_of(j);
        // Convex combinations of [0, 1] values may round a hair outside.
        y[i] = std::clamp(y[i], 0.0, 1.0);
    }
    AsymStepResult out;
    out.after = x.advanced(std::move(y));
    out.cut_balanced = is_cut_balanced(step.support);
    out.type_symmetric = is_type_symmetric(step.matrix);
    return out;
}

StepGraph random_cut_balanced(std::size_t n, const DigraphModel& model, Rng& rng) {
    const auto cap = static_cast<std::size_t>(1.0 / model.rho_target + 1e-12) - 1;
    StepGraph g(n, true);
    std::vector<std::size_t> degree(n, 0);
    auto try_add = [&](AgentId a, AgentId b, bool both) {
        if (degree[a] >= cap || (both && degree[b] >= cap) || g.has_arc(a, b)) return;
        g.add(a, b);
        ++degree[a];
        if (both) {
            g.add(b, a);
            ++degree[b];
        }
    };
    if (model.type_symmetric) {
        for (AgentId a = 0; a < n; ++a) {
            for (AgentId b = a + 1; b < n; ++b) {
                if (rng.bernoulli(model.arc_prob)) try_add(a, b, true);
            }
        }
        return g;
    }
    // Random permutation cut into groups; each group of size >= 2 gets a
    // directed cycle when every member has room for one more out-arc.
    std::vector<AgentId> order(n);
    std::iota(order.begin(), order.end(), AgentId{0});
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    std::size_t start = 0;
    while (start < n) {
        const std::size_t len = 1 + rng.below(n - start);
        if (len >= 2 && cap >= 1) {
            for (std::size_t k = 0; k < len; ++k) {
                const AgentId a = order[start + k];
                const AgentId b = order[start + (k + 1) % len];
                if (!g.has_arc(a, b)) {
                    g.add(a, b);
                    ++degree[a];
                }
            }
            // Extra arcs inside the group keep it strongly connected.
            for (std::size_t p = 0; p < len; ++p) {
                for (std::size_t q = 0; q < len; ++q) {
                    if (p != q && rng.bernoulli(model.arc_prob * 0.5)) try_add(order[start + p], order[start + q], false);
                }
            }
        }
        start += len;
    }
    return g;
}

namespace {

// Maximal runs of ranks covered by the rank spans of the arcs.
std::vector<std::pair<Rank, Rank>> rank_components(const StepGraph& g, const Configuration& x) {
    const auto ranks = x.ranks();
    std::vector<std::pair<Rank, Rank>> spans;
    for (auto [a, b] : g.pairs()) spans.emplace_back(std::minmax(ranks[a], ranks[b]));
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<Rank, Rank>> merged;
    for (auto s : spans) {
        if (!merged.empty() && s.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, s.second);
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

}  // namespace

StochasticRun stochastic_trajectory(const Configuration& initial, const DigraphModel& model,
                                    const SimulationLimits& limits, Rng& rng) {
    StochasticRun run;
    run.trace.kind = TraceKind::stochastic;
    run.trace.n = initial.size();
    run.trace.params = AveragingParams(model.rho_target);
    run.trace.asymmetric = true;

    Configuration x = initial;
    for (;;) {
        if (x.diameter() < limits.diameter_cutoff) {
            run.trace.truncation = Truncation{run.trace.records.size(), "diameter"};
            break;
        }
        if (run.trace.records.size() >= limits.steps_cap) {
            run.trace.truncation = Truncation{run.trace.records.size(), "steps-cap"};
            break;
        }
        const StepGraph g = random_cut_balanced(x.size(), model, rng);
        auto step = StochasticStep::from_matrix(random_policy_matrix(g, model.rho_target, rng));
        auto result = asym_step(x, step);
        run.min_rho_floor = std::min(run.min_rho_floor, step.rho_floor);
        run.all_cut_balanced = run.all_cut_balanced && result.cut_balanced;
        run.all_type_symmetric = run.all_type_symmetric && result.type_symmetric;
        for (auto [u, v] : rank_components(step.support, x)) {
            if (x[v] > x[u] && !hovering_check(step.support, x, u, v)) {
                ++run.hovering_failures;
                break;
            }
        }
        TraceRecord rec;
        rec.t = run.trace.records.size();
        rec.graph = std::move(step.support);
        rec.matrix = std::move(step.matrix);
        rec.before = x;
        rec.after = result.after;
        run.trace.records.push_back(std::move(rec));
        x = std::move(result.after);
    }
    return run;
}

}  // namespace senergy
